//! Phase-space state, the target evaluation contract, and Hamiltonian primitives.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// A point `(θ, p)` of the extended phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub theta: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(theta: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if theta.len() != p.len() {
            return Err(Error::DimensionMismatch { expected: theta.len(), found: p.len() });
        }
        if theta.is_empty() {
            return Err(Error::InvalidArgument("phase point must have dimension >= 1".into()));
        }
        Ok(Self { theta, p })
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    /// The momentum flip `F(θ, p) = (θ, −p)`.
    pub fn flipped(&self) -> Self {
        Self { theta: self.theta.clone(), p: self.p.iter().map(|v| -v).collect() }
    }

    pub fn is_finite(&self) -> bool {
        self.theta.iter().chain(&self.p).all(|v| v.is_finite())
    }
}

/// Identity or diagonal mass matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum MassSpec {
    Identity,
    Diagonal(Vec<f64>),
}

impl MassSpec {
    pub fn diagonal(diag: Vec<f64>) -> Result<Self> {
        if let Some(i) = diag.iter().position(|m| !(*m > 0.0) || !m.is_finite()) {
            return Err(Error::InvalidArgument(format!("mass entry {i} must be positive and finite")));
        }
        Ok(MassSpec::Diagonal(diag))
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            MassSpec::Identity => Ok(()),
            MassSpec::Diagonal(d) if d.len() != dim => {
                Err(Error::DimensionMismatch { expected: dim, found: d.len() })
            }
            MassSpec::Diagonal(d) => MassSpec::diagonal(d.clone()).map(|_| ()),
        }
    }

    #[inline]
    pub fn mass(&self, i: usize) -> f64 {
        match self {
            MassSpec::Identity => 1.0,
            MassSpec::Diagonal(d) => d[i],
        }
    }

    /// `M⁻¹ v`.
    pub fn inv_mul(&self, v: &[f64]) -> Vec<f64> {
        match self {
            MassSpec::Identity => v.to_vec(),
            MassSpec::Diagonal(d) => v.iter().zip(d).map(|(x, m)| x / m).collect(),
        }
    }

    /// `aᵀ M⁻¹ b`.
    pub fn inv_dot(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            MassSpec::Identity => dot(a, b),
            MassSpec::Diagonal(d) => a.iter().zip(b).zip(d).map(|((x, y), m)| x * y / m).sum(),
        }
    }
}

/// Which analytic derivatives a model provides beyond the gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Capabilities {
    pub has_hessian: bool,
    pub has_third: bool,
    pub has_fourth: bool,
    /// `U` is quadratic, so every derivative above the second vanishes.
    pub quadratic: bool,
}

/// Evaluation contract for a target density `π(θ) ∝ exp(−U(θ))`.
///
/// Higher derivative tensors are only exposed through contractions. Implementations
/// must be free of interior mutability so that chains can share them.
pub trait TargetModel: Send + Sync {
    fn dim(&self) -> usize;

    fn capabilities(&self) -> Capabilities {
        Capabilities::default()
    }

    /// Potential `U(θ)`.
    fn potential(&self, theta: &[f64]) -> Result<f64>;

    /// Potential and gradient; the gradient is written into `grad`.
    fn potential_and_gradient(&self, theta: &[f64], grad: &mut [f64]) -> Result<f64>;

    /// Hessian-vector product `U_θθ(θ) v`.
    fn hessian_vector(&self, _theta: &[f64], _v: &[f64], _out: &mut [f64]) -> Result<()> {
        Err(Error::MissingCapability("a Hessian"))
    }

    /// Third-derivative contraction `Σ_jk U_ijk v_j v_k`, written into `out`.
    fn third_contraction(&self, _theta: &[f64], _v: &[f64], out: &mut [f64]) -> Result<()> {
        if self.capabilities().quadratic {
            out.iter_mut().for_each(|o| *o = 0.0);
            return Ok(());
        }
        Err(Error::MissingCapability("third derivatives"))
    }

    /// Fourth-derivative contraction `Σ U_ijkl v_i v_j v_k v_l`.
    fn fourth_contraction(&self, _theta: &[f64], _v: &[f64]) -> Result<f64> {
        if self.capabilities().quadratic {
            return Ok(0.0);
        }
        Err(Error::MissingCapability("fourth derivatives"))
    }

    /// Starting position for chains.
    fn initial_position(&self) -> Vec<f64> {
        vec![0.0; self.dim()]
    }
}

impl<T: TargetModel + ?Sized> TargetModel for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn capabilities(&self) -> Capabilities {
        (**self).capabilities()
    }
    fn potential(&self, theta: &[f64]) -> Result<f64> {
        (**self).potential(theta)
    }
    fn potential_and_gradient(&self, theta: &[f64], grad: &mut [f64]) -> Result<f64> {
        (**self).potential_and_gradient(theta, grad)
    }
    fn hessian_vector(&self, theta: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        (**self).hessian_vector(theta, v, out)
    }
    fn third_contraction(&self, theta: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        (**self).third_contraction(theta, v, out)
    }
    fn fourth_contraction(&self, theta: &[f64], v: &[f64]) -> Result<f64> {
        (**self).fourth_contraction(theta, v)
    }
    fn initial_position(&self) -> Vec<f64> {
        (**self).initial_position()
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Returns an evaluation error naming the first non-finite entry.
pub(crate) fn ensure_finite(values: &[f64], what: &str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::eval(Some(i), format!("non-finite {what}"))),
        None => Ok(()),
    }
}

/// `K(p) = ½ pᵀM⁻¹p`.
pub fn kinetic_energy(p: &[f64], mass: &MassSpec) -> Result<f64> {
    if let MassSpec::Diagonal(d) = mass {
        check_dim(d.len(), p.len())?;
    }
    Ok(0.5 * mass.inv_dot(p, p))
}

/// `H(θ, p) = U(θ) + K(p)`.
pub fn true_hamiltonian<M: TargetModel + ?Sized>(x: &PhasePoint, model: &M, mass: &MassSpec) -> Result<f64> {
    check_dim(model.dim(), x.dim())?;
    ensure_finite(&x.theta, "position")?;
    let u = model.potential(&x.theta)?;
    if !u.is_finite() {
        return Err(Error::eval(None, "potential is not finite"));
    }
    Ok(u + kinetic_energy(&x.p, mass)?)
}

/// Draws `p ~ N(0, M)`.
pub fn draw_momentum<R: Rng + ?Sized>(mass: &MassSpec, dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim)
        .map(|i| {
            let z: f64 = rng.sample(StandardNormal);
            z * mass.mass(i).sqrt()
        })
        .collect()
}

/// Dense Hessian assembled column by column from Hessian-vector products.
pub fn dense_hessian<M: TargetModel + ?Sized>(model: &M, theta: &[f64]) -> Result<DMatrix<f64>> {
    let d = model.dim();
    let mut h = DMatrix::zeros(d, d);
    let mut e = vec![0.0; d];
    let mut col = vec![0.0; d];
    for j in 0..d {
        e[j] = 1.0;
        model.hessian_vector(theta, &e, &mut col)?;
        for i in 0..d {
            h[(i, j)] = col[i];
        }
        e[j] = 0.0;
    }
    Ok(h)
}

/// Central finite-difference gradient of the potential.
pub fn finite_difference_gradient<M: TargetModel + ?Sized>(model: &M, theta: &[f64], step: f64) -> Result<Vec<f64>> {
    let mut x = theta.to_vec();
    let mut g = vec![0.0; theta.len()];
    for i in 0..theta.len() {
        let orig = x[i];
        x[i] = orig + step;
        let up = model.potential(&x)?;
        x[i] = orig - step;
        let down = model.potential(&x)?;
        x[i] = orig;
        g[i] = (up - down) / (2.0 * step);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    struct Harmonic1;
    impl TargetModel for Harmonic1 {
        fn dim(&self) -> usize {
            1
        }
        fn potential(&self, t: &[f64]) -> Result<f64> {
            Ok(0.5 * t[0] * t[0])
        }
        fn potential_and_gradient(&self, t: &[f64], g: &mut [f64]) -> Result<f64> {
            g[0] = t[0];
            Ok(0.5 * t[0] * t[0])
        }
    }

    struct Flat;
    impl TargetModel for Flat {
        fn dim(&self) -> usize {
            2
        }
        fn potential(&self, _: &[f64]) -> Result<f64> {
            Ok(0.0)
        }
        fn potential_and_gradient(&self, _: &[f64], g: &mut [f64]) -> Result<f64> {
            g.iter_mut().for_each(|v| *v = 0.0);
            Ok(0.0)
        }
    }

    #[test]
    fn kinetic_energy_examples() {
        assert_eq!(kinetic_energy(&[0.0; 4], &MassSpec::Identity).unwrap(), 0.0);
        assert_eq!(kinetic_energy(&[3.0], &MassSpec::Identity).unwrap(), 4.5);
        let m = MassSpec::diagonal(vec![4.0]).unwrap();
        assert_eq!(kinetic_energy(&[2.0], &m).unwrap(), 0.5);
        assert!(kinetic_energy(&[1.0, 2.0], &m).is_err());
    }

    #[test]
    fn kinetic_energy_even_in_momentum() {
        let m = MassSpec::diagonal(vec![1.5, 0.3]).unwrap();
        let p = [0.7, -2.1];
        let q = [-0.7, 2.1];
        assert_eq!(kinetic_energy(&p, &m).unwrap(), kinetic_energy(&q, &m).unwrap());
    }

    #[test]
    fn hamiltonian_examples() {
        let x = PhasePoint::new(vec![0.0], vec![0.0]).unwrap();
        assert_eq!(true_hamiltonian(&x, &Harmonic1, &MassSpec::Identity).unwrap(), 0.0);
        let x = PhasePoint::new(vec![1.0], vec![1.0]).unwrap();
        assert_eq!(true_hamiltonian(&x, &Harmonic1, &MassSpec::Identity).unwrap(), 1.0);
        let x = PhasePoint::new(vec![3.0, -1.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(true_hamiltonian(&x, &Flat, &MassSpec::Identity).unwrap(), 2.5);
    }

    #[test]
    fn non_finite_position_reports_coordinate() {
        let x = PhasePoint { theta: vec![1.0, f64::NAN], p: vec![0.0, 0.0] };
        match true_hamiltonian(&x, &Flat, &MassSpec::Identity) {
            Err(Error::Evaluation { index: Some(1), .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn momentum_variance_matches_mass() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for m in [1.0, 4.0] {
            let mass = MassSpec::diagonal(vec![m]).unwrap();
            let n = 100_000;
            let draws: Vec<f64> = (0..n).map(|_| draw_momentum(&mass, 1, &mut rng)[0]).collect();
            let mean = draws.iter().sum::<f64>() / n as f64;
            let var = draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            assert!((var / m - 1.0).abs() < 0.02, "variance {var} vs {m}");
        }
    }

    #[test]
    fn momentum_draw_is_reproducible() {
        let a = draw_momentum(&MassSpec::Identity, 5, &mut ChaCha20Rng::seed_from_u64(3));
        let b = draw_momentum(&MassSpec::Identity, 5, &mut ChaCha20Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn mismatched_phase_point_rejected() {
        assert!(PhasePoint::new(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(MassSpec::diagonal(vec![1.0, 0.0]).is_err());
    }
}
