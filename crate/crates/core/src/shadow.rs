//! Fourth- and sixth-order modified (shadow) Hamiltonians, in analytic-derivative and
//! numerical time-derivative form, and the importance weights they induce.

use crate::error::{Error, Result};
use crate::integrators::{stage_gradients, IntegratorState, ShadowCoefficients, SplittingScheme};
use crate::model::{dot, kinetic_energy, MassSpec, PhasePoint, TargetModel};

/// How derivatives entering the modified Hamiltonian are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShadowMode {
    /// Hessian and higher contractions supplied by the model.
    Analytic,
    /// Time derivatives of the gradient from finite differences along extra integration stages.
    Numeric,
}

/// Order and formulation of the modified Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShadowOrder {
    pub order: u8,
    pub mode: ShadowMode,
}

impl ShadowOrder {
    pub fn new(order: u8, mode: ShadowMode) -> Result<Self> {
        if order != 4 && order != 6 {
            return Err(Error::InvalidArgument(format!("shadow order must be 4 or 6, got {order}")));
        }
        Ok(Self { order, mode })
    }

    /// Stencil half-width in stages.
    pub fn stencil_k(&self) -> usize {
        if self.order == 4 {
            1
        } else {
            2
        }
    }

    /// Checks that the scheme and model support this shadow.
    pub fn validate<M: TargetModel + ?Sized>(&self, scheme: &SplittingScheme, model: &M) -> Result<()> {
        let caps = model.capabilities();
        if self.order == 6 && !scheme.supports_order6() {
            return Err(Error::InvalidArgument(format!(
                "sixth-order modified Hamiltonians are available for the Verlet and two-stage families only, not {}",
                scheme.family()
            )));
        }
        match (self.mode, self.order) {
            (ShadowMode::Analytic, _) if !caps.has_hessian => Err(Error::MissingCapability("a Hessian")),
            (ShadowMode::Analytic, 6) if !caps.quadratic && !(caps.has_third && caps.has_fourth) => {
                Err(Error::MissingCapability("third and fourth derivative contractions"))
            }
            (ShadowMode::Numeric, 6) if scheme.coefficients().k[5] != 0.0 && !caps.has_hessian => {
                Err(Error::MissingCapability("a Hessian (k44 term)"))
            }
            _ => Ok(()),
        }
    }
}

/// Gradients at stage offsets `−k..=k` around a state, with stage spacing `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientStencil {
    pub epsilon: f64,
    /// `minus[i]` is the gradient `i + 1` stages backwards.
    pub minus: Vec<Vec<f64>>,
    pub center: Vec<f64>,
    /// `plus[i]` is the gradient `i + 1` stages forwards.
    pub plus: Vec<Vec<f64>>,
}

/// Scaled time derivatives `P_i = h^i U^(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilDerivatives {
    pub p1: Vec<f64>,
    pub p2: Option<Vec<f64>>,
    pub p3: Option<Vec<f64>>,
}

impl GradientStencil {
    /// Integrates `k` stages backwards and forwards from `state` without modifying it.
    pub fn acquire<M: TargetModel + ?Sized>(
        scheme: &SplittingScheme,
        model: &M,
        mass: &MassSpec,
        state: &mut IntegratorState,
        h: f64,
        k: usize,
    ) -> Result<Self> {
        let center = state.gradient(model)?.to_vec();
        let minus = stage_gradients(scheme, model, mass, state, -h, k)?;
        let plus = stage_gradients(scheme, model, mass, state, h, k)?;
        Ok(Self { epsilon: scheme.epsilon_fraction() * h, minus, center, plus })
    }

    /// Stencil of the flipped state `(θ, −p)`.
    pub fn reversed(&self) -> Self {
        Self { epsilon: self.epsilon, minus: self.plus.clone(), center: self.center.clone(), plus: self.minus.clone() }
    }

    pub fn k(&self) -> usize {
        self.minus.len().min(self.plus.len())
    }

    /// Finite-difference derivatives for the given order.
    pub fn derivatives(&self, h: f64, order: u8) -> Result<StencilDerivatives> {
        let need = if order == 4 { 1 } else { 2 };
        if self.k() < need {
            return Err(Error::Stencil(format!("order {order} needs {need} stage(s) each side, have {}", self.k())));
        }
        let e = self.epsilon;
        let d = self.center.len();
        if order == 4 {
            let p1 = (0..d).map(|i| h * (self.plus[0][i] - self.minus[0][i]) / (2.0 * e)).collect();
            return Ok(StencilDerivatives { p1, p2: None, p3: None });
        }
        let (m1, m2, p1s, p2s) = (&self.minus[0], &self.minus[1], &self.plus[0], &self.plus[1]);
        let p1 = (0..d).map(|i| h * (m2[i] - 8.0 * m1[i] + 8.0 * p1s[i] - p2s[i]) / (12.0 * e)).collect();
        let p2 = (0..d).map(|i| h * h * (m1[i] - 2.0 * self.center[i] + p1s[i]) / (e * e)).collect();
        let p3 = (0..d)
            .map(|i| h.powi(3) * (-m2[i] + 2.0 * m1[i] - 2.0 * p1s[i] + p2s[i]) / (2.0 * e.powi(3)))
            .collect();
        Ok(StencilDerivatives { p1, p2: Some(p2), p3: Some(p3) })
    }
}

/// A modified Hamiltonian value split as `H̃ = H + correction`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowValue {
    pub hamiltonian: f64,
    pub correction: f64,
}

impl ShadowValue {
    pub fn shadow(&self) -> f64 {
        self.hamiltonian + self.correction
    }

    /// `ln w = H̃ − H`.
    pub fn log_weight(&self) -> f64 {
        self.correction
    }
}

/// Correction terms of the analytic forms. `hp` is `U_θθ M⁻¹p`.
pub(crate) fn analytic_correction<M: TargetModel + ?Sized>(
    model: &M,
    mass: &MassSpec,
    c: &ShadowCoefficients,
    h: f64,
    order: u8,
    theta: &[f64],
    p: &[f64],
    grad: &[f64],
    hp: &[f64],
) -> Result<f64> {
    let pt = mass.inv_mul(p);
    let h2 = h * h;
    let mut corr = h2 * c.c[0] * dot(&pt, hp) + h2 * c.c[1] * mass.inv_dot(grad, grad);
    if order == 6 {
        let h4 = h2 * h2;
        let gt = mass.inv_mul(grad);
        let mut hg = vec![0.0; p.len()];
        model.hessian_vector(theta, &gt, &mut hg)?;
        corr += h4 * c.c[4] * dot(&gt, &hg) + h4 * c.c[5] * mass.inv_dot(hp, hp);
        if !model.capabilities().quadratic {
            let mut t3 = vec![0.0; p.len()];
            model.third_contraction(theta, &pt, &mut t3)?;
            corr += h4 * c.c[2] * model.fourth_contraction(theta, &pt)? + h4 * c.c[3] * dot(&gt, &t3);
        }
    }
    Ok(corr)
}

/// Correction terms of the time-derivative forms, split into the momentum-dependent part
/// and the part depending on position only.
pub(crate) fn numeric_terms<M: TargetModel + ?Sized>(
    model: &M,
    mass: &MassSpec,
    k: &ShadowCoefficients,
    h: f64,
    order: u8,
    theta: &[f64],
    p: &[f64],
    grad: &[f64],
    stencil: &GradientStencil,
) -> Result<(f64, f64)> {
    let k = &k.k;
    let der = stencil.derivatives(h, order)?;
    let pt = mass.inv_mul(p);
    let mut dep = h * k[0] * dot(&pt, &der.p1);
    let mut fixed = h * h * k[1] * mass.inv_dot(grad, grad);
    if order == 6 {
        let (p2, p3) = (der.p2.as_ref().unwrap(), der.p3.as_ref().unwrap());
        dep += h * k[2] * dot(&pt, p3) + h * h * k[3] * mass.inv_dot(grad, p2) + h * h * k[4] * mass.inv_dot(&der.p1, &der.p1);
        if k[5] != 0.0 {
            let gt = mass.inv_mul(grad);
            let mut hg = vec![0.0; p.len()];
            model.hessian_vector(theta, &gt, &mut hg)?;
            fixed += h.powi(4) * k[5] * dot(&gt, &hg);
        }
    }
    Ok((dep, fixed))
}

pub(crate) fn numeric_correction<M: TargetModel + ?Sized>(
    model: &M,
    mass: &MassSpec,
    k: &ShadowCoefficients,
    h: f64,
    order: u8,
    theta: &[f64],
    p: &[f64],
    grad: &[f64],
    stencil: &GradientStencil,
) -> Result<f64> {
    let (dep, fixed) = numeric_terms(model, mass, k, h, order, theta, p, grad, stencil)?;
    Ok(dep + fixed)
}

fn base<M: TargetModel + ?Sized>(x: &PhasePoint, model: &M, mass: &MassSpec) -> Result<(f64, Vec<f64>, f64)> {
    crate::model::check_dim(model.dim(), x.dim())?;
    let mut grad = vec![0.0; x.dim()];
    let u = model.potential_and_gradient(&x.theta, &mut grad)?;
    Ok((u, grad, kinetic_energy(&x.p, mass)?))
}

/// `H̃^[4] = H + h²c₂₁ pᵀM⁻¹U_θθM⁻¹p + h²c₂₂ U_θᵀM⁻¹U_θ`.
pub fn shadow4_analytic<M: TargetModel + ?Sized>(
    x: &PhasePoint,
    model: &M,
    mass: &MassSpec,
    coeffs: &ShadowCoefficients,
    h: f64,
) -> Result<ShadowValue> {
    shadow_analytic(x, model, mass, coeffs, h, 4)
}

/// `H̃^[6]`: `H̃^[4]` plus the four `h⁴` terms (two for quadratic potentials).
pub fn shadow6_analytic<M: TargetModel + ?Sized>(
    x: &PhasePoint,
    model: &M,
    mass: &MassSpec,
    coeffs: &ShadowCoefficients,
    h: f64,
) -> Result<ShadowValue> {
    let caps = model.capabilities();
    if !caps.quadratic && !(caps.has_third && caps.has_fourth) {
        return Err(Error::MissingCapability("third and fourth derivative contractions"));
    }
    shadow_analytic(x, model, mass, coeffs, h, 6)
}

fn shadow_analytic<M: TargetModel + ?Sized>(
    x: &PhasePoint,
    model: &M,
    mass: &MassSpec,
    coeffs: &ShadowCoefficients,
    h: f64,
    order: u8,
) -> Result<ShadowValue> {
    if !model.capabilities().has_hessian {
        return Err(Error::MissingCapability("a Hessian"));
    }
    let (u, grad, kin) = base(x, model, mass)?;
    let mut hp = vec![0.0; x.dim()];
    model.hessian_vector(&x.theta, &mass.inv_mul(&x.p), &mut hp)?;
    let correction = analytic_correction(model, mass, coeffs, h, order, &x.theta, &x.p, &grad, &hp)?;
    Ok(ShadowValue { hamiltonian: u + kin, correction })
}

/// Modified Hamiltonian from gradient time derivatives.
pub fn shadow_numeric<M: TargetModel + ?Sized>(
    x: &PhasePoint,
    stencil: &GradientStencil,
    model: &M,
    mass: &MassSpec,
    coeffs: &ShadowCoefficients,
    h: f64,
    order: u8,
) -> Result<ShadowValue> {
    if order == 6 && coeffs.k[5] != 0.0 && !model.capabilities().has_hessian {
        return Err(Error::MissingCapability("a Hessian (k44 term)"));
    }
    let (u, grad, kin) = base(x, model, mass)?;
    let correction = numeric_correction(model, mass, coeffs, h, order, &x.theta, &x.p, &grad, stencil)?;
    Ok(ShadowValue { hamiltonian: u + kin, correction })
}

/// Convenience: acquires the stencil and evaluates [`shadow_numeric`].
pub fn shadow_numeric_at<M: TargetModel + ?Sized>(
    x: &PhasePoint,
    scheme: &SplittingScheme,
    model: &M,
    mass: &MassSpec,
    h: f64,
    order: u8,
) -> Result<ShadowValue> {
    let mut st = IntegratorState::new(model, x)?;
    let k = if order == 4 { 1 } else { 2 };
    let stencil = GradientStencil::acquire(scheme, model, mass, &mut st, h, k)?;
    shadow_numeric(x, &stencil, model, mass, scheme.coefficients(), h, order)
}

/// Evaluates the configured modified Hamiltonian at `x`.
pub fn shadow_value<M: TargetModel + ?Sized>(
    x: &PhasePoint,
    scheme: &SplittingScheme,
    shadow: ShadowOrder,
    model: &M,
    mass: &MassSpec,
    h: f64,
) -> Result<ShadowValue> {
    match shadow.mode {
        ShadowMode::Analytic => shadow_analytic(x, model, mass, scheme.coefficients(), h, shadow.order),
        ShadowMode::Numeric => shadow_numeric_at(x, scheme, model, mass, h, shadow.order),
    }
}

/// Importance weight `w = exp(H̃ − H)`.
pub fn importance_weight(value: &ShadowValue) -> f64 {
    value.log_weight().exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::{integrate, stage_coefficients, Family};
    use crate::models::{banana_simulate, BananaTarget, GaussianTarget};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn pt(t: &[f64], p: &[f64]) -> PhasePoint {
        PhasePoint::new(t.to_vec(), p.to_vec()).unwrap()
    }

    fn verlet() -> SplittingScheme {
        SplittingScheme::verlet()
    }

    #[test]
    fn stationary_point_without_momentum() {
        let g = GaussianTarget::standard(2);
        let c = *verlet().coefficients();
        let x = pt(&[0.0, 0.0], &[0.0, 0.0]);
        assert_eq!(shadow4_analytic(&x, &g, &MassSpec::Identity, &c, 0.3).unwrap().shadow(), 0.0);
        assert_eq!(shadow6_analytic(&x, &g, &MassSpec::Identity, &c, 0.3).unwrap().shadow(), 0.0);
    }

    #[test]
    fn harmonic_verlet_closed_form() {
        let g = GaussianTarget::standard(1);
        let c = *verlet().coefficients();
        let (t, p, h) = (0.7, -1.3, 0.2);
        let v = shadow4_analytic(&pt(&[t], &[p]), &g, &MassSpec::Identity, &c, h).unwrap();
        let h_true = 0.5 * (t * t + p * p);
        assert!((v.shadow() - (h_true + h * h * (p * p / 12.0 - t * t / 24.0))).abs() < 1e-15);
        // Quadratic potential: only the c43 and c44 terms are added at sixth order.
        let v6 = shadow6_analytic(&pt(&[t], &[p]), &g, &MassSpec::Identity, &c, h).unwrap();
        let extra = h.powi(4) * (c.c[4] * t * t + c.c[5] * p * p);
        assert!((v6.shadow() - v.shadow() - extra).abs() < 1e-15);
    }

    #[test]
    fn correction_vanishes_like_h_squared() {
        let g = GaussianTarget::from_variances(&[1.0, 0.5]).unwrap();
        let c = *verlet().coefficients();
        let x = pt(&[0.3, 1.0], &[1.0, -0.4]);
        let d = |h: f64| shadow4_analytic(&x, &g, &MassSpec::Identity, &c, h).unwrap().correction.abs();
        let s = (d(1e-2).ln() - d(1e-3).ln()) / (1e-2f64.ln() - 1e-3f64.ln());
        assert!((s - 2.0).abs() < 0.05);
    }

    #[test]
    fn numeric_equals_analytic_on_quadratics() {
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let g = crate::models::generate_wishart_target(4, &mut rng).unwrap();
        let mass = MassSpec::diagonal(vec![1.0, 2.0, 0.5, 1.5]).unwrap();
        let x = pt(&[0.2, -0.1, 0.4, 0.3], &[0.5, 1.0, -0.7, 0.1]);
        for scheme in [verlet(), SplittingScheme::two_stage(0.238016).unwrap()] {
            let h = 0.05;
            let a = shadow4_analytic(&x, &g, &mass, scheme.coefficients(), h).unwrap();
            let n = shadow_numeric_at(&x, &scheme, &g, &mass, h, 4).unwrap();
            assert!((a.shadow() - n.shadow()).abs() < 1e-12 * a.shadow().abs().max(1.0));
        }
        let s3 = SplittingScheme::three_stage(0.355423, 0.184569).unwrap();
        let a = shadow4_analytic(&x, &g, &mass, s3.coefficients(), 0.05).unwrap();
        let n = shadow_numeric_at(&x, &s3, &g, &mass, 0.05, 4).unwrap();
        assert!((a.shadow() - n.shadow()).abs() < 1e-12 * a.shadow().abs().max(1.0));
    }

    #[test]
    fn zero_momentum_symmetric_stencil() {
        let g = GaussianTarget::standard(2);
        let x = pt(&[0.0, 0.0], &[0.0, 0.0]);
        let mut st = IntegratorState::new(&g, &x).unwrap();
        let s = GradientStencil::acquire(&verlet(), &g, &MassSpec::Identity, &mut st, 0.1, 1).unwrap();
        assert!(s.derivatives(0.1, 4).unwrap().p1.iter().all(|v| *v == 0.0));
        assert!(matches!(s.derivatives(0.1, 6), Err(Error::Stencil(_))));
    }

    #[test]
    fn reversed_stencil_matches_flipped_state() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let y = banana_simulate(20, 1.0, 2.0, &mut rng).unwrap();
        let b = BananaTarget::new(y, 2.0, 1.0).unwrap();
        let x = pt(&[0.4, 0.6], &[0.5, -0.8]);
        let scheme = SplittingScheme::two_stage(0.23).unwrap();
        let mut s1 = IntegratorState::new(&b, &x).unwrap();
        let mut s2 = IntegratorState::new(&b, &x.flipped()).unwrap();
        let a = GradientStencil::acquire(&scheme, &b, &MassSpec::Identity, &mut s1, 0.05, 2).unwrap();
        let r = GradientStencil::acquire(&scheme, &b, &MassSpec::Identity, &mut s2, 0.05, 2).unwrap();
        assert_eq!(a.reversed(), r);
        // Shadows are even in the momentum.
        let f = shadow_numeric(&x, &a, &b, &MassSpec::Identity, scheme.coefficients(), 0.05, 6).unwrap();
        let fr = shadow_numeric(&x.flipped(), &r, &b, &MassSpec::Identity, scheme.coefficients(), 0.05, 6).unwrap();
        assert!((f.shadow() - fr.shadow()).abs() < 1e-13);
    }

    /// Maximum drift of a quantity along `steps` Verlet steps.
    fn drift(f: &dyn Fn(&PhasePoint) -> f64, model: &BananaTarget, scheme: &SplittingScheme, x0: &PhasePoint, h: f64, steps: usize) -> f64 {
        let mut x = x0.clone();
        let f0 = f(&x);
        let mut worst: f64 = 0.0;
        for _ in 0..steps {
            x = integrate(scheme, model, &MassSpec::Identity, &x, h, 1, None).unwrap();
            worst = worst.max((f(&x) - f0).abs());
        }
        worst
    }

    #[test]
    fn fourth_order_numeric_and_analytic_conserve_at_order_four() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let y = banana_simulate(5, 1.0, 2.0, &mut rng).unwrap();
        let b = BananaTarget::new(y, 2.0, 1.0).unwrap();
        let x0 = pt(&[0.5, 0.4], &[0.3, -0.6]);
        for scheme in [verlet(), SplittingScheme::two_stage(0.23061).unwrap()] {
            let t = 0.8;
            let slope = |f: &dyn Fn(&PhasePoint, f64) -> f64| {
                let (h1, h2) = (0.04, 0.02);
                let d1 = drift(&|x| f(x, h1), &b, &scheme, &x0, h1, (t / h1) as usize);
                let d2 = drift(&|x| f(x, h2), &b, &scheme, &x0, h2, (t / h2) as usize);
                (d1.ln() - d2.ln()) / (h1.ln() - h2.ln())
            };
            let c = *scheme.coefficients();
            let s_an = slope(&|x, h| shadow4_analytic(x, &b, &MassSpec::Identity, &c, h).unwrap().shadow());
            let s_nu = slope(&|x, h| shadow_numeric_at(x, &scheme, &b, &MassSpec::Identity, h, 4).unwrap().shadow());
            assert!((s_an - 4.0).abs() < 0.3, "{} analytic slope {s_an}", scheme.family());
            assert!((s_nu - 4.0).abs() < 0.3, "{} numeric slope {s_nu}", scheme.family());
        }
    }

    #[test]
    fn sixth_order_analytic_conserves_at_order_six() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let y = banana_simulate(5, 1.0, 2.0, &mut rng).unwrap();
        let b = BananaTarget::new(y, 2.0, 1.0).unwrap();
        let x0 = pt(&[0.5, 0.4], &[0.3, -0.6]);
        for scheme in [verlet(), SplittingScheme::two_stage(0.238016).unwrap()] {
            let t = 0.8;
            let slope = |f: &dyn Fn(&PhasePoint, f64) -> f64| {
                let (h1, h2) = (0.08, 0.04);
                let d1 = drift(&|x| f(x, h1), &b, &scheme, &x0, h1, (t / h1) as usize);
                let d2 = drift(&|x| f(x, h2), &b, &scheme, &x0, h2, (t / h2) as usize);
                (d1.ln() - d2.ln()) / (h1.ln() - h2.ln())
            };
            let c = *scheme.coefficients();
            let s_an = slope(&|x, h| shadow6_analytic(x, &b, &MassSpec::Identity, &c, h).unwrap().shadow());
            assert!((s_an - 6.0).abs() < 0.5, "{} analytic slope {s_an}", scheme.family());
            // The five-point stencil along a discrete trajectory carries an O(h³) bias in P₁,
            // so the time-derivative form conserves at least to fourth order.
            let s_nu = slope(&|x, h| shadow_numeric_at(x, &scheme, &b, &MassSpec::Identity, h, 6).unwrap().shadow());
            assert!(s_nu > 3.7, "{} numeric slope {s_nu}", scheme.family());
        }
    }

    #[test]
    fn sixth_order_numeric_bias_on_quadratics() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let g = crate::models::generate_wishart_target(3, &mut rng).unwrap();
        let mass = MassSpec::diagonal(vec![1.0, 2.0, 0.5]).unwrap();
        let x = pt(&[0.2, -0.1, 0.4], &[0.5, 1.0, -0.7]);
        let (scheme, h) = (verlet(), 0.05);
        let a = shadow6_analytic(&x, &g, &mass, scheme.coefficients(), h).unwrap();
        let n = shadow_numeric_at(&x, &scheme, &g, &mass, h, 6).unwrap();
        // On a Verlet trajectory the five-point P₁ is h U_θθM⁻¹p + (h³/6) U_θθM⁻¹U_θθM⁻¹p; P₂, P₃ are exact.
        let mut hp = vec![0.0; 3];
        g.hessian_vector(&x.theta, &mass.inv_mul(&x.p), &mut hp).unwrap();
        let mut hmhp = vec![0.0; 3];
        g.hessian_vector(&x.theta, &mass.inv_mul(&hp), &mut hmhp).unwrap();
        let k = &scheme.coefficients().k;
        let delta: Vec<f64> = hmhp.iter().map(|v| h.powi(3) / 6.0 * v).collect();
        let hhp: Vec<f64> = hp.iter().map(|v| h * v).collect();
        let bias = h * k[0] * mass.inv_dot(&x.p, &delta)
            + h * h * k[4] * (2.0 * mass.inv_dot(&hhp, &delta) + mass.inv_dot(&delta, &delta));
        assert!((n.shadow() - a.shadow() - bias).abs() < 1e-12, "{} vs {}", n.shadow() - a.shadow(), bias);
    }

    #[test]
    fn capability_errors() {
        struct GradOnly;
        impl TargetModel for GradOnly {
            fn dim(&self) -> usize {
                1
            }
            fn potential(&self, t: &[f64]) -> Result<f64> {
                Ok(t[0].powi(4))
            }
            fn potential_and_gradient(&self, t: &[f64], g: &mut [f64]) -> Result<f64> {
                g[0] = 4.0 * t[0].powi(3);
                Ok(t[0].powi(4))
            }
        }
        let x = pt(&[1.0], &[1.0]);
        let c = stage_coefficients(Family::TwoStage, &[0.25]).unwrap();
        assert!(matches!(shadow4_analytic(&x, &GradOnly, &MassSpec::Identity, &c, 0.1), Err(Error::MissingCapability(_))));
        let two = SplittingScheme::two_stage(0.238016).unwrap();
        assert!(shadow_numeric_at(&x, &two, &GradOnly, &MassSpec::Identity, 0.1, 6).is_err());
        assert!(shadow_numeric_at(&x, &verlet(), &GradOnly, &MassSpec::Identity, 0.1, 6).is_ok());
        let three = SplittingScheme::three_stage(0.3, 0.2).unwrap();
        assert!(ShadowOrder::new(6, ShadowMode::Numeric).unwrap().validate(&three, &GaussianTarget::standard(1)).is_err());
    }

    #[test]
    fn weights() {
        let v = ShadowValue { hamiltonian: 2.0, correction: 0.0 };
        assert_eq!(importance_weight(&v), 1.0);
        let v = ShadowValue { hamiltonian: 2.0, correction: 0.1 };
        assert!((importance_weight(&v) - 1.10517).abs() < 1e-5);
    }
}
