use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{check_dim, Capabilities, TargetModel};

#[derive(Debug, Clone)]
enum Precision {
    Diagonal(Vec<f64>),
    Dense(DMatrix<f64>),
}

/// Zero-mean Gaussian `N(0, Σ)` with `U(θ) = ½ θᵀΣ⁻¹θ`.
#[derive(Debug, Clone)]
pub struct GaussianTarget {
    precision: Precision,
}

impl GaussianTarget {
    pub fn standard(dim: usize) -> Self {
        Self { precision: Precision::Diagonal(vec![1.0; dim]) }
    }

    /// Independent coordinates with the given variances `σ_i²`.
    pub fn from_variances(variances: &[f64]) -> Result<Self> {
        if variances.is_empty() || variances.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument("variances must be positive and finite".into()));
        }
        Ok(Self { precision: Precision::Diagonal(variances.iter().map(|v| 1.0 / v).collect()) })
    }

    /// Dense precision `Σ⁻¹`; must be symmetric positive definite.
    pub fn from_precision(precision: DMatrix<f64>) -> Result<Self> {
        if !precision.is_square() || precision.nrows() == 0 {
            return Err(Error::InvalidArgument("precision must be a non-empty square matrix".into()));
        }
        let scale = precision.amax();
        if (&precision - precision.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidArgument("precision must be symmetric".into()));
        }
        if precision.clone().cholesky().is_none() {
            return Err(Error::InvalidArgument("precision must be positive definite".into()));
        }
        Ok(Self { precision: Precision::Dense(precision) })
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.precision, Precision::Diagonal(_))
    }

    /// Dense copy of `Σ⁻¹`.
    pub fn precision_matrix(&self) -> DMatrix<f64> {
        match &self.precision {
            Precision::Diagonal(d) => DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)),
            Precision::Dense(m) => m.clone(),
        }
    }

    /// Diagonal of `Σ` (exact for diagonal targets, via inversion otherwise).
    pub fn marginal_variances(&self) -> Vec<f64> {
        match &self.precision {
            Precision::Diagonal(d) => d.iter().map(|v| 1.0 / v).collect(),
            Precision::Dense(m) => {
                let inv = m.clone().cholesky().expect("validated SPD").inverse();
                inv.diagonal().iter().copied().collect()
            }
        }
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        match &self.precision {
            Precision::Diagonal(d) => {
                for ((o, x), q) in out.iter_mut().zip(v).zip(d) {
                    *o = q * x;
                }
            }
            Precision::Dense(m) => {
                let n = m.nrows();
                out.iter_mut().for_each(|o| *o = 0.0);
                // Column-major traversal.
                for j in 0..n {
                    let vj = v[j];
                    if vj == 0.0 {
                        continue;
                    }
                    let col = m.column(j);
                    for i in 0..n {
                        out[i] += col[i] * vj;
                    }
                }
            }
        }
    }
}

impl TargetModel for GaussianTarget {
    fn dim(&self) -> usize {
        match &self.precision {
            Precision::Diagonal(d) => d.len(),
            Precision::Dense(m) => m.nrows(),
        }
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { has_hessian: true, has_third: true, has_fourth: true, quadratic: true }
    }

    fn potential(&self, theta: &[f64]) -> Result<f64> {
        check_dim(self.dim(), theta.len())?;
        let mut g = vec![0.0; theta.len()];
        self.apply(theta, &mut g);
        Ok(0.5 * crate::model::dot(theta, &g))
    }

    fn potential_and_gradient(&self, theta: &[f64], grad: &mut [f64]) -> Result<f64> {
        check_dim(self.dim(), theta.len())?;
        self.apply(theta, grad);
        Ok(0.5 * crate::model::dot(theta, grad))
    }

    fn hessian_vector(&self, theta: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(self.dim(), theta.len())?;
        self.apply(v, out);
        Ok(())
    }
}

/// Random Gaussian target whose precision is Wishart with `D` degrees of freedom.
///
/// For `D ≤ 100` the precision is `AᵀA` with `A` a `D×D` standard-normal matrix. For larger
/// `D` the target is diagonal, with the `i`-th variance equal to the `i`-th smallest
/// eigenvalue of the covariance `(AᵀA)⁻¹`.
pub fn generate_wishart_target<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<GaussianTarget> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("Wishart target needs D >= 2, got {dim}")));
    }
    let a = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let ata = a.transpose() * &a;
    if dim <= 100 {
        let sym = (&ata + ata.transpose()) * 0.5;
        return GaussianTarget::from_precision(sym);
    }
    let mut variances: Vec<f64> = ata.symmetric_eigenvalues().iter().map(|l| 1.0 / l).collect();
    variances.sort_by(|x, y| x.partial_cmp(y).unwrap());
    GaussianTarget::from_variances(&variances)
}
