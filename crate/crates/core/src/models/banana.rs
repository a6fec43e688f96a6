use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{check_dim, Capabilities, TargetModel};

/// Posterior of `(θ₁, θ₂)` under `y_k ~ N(θ₁ + θ₂², σ_y²)` and `θ_i ~ N(0, σ_θ²)`.
#[derive(Debug, Clone)]
pub struct BananaTarget {
    y: Vec<f64>,
    sigma_y: f64,
    sigma_theta: f64,
}

impl BananaTarget {
    pub fn new(y: Vec<f64>, sigma_y: f64, sigma_theta: f64) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::InvalidArgument("banana target needs at least one datum".into()));
        }
        if !(sigma_y > 0.0) || !(sigma_theta > 0.0) {
            return Err(Error::InvalidArgument("banana scales must be positive".into()));
        }
        Ok(Self { y, sigma_y, sigma_theta })
    }

    pub fn data(&self) -> &[f64] {
        &self.y
    }

    fn k(&self) -> f64 {
        self.y.len() as f64
    }

    /// Sum of residuals `Σ (y_k − θ₁ − θ₂²)`.
    fn residual_sum(&self, t: &[f64]) -> f64 {
        let m = t[0] + t[1] * t[1];
        self.y.iter().map(|y| y - m).sum()
    }
}

impl TargetModel for BananaTarget {
    fn dim(&self) -> usize {
        2
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { has_hessian: true, has_third: true, has_fourth: true, quadratic: false }
    }

    fn potential(&self, t: &[f64]) -> Result<f64> {
        check_dim(2, t.len())?;
        let m = t[0] + t[1] * t[1];
        let sq: f64 = self.y.iter().map(|y| (y - m).powi(2)).sum();
        Ok(sq / (2.0 * self.sigma_y.powi(2)) + (t[0] * t[0] + t[1] * t[1]) / (2.0 * self.sigma_theta.powi(2)))
    }

    fn potential_and_gradient(&self, t: &[f64], grad: &mut [f64]) -> Result<f64> {
        let u = self.potential(t)?;
        let r = self.residual_sum(t);
        let sy2 = self.sigma_y.powi(2);
        let st2 = self.sigma_theta.powi(2);
        grad[0] = -r / sy2 + t[0] / st2;
        grad[1] = -2.0 * t[1] * r / sy2 + t[1] / st2;
        Ok(u)
    }

    fn hessian_vector(&self, t: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(2, t.len())?;
        let r = self.residual_sum(t);
        let (k, sy2, st2) = (self.k(), self.sigma_y.powi(2), self.sigma_theta.powi(2));
        let h11 = k / sy2 + 1.0 / st2;
        let h12 = 2.0 * t[1] * k / sy2;
        let h22 = -2.0 * r / sy2 + 4.0 * t[1] * t[1] * k / sy2 + 1.0 / st2;
        out[0] = h11 * v[0] + h12 * v[1];
        out[1] = h12 * v[0] + h22 * v[1];
        Ok(())
    }

    fn third_contraction(&self, t: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(2, t.len())?;
        let sy2 = self.sigma_y.powi(2);
        let u122 = 2.0 * self.k() / sy2;
        let u222 = 12.0 * t[1] * self.k() / sy2;
        out[0] = u122 * v[1] * v[1];
        out[1] = 2.0 * u122 * v[0] * v[1] + u222 * v[1] * v[1];
        Ok(())
    }

    fn fourth_contraction(&self, t: &[f64], v: &[f64]) -> Result<f64> {
        check_dim(2, t.len())?;
        Ok(12.0 * self.k() / self.sigma_y.powi(2) * v[1].powi(4))
    }
}

/// `K` draws from `N(θ₁ + θ₂², σ_y²)`.
pub fn banana_simulate<R: Rng + ?Sized>(k: usize, mean: f64, sigma_y: f64, rng: &mut R) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    Ok((0..k).map(|_| mean + sigma_y * rng.sample::<f64, _>(StandardNormal)).collect())
}
