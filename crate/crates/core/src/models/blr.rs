use crate::error::{Error, Result};
use crate::model::{check_dim, dot, Capabilities, TargetModel};

/// Bayesian logistic regression with prior `θ ~ N(0, α I)`.
#[derive(Debug, Clone)]
pub struct BlrTarget {
    /// Row-major `K×D` design matrix, first column all ones.
    x: Vec<f64>,
    y: Vec<f64>,
    k: usize,
    d: usize,
    alpha: f64,
}

#[inline]
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

#[inline]
fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl BlrTarget {
    /// `design` is row-major with `labels.len()` rows; `alpha` may be infinite (flat prior).
    pub fn new(design: Vec<f64>, labels: Vec<f64>, alpha: f64) -> Result<Self> {
        let k = labels.len();
        if k == 0 || !design.len().is_multiple_of(k) || design.is_empty() {
            return Err(Error::InvalidArgument("design size must be a positive multiple of K".into()));
        }
        let d = design.len() / k;
        if !(alpha > 0.0) {
            return Err(Error::InvalidArgument("prior variance alpha must be positive".into()));
        }
        if let Some(i) = labels.iter().position(|v| *v != 0.0 && *v != 1.0) {
            return Err(Error::InvalidArgument(format!("label {i} is not binary")));
        }
        if (0..k).any(|r| design[r * d] != 1.0) {
            return Err(Error::InvalidArgument("first design column must be all ones".into()));
        }
        Ok(Self { x: design, y: labels, k, d, alpha })
    }

    pub fn n_obs(&self) -> usize {
        self.k
    }

    fn row(&self, r: usize) -> &[f64] {
        &self.x[r * self.d..(r + 1) * self.d]
    }
}

impl TargetModel for BlrTarget {
    fn dim(&self) -> usize {
        self.d
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { has_hessian: true, has_third: true, has_fourth: true, quadratic: false }
    }

    fn potential(&self, t: &[f64]) -> Result<f64> {
        check_dim(self.d, t.len())?;
        let mut u = dot(t, t) / (2.0 * self.alpha);
        for r in 0..self.k {
            let z = dot(self.row(r), t);
            u += softplus(z) - self.y[r] * z;
        }
        Ok(u)
    }

    fn potential_and_gradient(&self, t: &[f64], grad: &mut [f64]) -> Result<f64> {
        check_dim(self.d, t.len())?;
        for (g, th) in grad.iter_mut().zip(t) {
            *g = th / self.alpha;
        }
        let mut u = dot(t, t) / (2.0 * self.alpha);
        for r in 0..self.k {
            let row = self.row(r);
            let z = dot(row, t);
            u += softplus(z) - self.y[r] * z;
            let c = logistic(z) - self.y[r];
            for (g, xv) in grad.iter_mut().zip(row) {
                *g += c * xv;
            }
        }
        Ok(u)
    }

    fn hessian_vector(&self, t: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(self.d, t.len())?;
        for (o, vi) in out.iter_mut().zip(v) {
            *o = vi / self.alpha;
        }
        for r in 0..self.k {
            let row = self.row(r);
            let s = logistic(dot(row, t));
            let c = s * (1.0 - s) * dot(row, v);
            for (o, xv) in out.iter_mut().zip(row) {
                *o += c * xv;
            }
        }
        Ok(())
    }

    fn third_contraction(&self, t: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(self.d, t.len())?;
        out.iter_mut().for_each(|o| *o = 0.0);
        for r in 0..self.k {
            let row = self.row(r);
            let s = logistic(dot(row, t));
            let xv = dot(row, v);
            let c = s * (1.0 - s) * (1.0 - 2.0 * s) * xv * xv;
            for (o, xr) in out.iter_mut().zip(row) {
                *o += c * xr;
            }
        }
        Ok(())
    }

    fn fourth_contraction(&self, t: &[f64], v: &[f64]) -> Result<f64> {
        check_dim(self.d, t.len())?;
        let mut acc = 0.0;
        for r in 0..self.k {
            let row = self.row(r);
            let s = logistic(dot(row, t));
            acc += s * (1.0 - s) * (1.0 - 6.0 * s + 6.0 * s * s) * dot(row, v).powi(4);
        }
        Ok(acc)
    }
}
