//! Stochastic volatility model `y_t = β exp(x_t/2) ε_t`, `x_t = φ x_{t−1} + σ η_t`,
//! sampled by Gibbs cycling over the parameter block and the latent block.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{check_dim, Capabilities, TargetModel};

/// Constrained parameters `(β, σ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvParams {
    pub beta: f64,
    pub sigma: f64,
    pub phi: f64,
}

impl SvParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(Error::eval(Some(0), "beta must be positive"));
        }
        if !(self.sigma > 0.0) || !(self.phi.abs() < 1.0) {
            return Err(Error::InvalidArgument("need sigma > 0 and |phi| < 1".into()));
        }
        Ok(())
    }

    /// `θ̄ = (β, ln σ, artanh φ)`.
    pub fn to_unconstrained(&self) -> [f64; 3] {
        [self.beta, self.sigma.ln(), self.phi.atanh()]
    }

    pub fn from_unconstrained(t: &[f64]) -> Self {
        Self { beta: t[0], sigma: t[1].exp(), phi: t[2].tanh() }
    }
}

/// Observed returns.
#[derive(Debug, Clone)]
pub struct SvData {
    pub y: Vec<f64>,
}

impl SvData {
    /// Simulates `T` returns and the latent path.
    pub fn simulate<R: Rng + ?Sized>(t_len: usize, params: SvParams, rng: &mut R) -> Result<(Self, Vec<f64>)> {
        if !(params.sigma >= 0.0) || !(params.phi.abs() < 1.0) {
            return Err(Error::InvalidArgument("need sigma >= 0 and |phi| < 1".into()));
        }
        let mut x = Vec::with_capacity(t_len);
        let mut y = Vec::with_capacity(t_len);
        for t in 0..t_len {
            let eta: f64 = rng.sample(StandardNormal);
            let xt = if t == 0 {
                params.sigma / (1.0 - params.phi * params.phi).sqrt() * eta
            } else {
                params.phi * x[t - 1] + params.sigma * eta
            };
            let eps: f64 = rng.sample(StandardNormal);
            x.push(xt);
            y.push(params.beta * (xt / 2.0).exp() * eps);
        }
        Ok((Self { y }, x))
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// `ln(1 − tanh²α) = −2 ln cosh α`, evaluated without cancellation.
fn log_one_minus_tanh_sq(alpha: f64) -> f64 {
    let a = alpha.abs();
    -2.0 * (a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2)
}

/// Statistics of the latent path entering the parameter conditional.
struct LatentStats {
    /// `Σ y_t² e^{−x_t}`.
    b: f64,
    /// `Σ x_t / 2`.
    half_sum: f64,
    /// `x₁²`.
    x1sq: f64,
    /// `Σ_{t≥2} x_t x_{t−1}`.
    cross: f64,
    /// `Σ_{t≥2} x_{t−1}²`.
    lag_sq: f64,
    /// `Σ_{t≥2} x_t²`.
    lead_sq: f64,
}

impl LatentStats {
    fn new(y: &[f64], x: &[f64]) -> Self {
        let b = y.iter().zip(x).map(|(yt, xt)| yt * yt * (-xt).exp()).sum();
        let half_sum = x.iter().sum::<f64>() / 2.0;
        let x1sq = x.first().map_or(0.0, |v| v * v);
        let (mut cross, mut lag_sq, mut lead_sq) = (0.0, 0.0, 0.0);
        for w in x.windows(2) {
            cross += w[1] * w[0];
            lag_sq += w[0] * w[0];
            lead_sq += w[1] * w[1];
        }
        Self { b, half_sum, x1sq, cross, lag_sq, lead_sq }
    }

    /// `S(φ) = (1−φ²)x₁² + Σ_{t≥2}(x_t − φx_{t−1})²` and its first two φ-derivatives.
    fn s(&self, phi: f64) -> (f64, f64, f64) {
        let s = (1.0 - phi * phi) * self.x1sq + self.lead_sq - 2.0 * phi * self.cross + phi * phi * self.lag_sq;
        let ds = -2.0 * phi * self.x1sq - 2.0 * self.cross + 2.0 * phi * self.lag_sq;
        let dds = -2.0 * self.x1sq + 2.0 * self.lag_sq;
        (s, ds, dds)
    }
}

/// Conditional of `θ̄ = (β, ln σ, artanh φ)` given the latent path, with Jacobian terms.
#[derive(Debug, Clone)]
pub struct SvThetaBlock {
    y: Vec<f64>,
    x: Vec<f64>,
}

impl SvThetaBlock {
    pub fn new(y: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        check_dim(y.len(), x.len())?;
        Ok(Self { y, x })
    }

    pub fn set_latent(&mut self, x: &[f64]) {
        self.x.copy_from_slice(x);
    }

    fn terms(&self, t: &[f64]) -> Result<ThetaTerms> {
        check_dim(3, t.len())?;
        let (beta, gamma, alpha) = (t[0], t[1], t[2]);
        if !(beta > 0.0) {
            return Err(Error::eval(Some(0), "beta must stay positive"));
        }
        if !gamma.is_finite() || !alpha.is_finite() {
            return Err(Error::eval(None, "non-finite parameter"));
        }
        let phi = alpha.tanh();
        let one_m = 1.0 - phi * phi;
        let log_one_m = log_one_minus_tanh_sq(alpha);
        let n = self.y.len() as f64;
        let s2inv = (-2.0 * gamma).exp();

        // Priors and the Jacobian of the transform.
        let mut u = beta.ln() + 11.0 * gamma + 0.25 * s2inv - 19.0 * phi.ln_1p() - 0.5 * (-phi).ln_1p()
            - gamma
            - log_one_m;
        let mut du_beta = 1.0 / beta;
        let mut du_gamma = 10.0 - 0.5 * s2inv;
        // g = ∂U/∂φ and its derivative.
        let mut g = 2.0 * phi / one_m - 19.0 / (1.0 + phi) + 0.5 / (1.0 - phi);
        let mut dg = 2.0 * (1.0 + phi * phi) / (one_m * one_m) + 19.0 / (1.0 + phi).powi(2) + 0.5 / (1.0 - phi).powi(2);
        let mut h_bb = -1.0 / (beta * beta);
        let mut h_gg = s2inv;
        let mut h_ga = 0.0;

        if !self.y.is_empty() {
            let st = LatentStats::new(&self.y, &self.x);
            let (s, ds, dds) = st.s(phi);
            u += n * beta.ln() + st.half_sum + st.b / (2.0 * beta * beta);
            u += n * gamma - 0.5 * log_one_m + s * s2inv / 2.0;
            du_beta += n / beta - st.b / beta.powi(3);
            du_gamma += n - s * s2inv;
            g += phi / one_m + ds * s2inv / 2.0;
            dg += (1.0 + phi * phi) / (one_m * one_m) + dds * s2inv / 2.0;
            h_bb += -n / (beta * beta) + 3.0 * st.b / beta.powi(4);
            h_gg += 2.0 * s * s2inv;
            h_ga = -ds * one_m * s2inv;
        }
        let h_aa = (dg * one_m - 2.0 * phi * g) * one_m;
        if !u.is_finite() {
            return Err(Error::eval(None, "non-finite potential"));
        }
        Ok(ThetaTerms {
            u,
            grad: [du_beta, du_gamma, g * one_m],
            hess: [[h_bb, 0.0, 0.0], [0.0, h_gg, h_ga], [0.0, h_ga, h_aa]],
        })
    }
}

struct ThetaTerms {
    u: f64,
    grad: [f64; 3],
    hess: [[f64; 3]; 3],
}

impl TargetModel for SvThetaBlock {
    fn dim(&self) -> usize {
        3
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { has_hessian: true, ..Capabilities::default() }
    }

    fn potential(&self, t: &[f64]) -> Result<f64> {
        Ok(self.terms(t)?.u)
    }

    fn potential_and_gradient(&self, t: &[f64], grad: &mut [f64]) -> Result<f64> {
        let terms = self.terms(t)?;
        grad.copy_from_slice(&terms.grad);
        Ok(terms.u)
    }

    fn hessian_vector(&self, t: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        let h = self.terms(t)?.hess;
        for i in 0..3 {
            out[i] = h[i][0] * v[0] + h[i][1] * v[1] + h[i][2] * v[2];
        }
        Ok(())
    }

    fn initial_position(&self) -> Vec<f64> {
        SvParams { beta: 1.0, sigma: 0.2, phi: 0.9 }.to_unconstrained().to_vec()
    }
}

/// Conditional of the latent log-volatilities given the parameters.
#[derive(Debug, Clone)]
pub struct SvLatentBlock {
    y: Vec<f64>,
    params: SvParams,
}

impl SvLatentBlock {
    pub fn new(y: Vec<f64>, params: SvParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { y, params })
    }

    pub fn set_params(&mut self, params: SvParams) -> Result<()> {
        params.validate()?;
        self.params = params;
        Ok(())
    }

    /// `y_t² e^{−x_t} / (2β²)`, the observation curvature at `t`.
    fn obs(&self, x: &[f64], t: usize) -> f64 {
        self.y[t] * self.y[t] * (-x[t]).exp() / (2.0 * self.params.beta * self.params.beta)
    }
}

impl TargetModel for SvLatentBlock {
    fn dim(&self) -> usize {
        self.y.len()
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities { has_hessian: true, has_third: true, has_fourth: true, quadratic: false }
    }

    fn potential(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.y.len(), x.len())?;
        let SvParams { phi, sigma, .. } = self.params;
        let mut u = 0.0;
        for t in 0..x.len() {
            u += x[t] / 2.0 + self.obs(x, t);
        }
        let mut q = (1.0 - phi * phi) * x[0] * x[0];
        for w in x.windows(2) {
            q += (w[1] - phi * w[0]).powi(2);
        }
        u += q / (2.0 * sigma * sigma);
        if !u.is_finite() {
            let idx = x.iter().position(|v| !v.is_finite());
            return Err(Error::eval(idx, "non-finite latent potential"));
        }
        Ok(u)
    }

    fn potential_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> Result<f64> {
        let u = self.potential(x)?;
        let SvParams { phi, sigma, .. } = self.params;
        let s2 = sigma * sigma;
        let n = x.len();
        for t in 0..n {
            let mut ar = if t == 0 { (1.0 - phi * phi) * x[0] } else { x[t] - phi * x[t - 1] };
            if t + 1 < n {
                ar -= phi * (x[t + 1] - phi * x[t]);
            }
            grad[t] = 0.5 - self.obs(x, t) + ar / s2;
        }
        Ok(u)
    }

    fn hessian_vector(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(self.y.len(), x.len())?;
        let SvParams { phi, sigma, .. } = self.params;
        let s2 = sigma * sigma;
        let n = x.len();
        for t in 0..n {
            let diag = if t == 0 || t + 1 == n { 1.0 } else { 1.0 + phi * phi };
            let diag = if n == 1 { 1.0 - phi * phi } else { diag };
            let mut o = (self.obs(x, t) + diag / s2) * v[t];
            if t > 0 {
                o -= phi / s2 * v[t - 1];
            }
            if t + 1 < n {
                o -= phi / s2 * v[t + 1];
            }
            out[t] = o;
        }
        Ok(())
    }

    fn third_contraction(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> Result<()> {
        check_dim(self.y.len(), x.len())?;
        for t in 0..x.len() {
            out[t] = -self.obs(x, t) * v[t] * v[t];
        }
        Ok(())
    }

    fn fourth_contraction(&self, x: &[f64], v: &[f64]) -> Result<f64> {
        check_dim(self.y.len(), x.len())?;
        Ok((0..x.len()).map(|t| self.obs(x, t) * v[t].powi(4)).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{dense_hessian, finite_difference_gradient};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn truth() -> SvParams {
        SvParams { beta: 0.65, sigma: 0.15, phi: 0.98 }
    }

    fn assert_grad<M: TargetModel>(m: &M, pt: &[f64]) {
        let mut g = vec![0.0; pt.len()];
        m.potential_and_gradient(pt, &mut g).unwrap();
        let fd = finite_difference_gradient(m, pt, 1e-5).unwrap();
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() <= 1e-4 * a.abs().max(1.0), "{a} vs {b}");
        }
    }

    fn assert_hessian<M: TargetModel>(m: &M, pt: &[f64]) {
        let h = dense_hessian(m, pt).unwrap();
        let n = pt.len();
        let e = 1e-6;
        for j in 0..n {
            let (mut up, mut dn) = (pt.to_vec(), pt.to_vec());
            up[j] += e;
            dn[j] -= e;
            let (mut gu, mut gd) = (vec![0.0; n], vec![0.0; n]);
            m.potential_and_gradient(&up, &mut gu).unwrap();
            m.potential_and_gradient(&dn, &mut gd).unwrap();
            for i in 0..n {
                let fd = (gu[i] - gd[i]) / (2.0 * e);
                assert!((h[(i, j)] - fd).abs() <= 1e-4 * fd.abs().max(1.0), "H[{i},{j}] {} vs {fd}", h[(i, j)]);
            }
        }
        assert!((&h - h.transpose()).amax() <= 1e-12 * h.amax());
    }

    #[test]
    fn theta_block_derivatives() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let (data, x) = SvData::simulate(40, truth(), &mut rng).unwrap();
        let m = SvThetaBlock::new(data.y.clone(), x).unwrap();
        for _ in 0..20 {
            let pt = [rng.random_range(0.3..1.5), rng.random_range(-3.0..0.0), rng.random_range(-2.0..3.0)];
            assert_grad(&m, &pt);
            assert_hessian(&m, &pt);
        }
    }

    #[test]
    fn theta_block_without_data_is_prior_plus_jacobian() {
        let m = SvThetaBlock::new(vec![], vec![]).unwrap();
        let p = SvParams { beta: 0.8, sigma: 0.3, phi: 0.5 };
        let t = p.to_unconstrained();
        let prior = p.beta.ln() + 11.0 * p.sigma.ln() + 1.0 / (4.0 * p.sigma * p.sigma)
            - 19.0 * (1.0 + p.phi).ln()
            - 0.5 * (1.0 - p.phi).ln();
        let jac = p.sigma.ln() + (1.0 - p.phi * p.phi).ln();
        assert!((m.potential(&t).unwrap() - (prior - jac)).abs() < 1e-12);
        assert_grad(&m, &t);
        assert!(m.potential(&[-0.1, 0.0, 0.0]).is_err());
    }

    #[test]
    fn transform_round_trip() {
        let p = SvParams { beta: 0.65, sigma: 0.15, phi: 0.98 };
        let q = SvParams::from_unconstrained(&p.to_unconstrained());
        assert!((q.sigma - p.sigma).abs() < 1e-12 && (q.phi - p.phi).abs() < 1e-12);
    }

    #[test]
    fn latent_block_derivatives_and_band() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let (data, x) = SvData::simulate(12, truth(), &mut rng).unwrap();
        let m = SvLatentBlock::new(data.y.clone(), truth()).unwrap();
        for _ in 0..20 {
            let pt: Vec<f64> = x.iter().map(|v| v + rng.random_range(-0.5..0.5)).collect();
            assert_grad(&m, &pt);
            assert_hessian(&m, &pt);
        }
        let h = dense_hessian(&m, &x).unwrap();
        for i in 0..12usize {
            for j in 0..12 {
                if i.abs_diff(j) > 1 {
                    assert_eq!(h[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn latent_block_with_zero_returns() {
        let p = SvParams { beta: 1.0, sigma: 1.0, phi: 0.0 };
        let m = SvLatentBlock::new(vec![0.0; 3], p).unwrap();
        let x = [0.2, -0.4, 1.0];
        let quad: f64 = x.iter().map(|v| v * v / 2.0).sum();
        assert!((m.potential(&x).unwrap() - (0.4 + quad)).abs() < 1e-12);
    }

    #[test]
    fn simulation_oracles() {
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        let p = SvParams { beta: 1.0, sigma: 0.5, phi: 0.0 };
        let (_, x) = SvData::simulate(100_000, p, &mut rng).unwrap();
        let var = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        assert!((var / 0.25 - 1.0).abs() < 0.02);

        let p = SvParams { beta: 0.7, sigma: 0.0, phi: 0.9 };
        let (d, x) = SvData::simulate(50, p, &mut rng).unwrap();
        assert!(x.iter().all(|v| *v == 0.0));
        assert!(d.y.iter().all(|v| v.is_finite()));

        let p = SvParams { beta: 1.0, sigma: 0.3, phi: 0.9 };
        let (_, x) = SvData::simulate(200_000, p, &mut rng).unwrap();
        let var = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        let target = 0.09 / (1.0 - 0.81);
        assert!((var / target - 1.0).abs() < 0.1);
    }
}
