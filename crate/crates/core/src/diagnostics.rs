//! Estimators and efficiency metrics for weighted, autocorrelated chains.

use std::fmt::Write as _;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Retained draws of one chain with their importance log-weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedChain {
    /// `N × D` retained positions.
    pub samples: Vec<Vec<f64>>,
    /// `ln w_n`; all zero for samplers without importance weights.
    pub log_weights: Vec<f64>,
    /// Iteration index (counted from the first sampling iteration) of each retained draw.
    pub iterations: Vec<usize>,
    /// Whether the position move of the producing iteration was accepted.
    pub accepted: Vec<bool>,
    /// Position acceptance rate over the sampling phase.
    pub accept_pos: f64,
    /// Momentum acceptance rate over the sampling phase (1 for samplers without a momentum test).
    pub accept_mom: f64,
    /// Position acceptance rate over all iterations, burn-in included.
    pub accept_pos_total: f64,
    /// Sampling-phase wall time in seconds.
    pub wall_time: f64,
}

impl WeightedChain {
    /// Chain with unit weights.
    pub fn unweighted(samples: Vec<Vec<f64>>) -> Self {
        let n = samples.len();
        Self {
            log_weights: vec![0.0; n],
            iterations: (0..n).collect(),
            accepted: vec![true; n],
            samples,
            accept_pos: 1.0,
            accept_mom: 1.0,
            accept_pos_total: 1.0,
            wall_time: 0.0,
        }
    }

    /// Chain with the given log-weights.
    pub fn weighted(samples: Vec<Vec<f64>>, log_weights: Vec<f64>) -> Result<Self> {
        if samples.len() != log_weights.len() {
            return Err(Error::DimensionMismatch { expected: samples.len(), found: log_weights.len() });
        }
        let mut c = Self::unweighted(samples);
        c.log_weights = log_weights;
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    /// Weights rescaled so the largest is 1.
    pub fn normalized_weights(&self) -> Result<Vec<f64>> {
        normalize_log_weights(&self.log_weights)
    }

    /// Values of coordinate `d` across retained samples.
    pub fn coordinate(&self, d: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s[d]).collect()
    }
}

/// `exp(ℓ_n − max ℓ)`.
pub fn normalize_log_weights(log_weights: &[f64]) -> Result<Vec<f64>> {
    if log_weights.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::DegenerateWeights(format!("largest log-weight is {max}")));
    }
    let w: Vec<f64> = log_weights.iter().map(|l| (l - max).exp()).collect();
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateWeights("non-finite weight".into()));
    }
    Ok(w)
}

fn weighted_mean(values: &[f64], weights: &[f64]) -> Result<f64> {
    let sw: f64 = weights.iter().sum();
    if !(sw > 0.0) {
        return Err(Error::DegenerateWeights("all weights are zero".into()));
    }
    Ok(values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / sw)
}

/// Self-normalized importance estimate `Σ f(θⁿ) wₙ / Σ wₙ`.
pub fn reweighted_estimate(chain: &WeightedChain, f: impl Fn(&[f64]) -> f64) -> Result<f64> {
    let w = chain.normalized_weights()?;
    let values: Vec<f64> = chain.samples.iter().map(|s| f(s)).collect();
    weighted_mean(&values, &w)
}

/// Autocovariances at all lags (divisor `N`), via zero-padded FFT.
fn autocovariance(series: &[f64]) -> Vec<f64> {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let len = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = series.iter().map(|x| Complex::new(x - mean, 0.0)).collect();
    buf.resize(len, Complex::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    buf.iter().take(n).map(|c| c.re / (len as f64 * n as f64)).collect()
}

/// Autocorrelation effective sample size `N / (1 + 2 Σ ρ̂_k)`, truncated by Geyer's initial
/// positive sequence. Clamped to `(0, N]`; a constant series has `ESS = N`.
pub fn ess_autocorr(series: &[f64]) -> Result<f64> {
    let n = series.len();
    if n < 10 {
        return Err(Error::InvalidArgument(format!("ESS needs at least 10 samples, got {n}")));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("series contains non-finite values".into()));
    }
    let acov = autocovariance(series);
    if !(acov[0] > 0.0) || series.iter().all(|v| *v == series[0]) {
        return Ok(n as f64);
    }
    let rho = |k: usize| if k < n { acov[k] / acov[0] } else { 0.0 };
    let mut tau = -1.0;
    let mut m = 0;
    while 2 * m + 1 < n {
        let pair = rho(2 * m) + rho(2 * m + 1);
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        m += 1;
    }
    let ess = n as f64 / tau;
    Ok(if ess.is_finite() && ess > 0.0 { ess.min(n as f64) } else { n as f64 })
}

/// Importance-sampling effective sample size `(Σw)² / Σw²`.
pub fn ess_weighted(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::InvalidArgument("no weights".into()));
    }
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidArgument("weights must be finite and non-negative".into()));
    }
    let s: f64 = weights.iter().sum();
    let s2: f64 = weights.iter().map(|w| w * w).sum();
    if !(s2 > 0.0) {
        return Err(Error::DegenerateWeights("all weights are zero".into()));
    }
    Ok(s * s / s2)
}

/// Unbiased weighted variance `Σw / ((Σw)² − Σw²) · Σ wₙ (fₙ − Î)²`.
pub fn weighted_variance(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.len() != weights.len() {
        return Err(Error::DimensionMismatch { expected: values.len(), found: weights.len() });
    }
    let s: f64 = weights.iter().sum();
    let s2: f64 = weights.iter().map(|w| w * w).sum();
    let denom = s * s - s2;
    if !(denom > 0.0) {
        return Err(Error::DegenerateWeights("fewer than two effective samples".into()));
    }
    let mean = weighted_mean(values, weights)?;
    let ss: f64 = values.iter().zip(weights).map(|(v, w)| w * (v - mean) * (v - mean)).sum();
    Ok(s / denom * ss)
}

/// Indices `⌊k·N/M⌋`, `k = 0, 1, …`, below `N`: a subsample of about `M` draws at average
/// distance `N/M`, starting from the first draw.
pub fn thinning_indices(n: usize, m: f64) -> Vec<usize> {
    let spacing = (n as f64 / m).max(1.0);
    let mut idx = Vec::with_capacity(m.ceil() as usize);
    let mut k = 0usize;
    loop {
        let i = (k as f64 * spacing).floor() as usize;
        if i >= n {
            break;
        }
        if idx.last() != Some(&i) {
            idx.push(i);
        }
        k += 1;
    }
    idx
}

/// Combined autocorrelation / importance-sampling metric of one estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointEss {
    /// Number of uncorrelated samples `M`.
    pub m: f64,
    /// Importance ESS of the thinned subsample.
    pub ess: f64,
    pub mcse: f64,
}

/// Thins the chain to about `M` draws (see [`thinning_indices`]) and computes the
/// importance-sampling ESS and MCSE of `f` on the subsample.
pub fn joint_ess_mcse(chain: &WeightedChain, f: impl Fn(&[f64]) -> f64) -> Result<JointEss> {
    let values: Vec<f64> = chain.samples.iter().map(|s| f(s)).collect();
    joint_ess_mcse_values(&values, &chain.log_weights)
}

/// [`joint_ess_mcse`] on precomputed values `f(θⁿ)`.
pub fn joint_ess_mcse_values(values: &[f64], log_weights: &[f64]) -> Result<JointEss> {
    if values.len() != log_weights.len() {
        return Err(Error::DimensionMismatch { expected: values.len(), found: log_weights.len() });
    }
    let n = values.len();
    let m = ess_autocorr(values)?;
    let idx = thinning_indices(n, m);
    let sub: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
    let lw: Vec<f64> = idx.iter().map(|&i| log_weights[i]).collect();
    let w = normalize_log_weights(&lw)?;
    let ess = ess_weighted(&w)?;
    let var = weighted_variance(&sub, &w)?;
    Ok(JointEss { m, ess, mcse: (var / ess).sqrt() })
}

/// Per-variate efficiency summary.
#[derive(Debug, Clone, PartialEq)]
pub struct VariateSummary {
    pub variate: usize,
    pub estimate: f64,
    pub ess: f64,
    pub mcse: f64,
    pub ess_per_time: f64,
    pub mcse_time: f64,
    /// Efficiency factor against the baseline: ratio of ESS/T.
    pub ef: Option<f64>,
}

/// Minimum, median and maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl Spread {
    fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        Self { min: v[0], median, max: v[n - 1] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub n_chains: usize,
    pub n_samples: usize,
    pub variates: Vec<VariateSummary>,
    pub ess: Spread,
    pub mcse: Spread,
    pub ess_per_time: Spread,
    pub ef: Option<Spread>,
    pub accept_pos: f64,
    pub accept_mom: f64,
    pub wall_time: f64,
    /// `Σ_d |θ̂_d|`.
    pub total_distance: f64,
}

struct ChainSetStats {
    estimate: Vec<f64>,
    ess: Vec<f64>,
    mcse: Vec<f64>,
    time: f64,
    n: usize,
    ar_pos: f64,
    ar_mom: f64,
}

fn chain_set_stats(chains: &[WeightedChain]) -> Result<ChainSetStats> {
    if chains.is_empty() {
        return Err(Error::InvalidArgument("no chains to summarize".into()));
    }
    let d = chains[0].dim();
    if let Some(c) = chains.iter().find(|c| c.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: c.dim() });
    }
    let k = chains.len() as f64;
    let (mut est, mut ess, mut mcse) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    for c in chains {
        let w = c.normalized_weights()?;
        for j in 0..d {
            let vals = c.coordinate(j);
            let je = joint_ess_mcse_values(&vals, &c.log_weights)?;
            est[j] += weighted_mean(&vals, &w)? / k;
            ess[j] += je.ess / k;
            mcse[j] += je.mcse / k;
        }
    }
    Ok(ChainSetStats {
        estimate: est,
        ess,
        mcse,
        time: chains.iter().map(|c| c.wall_time).sum::<f64>() / k,
        n: chains.iter().map(WeightedChain::len).sum(),
        ar_pos: chains.iter().map(|c| c.accept_pos).sum::<f64>() / k,
        ar_mom: chains.iter().map(|c| c.accept_mom).sum::<f64>() / k,
    })
}

fn per_time(v: f64, t: f64) -> f64 {
    if t > 0.0 {
        v / t
    } else {
        f64::INFINITY
    }
}

/// Summarizes the coordinate-mean estimators of a chain set, averaging ESS and MCSE over
/// chains. With a baseline, efficiency factors are ESS/T ratios per variate.
pub fn summarize(chains: &[WeightedChain], baseline: Option<&[WeightedChain]>) -> Result<Report> {
    let s = chain_set_stats(chains)?;
    let base = baseline.map(chain_set_stats).transpose()?;
    if let Some(b) = &base {
        if b.ess.len() != s.ess.len() {
            return Err(Error::DimensionMismatch { expected: s.ess.len(), found: b.ess.len() });
        }
    }
    let variates: Vec<VariateSummary> = (0..s.ess.len())
        .map(|j| {
            let ept = per_time(s.ess[j], s.time);
            VariateSummary {
                variate: j + 1,
                estimate: s.estimate[j],
                ess: s.ess[j],
                mcse: s.mcse[j],
                ess_per_time: ept,
                mcse_time: s.mcse[j] * s.time,
                ef: base.as_ref().map(|b| ept / per_time(b.ess[j], b.time)),
            }
        })
        .collect();
    let col = |f: fn(&VariateSummary) -> f64| Spread::of(&variates.iter().map(f).collect::<Vec<_>>());
    let ef = base.as_ref().map(|_| col(|v| v.ef.unwrap()));
    Ok(Report {
        n_chains: chains.len(),
        n_samples: s.n,
        ess: col(|v| v.ess),
        mcse: col(|v| v.mcse),
        ess_per_time: col(|v| v.ess_per_time),
        ef,
        accept_pos: s.ar_pos,
        accept_mom: s.ar_mom,
        wall_time: s.time,
        total_distance: s.estimate.iter().map(|e| e.abs()).sum(),
        variates,
    })
}

impl Report {
    /// One row per variate.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("variate,estimate,ess,mcse,ess_per_time,mcse_time,ef\n");
        for v in &self.variates {
            let ef = v.ef.map_or(String::new(), |e| format!("{e:.6e}"));
            let _ = writeln!(
                out,
                "theta_{},{:.10e},{:.6e},{:.6e},{:.6e},{:.6e},{}",
                v.variate, v.estimate, v.ess, v.mcse, v.ess_per_time, v.mcse_time, ef
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "chains: {}  retained samples: {}", self.n_chains, self.n_samples);
        let _ = writeln!(out, "acceptance: position {:.4}  momentum {:.4}", self.accept_pos, self.accept_mom);
        let _ = writeln!(out, "mean sampling time per chain: {:.3} s", self.wall_time);
        let row = |name: &str, s: &Spread| format!("{name:<8} min {:.4e}  median {:.4e}  max {:.4e}", s.min, s.median, s.max);
        let _ = writeln!(out, "{}", row("ESS", &self.ess));
        let _ = writeln!(out, "{}", row("MCSE", &self.mcse));
        let _ = writeln!(out, "{}", row("ESS/T", &self.ess_per_time));
        if let Some(ef) = &self.ef {
            let _ = writeln!(out, "{}", row("EF", ef));
        }
        let _ = writeln!(
            out,
            "total distance from zero: {:.6e} (per second {:.6e})",
            self.total_distance,
            per_time(self.total_distance, self.wall_time)
        );
        out
    }
}
