//! Weighted diagnostics on hand-built chains: Kong's ESS for the weights, the unbiased
//! weighted variance, and the joint ESS / MCSE of an autocorrelated weighted series.
//!
//! ```text
//! cargo run --release --example weighted_diagnostics
//! ```

use mmhmc::diagnostics::{ess_autocorr, ess_weighted, joint_ess_mcse_values, normalize_log_weights, weighted_variance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

fn main() -> mmhmc::Result<()> {
    println!("Kong ESS of equal weights (N=100): {:.1}", ess_weighted(&[0.01; 100])?);
    println!("Kong ESS of one dominant weight: {:.3}", ess_weighted(&[1.0, 0.0, 0.0, 0.0])?);
    println!("weighted variance, equal weights on 1..4: {:.4}", weighted_variance(&[1.0, 2.0, 3.0, 4.0], &[0.25; 4])?);

    // AR(1) series with rho = 0.9 and mildly varying log-weights
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let n = 20_000;
    let mut x = 0.0f64;
    let mut values = Vec::with_capacity(n);
    let mut log_w = Vec::with_capacity(n);
    for _ in 0..n {
        x = 0.9 * x + (1.0f64 - 0.81).sqrt() * rng.sample::<f64, _>(StandardNormal);
        values.push(x);
        log_w.push(0.05 * rng.sample::<f64, _>(StandardNormal));
    }
    let w = normalize_log_weights(&log_w)?;
    println!("\nAR(1), rho = 0.9, N = {n}");
    println!("  unweighted ESS {:.0} (theory {:.0})", ess_autocorr(&values)?, n as f64 * 0.1 / 1.9);
    println!("  weights ESS {:.0}", ess_weighted(&w)?);
    let j = joint_ess_mcse_values(&values, &log_w)?;
    println!("  joint ESS {:.0}, MCSE {:.4}, thinned size {:.0}", j.ess, j.mcse, j.m);
    Ok(())
}
