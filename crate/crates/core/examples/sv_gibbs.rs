//! Stochastic volatility on simulated data: Gibbs sampling with MMHMC updates for the
//! parameters and for the latent log-volatility path.
//!
//! ```text
//! cargo run --release --example sv_gibbs
//! ```

use mmhmc::diagnostics::reweighted_estimate;
use mmhmc::integrators::lookup;
use mmhmc::models::{SvData, SvParams};
use mmhmc::samplers::{run_sv_gibbs, SamplerConfig, SamplerKind, SvGibbsConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> mmhmc::Result<()> {
    let truth = SvParams { beta: 0.65, sigma: 0.15, phi: 0.98 };
    let (data, x) = SvData::simulate(100, truth, &mut ChaCha20Rng::seed_from_u64(5))?;
    let scheme = lookup("m_me")?;
    let config = SvGibbsConfig {
        kind: SamplerKind::Mmhmc,
        theta: SamplerConfig::new(scheme.clone(), 0.03, 10),
        latent: SamplerConfig::new(scheme, 0.1, 10),
    };
    let out = run_sv_gibbs(&data, &config, 4000, 1000, 1, &mut ChaCha20Rng::seed_from_u64(9))?;
    let c = &out.chain;
    println!("acceptance: theta {:.3}, latent {:.3}", c.accept_pos, out.latent_accept);
    for (i, (name, v)) in [("beta", truth.beta), ("sigma", truth.sigma), ("phi", truth.phi)].iter().enumerate() {
        println!("{name:>6}: posterior mean {:.4} (truth {v})", reweighted_estimate(c, |t| t[i])?);
    }
    let err: f64 = out.latent_mean.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / x.len() as f64;
    println!("latent path RMSE {:.3}", err.sqrt());
    Ok(())
}
