//! Samples the banana-shaped posterior with HMC and with MMHMC using the analytic and the
//! numeric 4th-order modified Hamiltonians, and reports reweighted posterior means.
//!
//! ```text
//! cargo run --release --example banana_paths
//! ```

use mmhmc::diagnostics::{joint_ess_mcse, reweighted_estimate};
use mmhmc::integrators::lookup;
use mmhmc::models::{banana_simulate, BananaTarget};
use mmhmc::samplers::{run_chain, SamplerConfig, SamplerKind};
use mmhmc::shadow::{ShadowMode, ShadowOrder};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> mmhmc::Result<()> {
    let y = banana_simulate(100, 1.0, 2.0, &mut ChaCha20Rng::seed_from_u64(11))?;
    let target = BananaTarget::new(y, 2.0, 1.0)?;
    let base = SamplerConfig::new(lookup("m_me")?, 0.05, 14);
    let runs = [
        ("hmc", SamplerKind::Hmc, base.clone()),
        ("mmhmc analytic", SamplerKind::Mmhmc, base.clone()),
        ("mmhmc numeric", SamplerKind::Mmhmc, base.with_shadow(ShadowOrder::new(4, ShadowMode::Numeric)?)),
    ];
    println!("{:<16} {:>8} {:>10} {:>10} {:>10} {:>8}", "sampler", "AR", "E[t1]", "E[t2^2]", "MCSE t1", "ESS t1");
    for (name, kind, cfg) in runs {
        let chain = run_chain(&target, kind, &cfg, 6000, 1000, 1, &mut ChaCha20Rng::seed_from_u64(3))?;
        let t1 = reweighted_estimate(&chain, |t| t[0])?;
        let t2 = reweighted_estimate(&chain, |t| t[1] * t[1])?;
        let j = joint_ess_mcse(&chain, |t| t[0])?;
        println!("{name:<16} {:>8.3} {t1:>10.4} {t2:>10.4} {:>10.4} {:>8.0}", chain.accept_pos, j.mcse, j.ess);
    }
    Ok(())
}
