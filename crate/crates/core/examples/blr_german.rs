//! Bayesian logistic regression on the German credit data: ingestion, then HMC and MMHMC
//! posterior means with their joint Monte Carlo standard errors.
//!
//! ```text
//! cargo run --release --example blr_german
//! ```

use std::path::Path;

use mmhmc::diagnostics::joint_ess_mcse;
use mmhmc::harness::ingest_blr_dataset;
use mmhmc::integrators::lookup;
use mmhmc::samplers::{run_chain, SamplerConfig, SamplerKind};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> mmhmc::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/german.csv");
    let data = ingest_blr_dataset(&path, Some("bad"))?;
    println!("D = {}, K = {}", data.d, data.k);
    let target = data.into_target(100.0)?;
    let cfg = SamplerConfig::new(lookup("m_me")?, 0.12, 6);
    let hmc = run_chain(&target, SamplerKind::Hmc, &cfg, 2500, 500, 1, &mut ChaCha20Rng::seed_from_u64(1))?;
    let mm = run_chain(&target, SamplerKind::Mmhmc, &cfg, 2500, 500, 1, &mut ChaCha20Rng::seed_from_u64(2))?;
    println!("acceptance: hmc {:.3}, mmhmc {:.3}", hmc.accept_pos, mm.accept_pos);
    println!("{:>4} {:>10} {:>10} {:>10} {:>10}", "d", "hmc", "mcse", "mmhmc", "mcse");
    for d in 0..6 {
        let a = joint_ess_mcse(&hmc, |t| t[d])?;
        let b = joint_ess_mcse(&mm, |t| t[d])?;
        let mean = |c: &mmhmc::diagnostics::WeightedChain| mmhmc::diagnostics::reweighted_estimate(c, |t| t[d]);
        println!("{d:>4} {:>10.4} {:>10.4} {:>10.4} {:>10.4}", mean(&hmc)?, a.mcse, mean(&mm)?, b.mcse);
    }
    Ok(())
}
