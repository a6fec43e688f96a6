//! MMHMC on a 100-dimensional Gaussian with a Wishart precision, against HMC at matched
//! cost: two-stage M-BCSS at step 2h versus Verlet at h.
//!
//! ```text
//! cargo run --release --example gaussian_mmhmc
//! ```

use mmhmc::diagnostics::summarize;
use mmhmc::integrators::lookup;
use mmhmc::models::generate_wishart_target;
use mmhmc::samplers::{run_chain, SamplerConfig, SamplerKind};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() -> mmhmc::Result<()> {
    let target = generate_wishart_target(100, &mut ChaCha20Rng::seed_from_u64(2024))?;
    let (n, burn, steps) = (3000, 300, 20);
    println!("{:>6} {:>10} {:>10} {:>10} {:>8}", "h", "AR hmc", "AR mmhmc", "AR mom", "EF");
    for h in [0.02, 0.04, 0.06] {
        let hmc_cfg = SamplerConfig::new(lookup("verlet")?, h, steps);
        let mm_cfg = SamplerConfig::new(lookup("m_bcss")?, 2.0 * h, steps / 2);
        let hmc = run_chain(&target, SamplerKind::Hmc, &hmc_cfg, n, burn, 1, &mut ChaCha20Rng::seed_from_u64(1))?;
        let mm = run_chain(&target, SamplerKind::Mmhmc, &mm_cfg, n, burn, 1, &mut ChaCha20Rng::seed_from_u64(1))?;
        let report = summarize(std::slice::from_ref(&mm), Some(std::slice::from_ref(&hmc)))?;
        let ef = report.ef.map_or(f64::NAN, |s| s.median);
        println!("{h:>6} {:>10.3} {:>10.3} {:>10.3} {ef:>8.2}", hmc.accept_pos, mm.accept_pos, mm.accept_mom);
    }
    Ok(())
}
