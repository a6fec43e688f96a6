//! Runs every sampler through the experiment harness on the same configuration, then
//! compares them with the diagnostics report.
//!
//! ```text
//! cargo run --release --example sampler_comparison
//! ```

use std::path::Path;

use mmhmc::diagnostics::summarize;
use mmhmc::harness::{glob_chains, load_config, read_chain_csv, run_experiment};

fn main() -> mmhmc::Result<()> {
    let mut config = load_config(&Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/gaussian.conf"))?;
    let root = std::env::temp_dir().join("mmhmc_sampler_comparison");
    let mut dirs = Vec::new();
    for kind in ["hmc", "rwmh", "mala", "ghmc", "mmhmc"] {
        config.set("sampler.kind", kind)?;
        config.set("output.dir", &root.join(kind).display().to_string())?;
        if kind == "rwmh" {
            config.set("sampler.rwmh_scale", "0.6")?;
        }
        let out = run_experiment(&config)?;
        dirs.push((kind, out.out_dir));
    }
    let read = |dir: &Path| -> mmhmc::Result<Vec<_>> {
        glob_chains(&format!("{}/chain_*.csv", dir.display()))?.iter().map(|p| read_chain_csv(p)).collect()
    };
    let baseline = read(&dirs[0].1)?;
    println!("{:<7} {:>8} {:>10} {:>10} {:>8}", "sampler", "AR", "ESS med", "MCSE med", "EF med");
    for (kind, dir) in &dirs {
        let r = summarize(&read(dir)?, Some(&baseline))?;
        let ef = r.ef.map_or(f64::NAN, |s| s.median);
        println!("{kind:<7} {:>8.3} {:>10.0} {:>10.4} {ef:>8.2}", r.accept_pos, r.ess.median, r.mcse.median);
    }
    println!("\nchains written under {}", root.display());
    Ok(())
}
