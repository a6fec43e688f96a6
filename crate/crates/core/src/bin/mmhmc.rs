use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mmhmc::diagnostics::summarize;
use mmhmc::harness::{glob_chains, load_config, read_chain_csv, run_experiment};
use mmhmc::integrators::{minimize_design_metric, DesignObjective, Family, RhoTarget};
use mmhmc::{Error, Result};

#[derive(Parser)]
#[command(name = "mmhmc", version, about = "Mix & Match Hamiltonian Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the chains of a configuration file and write samples and diagnostics.
    Sample {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        sampler: Option<String>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long = "L")]
        steps: Option<usize>,
        #[arg(long)]
        phi: Option<f64>,
        #[arg(long)]
        integrator: Option<String>,
        #[arg(long)]
        shadow_order: Option<u8>,
        #[arg(long)]
        shadow_mode: Option<String>,
        #[arg(long)]
        flip: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize chain files, optionally against baseline chains.
    Diagnose {
        #[arg(long)]
        chains: String,
        #[arg(long)]
        baseline: Option<String>,
        /// Print the per-variate CSV instead of the text summary.
        #[arg(long)]
        csv: bool,
    },
    /// Minimize an integrator design objective and print the coefficients.
    Design {
        #[arg(long, value_enum)]
        objective: Objective,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=4))]
        family: u8,
        /// Stability interval length; defaults to the number of stages.
        #[arg(long)]
        hbar: Option<f64>,
        /// For `rho`: bound the true-Hamiltonian error instead of the modified one.
        #[arg(long)]
        true_hamiltonian: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    #[value(name = "E")]
    E,
    #[value(name = "EG")]
    Eg,
    #[value(name = "rho")]
    Rho,
}

fn sample(cmd: Command) -> Result<()> {
    let Command::Sample { config, seed, sampler, h, steps, phi, integrator, shadow_order, shadow_mode, flip, out } = cmd else {
        unreachable!()
    };
    let mut cfg = load_config(&config)?;
    let overrides: [(&str, Option<String>); 10] = [
        ("run.seed", seed.map(|v| v.to_string())),
        ("sampler.kind", sampler),
        ("sampler.h", h.map(|v| v.to_string())),
        ("sampler.L", steps.map(|v| v.to_string())),
        ("sampler.phi", phi.map(|v| v.to_string())),
        ("sampler.integrator", integrator),
        ("sampler.shadow_order", shadow_order.map(|v| v.to_string())),
        ("sampler.shadow_mode", shadow_mode),
        ("sampler.flip", flip),
        ("output.dir", out.map(|p| p.display().to_string())),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    cfg.validate()?;
    let result = run_experiment(&cfg)?;
    print!("{}", result.report.to_text());
    eprintln!("wrote {} chain file(s) to {}", result.chain_files.len(), result.out_dir.display());
    Ok(())
}

fn diagnose(chains: &str, baseline: Option<&str>, csv: bool) -> Result<()> {
    let read = |pattern: &str| -> Result<Vec<_>> { glob_chains(pattern)?.iter().map(|p| read_chain_csv(p)).collect() };
    let main = read(chains)?;
    let base = baseline.map(read).transpose()?;
    let report = summarize(&main, base.as_deref())?;
    print!("{}", if csv { report.to_csv() } else { report.to_text() });
    Ok(())
}

fn design(objective: Objective, family: u8, hbar: Option<f64>, true_h: bool) -> Result<()> {
    let family = Family::from_stages(family as usize)?;
    let obj = match objective {
        Objective::E => DesignObjective::E,
        Objective::Eg => DesignObjective::EG,
        Objective::Rho if true_h => DesignObjective::Rho(RhoTarget::True),
        Objective::Rho => DesignObjective::Rho(RhoTarget::Modified),
    };
    let r = minimize_design_metric(obj, family, hbar)?;
    let names: &[&str] = match family {
        Family::TwoStage => &["b"],
        Family::ThreeStage => &["a", "b"],
        _ => &["a", "b1", "b2"],
    };
    for (n, v) in names.iter().zip(&r.params) {
        println!("{n} = {v:.6}");
    }
    println!("value = {:.4e}", r.value);
    let c = &r.coefficients;
    println!("alpha = {:.6e}", c.alpha());
    println!("beta = {:.6e}", c.beta());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        c @ Command::Sample { .. } => sample(c),
        Command::Diagnose { chains, baseline, csv } => diagnose(&chains, baseline.as_deref(), csv),
        Command::Design { objective, family, hbar, true_hamiltonian } => design(objective, family, hbar, true_hamiltonian),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_config_error() || matches!(e, Error::InvalidArgument(_) | Error::Io(_) | Error::Csv(_)) {
        2
    } else {
        3
    }
}
