//! Experiment orchestration: build the target, run the chains, write the artifacts.

use std::fs;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::config::{ExperimentConfig, ModelName};
use super::data::ingest_blr_dataset;
use super::io::{write_chain_csv, write_meta, ChainMeta, META_FILE};
use crate::diagnostics::{summarize, Report, WeightedChain};
use crate::error::{Error, Result};
use crate::model::TargetModel;
use crate::models::{banana_simulate, generate_wishart_target, BananaTarget, GaussianTarget, SvData, SvParams};
use crate::samplers::{run_chain, run_sv_gibbs, SamplerKind, SvGibbsConfig};

/// Builds the target of a non-SV configuration. Generated targets use `model.seed`.
pub fn build_model(config: &ExperimentConfig) -> Result<Box<dyn TargetModel>> {
    let m = &config.model;
    let mut rng = ChaCha20Rng::seed_from_u64(m.seed);
    Ok(match m.name {
        ModelName::Gaussian => Box::new(GaussianTarget::standard(m.dim)),
        ModelName::Wishart => Box::new(generate_wishart_target(m.dim, &mut rng)?),
        ModelName::Banana => {
            let y = banana_simulate(m.observations, m.mean, m.sigma_y, &mut rng)?;
            Box::new(BananaTarget::new(y, m.sigma_y, m.sigma_theta)?)
        }
        ModelName::Blr => {
            let path = m.data.as_ref().ok_or_else(|| Error::ConfigValue {
                key: "model.data".into(),
                msg: "required for model.name = blr".into(),
            })?;
            Box::new(ingest_blr_dataset(path, m.label_column.as_deref())?.into_target(m.alpha)?)
        }
        ModelName::Sv => {
            return Err(Error::InvalidArgument("the SV model runs through the Gibbs sampler".into()));
        }
    })
}

/// Simulated stochastic volatility data for an SV configuration.
pub fn build_sv_data(config: &ExperimentConfig) -> Result<SvData> {
    let m = &config.model;
    let truth = SvParams { beta: m.sv_beta, sigma: m.sv_sigma, phi: m.sv_phi };
    Ok(SvData::simulate(m.sv_length, truth, &mut ChaCha20Rng::seed_from_u64(m.seed))?.0)
}

/// What [`run_experiment`] wrote.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: Report,
    pub chain_files: Vec<PathBuf>,
    pub out_dir: PathBuf,
}

fn chain_name(c: usize) -> String {
    format!("chain_{c:02}.csv")
}

/// Runs `run.n_chains` chains with seeds `run.seed + c` and writes, under `output.dir`:
/// `resolved_config.txt`, `chain_XX.csv`, `chains_meta.csv`, `report.csv` and `report.txt`.
///
/// Chains run one after another so that their wall times are comparable. If a chain fails,
/// the files of the chains before it are kept and the error is returned.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let dir = config.out_dir.clone();
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("resolved_config.txt"), config.emit())?;

    let kind = config.sampler_kind();
    let sampler = config.sampler_config()?;
    let model = if config.model.name == ModelName::Sv { None } else { Some(build_model(config)?) };
    let sv = if config.model.name == ModelName::Sv {
        if !matches!(kind, SamplerKind::Hmc | SamplerKind::Mmhmc) {
            return Err(Error::ConfigValue { key: "sampler.kind".into(), msg: "the SV model supports hmc and mmhmc".into() });
        }
        Some((build_sv_data(config)?, SvGibbsConfig { kind, theta: sampler.clone(), latent: config.latent_sampler_config()? }))
    } else {
        None
    };
    if let Some(m) = &model {
        sampler.validate(m.dim()).map_err(|e| Error::ConfigValue { key: "sampler".into(), msg: e.to_string() })?;
        if kind.is_weighted() {
            sampler
                .shadow
                .validate(&sampler.scheme, m.as_ref())
                .map_err(|e| Error::ConfigValue { key: "sampler.shadow_order".into(), msg: e.to_string() })?;
        }
    }

    let r = &config.run;
    let mut chains: Vec<WeightedChain> = Vec::with_capacity(r.n_chains);
    let mut meta = Vec::with_capacity(r.n_chains);
    let mut files = Vec::with_capacity(r.n_chains);
    for c in 0..r.n_chains {
        let seed = r.seed.wrapping_add(c as u64);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let result = match (&model, &sv) {
            (Some(m), _) => run_chain(m.as_ref(), kind, &sampler, r.n_samples, r.burn_in, r.thin, &mut rng),
            (None, Some((data, cfg))) => run_sv_gibbs(data, cfg, r.n_samples, r.burn_in, r.thin, &mut rng).and_then(|out| {
                write_latent_mean(&dir.join(format!("latent_mean_{c:02}.csv")), &out.latent_mean)?;
                Ok(out.chain)
            }),
            (None, None) => unreachable!(),
        };
        let chain = match result {
            Ok(chain) => chain,
            Err(e) => {
                write_meta(&dir.join(META_FILE), &meta)?;
                return Err(Error::Sampling(format!("chain {c} (seed {seed}): {e}")));
            }
        };
        let name = chain_name(c);
        let path = dir.join(&name);
        write_chain_csv(&path, &chain)?;
        meta.push(ChainMeta::new(name, seed, &chain));
        files.push(path);
        chains.push(chain);
    }
    write_meta(&dir.join(META_FILE), &meta)?;
    let report = summarize(&chains, None)?;
    fs::write(dir.join("report.csv"), report.to_csv())?;
    fs::write(dir.join("report.txt"), report.to_text())?;
    Ok(ExperimentOutput { report, chain_files: files, out_dir: dir })
}

fn write_latent_mean(path: &std::path::Path, mean: &[f64]) -> Result<()> {
    let mut s = String::from("t,x\n");
    for (t, x) in mean.iter().enumerate() {
        s.push_str(&format!("{},{x:.16e}\n", t + 1));
    }
    fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(dir: &std::path::Path, kind: &str) -> ExperimentConfig {
        let text = format!(
            "model.name = gaussian\nmodel.dim = 3\nsampler.kind = {kind}\nsampler.h = 0.3\nsampler.L = 4\n\
             run.n_samples = 120\nrun.burn_in = 20\nrun.n_chains = 3\nrun.seed = 7\noutput.dir = {}\n",
            dir.display()
        );
        ExperimentConfig::parse(&text).unwrap()
    }

    #[test]
    fn fan_out_and_determinism() {
        let tmp = tempfile::tempdir().unwrap();
        let a = small(&tmp.path().join("a"), "mmhmc");
        let out = run_experiment(&a).unwrap();
        assert_eq!(out.chain_files.len(), 3);
        let meta = fs::read_to_string(out.out_dir.join(META_FILE)).unwrap();
        assert!(meta.contains("chain_00.csv,7,") && meta.contains("chain_02.csv,9,"));
        let mut b = a.clone();
        b.out_dir = tmp.path().join("b");
        run_experiment(&b).unwrap();
        for f in ["chain_00.csv", "chain_01.csv", "chain_02.csv"] {
            assert_eq!(fs::read(tmp.path().join("a").join(f)).unwrap(), fs::read(tmp.path().join("b").join(f)).unwrap());
        }
        let echoed = ExperimentConfig::parse(&fs::read_to_string(out.out_dir.join("resolved_config.txt")).unwrap()).unwrap();
        assert_eq!(echoed, a);
    }

    #[test]
    fn unweighted_sampler_writes_unit_weights() {
        let tmp = tempfile::tempdir().unwrap();
        let out = run_experiment(&small(tmp.path(), "hmc")).unwrap();
        let text = fs::read_to_string(&out.chain_files[0]).unwrap();
        assert!(text.lines().skip(1).all(|l| l.split(',').nth(1) == Some("1.0000000000000000e0")));
    }
}
