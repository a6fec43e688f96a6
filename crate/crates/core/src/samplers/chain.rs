use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;

use super::kernels::{ghmc_iteration, hmc_step, mala_config, mmhmc_iteration, rwmh_step, ChainState, IterationOutcome};
use super::SamplerConfig;
use crate::diagnostics::WeightedChain;
use crate::error::{Error, Result};
use crate::model::TargetModel;

/// Which kernel a chain runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplerKind {
    /// Gaussian random walk with the given proposal scale.
    Rwmh { scale: f64 },
    Mala,
    Hmc,
    Ghmc,
    Mmhmc,
}

impl SamplerKind {
    /// Whether retained samples carry importance weights.
    pub fn is_weighted(&self) -> bool {
        matches!(self, Self::Mmhmc)
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Rwmh { .. } => "rwmh",
            Self::Mala => "mala",
            Self::Hmc => "hmc",
            Self::Ghmc => "ghmc",
            Self::Mmhmc => "mmhmc",
        })
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    /// Parses a kernel name; the random-walk scale defaults to 1 and is set separately.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rwmh" => Ok(Self::Rwmh { scale: 1.0 }),
            "mala" => Ok(Self::Mala),
            "hmc" => Ok(Self::Hmc),
            "ghmc" => Ok(Self::Ghmc),
            "mmhmc" => Ok(Self::Mmhmc),
            other => Err(Error::InvalidArgument(format!("unknown sampler '{other}'"))),
        }
    }
}

/// Runs `n_samples` iterations from the model's initial position, discards the first
/// `burn_in` and retains every `thin`-th of the rest.
pub fn run_chain<M: TargetModel + ?Sized, R: Rng + ?Sized>(
    model: &M,
    kind: SamplerKind,
    config: &SamplerConfig,
    n_samples: usize,
    burn_in: usize,
    thin: usize,
    rng: &mut R,
) -> Result<WeightedChain> {
    run_chain_observed(model, kind, config, n_samples, burn_in, thin, rng, |_, _| {})
}

/// [`run_chain`] calling `observer` after every iteration, burn-in included.
#[allow(clippy::too_many_arguments)]
pub fn run_chain_observed<M: TargetModel + ?Sized, R: Rng + ?Sized>(
    model: &M,
    kind: SamplerKind,
    config: &SamplerConfig,
    n_samples: usize,
    burn_in: usize,
    thin: usize,
    rng: &mut R,
    mut observer: impl FnMut(&ChainState, &IterationOutcome),
) -> Result<WeightedChain> {
    if n_samples == 0 || thin == 0 {
        return Err(Error::InvalidArgument("need n_samples >= 1 and thin >= 1".into()));
    }
    config.validate(model.dim())?;
    let mala = mala_config(config);
    if kind == SamplerKind::Mmhmc {
        config.shadow.validate(&config.scheme, model)?;
    }
    let mut state = ChainState::new(model, model.initial_position(), &config.mass, rng)?;
    let burn_in = burn_in.min(n_samples);
    let mut chain = WeightedChain::unweighted(Vec::new());
    let (mut pos, mut mom, mut pos_total) = (0usize, 0usize, 0usize);
    let mut start = Instant::now();
    for i in 0..n_samples {
        if i == burn_in {
            start = Instant::now();
        }
        let out = match kind {
            SamplerKind::Rwmh { scale } => rwmh_step(&mut state, model, scale, rng),
            SamplerKind::Mala => hmc_step(&mut state, model, &mala, rng),
            SamplerKind::Hmc => hmc_step(&mut state, model, config, rng),
            SamplerKind::Ghmc => ghmc_iteration(&mut state, model, config, rng),
            SamplerKind::Mmhmc => mmhmc_iteration(&mut state, model, config, rng),
        }
        .map_err(|e| Error::Sampling(format!("iteration {i}: {e}")))?;
        observer(&state, &out);
        pos_total += out.position_accepted as usize;
        if i < burn_in {
            continue;
        }
        pos += out.position_accepted as usize;
        mom += out.momentum_accepted.unwrap_or(true) as usize;
        let j = i - burn_in;
        if (j + 1).is_multiple_of(thin) {
            chain.samples.push(state.current().theta.clone());
            chain.log_weights.push(state.log_weight());
            chain.iterations.push(j);
            chain.accepted.push(out.position_accepted);
        }
    }
    let sampling = (n_samples - burn_in) as f64;
    chain.wall_time = if n_samples > burn_in { start.elapsed().as_secs_f64() } else { 0.0 };
    chain.accept_pos = if sampling > 0.0 { pos as f64 / sampling } else { f64::NAN };
    chain.accept_mom = if sampling > 0.0 { mom as f64 / sampling } else { f64::NAN };
    chain.accept_pos_total = pos_total as f64 / n_samples as f64;
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::SplittingScheme;
    use crate::models::GaussianTarget;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn cfg() -> SamplerConfig {
        SamplerConfig::new(SplittingScheme::verlet(), 0.2, 5)
    }

    #[test]
    fn burn_in_and_thinning() {
        let g = GaussianTarget::standard(2);
        let mut r = ChaCha20Rng::seed_from_u64(1);
        let c = run_chain(&g, SamplerKind::Mmhmc, &cfg(), 50, 50, 1, &mut r).unwrap();
        assert!(c.is_empty());
        assert!(c.accept_pos_total > 0.0);
        let c = run_chain(&g, SamplerKind::Hmc, &cfg(), 103, 20, 5, &mut r).unwrap();
        assert_eq!(c.len(), 83 / 5);
        assert_eq!(c.iterations[0], 4);
        assert!(c.log_weights.iter().all(|w| *w == 0.0));
    }

    #[test]
    fn identical_seeds_are_bit_identical() {
        let g = GaussianTarget::from_variances(&[1.0, 2.0, 0.5]).unwrap();
        for kind in [SamplerKind::Mmhmc, SamplerKind::Ghmc, SamplerKind::Rwmh { scale: 0.8 }] {
            let a = run_chain(&g, kind, &cfg(), 200, 10, 1, &mut ChaCha20Rng::seed_from_u64(5)).unwrap();
            let b = run_chain(&g, kind, &cfg(), 200, 10, 1, &mut ChaCha20Rng::seed_from_u64(5)).unwrap();
            assert_eq!(a.samples, b.samples);
            assert_eq!(a.log_weights, b.log_weights);
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ["rwmh", "mala", "hmc", "ghmc", "mmhmc"] {
            assert_eq!(k.parse::<SamplerKind>().unwrap().to_string(), k);
        }
        assert!("nuts".parse::<SamplerKind>().is_err());
    }
}
