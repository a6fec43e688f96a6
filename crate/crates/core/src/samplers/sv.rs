use std::time::Instant;

use rand::Rng;

use super::kernels::{hmc_step, mmhmc_iteration, ChainState};
use super::{SamplerConfig, SamplerKind};
use crate::diagnostics::WeightedChain;
use crate::error::{Error, Result};
use crate::model::TargetModel;
use crate::models::sv::{SvData, SvLatentBlock, SvParams, SvThetaBlock};

/// Per-block settings of the stochastic volatility Gibbs sampler.
#[derive(Debug, Clone)]
pub struct SvGibbsConfig {
    /// `Hmc` or `Mmhmc`, used for both blocks.
    pub kind: SamplerKind,
    pub theta: SamplerConfig,
    pub latent: SamplerConfig,
}

/// Output of [`run_sv_gibbs`].
#[derive(Debug, Clone)]
pub struct SvGibbsChain {
    /// Retained `(β, σ, φ)` with the summed block log-weights.
    pub chain: WeightedChain,
    /// Reweighted posterior mean of the latent path.
    pub latent_mean: Vec<f64>,
    /// Acceptance rate of the latent-block trajectories.
    pub latent_accept: f64,
}

/// Alternates one update of `θ̄ = (β, ln σ, artanh φ)` given `x` with one update of `x` given
/// `θ̄`. The weight of a retained sweep is the sum of both blocks' `H̃ − H` at its end.
pub fn run_sv_gibbs<R: Rng + ?Sized>(
    data: &SvData,
    config: &SvGibbsConfig,
    n_samples: usize,
    burn_in: usize,
    thin: usize,
    rng: &mut R,
) -> Result<SvGibbsChain> {
    if !matches!(config.kind, SamplerKind::Hmc | SamplerKind::Mmhmc) {
        return Err(Error::InvalidArgument(format!("SV Gibbs supports hmc and mmhmc, not {}", config.kind)));
    }
    if n_samples == 0 || thin == 0 {
        return Err(Error::InvalidArgument("need n_samples >= 1 and thin >= 1".into()));
    }
    let t_len = data.len();
    let weighted = config.kind.is_weighted();
    let mut theta_model = SvThetaBlock::new(data.y.clone(), vec![0.0; t_len])?;
    let theta0 = theta_model.initial_position();
    let mut latent_model = SvLatentBlock::new(data.y.clone(), SvParams::from_unconstrained(&theta0))?;
    config.theta.validate(3)?;
    config.latent.validate(t_len)?;
    if weighted {
        config.theta.shadow.validate(&config.theta.scheme, &theta_model)?;
        config.latent.shadow.validate(&config.latent.scheme, &latent_model)?;
    }
    let mut theta_state = ChainState::new(&theta_model, theta0, &config.theta.mass, rng)?;
    let mut latent_state = ChainState::new(&latent_model, vec![0.0; t_len], &config.latent.mass, rng)?;

    let burn_in = burn_in.min(n_samples);
    let mut chain = WeightedChain::unweighted(Vec::new());
    let mut latent_sum = vec![0.0; t_len];
    let mut latent_wsum = 0.0;
    let (mut pos, mut mom, mut lat_acc, mut pos_total) = (0usize, 0usize, 0usize, 0usize);
    let mut start = Instant::now();
    let step = |state: &mut ChainState, model: &dyn TargetModel, cfg: &SamplerConfig, rng: &mut R| {
        if weighted {
            mmhmc_iteration(state, model, cfg, rng)
        } else {
            hmc_step(state, model, cfg, rng)
        }
    };
    for i in 0..n_samples {
        if i == burn_in {
            start = Instant::now();
        }
        let fail = |e: Error| Error::Sampling(format!("sweep {i}: {e}"));
        theta_model.set_latent(&latent_state.current().theta);
        theta_state.reset_model(&theta_model).map_err(fail)?;
        let out_theta = step(&mut theta_state, &theta_model, &config.theta, rng).map_err(fail)?;
        let theta_h = out_theta.h;

        latent_model.set_params(SvParams::from_unconstrained(&theta_state.current().theta)).map_err(fail)?;
        latent_state.reset_model(&latent_model).map_err(fail)?;
        let out_latent = step(&mut latent_state, &latent_model, &config.latent, rng).map_err(fail)?;

        pos_total += out_theta.position_accepted as usize;
        if i < burn_in {
            continue;
        }
        pos += out_theta.position_accepted as usize;
        mom += out_theta.momentum_accepted.unwrap_or(true) as usize;
        lat_acc += out_latent.position_accepted as usize;
        let j = i - burn_in;
        if (j + 1).is_multiple_of(thin) {
            let mut log_w = 0.0;
            if weighted {
                // The parameter block's weight is taken under the updated latent path.
                theta_model.set_latent(&latent_state.current().theta);
                theta_state.reset_model(&theta_model).map_err(fail)?;
                theta_state.prepare_shadow(&theta_model, &config.theta, theta_h).map_err(fail)?;
                log_w = theta_state.log_weight() + latent_state.log_weight();
            }
            let p = SvParams::from_unconstrained(&theta_state.current().theta);
            chain.samples.push(vec![p.beta, p.sigma, p.phi]);
            chain.log_weights.push(log_w);
            chain.iterations.push(j);
            chain.accepted.push(out_theta.position_accepted);
            let w = log_w.exp();
            latent_wsum += w;
            for (s, x) in latent_sum.iter_mut().zip(&latent_state.current().theta) {
                *s += w * x;
            }
        }
    }
    let sampling = (n_samples - burn_in) as f64;
    chain.wall_time = start.elapsed().as_secs_f64();
    chain.accept_pos = pos as f64 / sampling;
    chain.accept_mom = mom as f64 / sampling;
    chain.accept_pos_total = pos_total as f64 / n_samples as f64;
    let latent_mean = if latent_wsum > 0.0 { latent_sum.iter().map(|s| s / latent_wsum).collect() } else { latent_sum };
    Ok(SvGibbsChain { chain, latent_mean, latent_accept: lat_acc as f64 / sampling })
}
