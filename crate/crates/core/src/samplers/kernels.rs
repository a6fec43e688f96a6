use rand::Rng;
use rand_distr::StandardNormal;

use super::{FlipMode, MomentumTest, SamplerConfig, StepsPolicy};
use crate::error::{Error, Result};
use crate::integrators::{integrate_state, IntegratorState, SplittingScheme};
use crate::model::{check_dim, dot, draw_momentum, MassSpec, PhasePoint, TargetModel};
use crate::shadow::{analytic_correction, numeric_terms, GradientStencil, ShadowMode};

/// Cached modified-Hamiltonian data of a phase point under step size `h`.
#[derive(Debug, Clone)]
struct ShadowCache {
    h: f64,
    correction: f64,
    aux: Aux,
}

#[derive(Debug, Clone)]
enum Aux {
    /// `U_θθ M⁻¹p`.
    Analytic { hp: Vec<f64> },
    /// Stencil with the momentum-dependent part of the correction.
    Numeric { stencil: GradientStencil, dependent: f64 },
}

impl ShadowCache {
    fn compute<M: TargetModel + ?Sized>(
        config: &SamplerConfig,
        model: &M,
        x: &PhasePoint,
        potential: f64,
        grad: &[f64],
        h: f64,
    ) -> Result<Self> {
        let scheme = &config.scheme;
        let order = config.shadow.order;
        match config.shadow.mode {
            ShadowMode::Analytic => {
                let mut hp = vec![0.0; x.dim()];
                model.hessian_vector(&x.theta, &config.mass.inv_mul(&x.p), &mut hp)?;
                let correction =
                    analytic_correction(model, &config.mass, scheme.coefficients(), h, order, &x.theta, &x.p, grad, &hp)?;
                Ok(Self { h, correction, aux: Aux::Analytic { hp } })
            }
            ShadowMode::Numeric => {
                let mut st = IntegratorState::with_gradient(x.clone(), potential, grad.to_vec());
                let stencil = GradientStencil::acquire(scheme, model, &config.mass, &mut st, h, config.shadow.stencil_k())?;
                let (dependent, fixed) =
                    numeric_terms(model, &config.mass, scheme.coefficients(), h, order, &x.theta, &x.p, grad, &stencil)?;
                Ok(Self { h, correction: dependent + fixed, aux: Aux::Numeric { stencil, dependent } })
            }
        }
    }

    fn flip(&mut self) {
        match &mut self.aux {
            Aux::Analytic { hp } => hp.iter_mut().for_each(|v| *v = -*v),
            Aux::Numeric { stencil, .. } => *stencil = stencil.reversed(),
        }
    }
}

#[derive(Debug, Clone)]
struct Snapshot {
    point: PhasePoint,
    potential: f64,
    grad: Vec<f64>,
}

/// State of one chain: current phase point, its potential and gradient, and the cached
/// modified Hamiltonian together with the history needed for reduced flipping.
#[derive(Debug, Clone)]
pub struct ChainState {
    current: PhasePoint,
    potential: f64,
    grad: Vec<f64>,
    shadow: Option<ShadowCache>,
    last_move_accepted: bool,
    prev: Option<Snapshot>,
}

impl ChainState {
    /// State at `theta` with momentum drawn from `N(0, M)`.
    pub fn new<M: TargetModel + ?Sized, R: Rng + ?Sized>(
        model: &M,
        theta: Vec<f64>,
        mass: &MassSpec,
        rng: &mut R,
    ) -> Result<Self> {
        let p = draw_momentum(mass, theta.len(), rng);
        Self::from_point(model, PhasePoint::new(theta, p)?)
    }

    pub fn from_point<M: TargetModel + ?Sized>(model: &M, x: PhasePoint) -> Result<Self> {
        check_dim(model.dim(), x.dim())?;
        let (current, potential, grad) = IntegratorState::new(model, &x)?.into_parts(model)?;
        Ok(Self { current, potential, grad, shadow: None, last_move_accepted: false, prev: None })
    }

    pub fn current(&self) -> &PhasePoint {
        &self.current
    }

    pub fn potential(&self) -> f64 {
        self.potential
    }

    pub fn gradient(&self) -> &[f64] {
        &self.grad
    }

    pub fn last_move_accepted(&self) -> bool {
        self.last_move_accepted
    }

    /// Phase point before the last accepted trajectory.
    pub fn prev(&self) -> Option<&PhasePoint> {
        self.prev.as_ref().map(|s| &s.point)
    }

    /// `H̃` of the current state, if computed.
    pub fn shadow_current(&self, mass: &MassSpec) -> Option<f64> {
        self.shadow.as_ref().map(|s| self.potential + 0.5 * mass.inv_dot(&self.current.p, &self.current.p) + s.correction)
    }

    /// `ln w = H̃ − H` of the current state; zero when no shadow is in use.
    pub fn log_weight(&self) -> f64 {
        self.shadow.as_ref().map_or(0.0, |s| s.correction)
    }

    /// Step size the cached shadow was computed with.
    pub fn shadow_step_size(&self) -> Option<f64> {
        self.shadow.as_ref().map(|s| s.h)
    }

    /// Gradient stencil of the current state (numeric shadows).
    pub fn stencil(&self) -> Option<&GradientStencil> {
        match self.shadow.as_ref().map(|s| &s.aux) {
            Some(Aux::Numeric { stencil, .. }) => Some(stencil),
            _ => None,
        }
    }

    /// Ensures the cached shadow matches the current state under step size `h`.
    pub fn prepare_shadow<M: TargetModel + ?Sized>(&mut self, model: &M, config: &SamplerConfig, h: f64) -> Result<()> {
        if self.shadow.as_ref().is_some_and(|s| s.h == h) {
            return Ok(());
        }
        self.shadow = Some(ShadowCache::compute(config, model, &self.current, self.potential, &self.grad, h)?);
        Ok(())
    }

    /// Re-evaluates potential and gradient after the target changed (Gibbs blocks), dropping
    /// cached shadows and flip history.
    pub fn reset_model<M: TargetModel + ?Sized>(&mut self, model: &M) -> Result<()> {
        let (current, potential, grad) = IntegratorState::new(model, &self.current)?.into_parts(model)?;
        self.current = current;
        self.potential = potential;
        self.grad = grad;
        self.shadow = None;
        self.prev = None;
        self.last_move_accepted = false;
        Ok(())
    }

    /// Replaces the momentum, invalidating the cached shadow.
    pub fn set_momentum(&mut self, p: Vec<f64>) -> Result<()> {
        check_dim(self.current.dim(), p.len())?;
        self.current.p = p;
        self.shadow = None;
        Ok(())
    }

    fn flip(&mut self) {
        self.current.p.iter_mut().for_each(|v| *v = -*v);
        if let Some(s) = self.shadow.as_mut() {
            s.flip();
        }
    }
}

/// Result of one kernel application.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOutcome {
    pub position_accepted: bool,
    /// `None` for kernels without a momentum test.
    pub momentum_accepted: Option<bool>,
    pub h: f64,
}

fn metropolis<R: Rng + ?Sized>(delta: f64, rng: &mut R) -> bool {
    let u: f64 = rng.random();
    !delta.is_nan() && (delta <= 0.0 || u < (-delta).exp())
}

/// `θ' = θ + scale·z`, accepted with `min{1, exp(U(θ) − U(θ'))}`.
pub fn rwmh_step<M: TargetModel + ?Sized, R: Rng + ?Sized>(
    state: &mut ChainState,
    model: &M,
    scale: f64,
    rng: &mut R,
) -> Result<IterationOutcome> {
    if !(scale > 0.0) {
        return Err(Error::InvalidArgument(format!("proposal scale must be positive, got {scale}")));
    }
    let theta: Vec<f64> = state.current.theta.iter().map(|t| t + scale * rng.sample::<f64, _>(StandardNormal)).collect();
    let mut grad = vec![0.0; theta.len()];
    let proposal = model.potential_and_gradient(&theta, &mut grad).ok().filter(|u| u.is_finite());
    let delta = proposal.map_or(f64::INFINITY, |u| u - state.potential);
    let accepted = metropolis(delta, rng) && grad.iter().all(|g| g.is_finite());
    if accepted {
        state.current.theta = theta;
        state.potential = proposal.unwrap();
        state.grad = grad;
        state.shadow = None;
    }
    Ok(IterationOutcome { position_accepted: accepted, momentum_accepted: None, h: scale })
}

fn trajectory<M: TargetModel + ?Sized>(
    state: &ChainState,
    model: &M,
    scheme: &SplittingScheme,
    mass: &MassSpec,
    h: f64,
    steps: usize,
) -> Option<Snapshot> {
    let mut s = IntegratorState::with_gradient(state.current.clone(), state.potential, state.grad.clone());
    integrate_state(scheme, model, mass, &mut s, h, steps, None).ok()?;
    let (point, potential, grad) = s.into_parts(model).ok()?;
    point.is_finite().then_some(Snapshot { point, potential, grad })
}

/// Full momentum refresh, `L_n` steps of size `h_n`, Metropolis test on the true Hamiltonian.
pub fn hmc_step<M: TargetModel + ?Sized, R: Rng + ?Sized>(
    state: &mut ChainState,
    model: &M,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<IterationOutcome> {
    let params = config.draw(rng);
    let p = draw_momentum(&config.mass, state.current.dim(), rng);
    state.set_momentum(p)?;
    let accepted = true_hamiltonian_move(state, model, config, params.h, params.steps, rng);
    Ok(IterationOutcome { position_accepted: accepted, momentum_accepted: None, h: params.h })
}

/// Integrates and accepts on the true `H`; returns acceptance and the Metropolis probability.
fn true_hamiltonian_move<M: TargetModel + ?Sized, R: Rng + ?Sized>(
    state: &mut ChainState,
    model: &M,
    config: &SamplerConfig,
    h: f64,
    steps: usize,
    rng: &mut R,
) -> bool {
    let proposal = trajectory(state, model, &config.scheme, &config.mass, h, steps);
    let delta = proposal.as_ref().map_or(f64::INFINITY, |s| {
        (s.potential - state.potential) + 0.5 * (config.mass.inv_dot(&s.point.p, &s.point.p) - config.mass.inv_dot(&state.current.p, &state.current.p))
    });
    let accepted = metropolis(delta, rng);
    if accepted {
        let s = proposal.unwrap();
        state.current = s.point;
        state.potential = s.potential;
        state.grad = s.grad;
    }
    state.shadow = None;
    accepted
}

/// One Verlet step with full momentum refresh and identity mass.
pub fn mala_step<M: TargetModel + ?Sized, R: Rng + ?Sized>(
    state: &mut ChainState,
    model: &M,
    h: f64,
    rng: &mut R,
) -> Result<IterationOutcome> {
    hmc_step(state, model, &SamplerConfig::new(SplittingScheme::verlet(), h, 1), rng)
}

/// MALA settings derived from a general configuration: Verlet, one step, same step-size policy and mass.
pub(crate) fn mala_config(config: &SamplerConfig) -> SamplerConfig {
    SamplerConfig { scheme: SplittingScheme::verlet(), steps: StepsPolicy::Fixed(1), ..config.clone() }
}

/// Partial momentum update accepted unconditionally, trajectory accepted on the true `H`,
/// momentum flipped on rejection.
pub fn ghmc_iteration<M: TargetModel + ?Sized, R: Rng + ?Sized>(
    state: &mut ChainState,
    model: &M,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<IterationOutcome> {
    let params = config.draw(rng);
    let u = draw_momentum(&config.mass, state.current.dim(), rng);
    let (a, b) = ((1.0 - params.phi).sqrt(), params.phi.sqrt());
    let p: Vec<f64> = state.current.p.iter().zip(&u).map(|(p, u)| a * p + b * u).collect();
    state.set_momentum(p)?;
    let accepted = true_hamiltonian_move(state, model, config, params.h, params.steps, rng);
    if !accepted {
        state.flip();
    }
    Ok(IterationOutcome { position_accepted: accepted, momentum_accepted: None, h: params.h })
}

/// Proposed partial momentum update and its extended-Hamiltonian difference `Δĥ`.
#[derive(Debug, Clone)]
pub struct PmmcProposal {
    pub delta: f64,
    pub momentum: Vec<f64>,
    cache: ShadowCache,
}

/// Computes `p* = √(1−φ)p + √φu` and `Δĥ` for the cached shadow of `state` (see
/// [`ChainState::prepare_shadow`]) using the given test.
pub fn pmmc_propose<M: TargetModel + ?Sized>(
    state: &ChainState,
    model: &M,
    config: &SamplerConfig,
    u: &[f64],
    phi: f64,
    test: MomentumTest,
) -> Result<PmmcProposal> {
    let cache = state
        .shadow
        .as_ref()
        .ok_or_else(|| Error::Sampling("shadow of the current state has not been prepared".into()))?;
    check_dim(state.current.dim(), u.len())?;
    let (a, b) = ((1.0 - phi).sqrt(), phi.sqrt());
    let p = &state.current.p;
    let p_new: Vec<f64> = p.iter().zip(u).map(|(p, u)| a * p + b * u).collect();
    let x_new = PhasePoint { theta: state.current.theta.clone(), p: p_new.clone() };
    let mass = &config.mass;
    let h = cache.h;
    let coeffs = config.scheme.coefficients();
    let order = config.shadow.order;
    match test {
        MomentumTest::Explicit => {
            let new = ShadowCache::compute(config, model, &x_new, state.potential, &state.grad, h)?;
            let u_new: Vec<f64> = p.iter().zip(u).map(|(p, u)| -b * p + a * u).collect();
            let kin = 0.5 * ((mass.inv_dot(&p_new, &p_new) + mass.inv_dot(&u_new, &u_new)) - (mass.inv_dot(p, p) + mass.inv_dot(u, u)));
            Ok(PmmcProposal { delta: kin + (new.correction - cache.correction), momentum: p_new, cache: new })
        }
        MomentumTest::Implicit => match &cache.aux {
            Aux::Analytic { hp } => {
                let theta = &state.current.theta;
                let ut = mass.inv_mul(u);
                let mut hu = vec![0.0; u.len()];
                model.hessian_vector(theta, &ut, &mut hu)?;
                let pt = mass.inv_mul(p);
                let cross = 2.0 * a * b;
                let aa = dot(&ut, &hu) - dot(&pt, hp);
                let bb = dot(&ut, hp);
                let mut delta = h * h * coeffs.c[0] * (phi * aa + cross * bb);
                let hp_new: Vec<f64> = hp.iter().zip(&hu).map(|(x, y)| a * x + b * y).collect();
                if order == 6 {
                    let h4 = h.powi(4);
                    let dd = mass.inv_dot(&hu, &hu) - mass.inv_dot(hp, hp);
                    let ff = mass.inv_dot(&hu, hp);
                    delta += h4 * coeffs.c[5] * (phi * dd + cross * ff);
                    if !model.capabilities().quadratic {
                        let pt_new = mass.inv_mul(&p_new);
                        let gt = mass.inv_mul(&state.grad);
                        let (mut t3, mut t3n) = (vec![0.0; u.len()], vec![0.0; u.len()]);
                        model.third_contraction(theta, &pt, &mut t3)?;
                        model.third_contraction(theta, &pt_new, &mut t3n)?;
                        let q4 = model.fourth_contraction(theta, &pt_new)? - model.fourth_contraction(theta, &pt)?;
                        delta += h4 * (coeffs.c[2] * q4 + coeffs.c[3] * (dot(&gt, &t3n) - dot(&gt, &t3)));
                    }
                }
                let new = ShadowCache { h, correction: cache.correction + delta, aux: Aux::Analytic { hp: hp_new } };
                Ok(PmmcProposal { delta, momentum: p_new, cache: new })
            }
            Aux::Numeric { dependent, .. } => {
                let mut st = IntegratorState::with_gradient(x_new.clone(), state.potential, state.grad.clone());
                let stencil = GradientStencil::acquire(&config.scheme, model, mass, &mut st, h, config.shadow.stencil_k())?;
                let dep_new = numeric_dependent(model, config, h, &x_new, &state.grad, &stencil)?;
                let delta = dep_new - dependent;
                let correction = cache.correction + delta;
                let new = ShadowCache { h, correction, aux: Aux::Numeric { stencil, dependent: dep_new } };
                Ok(PmmcProposal { delta, momentum: p_new, cache: new })
            }
        },
    }
}

/// Momentum-dependent numeric terms, skipping the position-only ones.
fn numeric_dependent<M: TargetModel + ?Sized>(
    model: &M,
    config: &SamplerConfig,
    h: f64,
    x: &PhasePoint,
    grad: &[f64],
    stencil: &GradientStencil,
) -> Result<f64> {
    let mut k = *config.scheme.coefficients();
    k.k[1] = 0.0;
    k.k[5] = 0.0;
    let (dep, _) = numeric_terms(model, &config.mass, &k, h, config.shadow.order, &x.theta, &x.p, grad, stencil)?;
    Ok(dep)
}

/// Partial momentum Monte Carlo: proposes `p*` from noise `u` and accepts with
/// `min{1, exp(−Δĥ)}`. Failures during the shadow evaluation keep the current momentum.
pub fn pmmc_step<M: TargetModel + ?Sized, R: Rng + ?Sized>(
    state: &mut ChainState,
    model: &M,
    config: &SamplerConfig,
    u: &[f64],
    phi: f64,
    rng: &mut R,
) -> Result<bool> {
    let proposal = pmmc_propose(state, model, config, u, phi, config.momentum_test);
    let delta = proposal.as_ref().map_or(f64::INFINITY, |p| p.delta);
    let accepted = metropolis(delta, rng);
    if accepted {
        let p = proposal?;
        state.current.p = p.momentum;
        state.shadow = Some(p.cache);
    } else if let Err(e) = proposal {
        if !matches!(e, Error::Evaluation { .. }) {
            return Err(e);
        }
    }
    Ok(accepted)
}

/// Flip probability after a rejected trajectory. `alpha` is the rejected move's acceptance
/// probability; `alpha_reverse` is `α(F current, F prev)` when the previous move was accepted.
pub fn flip_probability(mode: FlipMode, alpha: f64, alpha_reverse: Option<f64>) -> f64 {
    match (mode, alpha_reverse) {
        (FlipMode::Automatic, _) => 1.0,
        (FlipMode::Reduced, Some(r)) => (1.0 - alpha / r).max(0.0),
        (FlipMode::Reduced, None) => 1.0 - alpha,
    }
}

/// Whether to flip the momentum. Draws one uniform in reduced mode only.
pub fn flip_decision<R: Rng + ?Sized>(mode: FlipMode, alpha: f64, alpha_reverse: Option<f64>, rng: &mut R) -> bool {
    match mode {
        FlipMode::Automatic => true,
        FlipMode::Reduced => rng.random::<f64>() < flip_probability(mode, alpha, alpha_reverse),
    }
}

/// Trajectory proposal accepted on the modified Hamiltonian; on rejection the momentum is
/// flipped according to the flip mode.
pub fn hdmc_step<M: TargetModel + ?Sized, R: Rng + ?Sized>(
    state: &mut ChainState,
    model: &M,
    config: &SamplerConfig,
    h: f64,
    steps: usize,
    rng: &mut R,
) -> Result<bool> {
    state.prepare_shadow(model, config, h)?;
    let mass = &config.mass;
    let proposal = trajectory(state, model, &config.scheme, mass, h, steps).and_then(|s| {
        let cache = ShadowCache::compute(config, model, &s.point, s.potential, &s.grad, h).ok()?;
        cache.correction.is_finite().then_some((s, cache))
    });
    let current_corr = state.shadow.as_ref().unwrap().correction;
    let delta = proposal.as_ref().map_or(f64::INFINITY, |(s, c)| {
        (s.potential - state.potential)
            + 0.5 * (mass.inv_dot(&s.point.p, &s.point.p) - mass.inv_dot(&state.current.p, &state.current.p))
            + (c.correction - current_corr)
    });
    let alpha = if delta.is_nan() { 0.0 } else { (-delta).exp().min(1.0) };
    if metropolis(delta, rng) {
        let (s, cache) = proposal.unwrap();
        let old = std::mem::replace(&mut state.current, s.point);
        let old_potential = std::mem::replace(&mut state.potential, s.potential);
        let old_grad = std::mem::replace(&mut state.grad, s.grad);
        state.prev = Some(Snapshot { point: old, potential: old_potential, grad: old_grad });
        state.shadow = Some(cache);
        state.last_move_accepted = true;
        return Ok(true);
    }
    let alpha_reverse = match (config.flip, state.last_move_accepted, &state.prev) {
        (FlipMode::Reduced, true, Some(prev)) => {
            let cur = state.shadow_current(mass).unwrap();
            let pc = ShadowCache::compute(config, model, &prev.point, prev.potential, &prev.grad, h)?;
            let prev_shadow = prev.potential + 0.5 * mass.inv_dot(&prev.point.p, &prev.point.p) + pc.correction;
            Some((cur - prev_shadow).exp().min(1.0))
        }
        _ => None,
    };
    if flip_decision(config.flip, alpha, alpha_reverse, rng) {
        state.flip();
    }
    state.last_move_accepted = false;
    Ok(false)
}

/// One Mix & Match HMC iteration: draw `(h, L, φ)`, partial momentum update with the
/// shadow test, trajectory with the shadow test and flip policy. The importance weight of
/// the resulting sample is `exp(state.log_weight())`.
pub fn mmhmc_iteration<M: TargetModel + ?Sized, R: Rng + ?Sized>(
    state: &mut ChainState,
    model: &M,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<IterationOutcome> {
    let params = config.draw(rng);
    state.prepare_shadow(model, config, params.h)?;
    let u = draw_momentum(&config.mass, state.current.dim(), rng);
    let mom = pmmc_step(state, model, config, &u, params.phi, rng)?;
    let pos = hdmc_step(state, model, config, params.h, params.steps, rng)?;
    Ok(IterationOutcome { position_accepted: pos, momentum_accepted: Some(mom), h: params.h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::lookup;
    use crate::models::GaussianTarget;
    use crate::samplers::NoisePolicy;
    use crate::shadow::ShadowOrder;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    struct Flat(usize);
    impl TargetModel for Flat {
        fn dim(&self) -> usize {
            self.0
        }
        fn capabilities(&self) -> crate::model::Capabilities {
            crate::model::Capabilities { has_hessian: true, has_third: true, has_fourth: true, quadratic: true }
        }
        fn potential(&self, _t: &[f64]) -> Result<f64> {
            Ok(0.0)
        }
        fn potential_and_gradient(&self, _t: &[f64], g: &mut [f64]) -> Result<f64> {
            g.iter_mut().for_each(|v| *v = 0.0);
            Ok(0.0)
        }
        fn hessian_vector(&self, _t: &[f64], _v: &[f64], out: &mut [f64]) -> Result<()> {
            out.iter_mut().for_each(|v| *v = 0.0);
            Ok(())
        }
    }

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    #[test]
    fn rwmh_examples() {
        let mut r = rng(1);
        let mut s = ChainState::from_point(&Flat(2), PhasePoint::new(vec![0.0; 2], vec![0.0; 2]).unwrap()).unwrap();
        assert!((0..200).all(|_| rwmh_step(&mut s, &Flat(2), 1.0, &mut r).unwrap().position_accepted));

        let g = GaussianTarget::standard(1);
        let mut s = ChainState::from_point(&g, PhasePoint::new(vec![0.0], vec![0.0]).unwrap()).unwrap();
        let acc = (0..100_000).filter(|_| rwmh_step(&mut s, &g, 2.4, &mut r).unwrap().position_accepted).count();
        let rate = acc as f64 / 1e5;
        assert!(rate > 0.3 && rate < 0.6, "{rate}");

        struct Cliff;
        impl TargetModel for Cliff {
            fn dim(&self) -> usize {
                1
            }
            fn potential(&self, t: &[f64]) -> Result<f64> {
                Ok(if t[0].abs() < 1e-3 { 0.0 } else { f64::INFINITY })
            }
            fn potential_and_gradient(&self, t: &[f64], g: &mut [f64]) -> Result<f64> {
                g[0] = 0.0;
                self.potential(t)
            }
        }
        let mut s = ChainState::from_point(&Cliff, PhasePoint::new(vec![0.0], vec![0.0]).unwrap()).unwrap();
        let out = rwmh_step(&mut s, &Cliff, 1.0, &mut r).unwrap();
        assert!(!out.position_accepted);
        assert_eq!(s.current().theta, vec![0.0]);
    }

    #[test]
    fn mala_is_one_step_hmc() {
        let g = GaussianTarget::from_variances(&[1.0, 4.0]).unwrap();
        let x = PhasePoint::new(vec![0.3, -1.0], vec![0.0; 2]).unwrap();
        let mut a = ChainState::from_point(&g, x.clone()).unwrap();
        let mut b = ChainState::from_point(&g, x).unwrap();
        let (mut r1, mut r2) = (rng(4), rng(4));
        let cfg = SamplerConfig::new(SplittingScheme::verlet(), 0.4, 1);
        for _ in 0..200 {
            mala_step(&mut a, &g, 0.4, &mut r1).unwrap();
            hmc_step(&mut b, &g, &cfg, &mut r2).unwrap();
            assert_eq!(a.current(), b.current());
        }
        let mut s = ChainState::from_point(&g, PhasePoint::new(vec![0.0; 2], vec![0.0; 2]).unwrap()).unwrap();
        let acc = (0..10_000).filter(|_| mala_step(&mut s, &GaussianTarget::standard(2), 0.1, &mut r1).unwrap().position_accepted).count();
        assert!(acc as f64 / 1e4 > 0.99);
    }

    #[test]
    fn hmc_on_harmonic_half_period() {
        let g = GaussianTarget::standard(1);
        let mut r = rng(5);
        let cfg = SamplerConfig::new(SplittingScheme::verlet(), 0.05, 63);
        let mut s = ChainState::from_point(&g, PhasePoint::new(vec![1.0], vec![0.0]).unwrap()).unwrap();
        let mut acc = 0;
        for _ in 0..1000 {
            let t0 = s.current().theta[0];
            let o = hmc_step(&mut s, &g, &cfg, &mut r).unwrap();
            if o.position_accepted {
                acc += 1;
                // Lh ≈ π maps θ to about −θ₀ for any momentum.
                assert!((s.current().theta[0] + t0).abs() < 0.1 * (1.0 + t0.abs()));
            }
        }
        assert!(acc > 990);
    }

    #[test]
    fn pmmc_flat_and_substitution() {
        let f = Flat(3);
        let cfg = SamplerConfig::new(SplittingScheme::verlet(), 0.1, 5);
        let x = PhasePoint::new(vec![0.0; 3], vec![1.0, -2.0, 0.5]).unwrap();
        let mut s = ChainState::from_point(&f, x).unwrap();
        s.prepare_shadow(&f, &cfg, 0.1).unwrap();
        for phi in [0.1, 0.5, 0.9] {
            for test in [MomentumTest::Implicit, MomentumTest::Explicit] {
                let pr = pmmc_propose(&s, &f, &cfg, &[0.3, 0.1, -1.0], phi, test).unwrap();
                assert!(pr.delta.abs() < 1e-14);
            }
        }
        let p = s.current().p.clone();
        let pr = pmmc_propose(&s, &f, &cfg, &p, 0.3, MomentumTest::Implicit).unwrap();
        let scale = 0.7f64.sqrt() + 0.3f64.sqrt();
        assert!(pr.momentum.iter().zip(&p).all(|(a, b)| (a - scale * b).abs() < 1e-15));
    }

    #[test]
    fn implicit_hand_example() {
        let g = GaussianTarget::standard(1);
        let cfg = SamplerConfig::new(SplittingScheme::verlet(), 0.1, 1);
        let mut s = ChainState::from_point(&g, PhasePoint::new(vec![0.4], vec![1.0]).unwrap()).unwrap();
        s.prepare_shadow(&g, &cfg, 0.1).unwrap();
        let imp = pmmc_propose(&s, &g, &cfg, &[2.0], 0.5, MomentumTest::Implicit).unwrap().delta;
        assert!((imp - 0.01 / 12.0 * (1.5 + 2.0)).abs() < 1e-15);
        let exp = pmmc_propose(&s, &g, &cfg, &[2.0], 0.5, MomentumTest::Explicit).unwrap().delta;
        assert!((imp - exp).abs() < 1e-12 * imp.abs());
        s.prepare_shadow(&g, &cfg, 0.0).unwrap();
        assert_eq!(pmmc_propose(&s, &g, &cfg, &[2.0], 0.5, MomentumTest::Implicit).unwrap().delta, 0.0);
    }

    #[test]
    fn implicit_matches_explicit_across_modes() {
        let mut r = rng(11);
        let g = crate::models::generate_wishart_target(5, &mut r).unwrap();
        let mass = MassSpec::diagonal(vec![1.0, 2.0, 0.5, 1.0, 3.0]).unwrap();
        let b = {
            let y = crate::models::banana_simulate(10, 1.0, 2.0, &mut r).unwrap();
            crate::models::BananaTarget::new(y, 2.0, 1.0).unwrap()
        };
        let cases: Vec<(ShadowOrder, SplittingScheme)> = vec![
            (ShadowOrder { order: 4, mode: ShadowMode::Analytic }, lookup("m_me3").unwrap()),
            (ShadowOrder { order: 6, mode: ShadowMode::Analytic }, lookup("m_bcss").unwrap()),
            (ShadowOrder { order: 4, mode: ShadowMode::Numeric }, lookup("m_me").unwrap()),
            (ShadowOrder { order: 6, mode: ShadowMode::Numeric }, SplittingScheme::verlet()),
        ];
        for (shadow, scheme) in cases {
            let cfg = SamplerConfig::new(scheme.clone(), 0.2, 1).with_shadow(shadow).with_mass(mass.clone());
            for _ in 0..50 {
                let th = draw_momentum(&MassSpec::Identity, 5, &mut r);
                let p = draw_momentum(&mass, 5, &mut r);
                let u = draw_momentum(&mass, 5, &mut r);
                let phi: f64 = r.random();
                let mut s = ChainState::from_point(&g, PhasePoint::new(th, p).unwrap()).unwrap();
                s.prepare_shadow(&g, &cfg, 0.2).unwrap();
                let i = pmmc_propose(&s, &g, &cfg, &u, phi, MomentumTest::Implicit).unwrap().delta;
                let e = pmmc_propose(&s, &g, &cfg, &u, phi, MomentumTest::Explicit).unwrap().delta;
                assert!((i - e).abs() <= 1e-9 * i.abs().max(1e-6), "{shadow:?} {i} {e}");
            }
            if shadow.order == 6 && shadow.mode == ShadowMode::Analytic {
                let cfg = SamplerConfig::new(scheme, 0.05, 1).with_shadow(shadow);
                let mut s = ChainState::from_point(&b, PhasePoint::new(vec![0.3, 0.5], vec![1.0, -0.2]).unwrap()).unwrap();
                s.prepare_shadow(&b, &cfg, 0.05).unwrap();
                let i = pmmc_propose(&s, &b, &cfg, &[0.4, 0.9], 0.3, MomentumTest::Implicit).unwrap().delta;
                let e = pmmc_propose(&s, &b, &cfg, &[0.4, 0.9], 0.3, MomentumTest::Explicit).unwrap().delta;
                assert!((i - e).abs() <= 1e-9 * i.abs(), "{i} {e}");
            }
        }
    }

    #[test]
    fn flip_probabilities() {
        let mut r = rng(2);
        assert_eq!(flip_probability(FlipMode::Automatic, 0.3, None), 1.0);
        assert!(flip_decision(FlipMode::Automatic, 0.3, Some(0.9), &mut r));
        assert!((flip_probability(FlipMode::Reduced, 0.3, None) - 0.7).abs() < 1e-15);
        assert_eq!(flip_probability(FlipMode::Reduced, 0.5, Some(0.4)), 0.0);
        assert!((flip_probability(FlipMode::Reduced, 0.2, Some(0.8)) - 0.75).abs() < 1e-15);
        assert!((0..100).all(|_| !flip_decision(FlipMode::Reduced, 0.5, Some(0.5), &mut r)));
    }

    #[test]
    fn zero_shadow_gives_unit_weights() {
        let g = GaussianTarget::standard(3);
        let cfg = SamplerConfig::new(SplittingScheme::verlet().with_zero_shadow(), 0.3, 5);
        let mut r = rng(3);
        let mut s = ChainState::new(&g, vec![0.0; 3], &cfg.mass, &mut r).unwrap();
        for _ in 0..100 {
            mmhmc_iteration(&mut s, &g, &cfg, &mut r).unwrap();
            assert_eq!(s.log_weight(), 0.0);
        }
    }

    #[test]
    fn shadow_acceptance_near_one_at_tiny_h() {
        let g = GaussianTarget::standard(4);
        let cfg = SamplerConfig::new(SplittingScheme::verlet(), 1e-3, 10).with_noise(NoisePolicy::Fixed(0.3));
        let mut r = rng(6);
        let mut s = ChainState::new(&g, vec![0.5; 4], &cfg.mass, &mut r).unwrap();
        let acc = (0..1000).filter(|_| mmhmc_iteration(&mut s, &g, &cfg, &mut r).unwrap().position_accepted).count();
        assert_eq!(acc, 1000);
    }

    #[test]
    fn shadow_test_ignores_true_energy_error() {
        // Harmonic oscillator with Verlet: the sixth-order shadow is conserved far better than H,
        // so at a large step the H̃ test accepts where the H test frequently rejects.
        let g = GaussianTarget::standard(1);
        let cfg = SamplerConfig::new(SplittingScheme::verlet(), 0.5, 3)
            .with_shadow(ShadowOrder { order: 6, mode: ShadowMode::Analytic });
        let mut r = rng(7);
        let mut s = ChainState::from_point(&g, PhasePoint::new(vec![1.0], vec![1.0]).unwrap()).unwrap();
        s.prepare_shadow(&g, &cfg, 0.5).unwrap();
        let h0 = s.potential() + 0.5;
        let traj = trajectory(&s, &g, &cfg.scheme, &cfg.mass, 0.5, 3).unwrap();
        let dh = traj.potential + 0.5 * traj.point.p[0].powi(2) - h0;
        assert!(dh.abs() > 1e-3);
        assert!(hdmc_step(&mut s, &g, &cfg, 0.5, 3, &mut r).unwrap());
    }

    #[test]
    fn ghmc_flat_never_flips() {
        let f = Flat(2);
        let cfg = SamplerConfig::new(SplittingScheme::verlet(), 0.1, 3);
        let mut r = rng(8);
        let mut s = ChainState::new(&f, vec![0.0; 2], &cfg.mass, &mut r).unwrap();
        assert!((0..200).all(|_| ghmc_iteration(&mut s, &f, &cfg, &mut r).unwrap().position_accepted));
    }

    #[test]
    fn ghmc_with_full_refresh_is_hmc() {
        let g = GaussianTarget::from_variances(&[1.0, 0.3]).unwrap();
        let cfg = SamplerConfig::new(SplittingScheme::verlet(), 0.6, 4).with_noise(NoisePolicy::Fixed(1.0));
        let x = PhasePoint::new(vec![0.3, 0.2], vec![0.5, 0.5]).unwrap();
        let (mut a, mut b) = (ChainState::from_point(&g, x.clone()).unwrap(), ChainState::from_point(&g, x).unwrap());
        let (mut r1, mut r2) = (rng(9), rng(9));
        for _ in 0..200 {
            ghmc_iteration(&mut a, &g, &cfg, &mut r1).unwrap();
            hmc_step(&mut b, &g, &cfg, &mut r2).unwrap();
            assert_eq!(a.current().theta, b.current().theta);
        }
    }

    #[test]
    fn rejection_with_zero_noise_retraces() {
        let g = GaussianTarget::from_variances(&[1.0, 0.2]).unwrap();
        let cfg = SamplerConfig::new(SplittingScheme::verlet(), 0.55, 4).with_noise(NoisePolicy::Fixed(0.0));
        let mut r = rng(12);
        let mut s = ChainState::new(&g, vec![0.5, 0.1], &cfg.mass, &mut r).unwrap();
        let mut checked = 0;
        let mut last: Option<(PhasePoint, bool)> = None;
        for _ in 0..2000 {
            let before = s.current().clone();
            let o = mmhmc_iteration(&mut s, &g, &cfg, &mut r).unwrap();
            if let Some((start, true)) = &last {
                if !o.position_accepted {
                    // Accepted A → B, then rejected at B: the flipped state integrates back to A.
                    let back = trajectory(&s, &g, &cfg.scheme, &cfg.mass, 0.55, 4).unwrap();
                    let target = start.flipped();
                    assert!(back.point.theta.iter().zip(&target.theta).all(|(a, b)| (a - b).abs() < 1e-10));
                    assert!(back.point.p.iter().zip(&target.p).all(|(a, b)| (a - b).abs() < 1e-10));
                    checked += 1;
                }
            }
            last = Some((before, o.position_accepted));
        }
        assert!(checked > 5, "{checked}");
    }
}
