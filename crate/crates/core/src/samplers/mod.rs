//! Sampler kernels: random-walk Metropolis, MALA, HMC, GHMC and Mix & Match HMC.

mod chain;
mod kernels;
mod sv;

pub use chain::{run_chain, run_chain_observed, SamplerKind};
pub use kernels::{
    flip_decision, flip_probability, ghmc_iteration, hdmc_step, hmc_step, mala_step, mmhmc_iteration, pmmc_propose,
    pmmc_step, rwmh_step, ChainState, IterationOutcome, PmmcProposal,
};
pub use sv::{run_sv_gibbs, SvGibbsChain, SvGibbsConfig};

use rand::Rng;

use crate::error::{Error, Result};
use crate::integrators::SplittingScheme;
use crate::model::MassSpec;
use crate::shadow::{ShadowMode, ShadowOrder};

/// Distribution of the step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSizePolicy {
    Fixed(f64),
    /// Uniform on `(0.8h, 1.2h)`.
    Jittered(f64),
}

/// Distribution of the number of integration steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepsPolicy {
    Fixed(usize),
    /// Uniform integer on `{1, …, L}`.
    Uniform(usize),
}

/// Distribution of the partial momentum update parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoisePolicy {
    Fixed(f64),
    /// Uniform on `(0, φ)`.
    UpTo(f64),
    /// Uniform on `(0.8φ, 1.2φ)`, capped at 1.
    Around(f64),
}

/// Momentum treatment after a rejected trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipMode {
    Automatic,
    Reduced,
}

/// How the partial momentum Metropolis test is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumTest {
    /// Closed-form difference of the momentum-dependent shadow terms.
    Implicit,
    /// Full evaluation of both extended Hamiltonians.
    Explicit,
}

impl StepSizePolicy {
    pub fn nominal(&self) -> f64 {
        match *self {
            Self::Fixed(h) | Self::Jittered(h) => h,
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Fixed(h) => h,
            Self::Jittered(h) => h * rng.random_range(0.8..1.2),
        }
    }
}

impl StepsPolicy {
    pub fn nominal(&self) -> usize {
        match *self {
            Self::Fixed(l) | Self::Uniform(l) => l,
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match *self {
            Self::Fixed(l) => l,
            Self::Uniform(l) => rng.random_range(1..=l),
        }
    }
}

impl NoisePolicy {
    pub fn nominal(&self) -> f64 {
        match *self {
            Self::Fixed(p) | Self::UpTo(p) | Self::Around(p) => p,
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Fixed(p) => p,
            Self::UpTo(p) => p * rng.random::<f64>(),
            Self::Around(p) => (p * rng.random_range(0.8..1.2)).min(1.0),
        }
    }
}

/// Parameters drawn for one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationParams {
    pub h: f64,
    pub steps: usize,
    pub phi: f64,
}

/// Integrator, shadow and randomization settings shared by all kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub step_size: StepSizePolicy,
    pub steps: StepsPolicy,
    pub noise: NoisePolicy,
    pub flip: FlipMode,
    pub shadow: ShadowOrder,
    pub scheme: SplittingScheme,
    pub mass: MassSpec,
    pub momentum_test: MomentumTest,
}

impl SamplerConfig {
    /// Fixed `h` and `L`, `φ = 0.5`, fourth-order analytic shadow, automatic flipping,
    /// identity mass and the implicit momentum test.
    pub fn new(scheme: SplittingScheme, h: f64, steps: usize) -> Self {
        Self {
            step_size: StepSizePolicy::Fixed(h),
            steps: StepsPolicy::Fixed(steps),
            noise: NoisePolicy::Fixed(0.5),
            flip: FlipMode::Automatic,
            shadow: ShadowOrder { order: 4, mode: ShadowMode::Analytic },
            scheme,
            mass: MassSpec::Identity,
            momentum_test: MomentumTest::Implicit,
        }
    }

    pub fn with_step_size(mut self, p: StepSizePolicy) -> Self {
        self.step_size = p;
        self
    }

    pub fn with_steps(mut self, p: StepsPolicy) -> Self {
        self.steps = p;
        self
    }

    pub fn with_noise(mut self, p: NoisePolicy) -> Self {
        self.noise = p;
        self
    }

    pub fn with_flip(mut self, f: FlipMode) -> Self {
        self.flip = f;
        self
    }

    pub fn with_shadow(mut self, s: ShadowOrder) -> Self {
        self.shadow = s;
        self
    }

    pub fn with_mass(mut self, m: MassSpec) -> Self {
        self.mass = m;
        self
    }

    pub fn with_momentum_test(mut self, t: MomentumTest) -> Self {
        self.momentum_test = t;
        self
    }

    /// Checks `h > 0`, `L ≥ 1`, `φ ∈ [0, 1]` and the mass dimension. `φ = 0` is accepted here
    /// for testing; user configurations reject it.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let h = self.step_size.nominal();
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!("step size must be positive, got {h}")));
        }
        if self.steps.nominal() == 0 {
            return Err(Error::InvalidArgument("number of steps must be at least 1".into()));
        }
        let phi = self.noise.nominal();
        if !(0.0..=1.0).contains(&phi) {
            return Err(Error::InvalidArgument(format!("noise parameter must lie in (0, 1], got {phi}")));
        }
        self.mass.validate(dim)
    }

    /// Draws `(h_n, L_n, φ_n)` in that order.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> IterationParams {
        let h = self.step_size.draw(rng);
        let steps = self.steps.draw(rng);
        let phi = self.noise.draw(rng);
        IterationParams { h, steps, phi }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn policies_stay_in_range() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let c = SamplerConfig::new(SplittingScheme::verlet(), 0.1, 10)
            .with_step_size(StepSizePolicy::Jittered(0.1))
            .with_steps(StepsPolicy::Uniform(10))
            .with_noise(NoisePolicy::Around(0.9));
        let mut seen_l = [false; 11];
        for _ in 0..5000 {
            let p = c.draw(&mut rng);
            assert!(p.h > 0.08 && p.h < 0.12);
            assert!((1..=10).contains(&p.steps));
            seen_l[p.steps] = true;
            assert!(p.phi > 0.72 && p.phi <= 1.0);
        }
        assert!(seen_l[1..].iter().all(|s| *s));
        let c = c.with_noise(NoisePolicy::UpTo(0.5));
        assert!((0..1000).all(|_| {
            let p = c.draw(&mut rng).phi;
            (0.0..0.5).contains(&p)
        }));
    }

    #[test]
    fn validation() {
        let c = SamplerConfig::new(SplittingScheme::verlet(), 0.1, 10);
        assert!(c.validate(3).is_ok());
        assert!(c.clone().with_noise(NoisePolicy::Fixed(1.5)).validate(3).is_err());
        assert!(SamplerConfig::new(SplittingScheme::verlet(), 0.0, 10).validate(3).is_err());
        assert!(SamplerConfig::new(SplittingScheme::verlet(), 0.1, 0).validate(3).is_err());
        assert!(c.with_mass(MassSpec::Diagonal(vec![1.0; 2])).validate(3).is_err());
    }
}
