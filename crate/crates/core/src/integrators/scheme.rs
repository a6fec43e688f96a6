use std::fmt;

use crate::error::{Error, Result};
use crate::integrators::coefficients::{stage_coefficients, ShadowCoefficients};
use crate::model::{MassSpec, PhasePoint, TargetModel};

/// Integrator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Verlet,
    TwoStage,
    ThreeStage,
    FourStage,
}

impl Family {
    pub fn n_params(self) -> usize {
        match self {
            Family::Verlet => 0,
            Family::TwoStage => 1,
            Family::ThreeStage => 2,
            Family::FourStage => 3,
        }
    }

    /// Gradient evaluations per step.
    pub fn n_stages(self) -> usize {
        match self {
            Family::Verlet => 1,
            Family::TwoStage => 2,
            Family::ThreeStage => 3,
            Family::FourStage => 4,
        }
    }

    pub fn from_stages(n: usize) -> Result<Self> {
        match n {
            1 => Ok(Family::Verlet),
            2 => Ok(Family::TwoStage),
            3 => Ok(Family::ThreeStage),
            4 => Ok(Family::FourStage),
            _ => Err(Error::InvalidArgument(format!("no {n}-stage family"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Verlet => "verlet",
            Family::TwoStage => "two_stage",
            Family::ThreeStage => "three_stage",
            Family::FourStage => "four_stage",
        })
    }
}

/// One sub-step of a splitting scheme, as a fraction of the step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stage {
    /// `p ← p − δ U_θ(θ)`.
    Kick(f64),
    /// `θ ← θ + δ M⁻¹ p`.
    Drift(f64),
}

/// A palindromic kick/drift composition together with its shadow coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingScheme {
    family: Family,
    params: Vec<f64>,
    stages: Vec<Stage>,
    coefficients: ShadowCoefficients,
}

impl SplittingScheme {
    pub fn verlet() -> Self {
        Self::new(Family::Verlet, &[]).expect("verlet is always valid")
    }

    pub fn two_stage(b: f64) -> Result<Self> {
        Self::new(Family::TwoStage, &[b])
    }

    pub fn three_stage(a: f64, b: f64) -> Result<Self> {
        Self::new(Family::ThreeStage, &[a, b])
    }

    pub fn four_stage(a: f64, b1: f64, b2: f64) -> Result<Self> {
        Self::new(Family::FourStage, &[a, b1, b2])
    }

    /// Builds a scheme from its family parameters: `b`, `(a, b)` or `(a, b₁, b₂)`.
    pub fn new(family: Family, params: &[f64]) -> Result<Self> {
        let coefficients = stage_coefficients(family, params)?;
        use Stage::{Drift, Kick};
        let stages = match (family, params) {
            (Family::Verlet, _) => vec![Kick(0.5), Drift(1.0), Kick(0.5)],
            (Family::TwoStage, &[b]) => vec![Kick(b), Drift(0.5), Kick(1.0 - 2.0 * b), Drift(0.5), Kick(b)],
            (Family::ThreeStage, &[a, b]) => vec![
                Kick(b),
                Drift(a),
                Kick(0.5 - b),
                Drift(1.0 - 2.0 * a),
                Kick(0.5 - b),
                Drift(a),
                Kick(b),
            ],
            (Family::FourStage, &[a, b1, b2]) => vec![
                Drift(b1),
                Kick(a),
                Drift(b2),
                Kick(0.5 - a),
                Drift(1.0 - 2.0 * b1 - 2.0 * b2),
                Kick(0.5 - a),
                Drift(b2),
                Kick(a),
                Drift(b1),
            ],
            _ => unreachable!("parameter count checked by stage_coefficients"),
        };
        Ok(Self { family, params: params.to_vec(), stages, coefficients })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn coefficients(&self) -> &ShadowCoefficients {
        &self.coefficients
    }

    /// Stencil spacing `ε` as a fraction of `h`: the position advance of the first stage.
    pub fn epsilon_fraction(&self) -> f64 {
        self.stages
            .iter()
            .find_map(|s| match s {
                Stage::Drift(d) => Some(*d),
                Stage::Kick(_) => None,
            })
            .expect("every scheme drifts")
    }

    /// Whether sixth-order modified Hamiltonians are available for this scheme.
    pub fn supports_order6(&self) -> bool {
        matches!(self.family, Family::Verlet | Family::TwoStage)
    }

    /// Same composition with every coefficient of the shadow zeroed (test and debug use).
    pub fn with_zero_shadow(mut self) -> Self {
        self.coefficients = ShadowCoefficients::zero();
        self
    }
}

/// Position, momentum and the gradient cache of an integration in progress.
#[derive(Debug, Clone)]
pub struct IntegratorState {
    pub theta: Vec<f64>,
    pub p: Vec<f64>,
    grad: Vec<f64>,
    potential: f64,
    fresh: bool,
}

impl IntegratorState {
    pub fn new<M: TargetModel + ?Sized>(model: &M, x: &PhasePoint) -> Result<Self> {
        let mut s = Self {
            theta: x.theta.clone(),
            p: x.p.clone(),
            grad: vec![0.0; x.dim()],
            potential: 0.0,
            fresh: false,
        };
        s.refresh(model)?;
        Ok(s)
    }

    /// State with an already known potential and gradient at `x.theta`.
    pub fn with_gradient(x: PhasePoint, potential: f64, grad: Vec<f64>) -> Self {
        Self { theta: x.theta, p: x.p, grad, potential, fresh: true }
    }

    fn refresh<M: TargetModel + ?Sized>(&mut self, model: &M) -> Result<()> {
        if !self.fresh {
            let u = model.potential_and_gradient(&self.theta, &mut self.grad)?;
            if !u.is_finite() {
                return Err(Error::eval(None, "potential is not finite"));
            }
            crate::model::ensure_finite(&self.grad, "gradient")?;
            self.potential = u;
            self.fresh = true;
        }
        Ok(())
    }

    /// Gradient at the current position, evaluating it if the position moved.
    pub fn gradient<M: TargetModel + ?Sized>(&mut self, model: &M) -> Result<&[f64]> {
        self.refresh(model)?;
        Ok(&self.grad)
    }

    pub fn potential<M: TargetModel + ?Sized>(&mut self, model: &M) -> Result<f64> {
        self.refresh(model)?;
        Ok(self.potential)
    }

    pub fn kick<M: TargetModel + ?Sized>(&mut self, model: &M, delta: f64) -> Result<()> {
        self.refresh(model)?;
        for (p, g) in self.p.iter_mut().zip(&self.grad) {
            *p -= delta * g;
        }
        Ok(())
    }

    pub fn drift(&mut self, mass: &MassSpec, delta: f64) {
        for (i, (t, p)) in self.theta.iter_mut().zip(&self.p).enumerate() {
            *t += delta * p / mass.mass(i);
        }
        self.fresh = false;
    }

    pub fn flip(&mut self) {
        self.p.iter_mut().for_each(|v| *v = -*v);
    }

    pub fn phase_point(&self) -> PhasePoint {
        PhasePoint { theta: self.theta.clone(), p: self.p.clone() }
    }

    /// Consumes the state, returning the point, potential and gradient.
    pub fn into_parts<M: TargetModel + ?Sized>(mut self, model: &M) -> Result<(PhasePoint, f64, Vec<f64>)> {
        self.refresh(model)?;
        Ok((PhasePoint { theta: self.theta, p: self.p }, self.potential, self.grad))
    }
}

/// Advances `state` by `steps` steps of size `h` (negative `h` integrates backwards).
///
/// When `recorder` is given, the gradient used at every kick is appended to it.
pub fn integrate_state<M: TargetModel + ?Sized>(
    scheme: &SplittingScheme,
    model: &M,
    mass: &MassSpec,
    state: &mut IntegratorState,
    h: f64,
    steps: usize,
    mut recorder: Option<&mut Vec<Vec<f64>>>,
) -> Result<()> {
    for _ in 0..steps {
        for stage in scheme.stages() {
            match *stage {
                Stage::Kick(f) => {
                    state.kick(model, f * h)?;
                    if let Some(r) = recorder.as_deref_mut() {
                        r.push(state.grad.clone());
                    }
                }
                Stage::Drift(f) => state.drift(mass, f * h),
            }
        }
    }
    state.refresh(model)?;
    crate::model::ensure_finite(&state.p, "momentum")?;
    Ok(())
}

/// Integrates `L` steps of size `h` from `x0`.
pub fn integrate<M: TargetModel + ?Sized>(
    scheme: &SplittingScheme,
    model: &M,
    mass: &MassSpec,
    x0: &PhasePoint,
    h: f64,
    steps: usize,
    grad_log: Option<&mut Vec<Vec<f64>>>,
) -> Result<PhasePoint> {
    if !(h > 0.0) || steps == 0 {
        return Err(Error::InvalidArgument(format!("need h > 0 and L >= 1, got h={h}, L={steps}")));
    }
    let mut s = IntegratorState::new(model, x0)?;
    integrate_state(scheme, model, mass, &mut s, h, steps, grad_log)?;
    Ok(s.phase_point())
}

/// Gradients at the positions reached after each of the first `k` drifts, integrating
/// from `start` with signed step `h`. The start state is not modified.
pub fn stage_gradients<M: TargetModel + ?Sized>(
    scheme: &SplittingScheme,
    model: &M,
    mass: &MassSpec,
    start: &IntegratorState,
    h: f64,
    k: usize,
) -> Result<Vec<Vec<f64>>> {
    let mut s = start.clone();
    let mut out = Vec::with_capacity(k);
    'outer: loop {
        for stage in scheme.stages() {
            match *stage {
                Stage::Kick(f) => s.kick(model, f * h)?,
                Stage::Drift(f) => {
                    s.drift(mass, f * h);
                    out.push(s.gradient(model)?.to_vec());
                    if out.len() == k {
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(out)
}
