//! Flat `key = value` experiment configuration with dotted sections.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::integrators::lookup;
use crate::model::MassSpec;
use crate::samplers::{
    FlipMode, MomentumTest, NoisePolicy, SamplerConfig, SamplerKind, StepSizePolicy, StepsPolicy,
};
use crate::shadow::{ShadowMode, ShadowOrder};

/// Target distributions available from configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelName {
    /// Standard normal of dimension `model.dim`.
    Gaussian,
    /// Gaussian with random Wishart precision, generated from `model.seed`.
    Wishart,
    Banana,
    Blr,
    Sv,
}

impl ModelName {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "gaussian" => Self::Gaussian,
            "wishart" => Self::Wishart,
            "banana" => Self::Banana,
            "blr" => Self::Blr,
            "sv" => Self::Sv,
            _ => return None,
        })
    }

    fn as_str(self) -> &'static str {
        match self {
            Self::Gaussian => "gaussian",
            Self::Wishart => "wishart",
            Self::Banana => "banana",
            Self::Blr => "blr",
            Self::Sv => "sv",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub name: ModelName,
    pub dim: usize,
    /// Seed for generated targets and simulated data.
    pub seed: u64,
    pub data: Option<PathBuf>,
    /// Label column of the dataset; the last column when unset.
    pub label_column: Option<String>,
    /// Prior variance of the logistic regression coefficients.
    pub alpha: f64,
    pub observations: usize,
    pub sigma_y: f64,
    pub sigma_theta: f64,
    /// Banana: value of `θ₁ + θ₂²` used to simulate the observations.
    pub mean: f64,
    pub sv_length: usize,
    pub sv_beta: f64,
    pub sv_sigma: f64,
    pub sv_phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HPolicy {
    Fixed,
    Jitter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LPolicy {
    Fixed,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiPolicy {
    Fixed,
    UpTo,
    Around,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    pub integrator: String,
    pub h: f64,
    pub h_policy: HPolicy,
    pub steps: usize,
    pub steps_policy: LPolicy,
    pub phi: f64,
    pub phi_policy: PhiPolicy,
    pub shadow_order: u8,
    pub shadow_mode: ShadowMode,
    pub flip: FlipMode,
    pub momentum_test: MomentumTest,
    pub rwmh_scale: f64,
    /// Diagonal mass; `None` is the identity.
    pub mass: Option<Vec<f64>>,
    /// Latent-block overrides for the stochastic volatility Gibbs sampler.
    pub latent_h: Option<f64>,
    pub latent_steps: Option<usize>,
    pub latent_phi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub n_samples: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub n_chains: usize,
    pub seed: u64,
}

/// A complete experiment: model, sampler, run lengths and output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub sampler: SamplerSpec,
    pub run: RunSpec,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec {
                name: ModelName::Gaussian,
                dim: 10,
                seed: 0,
                data: None,
                label_column: None,
                alpha: 100.0,
                observations: 100,
                sigma_y: 2.0,
                sigma_theta: 1.0,
                mean: 1.0,
                sv_length: 100,
                sv_beta: 0.65,
                sv_sigma: 0.15,
                sv_phi: 0.98,
            },
            sampler: SamplerSpec {
                kind: SamplerKind::Mmhmc,
                integrator: "verlet".into(),
                h: 0.1,
                h_policy: HPolicy::Fixed,
                steps: 10,
                steps_policy: LPolicy::Fixed,
                phi: 0.5,
                phi_policy: PhiPolicy::Fixed,
                shadow_order: 4,
                shadow_mode: ShadowMode::Analytic,
                flip: FlipMode::Automatic,
                momentum_test: MomentumTest::Implicit,
                rwmh_scale: 1.0,
                mass: None,
                latent_h: None,
                latent_steps: None,
                latent_phi: None,
            },
            run: RunSpec { n_samples: 10_000, burn_in: 1_000, thin: 1, n_chains: 1, seed: 0 },
            out_dir: PathBuf::from("out"),
        }
    }
}

fn bad(key: &str, msg: impl Into<String>) -> Error {
    Error::ConfigValue { key: key.to_string(), msg: msg.into() }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| bad(key, format!("cannot parse `{v}`")))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| num(key, s.trim())).collect()
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let (m, s, r) = (&mut self.model, &mut self.sampler, &mut self.run);
        match key {
            "model.name" => m.name = ModelName::parse(v).ok_or_else(|| bad(key, format!("unknown model `{v}`")))?,
            "model.dim" => m.dim = num(key, v)?,
            "model.seed" => m.seed = num(key, v)?,
            "model.data" => m.data = Some(PathBuf::from(v)),
            "model.label_column" => m.label_column = Some(v.to_string()),
            "model.alpha" => m.alpha = num(key, v)?,
            "model.observations" => m.observations = num(key, v)?,
            "model.sigma_y" => m.sigma_y = num(key, v)?,
            "model.sigma_theta" => m.sigma_theta = num(key, v)?,
            "model.mean" => m.mean = num(key, v)?,
            "model.sv.length" => m.sv_length = num(key, v)?,
            "model.sv.beta" => m.sv_beta = num(key, v)?,
            "model.sv.sigma" => m.sv_sigma = num(key, v)?,
            "model.sv.phi" => m.sv_phi = num(key, v)?,
            "sampler.kind" => s.kind = v.parse().map_err(|e: Error| bad(key, e.to_string()))?,
            "sampler.integrator" => s.integrator = v.to_string(),
            "sampler.h" => s.h = num(key, v)?,
            "sampler.h_policy" => {
                s.h_policy = match v {
                    "fixed" => HPolicy::Fixed,
                    "jitter" => HPolicy::Jitter,
                    _ => return Err(bad(key, "expected fixed or jitter")),
                }
            }
            "sampler.L" => s.steps = num(key, v)?,
            "sampler.L_policy" => {
                s.steps_policy = match v {
                    "fixed" => LPolicy::Fixed,
                    "uniform" => LPolicy::Uniform,
                    _ => return Err(bad(key, "expected fixed or uniform")),
                }
            }
            "sampler.phi" => s.phi = num(key, v)?,
            "sampler.phi_policy" => {
                s.phi_policy = match v {
                    "fixed" => PhiPolicy::Fixed,
                    "upto" => PhiPolicy::UpTo,
                    "around" => PhiPolicy::Around,
                    _ => return Err(bad(key, "expected fixed, upto or around")),
                }
            }
            "sampler.shadow_order" => s.shadow_order = num(key, v)?,
            "sampler.shadow_mode" => {
                s.shadow_mode = match v {
                    "analytic" => ShadowMode::Analytic,
                    "numeric" => ShadowMode::Numeric,
                    _ => return Err(bad(key, "expected analytic or numeric")),
                }
            }
            "sampler.flip" => {
                s.flip = match v {
                    "automatic" => FlipMode::Automatic,
                    "reduced" => FlipMode::Reduced,
                    _ => return Err(bad(key, "expected automatic or reduced")),
                }
            }
            "sampler.momentum_test" => {
                s.momentum_test = match v {
                    "implicit" => MomentumTest::Implicit,
                    "explicit" => MomentumTest::Explicit,
                    _ => return Err(bad(key, "expected implicit or explicit")),
                }
            }
            "sampler.rwmh_scale" => s.rwmh_scale = num(key, v)?,
            "sampler.mass" => s.mass = if v == "identity" { None } else { Some(list(key, v)?) },
            "sampler.latent.h" => s.latent_h = Some(num(key, v)?),
            "sampler.latent.L" => s.latent_steps = Some(num(key, v)?),
            "sampler.latent.phi" => s.latent_phi = Some(num(key, v)?),
            "run.n_samples" => r.n_samples = num(key, v)?,
            "run.burn_in" => r.burn_in = num(key, v)?,
            "run.thin" => r.thin = num(key, v)?,
            "run.n_chains" => r.n_chains = num(key, v)?,
            "run.seed" => r.seed = num(key, v)?,
            "output.dir" => self.out_dir = PathBuf::from(v),
            _ => return Err(bad(key, "unknown key")),
        }
        Ok(())
    }

    /// Parses configuration text on top of the defaults, then validates.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Self::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::ConfigParse { line: i + 1, msg: format!("expected `key = value`, got `{line}`") })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::ConfigParse { line: i + 1, msg: "empty key".into() });
            }
            if !seen.insert(k.to_string()) {
                return Err(Error::ConfigParse { line: i + 1, msg: format!("duplicate key `{k}`") });
            }
            c.set(k, v).map_err(|e| match e {
                Error::ConfigValue { key, msg } => Error::ConfigValue { key, msg: format!("{msg} (line {})", i + 1) },
                other => other,
            })?;
        }
        c.validate()?;
        Ok(c)
    }

    /// Every key with its resolved value.
    pub fn emit(&self) -> String {
        let (m, s, r) = (&self.model, &self.sampler, &self.run);
        let mut o = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(o, "{k} = {v}");
        };
        kv("model.name", m.name.as_str().into());
        kv("model.dim", m.dim.to_string());
        kv("model.seed", m.seed.to_string());
        if let Some(d) = &m.data {
            kv("model.data", d.display().to_string());
        }
        if let Some(l) = &m.label_column {
            kv("model.label_column", l.clone());
        }
        kv("model.alpha", m.alpha.to_string());
        kv("model.observations", m.observations.to_string());
        kv("model.sigma_y", m.sigma_y.to_string());
        kv("model.sigma_theta", m.sigma_theta.to_string());
        kv("model.mean", m.mean.to_string());
        kv("model.sv.length", m.sv_length.to_string());
        kv("model.sv.beta", m.sv_beta.to_string());
        kv("model.sv.sigma", m.sv_sigma.to_string());
        kv("model.sv.phi", m.sv_phi.to_string());
        kv("sampler.kind", s.kind.to_string());
        kv("sampler.integrator", s.integrator.clone());
        kv("sampler.h", s.h.to_string());
        kv("sampler.h_policy", match s.h_policy {
            HPolicy::Fixed => "fixed",
            HPolicy::Jitter => "jitter",
        }
        .into());
        kv("sampler.L", s.steps.to_string());
        kv("sampler.L_policy", match s.steps_policy {
            LPolicy::Fixed => "fixed",
            LPolicy::Uniform => "uniform",
        }
        .into());
        kv("sampler.phi", s.phi.to_string());
        kv("sampler.phi_policy", match s.phi_policy {
            PhiPolicy::Fixed => "fixed",
            PhiPolicy::UpTo => "upto",
            PhiPolicy::Around => "around",
        }
        .into());
        kv("sampler.shadow_order", s.shadow_order.to_string());
        kv("sampler.shadow_mode", match s.shadow_mode {
            ShadowMode::Analytic => "analytic",
            ShadowMode::Numeric => "numeric",
        }
        .into());
        kv("sampler.flip", match s.flip {
            FlipMode::Automatic => "automatic",
            FlipMode::Reduced => "reduced",
        }
        .into());
        kv("sampler.momentum_test", match s.momentum_test {
            MomentumTest::Implicit => "implicit",
            MomentumTest::Explicit => "explicit",
        }
        .into());
        kv("sampler.rwmh_scale", s.rwmh_scale.to_string());
        kv("sampler.mass", s.mass.as_deref().map_or("identity".into(), join));
        if let Some(v) = s.latent_h {
            kv("sampler.latent.h", v.to_string());
        }
        if let Some(v) = s.latent_steps {
            kv("sampler.latent.L", v.to_string());
        }
        if let Some(v) = s.latent_phi {
            kv("sampler.latent.phi", v.to_string());
        }
        kv("run.n_samples", r.n_samples.to_string());
        kv("run.burn_in", r.burn_in.to_string());
        kv("run.thin", r.thin.to_string());
        kv("run.n_chains", r.n_chains.to_string());
        kv("run.seed", r.seed.to_string());
        kv("output.dir", self.out_dir.display().to_string());
        o
    }

    /// Range and consistency checks; each error names the offending key.
    pub fn validate(&self) -> Result<()> {
        let (m, s, r) = (&self.model, &self.sampler, &self.run);
        let positive = |key: &str, v: f64| if v > 0.0 && v.is_finite() { Ok(()) } else { Err(bad(key, format!("must be positive, got {v}"))) };
        let unit = |key: &str, v: f64| if v > 0.0 && v <= 1.0 { Ok(()) } else { Err(bad(key, format!("must lie in (0, 1], got {v}"))) };
        if m.dim == 0 {
            return Err(bad("model.dim", "must be at least 1"));
        }
        if m.name == ModelName::Wishart && m.dim < 2 {
            return Err(bad("model.dim", "wishart targets need at least 2 dimensions"));
        }
        positive("model.alpha", m.alpha)?;
        positive("model.sigma_y", m.sigma_y)?;
        positive("model.sigma_theta", m.sigma_theta)?;
        positive("model.sv.beta", m.sv_beta)?;
        positive("model.sv.sigma", m.sv_sigma)?;
        if !(m.sv_phi.abs() < 1.0) {
            return Err(bad("model.sv.phi", "must satisfy |phi| < 1"));
        }
        if m.name == ModelName::Blr {
            match &m.data {
                None => return Err(bad("model.data", "required for model.name = blr")),
                Some(p) if !p.is_file() => return Err(bad("model.data", format!("file `{}` not found", p.display()))),
                _ => {}
            }
        }
        positive("sampler.h", s.h)?;
        if s.steps == 0 {
            return Err(bad("sampler.L", "must be at least 1"));
        }
        unit("sampler.phi", s.phi)?;
        if s.shadow_order != 4 && s.shadow_order != 6 {
            return Err(bad("sampler.shadow_order", "must be 4 or 6"));
        }
        positive("sampler.rwmh_scale", s.rwmh_scale)?;
        let scheme = lookup(&s.integrator).map_err(|e| bad("sampler.integrator", e.to_string()))?;
        if s.kind == SamplerKind::Mmhmc && s.shadow_order == 6 && !scheme.supports_order6() {
            return Err(bad("sampler.shadow_order", format!("order 6 is not available for {}", scheme.family())));
        }
        if let Some(mass) = &s.mass {
            if mass.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(bad("sampler.mass", "entries must be positive"));
            }
        }
        if let Some(h) = s.latent_h {
            positive("sampler.latent.h", h)?;
        }
        if s.latent_steps == Some(0) {
            return Err(bad("sampler.latent.L", "must be at least 1"));
        }
        if let Some(p) = s.latent_phi {
            unit("sampler.latent.phi", p)?;
        }
        if r.n_samples == 0 {
            return Err(bad("run.n_samples", "must be at least 1"));
        }
        if r.burn_in > r.n_samples {
            return Err(bad("run.burn_in", "exceeds run.n_samples"));
        }
        if r.thin == 0 {
            return Err(bad("run.thin", "must be at least 1"));
        }
        if r.n_chains == 0 {
            return Err(bad("run.n_chains", "must be at least 1"));
        }
        Ok(())
    }

    /// Sampler settings for the main (or only) block.
    pub fn sampler_config(&self) -> Result<SamplerConfig> {
        self.block_config(self.sampler.h, self.sampler.steps, self.sampler.phi, self.sampler.mass.clone())
    }

    /// Sampler settings for the latent block of the stochastic volatility model.
    pub fn latent_sampler_config(&self) -> Result<SamplerConfig> {
        let s = &self.sampler;
        self.block_config(s.latent_h.unwrap_or(s.h), s.latent_steps.unwrap_or(s.steps), s.latent_phi.unwrap_or(s.phi), None)
    }

    fn block_config(&self, h: f64, steps: usize, phi: f64, mass: Option<Vec<f64>>) -> Result<SamplerConfig> {
        let s = &self.sampler;
        let scheme = lookup(&s.integrator).map_err(|e| bad("sampler.integrator", e.to_string()))?;
        Ok(SamplerConfig {
            step_size: match s.h_policy {
                HPolicy::Fixed => StepSizePolicy::Fixed(h),
                HPolicy::Jitter => StepSizePolicy::Jittered(h),
            },
            steps: match s.steps_policy {
                LPolicy::Fixed => StepsPolicy::Fixed(steps),
                LPolicy::Uniform => StepsPolicy::Uniform(steps),
            },
            noise: match s.phi_policy {
                PhiPolicy::Fixed => NoisePolicy::Fixed(phi),
                PhiPolicy::UpTo => NoisePolicy::UpTo(phi),
                PhiPolicy::Around => NoisePolicy::Around(phi),
            },
            flip: s.flip,
            shadow: ShadowOrder::new(s.shadow_order, s.shadow_mode).map_err(|e| bad("sampler.shadow_order", e.to_string()))?,
            scheme,
            mass: match mass {
                None => MassSpec::Identity,
                Some(d) => MassSpec::diagonal(d).map_err(|e| bad("sampler.mass", e.to_string()))?,
            },
            momentum_test: s.momentum_test,
        })
    }

    /// Kernel with the configured random-walk scale.
    pub fn sampler_kind(&self) -> SamplerKind {
        match self.sampler.kind {
            SamplerKind::Rwmh { .. } => SamplerKind::Rwmh { scale: self.sampler.rwmh_scale },
            k => k,
        }
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigParse { line: 0, msg: format!("cannot read `{}`: {e}", path.display()) })?;
    ExperimentConfig::parse(&text)
}
