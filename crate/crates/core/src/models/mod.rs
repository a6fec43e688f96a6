//! Benchmark targets: Gaussian, banana, Bayesian logistic regression, stochastic volatility.

mod banana;
mod blr;
mod gaussian;
pub mod sv;

pub use banana::{banana_simulate, BananaTarget};
pub use blr::BlrTarget;
pub use gaussian::{generate_wishart_target, GaussianTarget};
pub use sv::{SvData, SvLatentBlock, SvParams, SvThetaBlock};
