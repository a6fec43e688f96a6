//! Splitting integrators, their modified-Hamiltonian coefficients, and the coefficient design tool.

mod catalog;
mod coefficients;
mod design;
mod rho;
mod scheme;

pub use catalog::{catalog, catalog_csv, lookup, NamedScheme};
pub use coefficients::{error_metric_e, error_metric_eg, stage_coefficients, ShadowCoefficients};
pub use design::{golden_section, minimize_design_metric, nelder_mead, DesignObjective, DesignResult};
pub use rho::{rho_bound, rho_guarded, rho_max, RhoTarget};
pub use scheme::{integrate, integrate_state, stage_gradients, Family, IntegratorState, SplittingScheme, Stage};
