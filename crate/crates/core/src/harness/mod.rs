//! Configuration files, dataset ingestion, chain files and experiment runs.

mod config;
mod data;
mod io;
mod run;

pub use config::{load_config, ExperimentConfig, HPolicy, LPolicy, ModelName, ModelSpec, PhiPolicy, RunSpec, SamplerSpec};
pub use data::{ingest_blr_dataset, BlrDataset};
pub use io::{glob_chains, read_chain_csv, write_chain_csv, write_meta, ChainMeta, META_FILE};
pub use run::{build_model, build_sv_data, run_experiment, ExperimentOutput};
