//! Random-circuit datasets, trials and parameter sweeps.

mod ansatz;
mod config;
mod sweep;

pub use ansatz::{
    build_ansatz, generate_dataset, run_trial, sample_circuit, sample_thetas, AnsatzSpec, NoiseSpec,
};
pub use config::{parse_angle, ExperimentConfig, SweepKind, DEFAULT_DATASET_SIZES, DEFAULT_TRIALS};
pub use sweep::{
    cell_rng, mean_and_std_error, run_cell, run_sweep, run_sweep_with, stream_id, threads_from_env,
    SweepCsvWriter, SweepRecord, CSV_HEADER, THREADS_ENV,
};
