use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::ansatz::{generate_dataset, run_trial};
use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::fmt::format_sig;
use crate::qmlm::train_qmlm;

pub const THREADS_ENV: &str = "QMLM_THREADS";

pub const CSV_HEADER: &str =
    "sweep_name,sweep_value,dataset_size,mean_fidelity,std_error,trials,seed";

/// Trial id reserved for the training set of a cell.
const TRAINING_STREAM: u64 = u64::MAX;

/// Aggregated result for one (sweep value, dataset size) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub sweep_name: String,
    pub sweep_value: f64,
    pub dataset_size: usize,
    pub mean_fidelity: f64,
    pub std_error: f64,
    pub trials: usize,
    pub seed: u64,
}

impl SweepRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.sweep_name,
            format_sig(self.sweep_value, 10),
            self.dataset_size,
            format_sig(self.mean_fidelity, 10),
            format_sig(self.std_error, 10),
            self.trials,
            self.seed
        )
    }
}

/// Writes the header on creation and flushes after every row.
pub struct SweepCsvWriter<W: Write> {
    out: W,
}

impl<W: Write> SweepCsvWriter<W> {
    pub fn new(mut out: W) -> Result<Self> {
        writeln!(out, "{CSV_HEADER}")?;
        out.flush()?;
        Ok(SweepCsvWriter { out })
    }

    pub fn write(&mut self, record: &SweepRecord) -> Result<()> {
        writeln!(self.out, "{}", record.to_csv_row())?;
        self.out.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable stream id for one trial of one cell.
pub fn stream_id(sweep_value: f64, dataset_size: usize, trial: u64) -> u64 {
    let h = splitmix64(sweep_value.to_bits());
    let h = splitmix64(h ^ dataset_size as u64);
    splitmix64(h ^ trial)
}

/// Generator for `(sweep value, N, trial)` under a base seed.
pub fn cell_rng(seed: u64, sweep_value: f64, dataset_size: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(sweep_value, dataset_size, trial));
    rng
}

/// Mean and standard error of the mean (sample standard deviation / √n).
/// A single sample has zero standard error.
pub fn mean_and_std_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    (mean, (ss / (n - 1.0)).sqrt() / n.sqrt())
}

/// Worker count from `QMLM_THREADS`; `None` when unset (all cores).
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(Error::Invalid(format!(
                "{THREADS_ENV}={v} is not a positive integer"
            ))),
            Ok(n) => Ok(Some(n)),
        },
    }
}

fn build_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))
}

/// Trains and evaluates one cell.
pub fn run_cell(
    config: &ExperimentConfig,
    sweep_value: f64,
    dataset_size: usize,
) -> Result<SweepRecord> {
    let (ansatz, noise) = config.point(sweep_value)?;
    let mut train_rng = cell_rng(config.seed, sweep_value, dataset_size, TRAINING_STREAM);
    let (inputs, outputs) = generate_dataset(&ansatz, &noise, dataset_size, &mut train_rng)?;
    let model = train_qmlm(&inputs, &outputs, None)?.with_seed(config.seed);
    let fidelities = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = cell_rng(config.seed, sweep_value, dataset_size, t);
            run_trial(&model, &ansatz, &noise, &mut rng)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, se) = mean_and_std_error(&fidelities);
    Ok(SweepRecord {
        sweep_name: config.sweep.name().to_string(),
        sweep_value,
        dataset_size,
        mean_fidelity: mean.clamp(0.0, 1.0),
        std_error: se,
        trials: config.trials,
        seed: config.seed,
    })
}

/// Runs every (sweep value, N) cell in order, handing each record to
/// `on_record` as soon as it is ready. `threads = None` uses all cores.
pub fn run_sweep_with(
    config: &ExperimentConfig,
    threads: Option<usize>,
    mut on_record: impl FnMut(&SweepRecord) -> Result<()>,
) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let pool = build_pool(threads)?;
    let mut records = Vec::with_capacity(config.sweep_values.len() * config.dataset_sizes.len());
    for &value in &config.sweep_values {
        for &n in &config.dataset_sizes {
            let record = pool.install(|| run_cell(config, value, n))?;
            on_record(&record)?;
            records.push(record);
        }
    }
    Ok(records)
}

/// [`run_sweep_with`] with the thread count taken from `QMLM_THREADS`.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRecord>> {
    run_sweep_with(config, threads_from_env()?, |_| Ok(()))
}
