use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmlm::experiments::{run_sweep_with, threads_from_env, ExperimentConfig, SweepCsvWriter};
use qmlm::fidelity::{concentration_stats, gram_mixed, gram_pure};
use qmlm::io::{read_state_dir, StateFile};
use qmlm::mlm::{predict_mlm, train_mlm, LabeledDataset};
use qmlm::qmlm::{predict_label_qmlm, train_qmlm_labels};
use qmlm::quantum::{simulate_noisy, Circuit, DensityMatrix, Gate};
use qmlm::{selftest, BitString, Error, Result};

#[derive(Parser)]
#[command(
    name = "qmlm",
    version,
    about = "Quantum minimal learning machine toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep described by a TOML config and write the CSV.
    Sweep {
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Fidelity Gram matrix of every *.csv state in a directory.
    Gram {
        states_dir: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Multi-label toy problem solved with both the classical and the quantum MLM.
    DemoMlc {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Check the label-fidelity, depolarized-overlap and pseudoinverse identities.
    Selftest {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn sweep(config: &Path, output: &Path) -> Result<()> {
    let config = ExperimentConfig::from_file(config)?;
    let threads = threads_from_env()?;
    let cells = config.sweep_values.len() * config.dataset_sizes.len();
    let mut writer = SweepCsvWriter::new(create(output)?)?;
    let mut done = 0;
    run_sweep_with(&config, threads, |record| {
        done += 1;
        eprintln!(
            "[{done}/{cells}] {}={} N={} mean={:.4} se={:.4}",
            record.sweep_name,
            record.sweep_value,
            record.dataset_size,
            record.mean_fidelity,
            record.std_error
        );
        writer.write(record)
    })?;
    println!("wrote {cells} rows to {}", output.display());
    Ok(())
}

fn gram(dir: &Path, output: &Path) -> Result<()> {
    let states = read_state_dir(dir)?;
    if states.is_empty() {
        return Err(Error::Invalid(format!(
            "no *.csv states in {}",
            dir.display()
        )));
    }
    let pure: Option<Vec<_>> = states
        .iter()
        .map(|s| match s {
            StateFile::Pure(v) => Some(v.clone()),
            StateFile::Mixed(_) => None,
        })
        .collect();
    let g = match pure {
        Some(vs) => gram_pure(&vs)?,
        None => gram_mixed(&states.iter().map(StateFile::to_density).collect::<Vec<_>>())?,
    };
    std::fs::write(output, g.to_csv())?;
    println!(
        "{} states, Gram matrix written to {}",
        g.size(),
        output.display()
    );
    if g.size() > 1 {
        let (mean, var) = concentration_stats(&g)?;
        println!("off-diagonal fidelity: mean {mean:.6}, variance {var:.3e}");
    }
    Ok(())
}

/// Angle encoding: feature `k` rotates qubit `k` about X, then every qubit
/// picks up a small amount of gate noise.
fn encode_features(x: &[f64], p1: f64) -> Result<DensityMatrix> {
    let mut c = Circuit::new(x.len())?;
    for (qubit, &theta) in x.iter().enumerate() {
        c.push(Gate::Rx { qubit, theta })?;
    }
    simulate_noisy(&c, p1, 0.0)
}

/// Three features in `[0, π]`; label bit `j` is set when feature `j` is
/// past the midpoint.
fn toy_point(rng: &mut impl Rng) -> (Vec<f64>, BitString) {
    let x: Vec<f64> = (0..3)
        .map(|_| rng.gen_range(0.0..std::f64::consts::PI))
        .collect();
    let y = BitString::new(x.iter().map(|&v| v > std::f64::consts::FRAC_PI_2).collect());
    (x, y)
}

fn demo_mlc(seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (train_x, train_y): (Vec<_>, Vec<_>) = (0..24).map(|_| toy_point(&mut rng)).unzip();
    let test: Vec<_> = (0..8).map(|_| toy_point(&mut rng)).collect();
    let p1 = 0.01;

    let data = LabeledDataset::new_multi_label(train_x.clone(), train_y.clone())?;
    let mlm = train_mlm(&data, None, None)?;
    let states = train_x
        .iter()
        .map(|x| encode_features(x, p1))
        .collect::<Result<Vec<_>>>()?;
    let qmlm = train_qmlm_labels(&states, &train_y, None)?;

    println!(
        "multi-label toy: {} training points, {} test points, 3 labels",
        train_x.len(),
        test.len()
    );
    println!(
        "{:<28} {:>5} {:>5} {:>5}",
        "features", "true", "mlm", "qmlm"
    );
    let (mut mlm_err, mut qmlm_err) = (0, 0);
    for (x, y) in &test {
        let (_, classical) = predict_mlm(&mlm, x)?;
        let quantum = predict_label_qmlm(&qmlm, &encode_features(x, p1)?)?;
        mlm_err += qmlm::bits::hamming(y, &classical)?;
        qmlm_err += qmlm::bits::hamming(y, &quantum)?;
        let xs: Vec<String> = x.iter().map(|v| format!("{v:.3}")).collect();
        println!(
            "{:<28} {:>5} {:>5} {:>5}",
            xs.join(" "),
            y,
            classical,
            quantum
        );
    }
    let bits = (3 * test.len()) as f64;
    println!(
        "hamming loss: mlm {:.3}, qmlm {:.3}",
        mlm_err as f64 / bits,
        qmlm_err as f64 / bits
    );
    Ok(())
}

fn run_selftest(seed: u64) -> Result<bool> {
    let results = selftest::run_all(seed)?;
    for r in &results {
        println!("{r}");
    }
    Ok(results.iter().all(|r| r.passed()))
}

fn exit_code(err: &Error) -> ExitCode {
    if err.is_numerical() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Sweep { config, output } => sweep(&config, &output),
        Command::Gram { states_dir, output } => gram(&states_dir, &output),
        Command::DemoMlc { seed } => demo_mlc(seed),
        Command::Selftest { seed } => match run_selftest(seed) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(2),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
