use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use nlse_pinn::error::{Error, Result};
use nlse_pinn::experiments::{
    emit_error_field, emit_snapshots, fd_baseline_estimate, relative_error, run_sweep_with_progress,
    FdGridSamples, RunStatus, SweepSpec, SweepVariable,
};
use nlse_pinn::io::{
    fmt_g17, write_dataset_csv, write_dataset_meta, write_history_csv, write_runs_csv,
    write_summary_csv,
};
use nlse_pinn::model::{load_checkpoint, save_checkpoint};
use nlse_pinn::optim::{generate_training_data, train_with_observer, TrainConfig};
use nlse_pinn::sampling::{stream_rng, DomainBounds, STREAM_FD_NOISE};

/// Recovers the nonlinear coefficient of the one-dimensional nonlinear
/// Schrödinger equation from sparse noisy field samples by training a
/// physics-constrained network.
#[derive(Parser)]
#[command(name = "nlse-pinn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a noisy measurement dataset and its metadata
    GenerateData {
        #[command(flatten)]
        overrides: ConfigOverrides,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Train on generated data and write the history and final checkpoint
    Train {
        #[command(flatten)]
        overrides: ConfigOverrides,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also write a checkpoint every N epochs
        #[arg(long)]
        checkpoint_every: Option<usize>,
    },
    /// Repeat training across seeds for several true coefficients
    SweepBeta {
        #[command(flatten)]
        overrides: ConfigOverrides,
        /// True coefficients to recover
        #[arg(long, value_delimiter = ',', default_value = "0.5,1.0,2.0")]
        values: Vec<f64>,
        /// Seeds crossed with every value
        #[arg(long, value_delimiter = ',', default_value = "1234,1235,1236,1237,1238")]
        seeds: Vec<u64>,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Repeat training across seeds for several sample counts
    SweepNu {
        #[command(flatten)]
        overrides: ConfigOverrides,
        /// Sample counts to train with
        #[arg(long, value_delimiter = ',', default_value = "10,50,100,200")]
        values: Vec<usize>,
        /// Seeds crossed with every value
        #[arg(long, value_delimiter = ',', default_value = "1234,1235,1236,1237,1238")]
        seeds: Vec<u64>,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Recover the coefficient by finite differences on gridded noisy data
    BaselineFd {
        #[arg(long, default_value_t = 1.0)]
        beta_true: f64,
        #[arg(long, default_value_t = 0.2)]
        noise_level: f64,
        #[arg(long, default_value_t = 1234)]
        seed: u64,
        /// Grid spacings to evaluate, used for both x and t
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05")]
        h_values: Vec<f64>,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Evaluate a trained checkpoint: amplitude error field and snapshots
    Render {
        /// Checkpoint written by the train command
        #[arg(long)]
        checkpoint: PathBuf,
        /// True coefficient for the exact reference amplitude
        #[arg(long, default_value_t = 1.0)]
        beta_true: f64,
        /// Grid points along x
        #[arg(long, default_value_t = 256)]
        nx: usize,
        /// Grid points along t
        #[arg(long, default_value_t = 100)]
        nt: usize,
        /// Snapshot times
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.8,1.4")]
        times: Vec<f64>,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

/// Training settings, applied over the defaults in this order: config file
/// first, then individual flags.
#[derive(Args)]
struct ConfigOverrides {
    /// Key=value file with any of the training settings
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    lambda_data: Option<f64>,
    #[arg(long)]
    lambda_physics: Option<f64>,
    /// Number of measured samples
    #[arg(long)]
    n_u: Option<usize>,
    /// Number of collocation points
    #[arg(long)]
    n_f: Option<usize>,
    #[arg(long)]
    noise_level: Option<f64>,
    #[arg(long)]
    beta_true: Option<f64>,
    #[arg(long)]
    beta_init: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Layer sizes, e.g. 2,32,32,32,2
    #[arg(long, value_delimiter = ',')]
    topology: Option<Vec<usize>>,
}

impl ConfigOverrides {
    fn resolve(&self) -> Result<TrainConfig> {
        let mut config = TrainConfig::default();
        if let Some(path) = &self.config {
            apply_config_file(&mut config, path)?;
        }
        if let Some(v) = self.epochs {
            config.epochs = v;
        }
        if let Some(v) = self.learning_rate {
            config.learning_rate = v;
        }
        if let Some(v) = self.lambda_data {
            config.lambda_data = v;
        }
        if let Some(v) = self.lambda_physics {
            config.lambda_physics = v;
        }
        if let Some(v) = self.n_u {
            config.n_u = v;
        }
        if let Some(v) = self.n_f {
            config.n_f = v;
        }
        if let Some(v) = self.noise_level {
            config.noise_level = v;
        }
        if let Some(v) = self.beta_true {
            config.beta_true = v;
        }
        if let Some(v) = self.beta_init {
            config.beta_init = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = &self.topology {
            config.topology = v.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

fn apply_config_file(config: &mut TrainConfig, path: &Path) -> Result<()> {
    let bad = |line_no: usize, detail: String| Error::MalformedFile {
        what: "config",
        path: path.display().to_string(),
        detail: format!("line {}: {detail}", line_no + 1),
    };
    let text = std::fs::read_to_string(path)?;
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(bad(line_no, format!("expected key=value, got {line:?}")));
        };
        let key = key.trim();
        let value = value.trim();
        let parse_f64 = || -> Result<f64> {
            value
                .parse()
                .map_err(|e| bad(line_no, format!("bad value for {key}: {e}")))
        };
        let parse_usize = || -> Result<usize> {
            value
                .parse()
                .map_err(|e| bad(line_no, format!("bad value for {key}: {e}")))
        };
        match key {
            "epochs" => config.epochs = parse_usize()?,
            "learning_rate" => config.learning_rate = parse_f64()?,
            "lambda_data" => config.lambda_data = parse_f64()?,
            "lambda_physics" => config.lambda_physics = parse_f64()?,
            "n_u" => config.n_u = parse_usize()?,
            "n_f" => config.n_f = parse_usize()?,
            "noise_level" => config.noise_level = parse_f64()?,
            "beta_true" => config.beta_true = parse_f64()?,
            "beta_init" => config.beta_init = parse_f64()?,
            "seed" => {
                config.seed = value
                    .parse()
                    .map_err(|e| bad(line_no, format!("bad value for seed: {e}")))?
            }
            "topology" => {
                config.topology = value
                    .split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| bad(line_no, format!("bad value for topology: {e}")))?
            }
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown config key {other:?} in {}",
                    path.display()
                )))
            }
        }
    }
    Ok(())
}

fn exit_code(error: &Error) -> i32 {
    match error {
        Error::InvalidConfig(_)
        | Error::MalformedFile { .. }
        | Error::NonPositiveBeta(_)
        | Error::ZeroReferenceBeta
        | Error::ZeroSampleCount
        | Error::TooFewSamples { .. }
        | Error::GridTooSmall { .. }
        | Error::TimeOutOfDomain(_)
        | Error::EmptySampleSet
        | Error::DimensionMismatch { .. }
        | Error::ShapeMismatch(_) => 2,
        Error::NonFiniteLoss { .. } | Error::DegenerateFit(_) | Error::Io(_) => 1,
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::GenerateData { overrides, out } => generate_data(&overrides, &out),
        Command::Train {
            overrides,
            out,
            checkpoint_every,
        } => train_cmd(&overrides, &out, checkpoint_every),
        Command::SweepBeta {
            overrides,
            values,
            seeds,
            out,
        } => sweep_cmd(&overrides, SweepVariable::BetaTrue, values, seeds, &out),
        Command::SweepNu {
            overrides,
            values,
            seeds,
            out,
        } => sweep_cmd(
            &overrides,
            SweepVariable::TrainingPoints,
            values.into_iter().map(|v| v as f64).collect(),
            seeds,
            &out,
        ),
        Command::BaselineFd {
            beta_true,
            noise_level,
            seed,
            h_values,
            out,
        } => baseline_fd_cmd(beta_true, noise_level, seed, &h_values, &out),
        Command::Render {
            checkpoint,
            beta_true,
            nx,
            nt,
            times,
            out,
        } => render_cmd(&checkpoint, beta_true, nx, nt, &times, &out),
    }
}

fn generate_data(overrides: &ConfigOverrides, out: &Path) -> Result<()> {
    let config = overrides.resolve()?;
    std::fs::create_dir_all(out)?;
    let data = generate_training_data(&config)?;
    let dataset = out.join("dataset.csv");
    write_dataset_csv(&dataset, &data.noisy)?;
    write_dataset_meta(
        &out.join("dataset_meta.txt"),
        config.beta_true,
        config.noise_level,
        config.seed,
        config.n_u,
    )?;
    println!(
        "wrote {} samples (noise level {}) to {}",
        data.noisy.len(),
        config.noise_level,
        dataset.display()
    );
    Ok(())
}

fn train_cmd(overrides: &ConfigOverrides, out: &Path, checkpoint_every: Option<usize>) -> Result<()> {
    let config = overrides.resolve()?;
    std::fs::create_dir_all(out)?;
    let stride = (config.epochs / 10).max(1);
    let mut checkpoint_error = None;
    let result = train_with_observer(&config, |epoch, loss, beta, params| {
        let step = epoch + 1;
        if step % stride == 0 || step == config.epochs {
            println!(
                "epoch {step:>6}/{}  data {:.3e}  physics {:.3e}  beta {beta:.6}",
                config.epochs, loss.data_loss, loss.physics_loss
            );
        }
        if let Some(every) = checkpoint_every {
            if every > 0 && step % every == 0 && checkpoint_error.is_none() {
                let path = out.join(format!("checkpoint_epoch{step}.ckpt"));
                if let Err(e) = save_checkpoint(&path, params, config.seed) {
                    checkpoint_error = Some(e);
                }
            }
        }
    })?;
    if let Some(e) = checkpoint_error {
        return Err(e);
    }
    write_history_csv(&out.join("history.csv"), &result.history_records())?;
    save_checkpoint(&out.join("model.ckpt"), &result.params, config.seed)?;
    println!(
        "recovered beta {:.6} (true {}, error {:.3}%) in {:.1}s",
        result.beta_final, config.beta_true, result.relative_error_percent, result.elapsed_seconds
    );
    println!("wrote {} and {}", out.join("history.csv").display(), out.join("model.ckpt").display());
    Ok(())
}

fn sweep_cmd(
    overrides: &ConfigOverrides,
    variable: SweepVariable,
    values: Vec<f64>,
    seeds: Vec<u64>,
    out: &Path,
) -> Result<()> {
    let base = overrides.resolve()?;
    std::fs::create_dir_all(out)?;
    let spec = SweepSpec {
        base,
        variable,
        values,
        seeds,
    };
    let outcome = run_sweep_with_progress(&spec, |run| match run.status {
        RunStatus::Ok => println!(
            "{} {}  seed {}  beta {:.6}  error {:.3}%  ({:.1}s)",
            variable.name(),
            run.value,
            run.seed,
            run.beta_final,
            run.rel_error_percent,
            run.elapsed_seconds
        ),
        RunStatus::Diverged => println!(
            "{} {}  seed {}  diverged",
            variable.name(),
            run.value,
            run.seed
        ),
    })?;
    write_runs_csv(&out.join("runs.csv"), &outcome.run_records(variable))?;
    write_summary_csv(&out.join("summary.csv"), &outcome.summary_records(variable))?;
    for row in &outcome.rows {
        println!(
            "{} {}: error {:.3}% +- {:.3}% over {} runs",
            variable.name(),
            row.value,
            row.mean_rel_error_percent,
            row.std_rel_error_percent,
            row.n_runs
        );
    }
    println!(
        "wrote {} and {}",
        out.join("runs.csv").display(),
        out.join("summary.csv").display()
    );
    Ok(())
}

fn baseline_fd_cmd(
    beta_true: f64,
    noise_level: f64,
    seed: u64,
    h_values: &[f64],
    out: &Path,
) -> Result<()> {
    if h_values.is_empty() {
        return Err(Error::InvalidConfig("no grid spacings given".into()));
    }
    std::fs::create_dir_all(out)?;
    let bounds = DomainBounds::default();
    let mut csv = String::from("h,beta_hat,rel_error_percent,derivative_noise_gain\n");
    for &h in h_values {
        let mut rng = stream_rng(seed, STREAM_FD_NOISE);
        let grid = FdGridSamples::generate(beta_true, h, h, &bounds, noise_level, &mut rng)?;
        let fit = fd_baseline_estimate(&grid)?;
        let err = relative_error(fit.beta_hat, beta_true)?;
        let gain = fit.derivative_noise_gain.unwrap_or(f64::NAN);
        println!(
            "h {h}: beta {:.6}  error {:.3}%  derivative noise gain {:.1}",
            fit.beta_hat, err, gain
        );
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_g17(h),
            fmt_g17(fit.beta_hat),
            fmt_g17(err),
            fmt_g17(gain)
        );
    }
    let path = out.join("fd_baseline.csv");
    std::fs::write(&path, csv)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn render_cmd(
    checkpoint: &Path,
    beta_true: f64,
    nx: usize,
    nt: usize,
    times: &[f64],
    out: &Path,
) -> Result<()> {
    let (params, _seed) = load_checkpoint(checkpoint)?;
    std::fs::create_dir_all(out)?;
    let bounds = DomainBounds::default();
    let field_path = out.join("error_field.csv");
    emit_error_field(&field_path, &params, beta_true, nx, nt, &bounds)?;
    let snapshot_paths = emit_snapshots(out, &params, beta_true, times, nx, &bounds)?;
    println!("wrote {}", field_path.display());
    for p in snapshot_paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}
