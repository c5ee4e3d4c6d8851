//! End-to-end tests of the command-line interface.

use std::process::{Command, Output};

use nlse_pinn::io::{read_dataset_csv, read_history_csv, read_runs_csv, read_summary_csv};
use nlse_pinn::model::load_checkpoint;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nlse-pinn"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "command {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

const TINY: &[&str] = &[
    "--epochs",
    "20",
    "--n-u",
    "12",
    "--n-f",
    "24",
    "--topology",
    "2,6,2",
];

#[test]
fn train_writes_history_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&[&["train", "--out", out], TINY].concat());

    let history = read_history_csv(&dir.path().join("history.csv")).unwrap();
    assert_eq!(history.len(), 20);
    assert_eq!(history[0].epoch, 1);
    assert_eq!(history.last().unwrap().epoch, 20);
    for r in &history {
        assert!(r.total_loss.is_finite());
    }

    let (params, seed) = load_checkpoint(&dir.path().join("model.ckpt")).unwrap();
    assert_eq!(seed, 1234);
    assert_eq!(params.topology(), vec![2, 6, 2]);
    assert_eq!(params.beta, history.last().unwrap().beta);
}

#[test]
fn identical_invocations_write_identical_histories() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        run_ok(&[&["train", "--out", dir.path().to_str().unwrap()], TINY].concat());
    }
    let a = std::fs::read(dir_a.path().join("history.csv")).unwrap();
    let b = std::fs::read(dir_b.path().join("history.csv")).unwrap();
    assert_eq!(a, b);
    let a = std::fs::read(dir_a.path().join("model.ckpt")).unwrap();
    let b = std::fs::read(dir_b.path().join("model.ckpt")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn periodic_checkpoints_appear_at_the_requested_stride() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&[&["train", "--out", out, "--checkpoint-every", "8"], TINY].concat());
    assert!(dir.path().join("checkpoint_epoch8.ckpt").exists());
    assert!(dir.path().join("checkpoint_epoch16.ckpt").exists());
    assert!(!dir.path().join("checkpoint_epoch24.ckpt").exists());
}

#[test]
fn generate_data_writes_dataset_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&[
        "generate-data",
        "--n-u",
        "40",
        "--noise-level",
        "0.1",
        "--seed",
        "7",
        "--out",
        out,
    ]);
    let samples = read_dataset_csv(&dir.path().join("dataset.csv")).unwrap();
    assert_eq!(samples.len(), 40);
    let meta = std::fs::read_to_string(dir.path().join("dataset_meta.txt")).unwrap();
    assert!(meta.contains("seed=7"));
    assert!(meta.contains("n_u=40"));
}

/// The dataset a train run fits is the dataset generate-data writes for the
/// same settings.
#[test]
fn generated_dataset_matches_training_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&["generate-data", "--n-u", "30", "--seed", "42", "--out", out]);
    let from_cli = read_dataset_csv(&dir.path().join("dataset.csv")).unwrap();
    let config = nlse_pinn::optim::TrainConfig {
        n_u: 30,
        seed: 42,
        ..Default::default()
    };
    let direct = nlse_pinn::optim::generate_training_data(&config).unwrap();
    assert_eq!(from_cli, direct.noisy);
}

#[test]
fn render_writes_error_field_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&[&["train", "--out", out], TINY].concat());
    let ckpt = dir.path().join("model.ckpt");
    run_ok(&[
        "render",
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--nx",
        "32",
        "--nt",
        "12",
        "--times",
        "0.2,0.8,1.4",
        "--out",
        out,
    ]);
    let field = nlse_pinn::io::read_error_field_csv(&dir.path().join("error_field.csv")).unwrap();
    assert_eq!(field.len(), 32 * 12);
    for name in ["snapshot_t0.2.csv", "snapshot_t0.8.csv", "snapshot_t1.4.csv"] {
        let rows = nlse_pinn::io::read_snapshot_csv(&dir.path().join(name)).unwrap();
        assert_eq!(rows.len(), 32);
    }
}

#[test]
fn sweep_beta_writes_runs_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&[
        &[
            "sweep-beta",
            "--values",
            "1.0",
            "--seeds",
            "3,5",
            "--out",
            out,
        ],
        TINY,
    ]
    .concat());
    let runs = read_runs_csv(&dir.path().join("runs.csv")).unwrap();
    assert_eq!(runs.len(), 2);
    assert!(runs.iter().all(|r| r.variable == "beta_true"));
    assert_eq!((runs[0].seed, runs[1].seed), (3, 5));
    let summary = read_summary_csv(&dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.len(), 1);
    assert_eq!(summary[0].n_runs, 2);
}

#[test]
fn sweep_nu_applies_the_sample_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&[
        &[
            "sweep-nu",
            "--values",
            "8,16",
            "--seeds",
            "2",
            "--out",
            out,
        ],
        TINY,
    ]
    .concat());
    let runs = read_runs_csv(&dir.path().join("runs.csv")).unwrap();
    assert_eq!(runs.len(), 2);
    assert!(runs.iter().all(|r| r.variable == "n_u"));
    assert_eq!((runs[0].value, runs[1].value), (8.0, 16.0));
}

#[test]
fn baseline_fd_reports_one_row_per_spacing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&["baseline-fd", "--h-values", "0.5,0.25", "--out", out]);
    let text = std::fs::read_to_string(dir.path().join("fd_baseline.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "h,beta_hat,rel_error_percent,derivative_noise_gain");
    assert_eq!(lines.len(), 3);
}

#[test]
fn config_file_sets_values_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("run.conf");
    std::fs::write(
        &config_path,
        "# tiny run\nepochs = 7\nn_u = 12\nn_f = 24\ntopology = 2,6,2\nseed = 9\n",
    )
    .unwrap();

    let out_a = tempfile::tempdir().unwrap();
    run_ok(&[
        "train",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        out_a.path().to_str().unwrap(),
    ]);
    let history = read_history_csv(&out_a.path().join("history.csv")).unwrap();
    assert_eq!(history.len(), 7);
    let (_, seed) = load_checkpoint(&out_a.path().join("model.ckpt")).unwrap();
    assert_eq!(seed, 9);

    let out_b = tempfile::tempdir().unwrap();
    run_ok(&[
        "train",
        "--config",
        config_path.to_str().unwrap(),
        "--epochs",
        "11",
        "--out",
        out_b.path().to_str().unwrap(),
    ]);
    let history = read_history_csv(&out_b.path().join("history.csv")).unwrap();
    assert_eq!(history.len(), 11);
}

fn expect_exit(args: &[&str], config_body: Option<&str>, code: i32) {
    let dir = tempfile::tempdir().unwrap();
    let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    if let Some(body) = config_body {
        let path = dir.path().join("bad.conf");
        std::fs::write(&path, body).unwrap();
        full.push("--config".into());
        full.push(path.to_str().unwrap().into());
    }
    full.push("--out".into());
    full.push(dir.path().to_str().unwrap().into());
    let out = bin().args(&full).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(code),
        "args {full:?}:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn configuration_errors_exit_with_code_two() {
    expect_exit(&["train", "--epochs", "0"], None, 2);
    expect_exit(&["train"], Some("no_such_key = 1\n"), 2);
    expect_exit(&["train"], Some("epochs 7\n"), 2);
    expect_exit(&["train", "--topology", "3,5,2"], None, 2);
    expect_exit(&["train", "--beta-true", "0.0"], None, 2);

    let out = bin().args(["train", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["no-such-command"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_failures_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = bin()
        .args([&["train", "--beta-init", "1e300", "--out", out_dir], TINY].concat())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("non-finite"), "stderr: {stderr}");

    let out = bin()
        .args([
            "render",
            "--checkpoint",
            dir.path().join("missing.ckpt").to_str().unwrap(),
            "--out",
            out_dir,
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_lists_all_subcommands() {
    let out = bin().arg("--help").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in [
        "generate-data",
        "train",
        "sweep-beta",
        "sweep-nu",
        "baseline-fd",
        "render",
    ] {
        assert!(text.contains(sub), "missing {sub} in help");
    }
}

#[test]
fn out_directories_are_created_on_demand() {
    let dir = tempfile::tempdir().unwrap();
    let nested = dir.path().join("a").join("b");
    run_ok(&[&["train", "--out", nested.to_str().unwrap()], TINY].concat());
    assert!(nested.join("history.csv").exists());
}
