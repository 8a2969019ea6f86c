use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reforder"))
        .args(args)
        .output()
        .unwrap()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all = vec!["--out", dir.to_str().unwrap()];
    all.extend_from_slice(args);
    run(&all)
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn help_lists_every_subcommand() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in ["rate", "tradeoff", "simulate", "sweep", "cardinality", "pairwise"] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
    for flag in ["--seed", "--threads", "--out", "--config", "--bits"] {
        assert!(text.contains(flag), "{flag} missing from help");
    }
}

#[test]
fn rate_writes_tagged_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["rate", "--source", "uniform", "--channel", "bsc:0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "rate.csv");
    assert!(csv.starts_with('#'));
    assert!(csv.contains("reforder"));
    assert_eq!(data_lines(&csv)[0], "quantity,parameter,value,method");
    let psi2: Vec<f64> = data_lines(&csv)
        .iter()
        .filter(|l| l.starts_with("psi2,"))
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(psi2.len(), 4);
    for v in psi2 {
        assert!((v - 0.192831).abs() < 1e-6);
    }
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "rate.json")).unwrap();
    assert!(json["version"].as_str().unwrap().contains("reforder"));
    assert!(json["config"].to_string().contains("bsc:0.1"));
    let svg = read(dir.path(), "psi2_family.svg");
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(svg.contains("<!--"));
    assert!(read(dir.path(), "resolved.conf").contains("model.channel"));
}

#[test]
fn bits_only_changes_display() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let nats = run_in(a.path(), &["rate", "--channel", "bsc:0.1"]);
    let bits = run_in(b.path(), &["--bits", "rate", "--channel", "bsc:0.1"]);
    assert!(String::from_utf8_lossy(&bits.stdout).contains("bits"));
    assert!(String::from_utf8_lossy(&nats.stdout).contains("nats"));
    assert_eq!(
        data_lines(&read(a.path(), "rate.csv")),
        data_lines(&read(b.path(), "rate.csv"))
    );
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["rate", "--channel", "bsc:1.5"],
        vec!["rate", "--source", "pmf:0.5,0.6"],
        vec!["simulate", "--xi", "1.5"],
        vec!["--set", "no.such=1", "rate"],
        vec!["rate", "--no-such-flag"],
        vec!["bogus"],
    ] {
        let out = run_in(dir.path(), &args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn runtime_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("occupied");
    std::fs::write(&file, "x").unwrap();
    let out = run(&["--out", file.to_str().unwrap(), "rate"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let missing = dir.path().join("missing.json");
    let out = run_in(dir.path(), &["sweep", "--plan", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(
        &conf,
        "# base\nrun.seed = 11\ngrid.m = 4\ngrid.l = 2\nexperiment.trials = 50\n",
    )
    .unwrap();
    let out_dir = dir.path().join("o");
    let out = run_in(
        &out_dir,
        &[
            "--config",
            conf.to_str().unwrap(),
            "--seed",
            "12",
            "simulate",
            "--m",
            "6",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let resolved = read(&out_dir, "resolved.conf");
    assert!(resolved.contains("run.seed = 12"), "{resolved}");
    assert!(resolved.contains("grid.m = 6"));
    assert!(resolved.contains("experiment.trials = 50"));
    let csv = read(&out_dir, "simulate.csv");
    let rows = data_lines(&csv);
    assert_eq!(
        rows[0],
        "seed,M,L,beta,source,channel_param,delta,xi,trials,failures,fp_hat,ci_lo,ci_hi,mean_xi,runtime_ms"
    );
    assert!(rows[1].starts_with("12,6,2,"));
}

#[test]
fn resolved_config_reproduces_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let second = dir.path().join("b");
    let out = run_in(
        &first,
        &[
            "--seed",
            "3",
            "simulate",
            "--m",
            "8",
            "--l",
            "3",
            "--trials",
            "300",
            "--no-runtime",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let conf = first.join("resolved.conf");
    let out = run_in(&second, &["--config", conf.to_str().unwrap(), "simulate"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        data_lines(&read(&first, "simulate.csv")),
        data_lines(&read(&second, "simulate.csv"))
    );
}

#[test]
fn trial_dump_is_behind_a_flag() {
    let dir = tempfile::tempdir().unwrap();
    run_in(dir.path(), &["simulate", "--m", "4", "--l", "2", "--trials", "10"]);
    assert!(!dir.path().join("trial_dump.json").exists());
    let out = run_in(
        dir.path(),
        &["simulate", "--m", "4", "--l", "2", "--trials", "10", "--dump-trial"],
    );
    assert_eq!(out.status.code(), Some(0));
    let dump: serde_json::Value = serde_json::from_str(&read(dir.path(), "trial_dump.json")).unwrap();
    let text = dump.to_string();
    assert!(text.contains("weights") && text.contains("hidden_perm") && text.contains("true_log_likelihood"));
}

#[test]
fn sweep_resumes_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    std::fs::write(
        &plan,
        r#"{"seed": 2, "source": "uniform", "channel": "bsc", "alpha": [0.1, 0.2], "m": [6, 10], "l": [3], "trials": 100}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("o");
    let args = ["sweep", "--plan", plan.to_str().unwrap(), "--no-runtime"];
    assert_eq!(run_in(&out_dir, &args).status.code(), Some(0));
    let full = read(&out_dir, "sweep.csv");
    let keep: Vec<&str> = full.lines().take(full.lines().count() - 2).collect();
    std::fs::write(out_dir.join("sweep.csv"), keep.join("\n") + "\n").unwrap();
    assert_eq!(run_in(&out_dir, &args).status.code(), Some(0));
    assert_eq!(read(&out_dir, "sweep.csv"), full);
    assert!(read(&out_dir, "sweep.svg").contains("<svg"));
}

#[test]
fn cardinality_and_pairwise_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["cardinality", "--m", "16,32", "--beta", "0.5", "--trials", "20"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let card = read(dir.path(), "cardinality.csv");
    let header = data_lines(&card)[0];
    for col in [
        "seed",
        "M",
        "L",
        "beta",
        "eta",
        "trials",
        "tail_count",
        "tail_rate",
        "ci_lo",
        "ci_hi",
        "mean_logcard",
    ] {
        assert!(header.split(',').any(|c| c == col), "{col} not in {header}");
    }
    assert_eq!(data_lines(&card).len(), 3);

    let out = run_in(dir.path(), &["pairwise", "--channel", "bsc:0.1", "--l", "1,2,3"]);
    assert_eq!(out.status.code(), Some(0));
    let pw = read(dir.path(), "pairwise.csv");
    assert_eq!(data_lines(&pw).len(), 4);
    assert!(pw.contains("0.05"));
}

#[test]
fn tradeoff_command_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "tradeoff",
            "--source",
            "bernoulli-entropy:0.1",
            "--channel",
            "bsc:0.1",
            "--m",
            "16,32",
            "--beta",
            "0.5",
            "--delta",
            "0.5",
            "--trials",
            "50",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["tradeoff.csv", "tradeoff.json", "tradeoff.svg", "tradeoff_curve.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn matrix_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let ch = dir.path().join("ch.txt");
    let dist = dir.path().join("dist.txt");
    std::fs::write(&ch, "0.8 0.1 0.1\n0.1 0.8 0.1\n0.1 0.1 0.8\n").unwrap();
    std::fs::write(&dist, "0 1 2\n1 0 1\n2 1 0\n").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "rate",
            "--source",
            "uniform:3",
            "--channel",
            &format!("matrix:{}", ch.display()),
            "--distortion",
            &format!("matrix:{}", dist.display()),
            "--deltas",
            "0,1,2",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(read(dir.path(), "rate.csv").contains("d_star,delta=2"));
}
