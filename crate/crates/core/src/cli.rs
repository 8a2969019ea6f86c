//! Command-line front end. Every subcommand resolves a [`RunConfig`] (defaults, then
//! `--config FILE`, then flags), writes it to `resolved.conf` and embeds it in each
//! output file.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::chart::{Chart, Series};
use crate::config::{parse_channel, RunConfig};
use crate::decoder::DecodedTrial;
use crate::entropy::shannon_entropy;
use crate::error::{Error, Result};
use crate::experiments::{
    exact_transposition_probability, run_sweep, run_trial, slope_fit, tradeoff_experiment, CellResult, SweepOptions,
    SweepPlan, ZeroPolicy, EXPERIMENT_HEADER,
};
use crate::fragments::{cardinality_concentration_experiment, write_cardinality_csv};
use crate::io::{write_provenance, TOOL_VERSION};
use crate::model::{FragmentConfig, Pmf, SourceSpec};
use crate::rates::{psi2_closed_form, rate_report, tradeoff_curve, RateOptions};

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "reforder",
    version,
    about = "Rates, decoding experiments and sweeps for fragment reordering"
)]
pub struct Cli {
    /// Master seed for all random streams.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Config file of `key = value` lines.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Print rates in bits instead of nats (files always use nats).
    #[arg(long, global = true)]
    pub bits: bool,
    /// Override any config key, e.g. `--set grid.m=8,16`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// psi_2, psi_K, the beta threshold, d*(delta) and the trade-off curve.
    Rate(RateArgs),
    /// Monte Carlo FP over a xi grid around xi_min at beta H(P_X) < 1.
    Tradeoff(SimArgs),
    /// Monte Carlo FP over the configured grid.
    Simulate(SimArgs),
    /// Run a sweep plan with a resumable CSV.
    Sweep(SweepArgs),
    /// Tail of the log number of distinct reconstructions.
    Cardinality(SimArgs),
    /// Exact transposition probabilities for short fragments.
    Pairwise(PairwiseArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Source: uniform, uniform:q, bernoulli:p, bernoulli-entropy:h, pmf:p0:p1:...
    #[arg(long)]
    pub source: Option<String>,
    /// Channel: bsc:a, symmetric:a[:q], identity, uniform:q, matrix:PATH
    #[arg(long)]
    pub channel: Option<String>,
    /// Distortion: hamming or matrix:PATH
    #[arg(long)]
    pub distortion: Option<String>,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Largest cycle length K.
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Comma-separated delta grid.
    #[arg(long)]
    pub deltas: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated M grid.
    #[arg(long)]
    pub m: Option<String>,
    /// Comma-separated beta grid (L = round(beta ln M)).
    #[arg(long)]
    pub beta: Option<String>,
    /// Comma-separated L grid; replaces beta.
    #[arg(long)]
    pub l: Option<String>,
    /// Comma-separated distortion levels.
    #[arg(long)]
    pub delta: Option<String>,
    /// Comma-separated failure levels.
    #[arg(long)]
    pub xi: Option<String>,
    /// Trials per cell.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Tail margin for the cardinality experiment.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Write the first decoded trial to trial_dump.json.
    #[arg(long)]
    pub dump_trial: bool,
    /// Write runtime_ms as 0 so reruns are byte-identical.
    #[arg(long)]
    pub no_runtime: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON sweep plan; without it the plan is built from the config grid.
    #[arg(long, value_name = "FILE")]
    pub plan: Option<PathBuf>,
    /// Start over instead of resuming an existing sweep.csv.
    #[arg(long)]
    pub fresh: bool,
    /// Write runtime_ms as 0 so reruns are byte-identical.
    #[arg(long)]
    pub no_runtime: bool,
}

#[derive(Debug, Args)]
pub struct PairwiseArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated fragment lengths.
    #[arg(long)]
    pub l: Option<String>,
}

/// Maps an error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_RUNTIME
    }
}

fn apply_model(cfg: &mut RunConfig, m: &ModelArgs) -> Result<()> {
    for (key, v) in [
        ("model.source", &m.source),
        ("model.channel", &m.channel),
        ("model.distortion", &m.distortion),
    ] {
        if let Some(v) = v {
            cfg.set(key, v)?;
        }
    }
    Ok(())
}

fn apply_sim(cfg: &mut RunConfig, a: &SimArgs) -> Result<()> {
    apply_model(cfg, &a.model)?;
    for (key, v) in [
        ("grid.m", &a.m),
        ("grid.beta", &a.beta),
        ("grid.l", &a.l),
        ("grid.delta", &a.delta),
        ("grid.xi", &a.xi),
    ] {
        if let Some(v) = v {
            cfg.set(key, v)?;
        }
    }
    if let Some(t) = a.trials {
        cfg.set("experiment.trials", &t.to_string())?;
    }
    if let Some(e) = a.eta {
        cfg.set("experiment.eta", &e.to_string())?;
    }
    if a.dump_trial {
        cfg.set("experiment.dump_trial", "true")?;
    }
    if a.no_runtime {
        cfg.set("run.record_runtime", "false")?;
    }
    Ok(())
}

/// Resolves the configuration: defaults, then the config file, then flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(s) = cli.seed {
        cfg.set("run.seed", &s.to_string())?;
    }
    if let Some(t) = cli.threads {
        cfg.set("run.threads", &t.to_string())?;
    }
    if let Some(o) = &cli.out {
        cfg.set("run.out", &o.display().to_string())?;
    }
    if cli.bits {
        cfg.set("run.bits", "true")?;
    }
    match &cli.command {
        Command::Rate(a) => {
            apply_model(&mut cfg, &a.model)?;
            if let Some(k) = a.k_max {
                cfg.set("rate.k_max", &k.to_string())?;
            }
            if let Some(d) = &a.deltas {
                cfg.set("rate.deltas", d)?;
            }
        }
        Command::Tradeoff(a) | Command::Simulate(a) | Command::Cardinality(a) => apply_sim(&mut cfg, a)?,
        Command::Sweep(a) => {
            if let Some(p) = &a.plan {
                cfg.set("sweep.plan", &p.display().to_string())?;
            }
            if a.fresh {
                cfg.set("sweep.resume", "false")?;
            }
            if a.no_runtime {
                cfg.set("run.record_runtime", "false")?;
            }
        }
        Command::Pairwise(a) => {
            apply_model(&mut cfg, &a.model)?;
            if let Some(l) = &a.l {
                cfg.set("pairwise.l", l)?;
            }
        }
    }
    Ok(cfg)
}

struct Ctx {
    cfg: RunConfig,
    out: PathBuf,
    provenance: Vec<String>,
    bits: bool,
}

impl Ctx {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn rate(&self, nats: f64) -> String {
        if self.bits {
            format!("{:.6} bits", nats / std::f64::consts::LN_2)
        } else {
            format!("{nats:.6} nats")
        }
    }

    fn chart(&self, title: &str, x: &str, y: &str) -> Chart {
        let mut c = Chart::new(title, x, y);
        c.provenance = self.provenance.clone();
        c
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>> {
        let path = self.path(name);
        File::create(&path)
            .map(BufWriter::new)
            .map_err(|e| Error::io(format!("creating {}", path.display()), e))
    }

    fn seed(&self) -> Result<u64> {
        self.cfg.parse_value("run.seed")
    }
}

/// Parses arguments, runs the command, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = resolve_config(cli)?;
    let threads: usize = cfg.parse_value("run.threads")?;
    let out = PathBuf::from(cfg.get("run.out"));
    std::fs::create_dir_all(&out).map_err(|e| Error::io(format!("creating {}", out.display()), e))?;
    let mut provenance = cfg.lines();
    provenance.insert(0, format!("command = {}", command_name(&cli.command)));
    let resolved = format!("# {TOOL_VERSION}\n{}\n", cfg.lines().join("\n"));
    std::fs::write(out.join("resolved.conf"), resolved).map_err(|e| Error::io("writing resolved.conf", e))?;
    let ctx = Ctx {
        bits: cfg.parse_value("run.bits")?,
        cfg,
        out,
        provenance,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::OutOfRange(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Rate(_) => cmd_rate(&ctx),
        Command::Tradeoff(_) => cmd_tradeoff(&ctx),
        Command::Simulate(_) => cmd_simulate(&ctx, threads),
        Command::Sweep(_) => cmd_sweep(&ctx, threads),
        Command::Cardinality(_) => cmd_cardinality(&ctx),
        Command::Pairwise(_) => cmd_pairwise(&ctx),
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Rate(_) => "rate",
        Command::Tradeoff(_) => "tradeoff",
        Command::Simulate(_) => "simulate",
        Command::Sweep(_) => "sweep",
        Command::Cardinality(_) => "cardinality",
        Command::Pairwise(_) => "pairwise",
    }
}

fn cmd_rate(ctx: &Ctx) -> Result<()> {
    let (spec, _) = ctx.cfg.source_spec()?;
    let measure = ctx.cfg.distortion(spec.p_x().len())?;
    let opts = RateOptions {
        k_max: ctx.cfg.parse_value("rate.k_max")?,
        deltas: ctx.cfg.list("rate.deltas")?,
        oracle_tol: Some(1e-12),
    };
    let report = rate_report(&spec, &measure, &opts)?;
    report.write_csv(&ctx.path("rate.csv"), &ctx.provenance)?;
    report.write_json(&ctx.path("rate.json"), &ctx.provenance)?;

    println!("psi2           = {}", ctx.rate(report.psi2));
    for p in &report.psi2_paths {
        println!("  {:<14} {}", p.method.as_str(), ctx.rate(p.value));
    }
    println!("beta_threshold = {:.6}", report.beta_threshold);
    println!("H(P_X)         = {}", ctx.rate(report.shannon_entropy));
    println!("H2(P_X)        = {}", ctx.rate(report.collision_entropy));
    println!("psi2 < H2/2    = {}", report.collision_condition);
    for p in &report.psi_k {
        println!("psi_{:<2}         = {}", p.k, ctx.rate(p.value));
    }

    // psi_2 against alpha for uniform sources through symmetric channels.
    let qs: Vec<usize> = ctx.cfg.list("rate.q")?;
    let alphas: Vec<f64> = ctx.cfg.list("rate.alphas")?;
    let mut fam = ctx.path("psi2_family.csv");
    let mut w = ctx.create("psi2_family.csv")?;
    write_provenance(&mut w, &ctx.provenance)?;
    let mut rows = vec!["q,alpha,psi2".to_string()];
    let mut chart = ctx.chart(
        "psi_2 for uniform sources and symmetric channels",
        "alpha",
        "psi_2 (nats)",
    );
    for &q in &qs {
        let mut pts = Vec::new();
        for &a in alphas.iter().filter(|&&a| a <= (q - 1) as f64 / q as f64) {
            let (ch, _) = parse_channel(&format!("symmetric:{a}:{q}"), q)?;
            let v = psi2_closed_form(&SourceSpec::new(Pmf::uniform(q)?, ch)?)?;
            rows.push(format!("{q},{a},{v}"));
            pts.push((a, v));
        }
        chart.series.push(Series::new(format!("|X| = {q}"), pts));
    }
    write_lines(&mut w, &rows, &fam)?;
    fam.set_extension("svg");
    chart.write(&fam)?;

    let mut tw = ctx.create("tradeoff_curve.csv")?;
    write_provenance(&mut tw, &ctx.provenance)?;
    let mut rows = vec!["delta,d_star,xi_min,vacuous".to_string()];
    let mut pts = Vec::new();
    for t in &report.tradeoff {
        rows.push(format!("{},{},{},{}", t.delta, t.d_star, t.xi_min, t.vacuous));
        pts.push((t.delta, t.xi_min));
    }
    write_lines(&mut tw, &rows, &ctx.path("tradeoff_curve.csv"))?;
    let mut chart = ctx.chart("Smallest admissible failure level", "delta", "xi_min = H / d*(delta)");
    chart.series.push(Series::new(ctx.cfg.get("model.channel"), pts));
    chart.write(&ctx.path("tradeoff_curve.svg"))?;
    Ok(())
}

fn write_lines<W: std::io::Write>(w: &mut W, rows: &[String], path: &Path) -> Result<()> {
    for r in rows {
        writeln!(w, "{r}").map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    }
    w.flush()
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

fn write_cells(ctx: &Ctx, name: &str, cells: &[CellResult]) -> Result<()> {
    let path = ctx.path(name);
    let mut w = ctx.create(name)?;
    write_provenance(&mut w, &ctx.provenance)?;
    let mut csvw = csv::Writer::from_writer(w);
    let wrap = |e| Error::Csv {
        path: path.clone(),
        source: e,
    };
    csvw.write_record(EXPERIMENT_HEADER).map_err(wrap)?;
    for c in cells {
        csvw.write_record(c.to_record()).map_err(wrap)?;
    }
    csvw.flush()
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

fn plan_from_config(cfg: &RunConfig) -> Result<SweepPlan> {
    let l: Vec<usize> = cfg.list("grid.l")?;
    let plan = SweepPlan {
        seed: cfg.parse_value("run.seed")?,
        source: cfg.get("model.source").to_string(),
        channel: cfg.get("model.channel").to_string(),
        alpha: cfg.list("grid.alpha")?,
        distortion: cfg.get("model.distortion").to_string(),
        m: cfg.list("grid.m")?,
        beta: if l.is_empty() {
            cfg.list("grid.beta")?
        } else {
            Vec::new()
        },
        l,
        delta: cfg.list("grid.delta")?,
        xi: cfg.list("grid.xi")?,
        trials: cfg.parse_value("experiment.trials")?,
    };
    plan.cells()?;
    Ok(plan)
}

fn fp_chart(ctx: &Ctx, title: &str, cells: &[CellResult]) -> Chart {
    let mut chart = ctx.chart(title, "M", "FP");
    chart.log_x = true;
    chart.log_y = true;
    let mut groups: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for c in cells {
        let name = format!("a={} d={} xi={} beta={}", c.channel_param, c.delta, c.xi, c.beta);
        match groups.iter_mut().find(|g| g.0 == name) {
            Some(g) => g.1.push((c.m as f64, c.fp_hat)),
            None => groups.push((name, vec![(c.m as f64, c.fp_hat)])),
        }
    }
    chart.series = groups.into_iter().map(|(n, p)| Series::new(n, p)).collect();
    chart
}

fn cmd_simulate(ctx: &Ctx, threads: usize) -> Result<()> {
    let plan = plan_from_config(&ctx.cfg)?;
    let opts = SweepOptions {
        threads,
        record_runtime: ctx.cfg.parse_value("run.record_runtime")?,
        resume: false,
        provenance: ctx.provenance.clone(),
    };
    let cells = run_sweep(&plan, None, &opts)?;
    write_cells(ctx, "simulate.csv", &cells)?;
    fp_chart(ctx, "Failure probability", &cells).write(&ctx.path("simulate.svg"))?;
    print_cells(&cells);
    if let Ok(fit) = slope_fit(&cells, ZeroPolicy::Exclude) {
        println!("slope = {:.4} +- {:.4} over M = {:?}", fit.slope, fit.stderr, fit.used);
    }
    if ctx.cfg.parse_value::<bool>("experiment.dump_trial")? {
        let first = &plan.cells()?[0];
        let (inst, w, recon) = run_trial(
            &first.spec,
            first.config,
            &first.measure,
            first.delta,
            plan.seed,
            first.first_stream,
        )?;
        let dump = DecodedTrial::new(
            &inst,
            &w,
            recon,
            (plan.seed, first.first_stream),
            (first.delta, first.xi),
        );
        let doc = serde_json::json!({ "version": TOOL_VERSION, "config": ctx.provenance, "trial": dump });
        std::fs::write(ctx.path("trial_dump.json"), serde_json::to_string_pretty(&doc)?)
            .map_err(|e| Error::io("writing trial_dump.json", e))?;
    }
    Ok(())
}

fn print_cells(cells: &[CellResult]) {
    println!(
        "{:>6} {:>4} {:>8} {:>6} {:>6} {:>9} {:>11} {:>11}",
        "M", "L", "alpha", "delta", "xi", "failures", "fp_hat", "ci_hi"
    );
    for c in cells {
        println!(
            "{:>6} {:>4} {:>8} {:>6} {:>6} {:>9} {:>11.4e} {:>11.4e}",
            c.m, c.l, c.channel_param, c.delta, c.xi, c.failures, c.fp_hat, c.ci_hi
        );
    }
}

fn cmd_sweep(ctx: &Ctx, threads: usize) -> Result<()> {
    let plan = match ctx.cfg.path("sweep.plan") {
        Some(p) => SweepPlan::from_file(&p)?,
        None => plan_from_config(&ctx.cfg)?,
    };
    let opts = SweepOptions {
        threads,
        record_runtime: ctx.cfg.parse_value("run.record_runtime")?,
        resume: ctx.cfg.parse_value("sweep.resume")?,
        provenance: ctx.provenance.clone(),
    };
    let cells = run_sweep(&plan, Some(&ctx.path("sweep.csv")), &opts)?;
    fp_chart(ctx, "Failure probability", &cells).write(&ctx.path("sweep.svg"))?;
    print_cells(&cells);
    Ok(())
}

fn cmd_tradeoff(ctx: &Ctx) -> Result<()> {
    let (spec, param) = ctx.cfg.source_spec()?;
    let measure = ctx.cfg.distortion(spec.p_x().len())?;
    let betas: Vec<f64> = ctx.cfg.list("grid.beta")?;
    let deltas: Vec<f64> = ctx.cfg.list("grid.delta")?;
    let (&beta, &delta) = betas
        .first()
        .zip(deltas.first())
        .ok_or_else(|| Error::OutOfRange("tradeoff needs grid.beta and grid.delta".into()))?;
    let exp = tradeoff_experiment(
        &spec,
        (ctx.cfg.get("model.source"), param),
        &ctx.cfg.list::<usize>("grid.m")?,
        beta,
        &measure,
        delta,
        &ctx.cfg.list::<f64>("grid.xi")?,
        ctx.cfg.parse_value("experiment.trials")?,
        ctx.seed()?,
    )?;
    let mut cells = exp.cells.clone();
    if !ctx.cfg.parse_value::<bool>("run.record_runtime")? {
        cells.iter_mut().for_each(|c| c.runtime_ms = 0);
    }
    write_cells(ctx, "tradeoff.csv", &cells)?;
    let doc = serde_json::json!({ "version": TOOL_VERSION, "config": ctx.provenance, "experiment": exp });
    std::fs::write(ctx.path("tradeoff.json"), serde_json::to_string_pretty(&doc)?)
        .map_err(|e| Error::io("writing tradeoff.json", e))?;

    let mut chart = ctx.chart("FP against failure level", "xi", "FP");
    for &m in &ctx.cfg.list::<usize>("grid.m")? {
        let pts = cells.iter().filter(|c| c.m == m).map(|c| (c.xi, c.fp_hat)).collect();
        chart.series.push(Series::new(format!("M = {m}"), pts));
    }
    chart.write(&ctx.path("tradeoff.svg"))?;

    let curve = tradeoff_curve(&spec, &measure, &ctx.cfg.list::<f64>("rate.deltas")?)?;
    let mut w = ctx.create("tradeoff_curve.csv")?;
    write_provenance(&mut w, &ctx.provenance)?;
    let mut rows = vec!["delta,d_star,xi_min,vacuous".to_string()];
    rows.extend(
        curve
            .iter()
            .map(|t| format!("{},{},{},{}", t.delta, t.d_star, t.xi_min, t.vacuous)),
    );
    write_lines(&mut w, &rows, &ctx.path("tradeoff_curve.csv"))?;

    println!("H(P_X) = {}, beta H = {:.4}", ctx.rate(exp.entropy), beta * exp.entropy);
    println!("d*({delta}) = {}, xi_min = {:.6}", ctx.rate(exp.d_star), exp.xi_min);
    print_cells(&cells);
    Ok(())
}

fn cmd_cardinality(ctx: &Ctx) -> Result<()> {
    let (spec, _) = ctx.cfg.source_spec()?;
    let eta: f64 = ctx.cfg.parse_value("experiment.eta")?;
    let trials: u64 = ctx.cfg.parse_value("experiment.trials")?;
    let seed = ctx.seed()?;
    let mut reports = Vec::new();
    let mut stream = 0;
    for &beta in &ctx.cfg.list::<f64>("grid.beta")? {
        for &m in &ctx.cfg.list::<usize>("grid.m")? {
            let cfg = FragmentConfig::from_beta(m, beta)?;
            reports.push(cardinality_concentration_experiment(
                &spec, cfg, eta, trials, seed, stream,
            )?);
            stream += trials;
        }
    }
    write_cardinality_csv(ctx.create("cardinality.csv")?, &reports, &ctx.provenance)?;
    let mut chart = ctx.chart("Tail rate of the log number of reconstructions", "M", "tail rate");
    chart.log_x = true;
    for &beta in &ctx.cfg.list::<f64>("grid.beta")? {
        let pts = reports
            .iter()
            .filter(|r| r.beta == beta)
            .map(|r| (r.m as f64, r.tail_rate))
            .collect();
        chart.series.push(Series::new(format!("beta = {beta}"), pts));
    }
    chart.write(&ctx.path("cardinality.svg"))?;

    println!("H(P_X) = {}", ctx.rate(shannon_entropy(spec.p_x())));
    println!(
        "{:>6} {:>4} {:>6} {:>8} {:>10} {:>10} {:>12}",
        "M", "L", "beta", "tail", "rate", "ci_hi", "mean_logcard"
    );
    for r in &reports {
        println!(
            "{:>6} {:>4} {:>6} {:>8} {:>10.4} {:>10.4} {:>12.6}",
            r.m, r.l, r.beta, r.tail_count, r.tail_rate, r.ci.hi, r.mean_logcard
        );
    }
    let violations: u64 = reports.iter().map(|r| r.entropy_bound_violations).sum();
    if violations > 0 {
        return Err(Error::Invariant(format!(
            "{violations} samples exceeded the multinomial entropy bound"
        )));
    }
    Ok(())
}

fn cmd_pairwise(ctx: &Ctx) -> Result<()> {
    let (spec, _) = ctx.cfg.source_spec()?;
    let psi2 = psi2_closed_form(&spec)?;
    let ls: Vec<usize> = ctx.cfg.list("pairwise.l")?;
    let mut rows = vec!["l,p_e12,bound,neg_log_p_over_2l,psi2".to_string()];
    let (mut exact_pts, mut psi_pts) = (Vec::new(), Vec::new());
    println!("psi2 = {}", ctx.rate(psi2));
    println!(
        "{:>3} {:>14} {:>14} {:>14}",
        "l", "P[E12]", "exp(-2 l psi2)", "-ln P / 2l"
    );
    for &l in &ls {
        let p = exact_transposition_probability(&spec, l)?;
        let bound = (-2.0 * l as f64 * psi2).exp();
        let rate = -p.ln() / (2.0 * l as f64);
        rows.push(format!("{l},{p},{bound},{rate},{psi2}"));
        println!("{l:>3} {p:>14.6e} {bound:>14.6e} {:>14}", ctx.rate(rate));
        exact_pts.push((l as f64, rate));
        psi_pts.push((l as f64, psi2));
    }
    let mut w = ctx.create("pairwise.csv")?;
    write_provenance(&mut w, &ctx.provenance)?;
    write_lines(&mut w, &rows, &ctx.path("pairwise.csv"))?;
    let mut chart = ctx.chart("Exact transposition exponent", "l", "nats per symbol");
    chart.series.push(Series::new("-ln P[E12] / 2l", exact_pts));
    chart.series.push(Series::new("psi_2", psi_pts));
    chart.write(&ctx.path("pairwise.svg"))?;
    Ok(())
}
