//! Sweep plans and the resumable, incrementally written experiment CSV.

use std::collections::HashSet;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::cell::{cell_key, estimate_fp, CellResult, EXPERIMENT_HEADER};
use crate::config::{channel_with_alpha, parse_channel, parse_distortion, parse_source};
use crate::distances::DistortionMeasure;
use crate::error::{Error, Result};
use crate::io::write_provenance;
use crate::model::{FragmentConfig, SourceSpec};

const PLAN_PREFIX: &str = "# plan: ";

fn default_distortion() -> String {
    "hamming".into()
}

fn default_zero() -> Vec<f64> {
    vec![0.0]
}

/// Grid of cells. With a non-empty `alpha`, `channel` names a family (`bsc`,
/// `symmetric`, `symmetric:q`); otherwise it is a full channel such as `bsc:0.1`.
/// Exactly one of `beta` and `l` is given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub seed: u64,
    pub source: String,
    pub channel: String,
    #[serde(default)]
    pub alpha: Vec<f64>,
    #[serde(default = "default_distortion")]
    pub distortion: String,
    pub m: Vec<usize>,
    #[serde(default)]
    pub beta: Vec<f64>,
    #[serde(default)]
    pub l: Vec<usize>,
    #[serde(default = "default_zero")]
    pub delta: Vec<f64>,
    #[serde(default = "default_zero")]
    pub xi: Vec<f64>,
    pub trials: u64,
}

#[derive(Clone, Debug)]
pub struct PlannedCell {
    pub index: usize,
    pub spec: SourceSpec,
    pub measure: DistortionMeasure,
    pub config: FragmentConfig,
    pub channel_param: f64,
    pub delta: f64,
    pub xi: f64,
    /// Stream of the cell's first trial: trials of all earlier cells in plan order.
    pub first_stream: u64,
}

impl SweepPlan {
    pub fn from_json(text: &str) -> Result<Self> {
        let plan: SweepPlan = serde_json::from_str(text)?;
        plan.cells()?;
        Ok(plan)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading plan {}", path.display()), e))?;
        SweepPlan::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plan serializes")
    }

    /// Expands and validates the grid in order alpha, M, beta|L, delta, xi.
    pub fn cells(&self) -> Result<Vec<PlannedCell>> {
        if self.trials == 0 {
            return Err(Error::OutOfRange("plan trials must be at least 1".into()));
        }
        if self.m.is_empty() || self.xi.is_empty() || self.delta.is_empty() {
            return Err(Error::OutOfRange("plan grids m, delta and xi must be non-empty".into()));
        }
        if self.beta.is_empty() == self.l.is_empty() {
            return Err(Error::OutOfRange("plan must give exactly one of beta and l".into()));
        }
        let p = parse_source(&self.source)?;
        let measure = parse_distortion(&self.distortion, p.len())?;
        let channels: Vec<String> = if self.alpha.is_empty() {
            vec![self.channel.clone()]
        } else {
            self.alpha
                .iter()
                .map(|&a| channel_with_alpha(&self.channel, a))
                .collect::<Result<_>>()?
        };
        let mut out = Vec::new();
        let mut stream = 0u64;
        for ch in &channels {
            let (kernel, param) = parse_channel(ch, p.len())?;
            let spec = SourceSpec::new(p.clone(), kernel)?;
            for &m in &self.m {
                let configs: Vec<FragmentConfig> = if self.l.is_empty() {
                    self.beta
                        .iter()
                        .map(|&b| FragmentConfig::from_beta(m, b))
                        .collect::<Result<_>>()?
                } else {
                    self.l
                        .iter()
                        .map(|&l| FragmentConfig::from_length(m, l))
                        .collect::<Result<_>>()?
                };
                for config in configs {
                    for &delta in &self.delta {
                        if !(0.0..=measure.max_value()).contains(&delta) {
                            return Err(Error::OutOfRange(format!("delta {delta} outside the distortion range")));
                        }
                        for &xi in &self.xi {
                            if !(0.0..1.0).contains(&xi) {
                                return Err(Error::OutOfRange(format!("xi {xi} not in [0,1)")));
                            }
                            out.push(PlannedCell {
                                index: out.len(),
                                spec: spec.clone(),
                                measure: measure.clone(),
                                config,
                                channel_param: param,
                                delta,
                                xi,
                                first_stream: stream,
                            });
                            stream += self.trials;
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    /// Worker threads; 0 uses the machine's parallelism.
    pub threads: usize,
    /// Write measured `runtime_ms`; when off the column is 0 and reruns are byte-identical.
    pub record_runtime: bool,
    /// Keep completed rows of an existing output and run only the missing cells.
    pub resume: bool,
    /// Resolved configuration lines written as comments.
    pub provenance: Vec<String>,
}

/// Reads experiment rows, skipping `#` comments. A trailing line without a newline
/// (an interrupted write) is ignored.
pub fn read_experiment_csv(path: &Path) -> Result<Vec<CellResult>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    parse_rows(&complete_lines(&text), path)
}

fn complete_lines(text: &str) -> String {
    match text.rfind('\n') {
        Some(i) => text[..=i].to_string(),
        None => String::new(),
    }
}

fn parse_rows(text: &str, path: &Path) -> Result<Vec<CellResult>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(text.as_bytes());
    let wrap = |e| Error::Csv {
        path: path.to_path_buf(),
        source: e,
    };
    let header = rdr.headers().map_err(wrap)?.clone();
    if header.iter().ne(EXPERIMENT_HEADER.iter().copied()) {
        return Err(Error::Parse(format!(
            "{}: unexpected experiment header",
            path.display()
        )));
    }
    rdr.records()
        .map(|r| CellResult::from_record(&r.map_err(wrap)?))
        .collect()
}

/// Runs every cell of `plan`, appending one CSV row per finished cell to `out` when given.
pub fn run_sweep(plan: &SweepPlan, out: Option<&Path>, opts: &SweepOptions) -> Result<Vec<CellResult>> {
    let cells = plan.cells()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::OutOfRange(format!("thread pool: {e}")))?;
    let plan_json = plan.to_json();

    let mut done: Vec<CellResult> = Vec::new();
    let mut writer = match out {
        Some(path) => {
            let existing = if opts.resume && path.exists() {
                let text =
                    std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
                Some(complete_lines(&text))
            } else {
                None
            };
            let mut file = match existing {
                Some(text) if !text.trim().is_empty() => {
                    let recorded = text.lines().find_map(|l| l.strip_prefix(PLAN_PREFIX));
                    if recorded != Some(plan_json.as_str()) {
                        return Err(Error::Parse(format!(
                            "{} was written by a different plan; refusing to resume",
                            path.display()
                        )));
                    }
                    done = if text.lines().any(|l| !l.starts_with('#')) {
                        parse_rows(&text, path)?
                    } else {
                        Vec::new()
                    };
                    // Rewrite without any partial trailing row.
                    std::fs::write(path, &text).map_err(|e| Error::io(format!("rewriting {}", path.display()), e))?;
                    let mut f = OpenOptions::new()
                        .append(true)
                        .open(path)
                        .map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
                    if !text.lines().any(|l| !l.starts_with('#')) {
                        writeln!(f, "{}", EXPERIMENT_HEADER.join(","))
                            .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
                    }
                    f
                }
                _ => {
                    let mut f = std::fs::File::create(path)
                        .map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
                    write_provenance(&mut f, &opts.provenance)?;
                    writeln!(f, "{PLAN_PREFIX}{plan_json}")
                        .and_then(|_| writeln!(f, "{}", EXPERIMENT_HEADER.join(",")))
                        .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
                    f
                }
            };
            file.flush()
                .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
            Some(csv::WriterBuilder::new().has_headers(false).from_writer(file))
        }
        None => None,
    };

    let completed: HashSet<String> = done.iter().map(CellResult::key).collect();
    let mut results: Vec<Option<CellResult>> = vec![None; cells.len()];
    for cell in &cells {
        let key = cell_key(
            plan.seed,
            cell.config,
            &plan.source,
            cell.channel_param,
            cell.delta,
            cell.xi,
        );
        if completed.contains(&key) {
            results[cell.index] = done.iter().find(|d| d.key() == key).cloned();
            continue;
        }
        let mut est = pool
            .install(|| {
                estimate_fp(
                    &cell.spec,
                    cell.config,
                    &cell.measure,
                    cell.delta,
                    cell.xi,
                    plan.trials,
                    plan.seed,
                    cell.first_stream,
                )
            })
            .map_err(|e| cell_error(&key, e))?;
        if !opts.record_runtime {
            est.runtime_ms = 0;
        }
        let row = CellResult::new(
            plan.seed,
            cell.config,
            &plan.source,
            cell.channel_param,
            cell.delta,
            cell.xi,
            &est,
        );
        if let Some(w) = writer.as_mut() {
            let path = out.expect("writer implies a path");
            w.write_record(row.to_record())
                .map_err(|e| Error::Csv {
                    path: path.to_path_buf(),
                    source: e,
                })
                .and_then(|_| {
                    w.flush()
                        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
                })
                .map_err(|e| cell_error(&key, e))?;
        }
        results[cell.index] = Some(row);
    }
    Ok(results.into_iter().flatten().collect())
}

fn cell_error(key: &str, e: Error) -> Error {
    Error::Cell {
        cell: key.to_string(),
        source: Box::new(e),
    }
}
