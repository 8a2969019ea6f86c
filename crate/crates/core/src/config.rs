//! Run configuration: a flat `key = value` file with dotted sections, plus parsers
//! for the source, channel and distortion notations.
//!
//! ```text
//! # comment
//! model.source = bernoulli:0.2
//! model.channel = bsc:0.1
//! grid.m = 16,32,64
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::distances::{channel_from_file, DistortionMeasure};
use crate::entropy::bernoulli_with_entropy;
use crate::error::{Error, Result};
use crate::model::{ChannelKernel, Pmf, SourceSpec};

/// Every accepted key with its default value.
pub const DEFAULTS: &[(&str, &str)] = &[
    ("model.source", "uniform"),
    ("model.channel", "bsc:0.1"),
    ("model.distortion", "hamming"),
    ("run.seed", "1"),
    ("run.threads", "0"),
    ("run.out", "out"),
    ("run.bits", "false"),
    ("run.record_runtime", "true"),
    ("grid.m", "16,32,64"),
    ("grid.beta", "8"),
    ("grid.l", ""),
    ("grid.alpha", ""),
    ("grid.delta", "0"),
    ("grid.xi", "0"),
    ("experiment.trials", "1000"),
    ("experiment.eta", "0.2"),
    ("experiment.dump_trial", "false"),
    ("rate.k_max", "8"),
    (
        "rate.deltas",
        "0,0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5,0.55,0.6,0.65,0.7,0.75,0.8,0.85,0.9,0.95,1",
    ),
    ("rate.q", "2,3,4,8"),
    (
        "rate.alphas",
        "0,0.025,0.05,0.075,0.1,0.125,0.15,0.175,0.2,0.225,0.25,0.275,0.3,0.325,0.35,0.375,0.4,0.425,0.45,0.475,0.5",
    ),
    ("pairwise.l", "1,2,3,4,5,6"),
    ("sweep.plan", ""),
    ("sweep.resume", "true"),
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            values: DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            // `[run]` then `seed = 1` is the same as `run.seed = 1`.
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", lineno + 1)))?;
            let key = if section.is_empty() {
                k.trim().to_string()
            } else {
                format!("{section}.{}", k.trim())
            };
            cfg.set(&key, v.trim())
                .map_err(|e| Error::Parse(format!("config line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading config {}", path.display()), e))?;
        RunConfig::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.to_string();
                Ok(())
            }
            None => Err(Error::Parse(format!("unknown config key '{key}'"))),
        }
    }

    pub fn get(&self, key: &str) -> &str {
        self.values
            .get(key)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("no config key {key}"))
    }

    pub fn parse_value<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.get(key);
        raw.parse()
            .map_err(|_| Error::Parse(format!("{key} = '{raw}' is not a valid value")))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        parse_list(self.get(key)).map_err(|e| Error::Parse(format!("{key}: {e}")))
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        let v = self.get(key);
        (!v.is_empty()).then(|| PathBuf::from(v))
    }

    /// Resolved `key = value` lines, sorted; valid config-file input.
    pub fn lines(&self) -> Vec<String> {
        self.values.iter().map(|(k, v)| format!("{k} = {v}")).collect()
    }

    pub fn source_spec(&self) -> Result<(SourceSpec, f64)> {
        let p = parse_source(self.get("model.source"))?;
        let (channel, param) = parse_channel(self.get("model.channel"), p.len())?;
        Ok((SourceSpec::new(p, channel)?, param))
    }

    pub fn distortion(&self, n: usize) -> Result<DistortionMeasure> {
        parse_distortion(self.get("model.distortion"), n)
    }
}

pub fn parse_list<T: FromStr>(raw: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Parse(format!("'{s}' is not a valid list item")))
        })
        .collect()
}

fn num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{what}: '{s}' is not a number")))
}

/// `uniform`, `uniform:q`, `bernoulli:p` (P(1) = p), `bernoulli-entropy:h`
/// (P(1) <= 1/2 with entropy h nats) or `pmf:p0:p1:...`.
pub fn parse_source(s: &str) -> Result<Pmf> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    match parts.as_slice() {
        ["uniform"] => Pmf::uniform(2),
        ["uniform", q] => Pmf::uniform(num(q, "uniform alphabet size")?),
        ["bernoulli", p] => Pmf::bernoulli(num(p, "bernoulli parameter")?),
        ["bernoulli-entropy", h] => Pmf::bernoulli(bernoulli_with_entropy(num(h, "entropy")?)?),
        ["pmf", rest @ ..] if !rest.is_empty() => {
            Pmf::new(rest.iter().map(|v| num(v, "pmf entry")).collect::<Result<_>>()?)
        }
        _ => Err(Error::Parse(format!("unrecognized source '{s}'"))),
    }
}

/// `bsc:a`, `symmetric:a:q` (q outputs), `identity`, `uniform:q` or `matrix:path`.
/// Returns the kernel and its scalar parameter (`a`, 0 for identity, NaN otherwise).
pub fn parse_channel(s: &str, inputs: usize) -> Result<(ChannelKernel, f64)> {
    let s = s.trim();
    if let Some(path) = s.strip_prefix("matrix:") {
        return Ok((channel_from_file(Path::new(path))?, f64::NAN));
    }
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["bsc", a] => {
            let a: f64 = num(a, "crossover probability")?;
            if inputs != 2 {
                return Err(Error::Dimension(format!(
                    "bsc needs a binary source, got |X| = {inputs}"
                )));
            }
            Ok((ChannelKernel::bsc(a)?, a))
        }
        ["symmetric", a, q] => {
            let a: f64 = num(a, "symmetric channel parameter")?;
            Ok((ChannelKernel::symmetric(inputs, num(q, "output alphabet size")?, a)?, a))
        }
        ["symmetric", a] => {
            let a: f64 = num(a, "symmetric channel parameter")?;
            Ok((ChannelKernel::symmetric(inputs, inputs, a)?, a))
        }
        ["identity"] => Ok((ChannelKernel::identity(inputs)?, 0.0)),
        ["uniform", q] => Ok((
            ChannelKernel::uniform(inputs, num(q, "output alphabet size")?)?,
            f64::NAN,
        )),
        _ => Err(Error::Parse(format!("unrecognized channel '{s}'"))),
    }
}

/// Inserts `alpha` into a channel family: `bsc` or `symmetric` / `symmetric:q`.
pub fn channel_with_alpha(family: &str, alpha: f64) -> Result<String> {
    let parts: Vec<&str> = family.trim().split(':').collect();
    match parts.as_slice() {
        ["bsc"] => Ok(format!("bsc:{alpha}")),
        ["symmetric"] => Ok(format!("symmetric:{alpha}")),
        ["symmetric", q] => Ok(format!("symmetric:{alpha}:{q}")),
        _ => Err(Error::Parse(format!(
            "channel '{family}' cannot take an alpha grid (use bsc or symmetric[:q])"
        ))),
    }
}

pub fn parse_distortion(s: &str, n: usize) -> Result<DistortionMeasure> {
    let s = s.trim();
    let measure = if s == "hamming" {
        DistortionMeasure::hamming(n)
    } else if let Some(path) = s.strip_prefix("matrix:") {
        DistortionMeasure::from_file(Path::new(path))?
    } else {
        return Err(Error::Parse(format!("unrecognized distortion '{s}'")));
    };
    if measure.size() != n {
        return Err(Error::Dimension(format!(
            "distortion is {0}x{0} but the source alphabet has {n} symbols",
            measure.size()
        )));
    }
    Ok(measure)
}
