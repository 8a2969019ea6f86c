//! Alphabets, distributions, channels and fragment geometry.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// A symbol is an index into its alphabet.
pub type Symbol = u8;

/// Tolerance on simplex constraints (row sums, PMF sums).
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Largest alphabet representable with [`Symbol`].
pub const MAX_ALPHABET: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet(usize);

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > MAX_ALPHABET {
            return Err(Error::OutOfRange(format!(
                "alphabet size {size} not in 1..={MAX_ALPHABET}"
            )));
        }
        Ok(Alphabet(size))
    }

    pub fn size(self) -> usize {
        self.0
    }
}

/// A probability mass function over `0..len()`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPmf("empty probability vector".into()));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidPmf(format!("entry {bad} is not a probability")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidPmf(format!(
                "entries sum to {total:.15}, off by {:e}",
                total - 1.0
            )));
        }
        Ok(Pmf { probs })
    }

    /// Normalizes non-negative weights into a PMF.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidPmf(
                "weights must be non-negative with positive sum".into(),
            ));
        }
        Pmf::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(size: usize) -> Result<Self> {
        Alphabet::new(size)?;
        Ok(Pmf {
            probs: vec![1.0 / size as f64; size],
        })
    }

    /// Binary PMF with `P(1) = p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange(format!("bernoulli parameter {p} not in [0,1]")));
        }
        Pmf::new(vec![1.0 - p, p])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, x: usize) -> f64 {
        self.probs[x]
    }

    pub fn is_fully_supported(&self) -> bool {
        self.probs.iter().all(|p| *p > 0.0)
    }
}

/// Memoryless channel `P_{Y|X}` stored as one output PMF per input symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelKernel {
    rows: Vec<Pmf>,
    outputs: usize,
}

impl ChannelKernel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let outputs = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidChannel("no input rows".into()))?;
        Alphabet::new(rows.len())?;
        Alphabet::new(outputs)?;
        let mut pmfs = Vec::with_capacity(rows.len());
        for (x, row) in rows.into_iter().enumerate() {
            if row.len() != outputs {
                return Err(Error::InvalidChannel(format!(
                    "row {x} has {} entries, expected {outputs}",
                    row.len()
                )));
            }
            pmfs.push(Pmf::new(row).map_err(|e| Error::InvalidChannel(format!("row {x}: {e}")))?);
        }
        Ok(ChannelKernel { rows: pmfs, outputs })
    }

    /// Clean channel: `Y = X`.
    pub fn identity(size: usize) -> Result<Self> {
        ChannelKernel::new(
            (0..size)
                .map(|x| (0..size).map(|y| if x == y { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    /// Binary symmetric channel with crossover `alpha`.
    pub fn bsc(alpha: f64) -> Result<Self> {
        ChannelKernel::symmetric(2, 2, alpha)
    }

    /// Symmetric channel from `inputs` symbols to `outputs >= inputs` symbols:
    /// the input is kept with probability `1 - alpha`, otherwise replaced by one of
    /// the other `outputs - 1` symbols uniformly.
    pub fn symmetric(inputs: usize, outputs: usize, alpha: f64) -> Result<Self> {
        if outputs < 2 || inputs > outputs {
            return Err(Error::OutOfRange(format!(
                "symmetric channel needs 2 <= outputs and inputs <= outputs (got {inputs}->{outputs})"
            )));
        }
        let max_alpha = (outputs - 1) as f64 / outputs as f64;
        if !(0.0..=max_alpha).contains(&alpha) {
            return Err(Error::OutOfRange(format!(
                "alpha {alpha} not in [0, {max_alpha}] for {outputs} outputs"
            )));
        }
        let off = alpha / (outputs - 1) as f64;
        ChannelKernel::new(
            (0..inputs)
                .map(|x| (0..outputs).map(|y| if x == y { 1.0 - alpha } else { off }).collect())
                .collect(),
        )
    }

    /// Output independent of input: every row uniform.
    pub fn uniform(inputs: usize, outputs: usize) -> Result<Self> {
        ChannelKernel::new(vec![vec![1.0 / outputs as f64; outputs]; inputs])
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn row(&self, x: usize) -> &Pmf {
        &self.rows[x]
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.rows[x].get(y)
    }

    /// `ln P(y|x)` table, row-major over `(x, y)`; zero probabilities map to `-inf`.
    pub fn log_table(&self) -> Vec<f64> {
        self.rows
            .iter()
            .flat_map(|r| r.probs().iter().map(|p| p.ln()))
            .collect()
    }
}

/// Joint law `P_XY = P_X * P_{Y|X}` of source and reference symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    p_x: Pmf,
    channel: ChannelKernel,
}

impl SourceSpec {
    /// The source PMF must be fully supported.
    pub fn new(p_x: Pmf, channel: ChannelKernel) -> Result<Self> {
        if p_x.len() != channel.inputs() {
            return Err(Error::Dimension(format!(
                "source has {} symbols but channel has {} inputs",
                p_x.len(),
                channel.inputs()
            )));
        }
        if !p_x.is_fully_supported() {
            return Err(Error::InvalidPmf("source PMF must be fully supported".into()));
        }
        Ok(SourceSpec { p_x, channel })
    }

    pub fn p_x(&self) -> &Pmf {
        &self.p_x
    }

    pub fn channel(&self) -> &ChannelKernel {
        &self.channel
    }

    pub fn x_alphabet(&self) -> Alphabet {
        Alphabet(self.p_x.len())
    }

    pub fn y_alphabet(&self) -> Alphabet {
        Alphabet(self.channel.outputs())
    }

    pub fn joint(&self, x: usize, y: usize) -> f64 {
        self.p_x.get(x) * self.channel.prob(x, y)
    }

    /// Same source, different channel.
    pub fn with_channel(&self, channel: ChannelKernel) -> Result<Self> {
        SourceSpec::new(self.p_x.clone(), channel)
    }
}

/// Fragment geometry: `M` fragments of length `L`, with `L = round(beta ln M)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FragmentConfig {
    m: usize,
    l: usize,
    beta: f64,
}

impl FragmentConfig {
    /// Derives `L = max(1, round(beta ln M))`. `beta` is kept as supplied.
    pub fn from_beta(m: usize, beta: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::OutOfRange("M must be positive".into()));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::OutOfRange(format!("beta {beta} must be positive")));
        }
        let l = ((beta * (m as f64).ln()).round() as usize).max(1);
        Ok(FragmentConfig { m, l, beta })
    }

    /// Derives `beta = L / ln M` (infinite when `M = 1`).
    pub fn from_length(m: usize, l: usize) -> Result<Self> {
        if m == 0 || l == 0 {
            return Err(Error::OutOfRange("M and L must be positive".into()));
        }
        let beta = l as f64 / (m as f64).ln();
        Ok(FragmentConfig { m, l, beta })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// The length parameter as configured (user-supplied or derived).
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `L / ln M`, the length parameter actually realized after rounding.
    pub fn beta_effective(&self) -> f64 {
        self.l as f64 / (self.m as f64).ln()
    }

    pub fn n(&self) -> usize {
        self.m * self.l
    }
}

/// Inverse-CDF sampler for a source and its channel rows.
#[derive(Clone, Debug)]
pub struct SourceSampler {
    x_cdf: Vec<f64>,
    y_cdfs: Vec<Vec<f64>>,
}

fn cdf(p: &Pmf) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = p
        .probs()
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect();
    // Guard the last bucket against rounding in the running sum.
    if let Some(last) = out.last_mut() {
        *last = f64::INFINITY;
    }
    out
}

fn draw(cdf: &[f64], u: f64) -> Symbol {
    cdf.iter().position(|c| u < *c).unwrap_or(cdf.len() - 1) as Symbol
}

impl SourceSampler {
    pub fn new(spec: &SourceSpec) -> Self {
        SourceSampler {
            x_cdf: cdf(spec.p_x()),
            y_cdfs: (0..spec.channel().inputs())
                .map(|x| cdf(spec.channel().row(x)))
                .collect(),
        }
    }

    pub fn sample_x(&self, rng: &mut RngStream) -> Symbol {
        draw(&self.x_cdf, rng.random::<f64>())
    }

    pub fn sample_y(&self, x: Symbol, rng: &mut RngStream) -> Symbol {
        draw(&self.y_cdfs[x as usize], rng.random::<f64>())
    }

    pub fn sample_pairs(&self, n: usize, rng: &mut RngStream) -> (Vec<Symbol>, Vec<Symbol>) {
        let mut xs = Vec::with_capacity(n);
        let mut ys = Vec::with_capacity(n);
        for _ in 0..n {
            let x = self.sample_x(rng);
            xs.push(x);
            ys.push(self.sample_y(x, rng));
        }
        (xs, ys)
    }
}

/// Draws `n` IID pairs `(X_i, Y_i) ~ P_XY`.
pub fn sample_sequence(spec: &SourceSpec, n: usize, rng: &mut RngStream) -> Result<(Vec<Symbol>, Vec<Symbol>)> {
    if n == 0 {
        return Err(Error::OutOfRange("sequence length must be at least 1".into()));
    }
    Ok(SourceSampler::new(spec).sample_pairs(n, rng))
}
