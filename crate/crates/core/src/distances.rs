//! Chernoff/Bhattacharyya distances and additive distortion measures.
//!
//! Symbol-level tables extend additively to fragments. Both tables can also be
//! evaluated on a joint type `Q` over `X x X` (row-major, `Q[x1 * n + x2]`), which is
//! the per-symbol value of any fragment pair with that type.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ChannelKernel, Pmf, Symbol, SIMPLEX_TOL};

/// `d_s(x1, x2) = -ln sum_y P(y|x1)^s P(y|x2)^(1-s)`; `+inf` on disjoint supports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolDistanceTable {
    n: usize,
    s: f64,
    d: Vec<f64>,
}

pub fn chernoff_table(channel: &ChannelKernel, s: f64) -> Result<SymbolDistanceTable> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OutOfRange(format!("chernoff parameter {s} not in [0,1]")));
    }
    let n = channel.inputs();
    let mut d = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let (ra, rb) = (channel.row(a).probs(), channel.row(b).probs());
            let coeff: f64 = ra.iter().zip(rb).map(|(p, q)| p.powf(s) * q.powf(1.0 - s)).sum();
            // Hölder bounds the coefficient by 1; clamp rounding noise.
            d[a * n + b] = if coeff > 0.0 {
                (-coeff.ln()).max(0.0)
            } else {
                f64::INFINITY
            };
        }
    }
    Ok(SymbolDistanceTable { n, s, d })
}

pub fn bhattacharyya_table(channel: &ChannelKernel) -> SymbolDistanceTable {
    chernoff_table(channel, 0.5).expect("s = 1/2 is in range")
}

impl SymbolDistanceTable {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.d[a * self.n + b]
    }

    pub fn entries(&self) -> &[f64] {
        &self.d
    }

    /// Largest finite entry (0 if none).
    pub fn max_finite(&self) -> f64 {
        self.d.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max)
    }
}

fn check_lengths(a: &[Symbol], b: &[Symbol]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Additive fragment distance `sum_i d(a_i, b_i)`.
pub fn fragment_distance(table: &SymbolDistanceTable, a: &[Symbol], b: &[Symbol]) -> Result<f64> {
    check_lengths(a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| table.get(*x as usize, *y as usize)).sum())
}

fn check_joint(q: &Pmf, n: usize) -> Result<()> {
    if q.len() != n * n {
        return Err(Error::Dimension(format!(
            "joint PMF has {} entries, expected {}",
            q.len(),
            n * n
        )));
    }
    Ok(())
}

/// Joint type of two equal-length fragments over an alphabet of size `n`.
pub fn joint_type(a: &[Symbol], b: &[Symbol], n: usize) -> Result<Pmf> {
    check_lengths(a, b)?;
    if a.is_empty() {
        return Err(Error::OutOfRange("joint type of empty fragments".into()));
    }
    let mut counts = vec![0usize; n * n];
    for (x, y) in a.iter().zip(b) {
        counts[*x as usize * n + *y as usize] += 1;
    }
    let l = a.len() as f64;
    Pmf::new(counts.into_iter().map(|c| c as f64 / l).collect())
}

/// Per-symbol distance `sum_q q(x1,x2) d(x1,x2)`; atoms with zero mass contribute nothing
/// even where `d` is infinite.
pub fn type_distance(table: &SymbolDistanceTable, q: &Pmf) -> Result<f64> {
    check_joint(q, table.n)?;
    Ok(q.probs()
        .iter()
        .zip(&table.d)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, d)| w * d)
        .sum())
}

/// Per-symbol distortion table `Delta(x, x_hat)` with a zero diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionMeasure {
    n: usize,
    table: Vec<f64>,
}

impl DistortionMeasure {
    pub fn hamming(n: usize) -> Self {
        let mut table = vec![1.0; n * n];
        for x in 0..n {
            table[x * n + x] = 0.0;
        }
        DistortionMeasure { n, table }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Dimension("empty distortion matrix".into()));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "distortion row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, v) in row.into_iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::OutOfRange(format!("distortion ({i},{j}) = {v}")));
                }
                if i == j && v != 0.0 {
                    return Err(Error::OutOfRange(format!(
                        "distortion diagonal ({i},{i}) = {v} must be 0"
                    )));
                }
                table.push(v);
            }
        }
        Ok(DistortionMeasure { n, table })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        DistortionMeasure::from_rows(read_matrix_file(path)?)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.table[a * self.n + b]
    }

    pub fn entries(&self) -> &[f64] {
        &self.table
    }

    pub fn max_value(&self) -> f64 {
        self.table.iter().copied().fold(0.0, f64::max)
    }
}

/// Per-symbol average distortion `(1/L) sum_j Delta(a_j, b_j)`.
pub fn fragment_distortion(measure: &DistortionMeasure, a: &[Symbol], b: &[Symbol]) -> Result<f64> {
    check_lengths(a, b)?;
    if a.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| measure.get(*x as usize, *y as usize))
        .sum();
    Ok(total / a.len() as f64)
}

/// `Delta(Q) = sum_q q(x1,x2) Delta(x1,x2)`.
pub fn type_distortion(measure: &DistortionMeasure, q: &Pmf) -> Result<f64> {
    check_joint(q, measure.n)?;
    Ok(q.probs().iter().zip(&measure.table).map(|(w, d)| w * d).sum())
}

/// Parses a whitespace-separated numeric matrix. Blank lines and `#` comments are skipped.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let row = content
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: '{tok}' is not a number", lineno + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("matrix file has no rows".into()));
    }
    Ok(rows)
}

pub fn read_matrix_file(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading matrix file {}", path.display()), e))?;
    parse_matrix(&text)
}

/// Loads a channel kernel (rows = inputs) from a matrix file. Rows must sum to 1.
pub fn channel_from_file(path: &Path) -> Result<ChannelKernel> {
    let rows = read_matrix_file(path)?;
    for (i, r) in rows.iter().enumerate() {
        let s: f64 = r.iter().sum();
        if (s - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidChannel(format!(
                "{}: row {i} sums to {s}",
                path.display()
            )));
        }
    }
    ChannelKernel::new(rows)
}
