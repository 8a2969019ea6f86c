//! Fragmentation, shuffling, fragment histograms and the number of distinct
//! reconstructions a histogram admits.

use std::collections::HashMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::entropy::{entropy_of_counts, shannon_entropy};
use crate::error::{Error, Result};
use crate::io::write_provenance;
use crate::model::{sample_sequence, FragmentConfig, SourceSpec, Symbol};
use crate::rng::RngStream;
use crate::stats::{clopper_pearson, Interval};

/// One observation: `M` fragments of `x` in shuffled order, and `y` in true order.
#[derive(Clone, Debug, PartialEq)]
pub struct ShuffledInstance {
    pub x_seq: Vec<Symbol>,
    pub y_seq: Vec<Symbol>,
    /// `fragments[s]` is true fragment `hidden_perm[s]`.
    pub fragments: Vec<Vec<Symbol>>,
    /// Shuffled position to true position. Used for scoring only.
    pub hidden_perm: Vec<usize>,
    pub config: FragmentConfig,
}

impl ShuffledInstance {
    /// Builds an instance from explicit sequences and a hidden permutation.
    pub fn from_parts(
        x_seq: Vec<Symbol>,
        y_seq: Vec<Symbol>,
        hidden_perm: Vec<usize>,
        config: FragmentConfig,
    ) -> Result<Self> {
        let n = config.n();
        if x_seq.len() != n || y_seq.len() != n {
            return Err(Error::Dimension(format!(
                "sequences of length {} and {} for N = {n}",
                x_seq.len(),
                y_seq.len()
            )));
        }
        if !is_permutation(&hidden_perm, config.m()) {
            return Err(Error::OutOfRange("hidden_perm is not a permutation of [M]".into()));
        }
        let l = config.l();
        let fragments = hidden_perm
            .iter()
            .map(|&t| x_seq[t * l..(t + 1) * l].to_vec())
            .collect();
        Ok(ShuffledInstance {
            x_seq,
            y_seq,
            fragments,
            hidden_perm,
            config,
        })
    }

    pub fn m(&self) -> usize {
        self.config.m()
    }

    pub fn l(&self) -> usize {
        self.config.l()
    }

    /// True fragment `i` of `x`.
    pub fn x_fragment(&self, i: usize) -> &[Symbol] {
        let l = self.l();
        &self.x_seq[i * l..(i + 1) * l]
    }

    /// Slot `j` of the reference sequence.
    pub fn y_fragment(&self, j: usize) -> &[Symbol] {
        let l = self.l();
        &self.y_seq[j * l..(j + 1) * l]
    }

    /// Undoes the shuffle with the hidden permutation.
    pub fn reassemble(&self) -> Vec<Symbol> {
        let mut slots: Vec<&[Symbol]> = vec![&[]; self.m()];
        for (s, &t) in self.hidden_perm.iter().enumerate() {
            slots[t] = &self.fragments[s];
        }
        slots.concat()
    }
}

pub(crate) fn is_permutation(p: &[usize], m: usize) -> bool {
    if p.len() != m {
        return false;
    }
    let mut seen = vec![false; m];
    for &v in p {
        if v >= m || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// Samples `(x, y)`, cuts `x` into `M` fragments and shuffles them (Fisher-Yates).
pub fn fragment_and_shuffle(
    spec: &SourceSpec,
    config: FragmentConfig,
    rng: &mut RngStream,
) -> Result<ShuffledInstance> {
    let (x, y) = sample_sequence(spec, config.n(), rng)?;
    let mut perm: Vec<usize> = (0..config.m()).collect();
    perm.shuffle(rng);
    ShuffledInstance::from_parts(x, y, perm, config)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FragmentKey {
    /// Base-`|X|` integer encoding.
    Packed(u64),
    Bytes(Vec<Symbol>),
}

/// Multiplicities of fragment values.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    counts: HashMap<FragmentKey, usize>,
    m: usize,
    l: usize,
}

fn packs(alphabet: usize, l: usize) -> bool {
    (alphabet as u128)
        .checked_pow(l as u32)
        .is_some_and(|v| v - 1 <= u64::MAX as u128)
}

fn key(fragment: &[Symbol], alphabet: usize, packed: bool) -> FragmentKey {
    if packed {
        FragmentKey::Packed(
            fragment
                .iter()
                .fold(0u64, |acc, &s| acc.wrapping_mul(alphabet as u64).wrapping_add(s as u64)),
        )
    } else {
        FragmentKey::Bytes(fragment.to_vec())
    }
}

impl Histogram {
    pub fn from_fragments<'a, I>(fragments: I, l: usize, alphabet: usize) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [Symbol]>,
    {
        let packed = packs(alphabet, l);
        let mut counts = HashMap::new();
        let mut m = 0;
        for f in fragments {
            if f.len() != l {
                return Err(Error::LengthMismatch {
                    left: f.len(),
                    right: l,
                });
            }
            *counts.entry(key(f, alphabet, packed)).or_insert(0) += 1;
            m += 1;
        }
        Ok(Histogram { counts, m, l })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, key: &FragmentKey) -> usize {
        self.counts.get(key).copied().unwrap_or(0)
    }

    /// Multiplicities in non-increasing order.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.counts.values().copied().collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }

    /// `H(G / M)` in nats.
    pub fn empirical_entropy(&self) -> f64 {
        entropy_of_counts(self.multiplicities(), self.m)
    }
}

pub fn histogram(instance: &ShuffledInstance, alphabet: usize) -> Histogram {
    Histogram::from_fragments(instance.fragments.iter().map(|f| f.as_slice()), instance.l(), alphabet)
        .expect("instance fragments all have length L")
}

/// `ln (M! / prod_j G(j)!)`.
pub fn log_num_reconstructions(h: &Histogram) -> f64 {
    let denom: f64 = h.multiplicities().iter().map(|&c| ln_gamma(c as f64 + 1.0)).sum();
    (ln_gamma(h.m as f64 + 1.0) - denom).max(0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CardinalityReport {
    pub seed: u64,
    pub m: usize,
    pub l: usize,
    pub beta: f64,
    pub eta: f64,
    pub trials: u64,
    pub tail_count: u64,
    pub tail_rate: f64,
    pub ci: Interval,
    /// Mean of `(1/M) ln |A_L|`.
    pub mean_logcard: f64,
    /// Tail threshold `L H(P_X) + eta ln M`.
    pub threshold: f64,
    /// Samples where `ln |A_L| > M H(G/M)`; expected to be 0.
    pub entropy_bound_violations: u64,
}

pub const CARDINALITY_HEADER: [&str; 11] = [
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
];

/// Estimates `P[(1/M) ln |A_L| >= L H(P_X) + eta ln M]`. Trial `t` uses stream
/// `first_stream + t`.
pub fn cardinality_concentration_experiment(
    spec: &SourceSpec,
    config: FragmentConfig,
    eta: f64,
    trials: u64,
    seed: u64,
    first_stream: u64,
) -> Result<CardinalityReport> {
    let h = shannon_entropy(spec.p_x());
    if !(h > 0.0) {
        return Err(Error::OutOfRange("source entropy must be positive".into()));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::OutOfRange(format!("eta {eta} not in (0,1)")));
    }
    if trials == 0 {
        return Err(Error::OutOfRange("trials must be at least 1".into()));
    }
    let (m, l) = (config.m(), config.l());
    let alphabet = spec.p_x().len();
    let threshold = l as f64 * h + eta * (m as f64).ln();
    let samples = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = RngStream::new(seed, first_stream + t);
            let (x, _) = sample_sequence(spec, config.n(), &mut rng)?;
            let hist = Histogram::from_fragments(x.chunks(l), l, alphabet)?;
            let log_card = log_num_reconstructions(&hist);
            let bound = m as f64 * hist.empirical_entropy();
            Ok((log_card / m as f64, log_card > bound + 1e-9))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut tail_count = 0;
    let mut violations = 0;
    let mut sum = 0.0;
    for &(per_fragment, violated) in &samples {
        sum += per_fragment;
        if per_fragment >= threshold {
            tail_count += 1;
        }
        if violated {
            violations += 1;
        }
    }
    Ok(CardinalityReport {
        seed,
        m,
        l,
        beta: config.beta(),
        eta,
        trials,
        tail_count,
        tail_rate: tail_count as f64 / trials as f64,
        ci: clopper_pearson(tail_count, trials, 0.95)?,
        mean_logcard: sum / trials as f64,
        threshold,
        entropy_bound_violations: violations,
    })
}

/// Writes cardinality rows with provenance comments.
pub fn write_cardinality_csv<W: Write>(out: W, reports: &[CardinalityReport], provenance: &[String]) -> Result<()> {
    let mut out = out;
    write_provenance(&mut out, provenance)?;
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e| Error::Csv {
        path: "cardinality".into(),
        source: e,
    };
    w.write_record(CARDINALITY_HEADER).map_err(wrap)?;
    for r in reports {
        w.write_record([
            r.seed.to_string(),
            r.m.to_string(),
            r.l.to_string(),
            r.beta.to_string(),
            r.eta.to_string(),
            r.trials.to_string(),
            r.tail_count.to_string(),
            r.tail_rate.to_string(),
            r.ci.lo.to_string(),
            r.ci.hi.to_string(),
            r.mean_logcard.to_string(),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io("flushing cardinality csv", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChannelKernel, Pmf};

    fn spec() -> SourceSpec {
        SourceSpec::new(Pmf::uniform(2).unwrap(), ChannelKernel::bsc(0.1).unwrap()).unwrap()
    }

    #[test]
    fn reassembly_is_exact() {
        let cfg = FragmentConfig::from_length(7, 3).unwrap();
        for t in 0..50 {
            let inst = fragment_and_shuffle(&spec(), cfg, &mut RngStream::new(9, t)).unwrap();
            assert_eq!(inst.reassemble(), inst.x_seq);
            for (s, &true_pos) in inst.hidden_perm.iter().enumerate() {
                assert_eq!(inst.fragments[s], inst.x_fragment(true_pos));
            }
        }
    }

    #[test]
    fn single_fragment_is_ordered() {
        let cfg = FragmentConfig::from_length(1, 5).unwrap();
        let inst = fragment_and_shuffle(&spec(), cfg, &mut RngStream::new(1, 0)).unwrap();
        assert_eq!(inst.hidden_perm, vec![0]);
        assert_eq!(inst.fragments[0], inst.x_seq);
    }

    #[test]
    fn log_reconstruction_examples() {
        let same = Histogram::from_fragments([[0u8, 1].as_slice(); 4], 2, 2).unwrap();
        assert_eq!(same.distinct(), 1);
        assert_eq!(log_num_reconstructions(&same), 0.0);
        let frags: Vec<Vec<u8>> = (0..5u8).map(|i| vec![i]).collect();
        let distinct = Histogram::from_fragments(frags.iter().map(|f| f.as_slice()), 1, 5).unwrap();
        assert!((log_num_reconstructions(&distinct) - 120f64.ln()).abs() < 1e-12);
        let pairs = Histogram::from_fragments([[0u8].as_slice(), &[1], &[0], &[1]], 1, 2).unwrap();
        assert!((log_num_reconstructions(&pairs) - 6f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn long_fragments_use_byte_keys() {
        assert!(packs(2, 64));
        assert!(!packs(2, 65));
        assert!(packs(256, 8));
        assert!(!packs(3, 41));
        let a = vec![1u8; 70];
        let h = Histogram::from_fragments([a.as_slice(), a.as_slice()], 70, 2).unwrap();
        assert_eq!(h.count(&FragmentKey::Bytes(a.clone())), 2);
    }

    #[test]
    fn cardinality_entropy_bound_holds() {
        let p = crate::entropy::bernoulli_with_entropy(0.3).unwrap();
        let spec = SourceSpec::new(Pmf::bernoulli(p).unwrap(), ChannelKernel::bsc(0.1).unwrap()).unwrap();
        let cfg = FragmentConfig::from_beta(64, 0.5).unwrap();
        let r = cardinality_concentration_experiment(&spec, cfg, 0.2, 200, 3, 0).unwrap();
        assert_eq!(r.entropy_bound_violations, 0);
        assert!(r.ci.contains(r.tail_rate));
        let again = cardinality_concentration_experiment(&spec, cfg, 0.2, 200, 3, 0).unwrap();
        assert_eq!(r, again);
    }
}
