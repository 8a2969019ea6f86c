mod common;

use std::collections::HashMap;

use rand::Rng;
use reforder::fragments::{fragment_and_shuffle, histogram, log_num_reconstructions, Histogram};
use reforder::model::{ChannelKernel, FragmentConfig, Pmf, SourceSpec};
use reforder::rng::RngStream;

fn spec(p1: f64) -> SourceSpec {
    SourceSpec::new(Pmf::bernoulli(p1).unwrap(), ChannelKernel::bsc(0.1).unwrap()).unwrap()
}

#[test]
fn shuffles_are_uniform() {
    let cfg = FragmentConfig::from_length(4, 1).unwrap();
    let n = 100_000u64;
    let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
    for t in 0..n {
        let inst = fragment_and_shuffle(&spec(0.5), cfg, &mut RngStream::new(31, t)).unwrap();
        *counts.entry(inst.hidden_perm).or_default() += 1;
    }
    assert_eq!(counts.len(), 24);
    let p = 1.0 / 24.0;
    let sigma = (n as f64 * p * (1.0 - p)).sqrt();
    for (perm, c) in counts {
        assert!((c as f64 - n as f64 * p).abs() <= 4.0 * sigma, "{perm:?}: {c}");
    }
}

#[test]
fn fragment_multiset_ignores_the_shuffle() {
    let cfg = FragmentConfig::from_length(9, 3).unwrap();
    for t in 0..20 {
        let inst = fragment_and_shuffle(&spec(0.3), cfg, &mut RngStream::new(2, t)).unwrap();
        let mut shuffled = inst.fragments.clone();
        let mut original: Vec<Vec<u8>> = inst.x_seq.chunks(3).map(<[u8]>::to_vec).collect();
        shuffled.sort();
        original.sort();
        assert_eq!(shuffled, original);
        assert_eq!(inst.reassemble(), inst.x_seq);
    }
}

#[test]
fn histogram_matches_pairwise_counting() {
    let mut r = common::rng(8);
    for t in 0..50 {
        let m = r.random_range(1..=40);
        let l = r.random_range(1..=5);
        let cfg = FragmentConfig::from_length(m, l).unwrap();
        let inst = fragment_and_shuffle(&spec(0.2), cfg, &mut RngStream::new(4, t)).unwrap();
        let h = histogram(&inst, 2);
        let mut naive: Vec<usize> = Vec::new();
        let mut seen = vec![false; m];
        for i in 0..m {
            if seen[i] {
                continue;
            }
            let mut c = 0;
            for (j, f) in inst.fragments.iter().enumerate() {
                if *f == inst.fragments[i] {
                    seen[j] = true;
                    c += 1;
                }
            }
            naive.push(c);
        }
        naive.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(h.multiplicities(), naive);
        assert_eq!(h.multiplicities().iter().sum::<usize>(), m);
    }
}

#[test]
fn identical_and_distinct_histograms() {
    let same = vec![vec![1u8, 0, 1]; 6];
    let h = Histogram::from_fragments(same.iter().map(|f| f.as_slice()), 3, 2).unwrap();
    assert_eq!(h.multiplicities(), vec![6]);
    let distinct: Vec<Vec<u8>> = (0..8u8).map(|i| vec![i >> 2 & 1, i >> 1 & 1, i & 1]).collect();
    let h = Histogram::from_fragments(distinct.iter().map(|f| f.as_slice()), 3, 2).unwrap();
    assert_eq!(h.multiplicities(), vec![1; 8]);
    let ln_fact_8: f64 = (1..=8).map(|k| (k as f64).ln()).sum();
    assert!((log_num_reconstructions(&h) - ln_fact_8).abs() < 1e-10);
}

#[test]
fn multinomial_sandwich() {
    let mut r = common::rng(9);
    for t in 0..200 {
        let m = r.random_range(2..=300);
        let l = r.random_range(1..=4);
        let cfg = FragmentConfig::from_length(m, l).unwrap();
        let inst = fragment_and_shuffle(&spec(0.15), cfg, &mut RngStream::new(10, t)).unwrap();
        let h = histogram(&inst, 2);
        let v = log_num_reconstructions(&h);
        let mh = m as f64 * h.empirical_entropy();
        assert!(v <= mh + 1e-9);
        assert!(v >= mh - h.distinct() as f64 * ((m + 1) as f64).ln());
        // Direct sum of logs as an independent evaluation.
        let ln_fact = |k: usize| (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
        let direct = ln_fact(m) - h.multiplicities().iter().map(|&c| ln_fact(c)).sum::<f64>();
        assert!((v - direct).abs() < 1e-8 * (1.0 + direct));
    }
}

#[test]
fn unique_fragment_regime_is_near_log_m_factorial() {
    // Long fragments from a uniform source are almost surely distinct.
    let s = SourceSpec::new(Pmf::uniform(2).unwrap(), ChannelKernel::bsc(0.1).unwrap()).unwrap();
    let cfg = FragmentConfig::from_beta(128, 6.0).unwrap();
    let inst = fragment_and_shuffle(&s, cfg, &mut RngStream::new(1, 1)).unwrap();
    let h = histogram(&inst, 2);
    assert_eq!(h.distinct(), 128);
    let per = log_num_reconstructions(&h) / 128.0;
    assert!(per > (128f64).ln() - 1.0 && per < (128f64).ln());
}
