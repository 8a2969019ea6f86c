mod common;

use rand::Rng;
use reforder::distances::DistortionMeasure;
use reforder::entropy::collision_entropy;
use reforder::model::{ChannelKernel, Pmf, SourceSpec};
use reforder::rates::{
    cycle_sum, d_star, phi_k_reduced, phi_limit, psi2_closed_form, psi_k_trace, rate_report, tradeoff_curve, MethodTag,
    RateOptions,
};

fn uniform_symmetric(q: usize, a: f64) -> SourceSpec {
    SourceSpec::new(Pmf::uniform(q).unwrap(), ChannelKernel::symmetric(q, q, a).unwrap()).unwrap()
}

#[test]
fn psi2_grows_with_alphabet_size() {
    for a in [0.05, 0.1, 0.2, 0.3] {
        let vals: Vec<f64> = (2..=6)
            .map(|q| psi2_closed_form(&uniform_symmetric(q, a)).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]), "alpha {a}: {vals:?}");
    }
}

#[test]
fn clean_channel_gives_half_collision_entropy() {
    let mut r = common::rng(3);
    for n in 2..=6 {
        let p = Pmf::new(common::random_probs(&mut r, n, 0.1)).unwrap();
        let spec = SourceSpec::new(p.clone(), ChannelKernel::identity(n).unwrap()).unwrap();
        let expected = -0.5 * p.probs().iter().map(|v| v * v).sum::<f64>().ln();
        assert!((psi2_closed_form(&spec).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 0.5 * collision_entropy(&p)).abs() < 1e-14);
    }
}

#[test]
fn cycle_rates_dominate_pair_rate() {
    let mut r = common::rng(11);
    for _ in 0..30 {
        let nx = r.random_range(2..=4);
        let ny = r.random_range(2..=4);
        let s = common::random_source(&mut r, nx, ny);
        let psi2 = psi2_closed_form(&s.spec).unwrap();
        for k in 2..=6 {
            let via_trace = psi_k_trace(&s.spec, k).unwrap().value;
            let direct = -(common::trace_power_direct(&s.p, &s.rows, k)).ln() / k as f64;
            assert!((via_trace - direct).abs() < 1e-10);
            assert!(via_trace >= psi2 - 1e-12, "K={k}");
        }
        for k in 2..=4 {
            let cyc = -cycle_sum(&s.spec, k).unwrap().ln() / k as f64;
            assert!((cyc - psi_k_trace(&s.spec, k).unwrap().value).abs() < 1e-10);
        }
    }
}

#[test]
fn relaxation_sits_above_pair_rate() {
    let mut r = common::rng(12);
    for _ in 0..6 {
        let nx = r.random_range(2..=3);
        let s = common::random_source(&mut r, nx, 3);
        let psi2 = psi2_closed_form(&s.spec).unwrap();
        for k in [4, 6] {
            assert!(phi_k_reduced(&s.spec, k, 0.01).unwrap() >= psi2 - 1e-9);
        }
        assert!(phi_limit(&s.spec, 0.01).unwrap() >= psi2 - 1e-9);
    }
}

#[test]
fn d_star_is_monotone_and_starts_at_zero() {
    let mut r = common::rng(5);
    let s = common::random_source(&mut r, 3, 4);
    let m = DistortionMeasure::from_rows(vec![vec![0.0, 0.3, 0.9], vec![0.5, 0.0, 0.2], vec![1.0, 0.4, 0.0]]).unwrap();
    assert_eq!(d_star(&s.spec, &m, 0.0).unwrap(), 0.0);
    let vals: Vec<f64> = (0..=20)
        .map(|i| d_star(&s.spec, &m, i as f64 / 20.0).unwrap())
        .collect();
    assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-15));
    for (i, v) in vals.iter().enumerate() {
        let delta = i as f64 / 20.0;
        let costs: Vec<f64> = (0..9)
            .map(|t| {
                if t / 3 == t % 3 {
                    0.0
                } else {
                    -common::bc(&s.rows[t / 3], &s.rows[t % 3]).ln()
                }
            })
            .collect();
        let dists: Vec<f64> = (0..9).map(|t| m.get(t / 3, t % 3)).collect();
        assert!((v - common::d_star_dual(&costs, &dists, delta)).abs() < 1e-6);
    }
}

#[test]
fn tradeoff_threshold_for_low_entropy_source() {
    let p = reforder::entropy::bernoulli_with_entropy(0.1).unwrap();
    let spec = SourceSpec::new(Pmf::bernoulli(p).unwrap(), ChannelKernel::bsc(0.1).unwrap()).unwrap();
    let t = tradeoff_curve(&spec, &DistortionMeasure::hamming(2), &[0.5]).unwrap();
    let expected = 0.1 / (0.5 * common::symmetric_distance(0.1, 2));
    assert!((t[0].xi_min - expected).abs() < 1e-12);
    assert!((t[0].xi_min - 0.3915230378).abs() < 1e-9);
}

#[test]
fn report_carries_method_tags() {
    let spec = uniform_symmetric(2, 0.1);
    let rep = rate_report(&spec, &DistortionMeasure::hamming(2), &RateOptions::default()).unwrap();
    let methods: Vec<MethodTag> = rep.psi2_paths.iter().map(|p| p.method).collect();
    assert_eq!(
        methods,
        vec![
            MethodTag::ClosedForm,
            MethodTag::CollisionForm,
            MethodTag::Trace,
            MethodTag::Optimizer
        ]
    );
    let rows = rep.rows();
    assert!(rows
        .iter()
        .any(|r| r.0 == "beta_threshold" && (r.2 - 5.1858817).abs() < 1e-6));
    assert!(rows.iter().any(|r| r.0 == "d_star" && r.3 == "lp"));
    let json = serde_json::to_value(&rep).unwrap();
    assert_eq!(json["psi2_paths"][3]["method"], "optimizer");
}

#[test]
fn symmetric_distance_for_four_outputs() {
    let spec = SourceSpec::new(Pmf::uniform(2).unwrap(), ChannelKernel::symmetric(2, 4, 0.1).unwrap()).unwrap();
    let d = reforder::distances::bhattacharyya_table(spec.channel()).get(0, 1);
    assert!((d - 0.8841216786715631).abs() < 1e-12);
}
