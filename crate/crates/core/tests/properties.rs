use ibf_core::data::{group_stats, parse_survival_csv, BernoulliSummary, CensoredObservation, GroupStats, SurvivalDataset};
use ibf_core::linear::{findley_ibf, gram_determinant, Weighting};
use ibf_core::marginals::{bernoulli_bf10, exp_bf10, exp_ts_bf01, poisson_bf10, poisson_ts_bf01, twoexp_ts_bf01};
use ibf_core::numerics::RngStream;
use ibf_core::selection::{combine, posterior_prob_m1, AverageMode};
use ibf_core::training::{binet_cauchy_weights, normal_surrogate};
use ibf_core::data::PoissonObservation;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn observation() -> impl Strategy<Value = CensoredObservation> {
    (1u32..10_000, any::<bool>()).prop_map(|(t, obs)| {
        let v = t as f64 / 8.0;
        if obs {
            CensoredObservation::observed(v).unwrap()
        } else {
            CensoredObservation::censored(v).unwrap()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rng_streams_are_deterministic(seed in any::<u64>(), stream in any::<u64>()) {
        let mut a = RngStream::new(seed, stream);
        let mut b = RngStream::new(seed, stream);
        for _ in 0..16 {
            prop_assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
            prop_assert_eq!(a.standard_normal().to_bits(), b.standard_normal().to_bits());
        }
    }

    #[test]
    fn survival_csv_round_trip(
        a in prop::collection::vec(observation(), 1..12),
        b in prop::collection::vec(observation(), 0..12),
    ) {
        let mut d = SurvivalDataset::new();
        d.insert_group("alpha", a);
        if !b.is_empty() {
            d.insert_group("beta", b);
        }
        prop_assert_eq!(parse_survival_csv(&d.to_csv()).unwrap(), d);
    }

    #[test]
    fn group_stats_ignore_order(obs in prop::collection::vec(observation(), 1..15), rot in 0usize..15) {
        let mut shuffled = obs.clone();
        let k = rot % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let stats = |o: Vec<CensoredObservation>| {
            let mut d = SurvivalDataset::new();
            d.insert_group("g", o);
            group_stats(&d).unwrap()[0].1
        };
        let (x, y) = (stats(obs), stats(shuffled));
        prop_assert_eq!((x.n_u, x.n_c), (y.n_u, y.n_c));
        prop_assert!((x.total_time - y.total_time).abs() <= 1e-12 * x.total_time);
    }

    #[test]
    fn binet_cauchy_weights_sum_to_one(n in 4usize..=10, k in 1usize..=3, seed in any::<u64>(), extra in 0usize..2) {
        let mut rng = RngStream::new(seed, 0);
        let x = DMatrix::from_fn(n, k, |_, _| rng.standard_normal());
        let s = (k + extra).min(n);
        let w = binet_cauchy_weights(&x, s).unwrap();
        prop_assert!((w.probabilities.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        prop_assert!(w.probabilities.iter().all(|p| *p >= 0.0));
    }

    #[test]
    fn normal_surrogate_keeps_mean_and_ss(
        xbar in -100.0f64..100.0,
        s2 in 1e-3f64..1e3,
        n in 3usize..40,
        seed in any::<u64>(),
    ) {
        let x = normal_surrogate(xbar, s2, n, &mut RngStream::new(seed, 1)).unwrap();
        let m = x.iter().sum::<f64>() / n as f64;
        let ss: f64 = x.iter().map(|v| (v - m).powi(2)).sum();
        prop_assert!((m - xbar).abs() <= 1e-12 * (1.0 + xbar.abs()));
        prop_assert!((ss - s2).abs() <= 1e-10 * s2);
    }

    #[test]
    fn two_sample_training_factor_is_at_most_a_quarter(t1 in 1e-6f64..1e6, t2 in 1e-6f64..1e6) {
        prop_assert!(twoexp_ts_bf01(t1, t2).unwrap() <= 0.25);
        prop_assert_eq!(twoexp_ts_bf01(t1, t1).unwrap(), 0.25);
    }

    #[test]
    fn training_sample_factors_are_reciprocal(t in 1e-3f64..1e2, theta0 in 1e-3f64..5.0) {
        let single = GroupStats { n_u: 1, n_c: 0, total_time: t };
        let e = exp_bf10(&single, theta0).unwrap() + exp_ts_bf01(t, theta0).unwrap().ln();
        prop_assert!(e.abs() <= 1e-9 * (1.0 + (t * theta0).abs()));
        let obs = PoissonObservation::new(1, t).unwrap();
        let p = poisson_bf10(&obs, theta0).unwrap() + poisson_ts_bf01(t, theta0).unwrap().ln();
        prop_assert!(p.abs() <= 1e-9 * (1.0 + (t * theta0).abs()));
    }

    #[test]
    fn bernoulli_pair_factors_are_reciprocal(theta0 in 0.001f64..0.999) {
        let pair = BernoulliSummary::new(2, 1).unwrap();
        let lhs = bernoulli_bf10(&pair, theta0).unwrap();
        prop_assert!((lhs + (theta0 * (1.0 - theta0)).ln()).abs() <= 1e-12);
    }

    #[test]
    fn arithmetic_combination_is_linear_in_weights(
        b in prop::collection::vec(0.01f64..10.0, 2..8),
        lam in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let n = b.len();
        let mut rng = RngStream::new(seed, 2);
        let mut w = |_: usize| -> Vec<f64> {
            let raw: Vec<f64> = (0..n).map(|_| rng.uniform() + 0.01).collect();
            let s: f64 = raw.iter().sum();
            raw.iter().map(|v| v / s).collect()
        };
        let (w1, w2) = (w(0), w(1));
        let mix: Vec<f64> = w1.iter().zip(&w2).map(|(a, c)| lam * a + (1.0 - lam) * c).collect();
        let avg = |w: &[f64]| combine(AverageMode::Arithmetic, 0.0, &b, w).unwrap().log_bf10.exp();
        let want = lam * avg(&w1) + (1.0 - lam) * avg(&w2);
        prop_assert!((avg(&mix) - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn full_data_as_training_sample_is_neutral(log_full in -50.0f64..50.0) {
        let b01 = [(-log_full).exp()];
        for mode in [AverageMode::Arithmetic, AverageMode::Geometric, AverageMode::Median] {
            prop_assert!(combine(mode, log_full, &b01, &[1.0]).unwrap().log_bf10.abs() <= 1e-12);
        }
    }

    #[test]
    fn posterior_probability_increases_with_bf(a in 1e-6f64..1e6, f in 1.0001f64..10.0, odds in 0.01f64..100.0) {
        prop_assert!(posterior_prob_m1(a * f, odds).unwrap() > posterior_prob_m1(a, odds).unwrap());
    }

    #[test]
    fn findley_single_observation_is_neutral(x in -10.0f64..10.0, d in 0.01f64..10.0, neg in any::<bool>()) {
        let d = if neg { -d } else { d };
        for w in [Weighting::Uniform, Weighting::Information] {
            prop_assert!(findley_ibf(&[x], &[d], w).unwrap().log_bf10.abs() <= 1e-12);
        }
    }

    #[test]
    fn orthogonal_columns_give_product_of_norms(seed in any::<u64>(), n in 3usize..12) {
        let mut rng = RngStream::new(seed, 3);
        let a: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        let b0: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
        let aa: f64 = a.iter().map(|v| v * v).sum();
        let ab: f64 = a.iter().zip(&b0).map(|(p, q)| p * q).sum();
        let b: Vec<f64> = b0.iter().zip(&a).map(|(q, p)| q - ab / aa * p).collect();
        let bb: f64 = b.iter().map(|v| v * v).sum();
        let x = DMatrix::from_fn(n, 2, |r, c| if c == 0 { a[r] } else { b[r] });
        prop_assert!((gram_determinant(&x) - aa * bb).abs() <= 1e-10 * aa * bb);
    }
}
