mod common;

use approx::assert_relative_eq;
use proptest::prelude::*;

use bvks::bounds::{critical_eps, tail_bound, SQRT_HALF_LN2};
use bvks::coefficients::{downward_variation, mcdiarmid_from_clusters, DownwardVariationCase};
use bvks::empirical::{
    ecdf_from_values, lipschitz_sup_interval, sup_deviation_parts, sup_distance_two_sample,
    TrajectoryPanel,
};
use bvks::hypothesis::{one_sample_clustered, two_sample_p_upper, DEFAULT_ALPHAS};
use bvks::montecarlo::rng::StreamRng;
use bvks::{
    critical_statistic, denominator, one_sided_shift, residual, residual_star, BoundParams,
    ClusterSpec, ClusteredSample, RangeSpec, TailSide,
};

fn side() -> impl Strategy<Value = TailSide> {
    prop_oneof![
        Just(TailSide::TwoSided),
        Just(TailSide::PlusSide),
        Just(TailSide::MinusSide)
    ]
}

fn sizes() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..500, 1..60)
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..40)
}

#[test]
fn residual_ratio_on_log_grid() {
    for i in 1..=50 {
        let x = 10f64.powf(12.0 * i as f64 / 50.0);
        let (r, rs) = (residual(x).unwrap(), residual_star(x).unwrap());
        assert_relative_eq!(rs / SQRT_HALF_LN2, r, max_relative = 1e-12);
        assert_eq!(residual(x).unwrap().to_bits(), r.to_bits());
    }
    let x = 1.0 + 1e-9;
    assert_relative_eq!(
        residual_star(x).unwrap() / SQRT_HALF_LN2,
        residual(x).unwrap(),
        max_relative = 1e-12
    );
}

#[test]
fn denominator_increasing_from_four() {
    let grid: Vec<f64> = (0..=400)
        .map(|i| 4.0 * (1e12f64 / 4.0).powf(i as f64 / 400.0))
        .collect();
    for w in grid.windows(2) {
        assert!(
            denominator(w[1]).unwrap() > denominator(w[0]).unwrap(),
            "{w:?}"
        );
    }
}

#[test]
fn triangular_oracle_matches_quadrature() {
    for case in 0..20 {
        let f = common::MonotoneStep::random(&mut StreamRng::new(31, case, 0));
        let (alpha, p) = (1.5, 0.7);
        let (_, rhs) = common::triangular_sides(&f, alpha, p);
        let steps = 200_000;
        let h = 1.0 / steps as f64;
        let quad: f64 = (0..steps)
            .map(|i| {
                let x = (i as f64 + 0.5) * h;
                let idx = f.breaks.partition_point(|&b| b <= x) - 1;
                let excess = (f.levels[idx] - x).max(0.0);
                alpha * p * (p * alpha * excess).exp() * h
            })
            .sum();
        // Midpoint error is O(h) at each step discontinuity.
        assert_relative_eq!(rhs, quad, max_relative = 1e-4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn one_sided_shift_dominates_residual_star(x in 1.0001f64..1e12) {
        prop_assert!(one_sided_shift(x).unwrap() >= residual_star(x).unwrap());
        prop_assert!(denominator(x).unwrap() > 1.0);
    }

    #[test]
    fn tail_bound_nonincreasing(s in side(), a in 0.0f64..5.0, b in 0.0f64..5.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(tail_bound(s, hi).unwrap() <= tail_bound(s, lo).unwrap());
    }

    #[test]
    fn critical_nonincreasing_in_alpha(
        s in side(), c in 1.5f64..1e6, d in 1.0f64..100.0,
        a in 0.001f64..0.999, b in 0.001f64..0.999,
    ) {
        let params = BoundParams::new(c, d).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(
            critical_statistic(&params, s, hi).unwrap() <= critical_statistic(&params, s, lo).unwrap()
        );
    }

    #[test]
    fn critical_round_trip(s in side(), c in 1.5f64..1e6, d in 1.0f64..100.0, alpha in 0.001f64..0.999) {
        let params = BoundParams::new(c, d).unwrap();
        let stat = critical_statistic(&params, s, alpha).unwrap();
        prop_assert!((params.p_upper(s, stat) - alpha).abs() < 1e-9);
        prop_assert!((params.normalize(s, params.sup_at(s, 0.7)) - 0.7).abs() < 1e-12);
        prop_assert!((critical_eps(s, alpha).unwrap() - params.normalize(s, stat)).abs() < 1e-9);
    }

    #[test]
    fn nu_at_most_k(sizes in sizes()) {
        let spec = ClusterSpec::new(sizes.clone()).unwrap();
        let k = sizes.len() as f64;
        let equal = sizes.iter().all(|&s| s == sizes[0]);
        prop_assert!(spec.nu() <= k * (1.0 + 1e-15));
        if equal {
            prop_assert_eq!(spec.nu(), k);
        } else {
            prop_assert!(spec.nu() < k);
        }
    }

    #[test]
    fn cluster_coefficient_identity(sizes in sizes()) {
        let spec = ClusterSpec::new(sizes).unwrap();
        let (c, nu) = (mcdiarmid_from_clusters(&spec), spec.nu());
        prop_assert!(((c - nu) / nu).abs() <= 1e-12);
    }

    #[test]
    fn merging_never_increases_coefficient(sizes in prop::collection::vec(1u64..500, 2..60), i in 0usize..60, j in 0usize..60) {
        let (i, j) = (i % sizes.len(), j % sizes.len());
        prop_assume!(i != j);
        let before = mcdiarmid_from_clusters(&ClusterSpec::new(sizes.clone()).unwrap());
        let mut merged: Vec<u64> = sizes
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i && *k != j)
            .map(|(_, &s)| s)
            .collect();
        merged.push(sizes[i] + sizes[j]);
        let after = mcdiarmid_from_clusters(&ClusterSpec::new(merged).unwrap());
        prop_assert!(after <= before * (1.0 + 1e-12));
    }

    #[test]
    fn downward_variation_scale_covariant(
        bounds in prop::collection::vec((-10.0f64..10.0, 0.01f64..5.0), 1..10),
        scale in 0.1f64..10.0,
    ) {
        let ranges: Vec<RangeSpec> = bounds.iter().map(|&(lo, w)| RangeSpec::new(lo, lo + w).unwrap()).collect();
        let scaled: Vec<RangeSpec> = bounds
            .iter()
            .map(|&(lo, w)| RangeSpec::new(lo * scale, lo * scale + w * scale).unwrap())
            .collect();
        let base = downward_variation(&DownwardVariationCase::FiniteTheta(ranges.clone())).unwrap();
        let grown = downward_variation(&DownwardVariationCase::FiniteTheta(scaled.clone())).unwrap();
        prop_assert!((grown / (base * scale * scale) - 1.0).abs() < 1e-9);
        let base = downward_variation(&DownwardVariationCase::MonotoneReal(ranges[0])).unwrap();
        let grown = downward_variation(&DownwardVariationCase::MonotoneReal(scaled[0])).unwrap();
        prop_assert!((grown / (base * scale * scale) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_sided_is_max_of_sides(a in values(), b in values()) {
        let (f, g) = (ecdf_from_values(&a).unwrap(), ecdf_from_values(&b).unwrap());
        let (plus, minus) = sup_deviation_parts(&f, &g);
        prop_assert_eq!(sup_distance_two_sample(&f, &g, TailSide::TwoSided), plus.max(minus));
        prop_assert_eq!(sup_distance_two_sample(&f, &g, TailSide::PlusSide), plus);
        prop_assert_eq!(sup_distance_two_sample(&f, &g, TailSide::MinusSide), minus);
    }

    #[test]
    fn sup_distance_symmetry(a in values(), b in values()) {
        let (f, g) = (ecdf_from_values(&a).unwrap(), ecdf_from_values(&b).unwrap());
        prop_assert_eq!(
            sup_distance_two_sample(&f, &g, TailSide::TwoSided),
            sup_distance_two_sample(&g, &f, TailSide::TwoSided)
        );
        prop_assert_eq!(
            sup_distance_two_sample(&f, &g, TailSide::PlusSide),
            sup_distance_two_sample(&g, &f, TailSide::MinusSide)
        );
    }

    #[test]
    fn sup_distance_triangle(a in values(), b in values(), c in values()) {
        let (f, g, h) = (
            ecdf_from_values(&a).unwrap(),
            ecdf_from_values(&b).unwrap(),
            ecdf_from_values(&c).unwrap(),
        );
        let d = |x, y| sup_distance_two_sample(x, y, TailSide::TwoSided);
        prop_assert!(d(&f, &h) <= d(&f, &g) + d(&g, &h) + 1e-15);
    }

    #[test]
    fn jump_points_match_dense_grid(seed in any::<u64>()) {
        let mut rng = StreamRng::new(seed, 0, 1);
        let (f, g) = (common::random_cdf(&mut rng, 20), common::random_cdf(&mut rng, 20));
        for s in TailSide::ALL {
            prop_assert_eq!(sup_distance_two_sample(&f, &g, s), common::dense_grid_sup(&f, &g, s));
        }
    }

    #[test]
    fn lipschitz_interval_width(
        n_times in 2usize..20,
        units in prop::collection::vec((0.0f64..1.0, -1.0f64..1.0, 0.0f64..1.0, -1.0f64..1.0), 1..6),
        k_lip in 1.0f64..4.0,
    ) {
        let times: Vec<f64> = (0..n_times).map(|i| i as f64 / (n_times - 1) as f64).collect();
        // Clamped lines stay k_lip-Lipschitz.
        let path = |start: f64, slope: f64| -> Vec<f64> {
            times.iter().map(|t| (start + slope * t).clamp(0.0, 1.0)).collect()
        };
        let f = TrajectoryPanel::new(times.clone(), units.iter().map(|u| path(u.0, u.1)).collect(), k_lip).unwrap();
        let g = TrajectoryPanel::new(times.clone(), units.iter().map(|u| path(u.2, u.3)).collect(), k_lip).unwrap();
        let iv = lipschitz_sup_interval(&f, &g).unwrap();
        prop_assert!(iv.lower <= iv.upper);
        prop_assert!(((iv.upper - iv.lower) - k_lip * f.delta()).abs() < 1e-12);
    }

    #[test]
    fn decisions_agree(
        obs in prop::collection::vec((0.0f64..1.0, 0u8..12), 5..80),
        s in side(),
    ) {
        let sample = ClusteredSample::new(obs.iter().map(|&(v, c)| (v, c.to_string()))).unwrap();
        prop_assume!(sample.cluster_spec().nu() > 1.0);
        let outcome = one_sample_clustered(&sample, |x| x.clamp(0.0, 1.0), s, &DEFAULT_ALPHAS).unwrap();
        for alpha in DEFAULT_ALPHAS {
            let by_critical = outcome.statistic > outcome.critical_at(alpha).unwrap();
            prop_assert_eq!(by_critical, outcome.rejects(alpha));
        }
    }

    #[test]
    fn p_upper_nonincreasing_in_statistic(
        nu in 1.5f64..1e4, xi in 1.5f64..1e4, s in side(), a in 0.0f64..1.0, b in 0.0f64..1.0,
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(two_sample_p_upper(nu, xi, s, hi) <= two_sample_p_upper(nu, xi, s, lo));
        let params = BoundParams::new(nu, 1.0).unwrap();
        prop_assert!(params.p_upper(s, hi) <= params.p_upper(s, lo));
    }

    #[test]
    fn unequal_clusters_never_help(
        k in 4usize..40, base in 2u64..50, moves in prop::collection::vec((0usize..40, 0usize..40), 1..20),
        stat in 0.0f64..0.6,
    ) {
        // Move units between clusters: same K and n, larger size variance.
        let mut sizes = vec![base; k];
        let mut previous = ClusterSpec::new(sizes.clone()).unwrap().nu();
        for (i, j) in moves {
            let (i, j) = (i % k, j % k);
            if i == j || sizes[i] < 2 || sizes[j] < sizes[i] {
                continue;
            }
            sizes[i] -= 1;
            sizes[j] += 1;
            let nu = ClusterSpec::new(sizes.clone()).unwrap().nu();
            prop_assert!(nu <= previous * (1.0 + 1e-12));
            if nu >= 4.0 {
                let p_before = BoundParams::new(previous, 1.0).unwrap().p_upper(TailSide::TwoSided, stat);
                let p_after = BoundParams::new(nu, 1.0).unwrap().p_upper(TailSide::TwoSided, stat);
                prop_assert!(p_after >= p_before - 1e-15);
            }
            previous = nu;
        }
    }
}
