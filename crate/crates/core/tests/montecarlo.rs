use std::collections::BTreeMap;

use bvks::hypothesis::{one_sample_clustered, DEFAULT_ALPHAS};
use bvks::montecarlo::rng::StreamRng;
use bvks::montecarlo::{
    binomial_grid_histogram, conjecture_refutation_experiment, iid_coverage, sharpness_experiment,
};
use bvks::{ClusteredSample, TailSide};

/// Exact law of `max_j |2U_j − n|` by walking all `2^{nm}` coin patterns.
fn enumerate(n: u64, m: u64) -> BTreeMap<u64, f64> {
    let total = 1u64 << (n * m);
    let mut counts = BTreeMap::new();
    for pattern in 0..total {
        let dev = (0..m)
            .map(|j| {
                let u = ((pattern >> (j * n)) & ((1 << n) - 1)).count_ones() as u64;
                (2 * u).abs_diff(n)
            })
            .max()
            .unwrap();
        *counts.entry(dev).or_insert(0u64) += 1;
    }
    counts
        .into_iter()
        .map(|(dev, c)| (dev, c as f64 / total as f64))
        .collect()
}

#[test]
fn grid_matches_full_enumeration() {
    let trials = 100_000;
    for (n, m) in [
        (1, 1),
        (2, 2),
        (3, 2),
        (1, 8),
        (4, 4),
        (2, 8),
        (16, 1),
        (5, 3),
    ] {
        let exact = enumerate(n, m);
        let hist = binomial_grid_histogram(n, m, trials, n * 100 + m).unwrap();
        assert_eq!(hist.len(), exact.len(), "atoms for (n, m) = ({n}, {m})");
        for ((value, count), (dev, p)) in hist.iter().zip(&exact) {
            assert_eq!(*value, *dev as f64 / (2.0 * (n * m) as f64));
            let se = (p * (1.0 - p) / trials as f64).sqrt();
            let freq = *count as f64 / trials as f64;
            assert!(
                (freq - p).abs() <= 4.0 * se,
                "(n, m) = ({n}, {m}), value {value}: {freq} vs {p}"
            );
        }
    }
}

#[test]
fn reports_independent_of_thread_count() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                (
                    iid_coverage(50, 2000, 3, &[0.5, 1.0], TailSide::PlusSide).unwrap(),
                    conjecture_refutation_experiment(16, &[1, 50], 0.25, 1000, 3).unwrap(),
                    sharpness_experiment(20, 0.3, 1000, 3).unwrap(),
                    binomial_grid_histogram(70, 3, 2000, 3).unwrap(),
                )
            })
    };
    let single = run(1);
    for threads in [2, 5] {
        let multi = run(threads);
        assert_eq!(
            serde_json::to_string(&single.0).unwrap(),
            serde_json::to_string(&multi.0).unwrap()
        );
        assert_eq!(single.1, multi.1);
        assert_eq!(single.2, multi.2);
        assert_eq!(single.3, multi.3);
    }
}

#[test]
fn different_seeds_differ() {
    let a = iid_coverage(50, 500, 1, &[1.0], TailSide::TwoSided).unwrap();
    let b = iid_coverage(50, 500, 2, &[1.0], TailSide::TwoSided).unwrap();
    assert_ne!(a.rows[0].comparison, b.rows[0].comparison);
}

#[test]
fn refutation_grows_toward_one() {
    let report =
        conjecture_refutation_experiment(16, &[1, 3, 10, 30, 100, 300, 1000], 0.25, 2000, 17)
            .unwrap();
    for w in report.rows.windows(2) {
        let noise = 3.0 * (w[0].stderr + w[1].stderr);
        assert!(w[1].empirical + noise >= w[0].empirical);
        assert!(w[1].exact.unwrap() > w[0].exact.unwrap());
    }
    let last = report.rows.last().unwrap();
    assert!(last.empirical > last.bound && last.violation);
    assert!(!report.rows[0].violation);
    for row in &report.rows {
        assert!(row.agrees_with_exact(4.0, 2000), "{row:?}");
    }
}

#[test]
fn raw_statistic_is_the_less_conservative_one() {
    let report = iid_coverage(100, 2000, 5, &[0.5, 1.0], TailSide::TwoSided).unwrap();
    for row in &report.rows {
        assert!(row.comparison.unwrap() >= row.empirical);
    }
}

#[test]
fn one_sample_test_conservative_under_null() {
    let trials = 2000u64;
    let mut rejections = [0u64; 3];
    for t in 0..trials {
        let mut rng = StreamRng::new(23, t, 0);
        // 12 clusters of uneven size, iid uniform values: the null holds.
        let obs: Vec<(f64, String)> = (0..90)
            .map(|i| (rng.next_f64(), (i % 12 + i % 5).to_string()))
            .collect();
        let sample = ClusteredSample::new(obs).unwrap();
        let outcome = one_sample_clustered(
            &sample,
            |x| x.clamp(0.0, 1.0),
            TailSide::TwoSided,
            &DEFAULT_ALPHAS,
        )
        .unwrap();
        for (k, alpha) in DEFAULT_ALPHAS.iter().enumerate() {
            rejections[k] += outcome.rejects(*alpha) as u64;
        }
    }
    for (k, alpha) in DEFAULT_ALPHAS.iter().enumerate() {
        assert!((rejections[k] as f64 / trials as f64) <= *alpha);
    }
}

#[test]
fn sharpness_reports_truncation() {
    let report = sharpness_experiment(60, 0.1, 1, 1).unwrap();
    assert_eq!(report.config.m, bvks::montecarlo::MAX_GRID_CELLS);
    assert_eq!(report.notices.len(), 1);
}
