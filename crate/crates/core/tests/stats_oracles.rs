mod common;

use agency_audit::stats::{fleiss_kappa, kde, silverman_bandwidth, t_test, Alternative, KappaInput, TestVariant};
use common::{close, read_json};
use proptest::prelude::*;
use serde::Deserialize;

#[derive(Deserialize)]
struct TResult {
    variant: String,
    alternative: String,
    t: f64,
    df: f64,
    p: f64,
}

#[derive(Deserialize)]
struct TCase {
    a: Vec<f64>,
    b: Vec<f64>,
    results: Vec<TResult>,
}

#[test]
fn t_tests_match_reference() {
    let cases: Vec<TCase> = read_json("ttest_oracle.json");
    assert_eq!(cases.len(), 51);
    let mut checked = 0;
    for (i, c) in cases.iter().enumerate() {
        for r in &c.results {
            let got = t_test(&c.a, &c.b, r.variant.parse().unwrap(), r.alternative.parse().unwrap()).unwrap();
            assert!(close(got.t_stat, r.t, 1e-9), "case {i} {} {}: t {} vs {}", r.variant, r.alternative, got.t_stat, r.t);
            assert!(close(got.df, r.df, 1e-9), "case {i}: df {} vs {}", got.df, r.df);
            assert!((got.p_value - r.p).abs() <= 1e-9, "case {i} {} {}: p {} vs {}", r.variant, r.alternative, got.p_value, r.p);
            checked += 1;
        }
    }
    assert_eq!(checked, 50 * 6 + 1);
}

#[test]
fn pooled_textbook_pair() {
    let r = t_test(&[2.0, 4.0, 6.0, 8.0], &[1.0, 3.0, 5.0, 7.0], TestVariant::Pooled, Alternative::Greater).unwrap();
    assert!(close(r.t_stat, 0.5477225575051661, 1e-12));
    assert_eq!(r.df, 6.0);
}

#[derive(Deserialize)]
struct KappaCase {
    counts: Vec<Vec<u64>>,
    kappa: f64,
}

#[test]
fn fleiss_kappa_matches_reference() {
    let cases: Vec<KappaCase> = read_json("kappa_oracle.json");
    assert_eq!(cases.len(), 21);
    for (i, c) in cases.iter().enumerate() {
        let k = fleiss_kappa(&KappaInput::new(c.counts.clone()).unwrap()).unwrap();
        assert!((k - c.kappa).abs() <= 1e-9, "case {i}: {k} vs {}", c.kappa);
    }
}

#[derive(Deserialize)]
struct KdeCase {
    values: Vec<f64>,
    bandwidth: f64,
    grid: Vec<f64>,
    density: Vec<f64>,
}

#[test]
fn kde_matches_reference() {
    let cases: Vec<KdeCase> = read_json("kde_oracle.json");
    for (i, c) in cases.iter().enumerate() {
        assert!(close(silverman_bandwidth(&c.values).unwrap(), c.bandwidth, 1e-12), "case {i}");
        let s = kde(&c.values, None, c.grid.len()).unwrap();
        for (j, ((x, d), (rx, rd))) in s.grid.iter().zip(&s.density).zip(c.grid.iter().zip(&c.density)).enumerate() {
            assert!(close(*x, *rx, 1e-12), "case {i} grid {j}: {x} vs {rx}");
            assert!((d - rd).abs() <= 1e-9, "case {i} point {j}: {d} vs {rd}");
        }
        assert!((s.integral() - 1.0).abs() < 0.01, "case {i}: integral {}", s.integral());
    }
}

fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, 2..40)
}

proptest! {
    #[test]
    fn identical_samples_are_neutral(a in sample()) {
        prop_assume!(a.iter().any(|x| (x - a[0]).abs() > 1e-9));
        for v in [TestVariant::Welch, TestVariant::Pooled] {
            let r = t_test(&a, &a, v, Alternative::Greater).unwrap();
            prop_assert_eq!(r.t_stat, 0.0);
            prop_assert_eq!(r.p_value, 0.5);
        }
    }

    #[test]
    fn one_sided_p_values_are_complementary(a in sample(), b in sample()) {
        prop_assume!(a.iter().any(|x| (x - a[0]).abs() > 1e-9));
        let g = t_test(&a, &b, TestVariant::Welch, Alternative::Greater).unwrap();
        let l = t_test(&a, &b, TestVariant::Welch, Alternative::Less).unwrap();
        let two = t_test(&a, &b, TestVariant::Welch, Alternative::TwoSided).unwrap();
        prop_assert!((g.p_value + l.p_value - 1.0).abs() < 1e-9);
        prop_assert!((two.p_value - (2.0 * g.p_value.min(l.p_value)).min(1.0)).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&g.p_value));
    }

    #[test]
    fn kde_integrates_to_one(values in sample()) {
        prop_assume!(values.iter().any(|x| (x - values[0]).abs() > 1e-6));
        let s = kde(&values, None, 512).unwrap();
        prop_assert!((s.integral() - 1.0).abs() < 0.01, "integral {}", s.integral());
        prop_assert!(s.density.iter().all(|d| *d >= 0.0));
    }

    #[test]
    fn unanimous_ratings_give_one(rows in prop::collection::vec(0usize..3, 2..30), raters in 2u64..8) {
        prop_assume!(rows.iter().any(|&c| c != rows[0]));
        let counts = rows.iter().map(|&c| { let mut r = vec![0; 3]; r[c] = raters; r }).collect();
        prop_assert_eq!(fleiss_kappa(&KappaInput::new(counts).unwrap()).unwrap(), 1.0);
    }
}
