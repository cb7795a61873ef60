mod common;

use rand::Rng;
use somqe::stats::{linear_fit, pearson, two_tailed_p, Series};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn ols_matches_exact_integer_oracle() {
    let mut r = common::rng(2024);
    for trial in 0..1000 {
        let (xs, ys, points) = common::random_lattice_series(&mut r);
        let fit = match linear_fit(&Series::new("s", points).unwrap()) {
            Ok(f) => f,
            Err(e) => panic!("trial {trial}: {e}"),
        };
        let (os, oi, or2) = common::exact_ols(&xs, &ys);
        assert!(rel(fit.slope, os) < 1e-10, "trial {trial} slope {} vs {os}", fit.slope);
        assert!(
            rel(fit.intercept, oi) < 1e-10,
            "trial {trial} intercept {} vs {oi}",
            fit.intercept
        );
        assert!(rel(fit.r2, or2) < 1e-10, "trial {trial} r2 {} vs {or2}", fit.r2);
    }
}

#[test]
fn p_values_match_quadrature() {
    for df in [1usize, 2, 3, 5, 10, 23, 60, 200] {
        for t in [0.05, 0.5, 1.0, 2.069, 3.768, 6.0] {
            let p = two_tailed_p(t, df).unwrap();
            let oracle = common::t_tail_by_quadrature(t, df);
            assert!((p - oracle).abs() < 1e-10, "df={df} t={t}: {p} vs {oracle}");
        }
    }
}

#[test]
fn p_closed_forms() {
    for t in [0.3, 1.7, 9.0] {
        let df2 = 1.0 - t / (t * t + 2.0f64).sqrt();
        assert!((two_tailed_p(t, 2).unwrap() - df2).abs() < 1e-12);
    }
}

#[test]
fn frozen_critical_values() {
    // Frozen from the quadrature oracle.
    let p05 = common::t_tail_by_quadrature(2.069, 23);
    let p001 = common::t_tail_by_quadrature(3.768, 23);
    assert!((p05 - 0.049965139542).abs() < 1e-9);
    assert!((p001 - 0.000999079809).abs() < 1e-9);
    assert!((two_tailed_p(2.069, 23).unwrap() - 0.05).abs() < 0.001);
    assert!((two_tailed_p(3.768, 23).unwrap() - 0.001).abs() < 0.0002);
}

#[test]
fn p_strictly_decreases_in_t() {
    for df in [1, 4, 23] {
        let mut prev = 1.0;
        for i in 1..200 {
            let p = two_tailed_p(i as f64 * 0.05, df).unwrap();
            assert!(p < prev, "df {df} step {i}");
            prev = p;
        }
    }
}

#[test]
fn fit_r2_equals_pearson_squared() {
    let mut r = common::rng(8);
    for _ in 0..200 {
        let pts: Vec<(f64, f64)> = (0..15)
            .map(|_| (r.random_range(-5.0..5.0), r.random_range(-5.0..5.0)))
            .collect();
        let s = Series::new("y", pts.clone()).unwrap();
        let xs = Series::new("x", pts.iter().map(|p| (p.0, p.0)).collect()).unwrap();
        let fit = linear_fit(&s).unwrap();
        let c = pearson(&xs, &s).unwrap();
        assert!((fit.r2 - c.r * c.r).abs() < 1e-12);
        assert!((c.t - c.r.abs() * (c.df as f64 / (1.0 - c.r * c.r)).sqrt()).abs() < 1e-9);
    }
}
