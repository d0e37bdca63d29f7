use std::f64::consts::PI;

use framecoh::bounds::{complex_bound, gamma_half_integer, gamma_ratio, real_bound, welch_bound};

/// `ln Γ(z)` from the Stirling series after shifting `z` above 20.
fn ln_gamma_stirling(mut z: f64) -> f64 {
    let mut shift = 0.0;
    while z < 20.0 {
        shift -= z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    shift + (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series
}

#[test]
fn half_integer_gamma_matches_stirling() {
    for k in 0..=64u32 {
        let z = k as f64 + 0.5;
        let ours = gamma_half_integer(2 * k + 1);
        let oracle = ln_gamma_stirling(z).exp();
        assert!(((ours - oracle) / oracle).abs() <= 1e-12, "Γ({z}): {ours} vs {oracle}");
    }
    for k in 1..=64u32 {
        let ours = gamma_half_integer(2 * k);
        let oracle = ln_gamma_stirling(k as f64).exp();
        assert!(((ours - oracle) / oracle).abs() <= 1e-12, "Γ({k})");
    }
}

#[test]
fn gamma_ratio_matches_stirling_far_past_overflow() {
    for m in 2..=2000usize {
        let oracle = (ln_gamma_stirling((m as f64 - 1.0) / 2.0) - ln_gamma_stirling(m as f64 / 2.0)).exp();
        let ours = gamma_ratio(m);
        assert!(((ours - oracle) / oracle).abs() <= 1e-11, "M = {m}: {ours} vs {oracle}");
    }
}

#[test]
fn bounds_increase_in_n_and_decrease_in_m() {
    for m in 2..=8 {
        for n in m + 1..200 {
            assert!(welch_bound(m, n + 1).unwrap() >= welch_bound(m, n).unwrap());
            assert!(complex_bound(m, n + 1).unwrap() >= complex_bound(m, n).unwrap());
            assert!(real_bound(m, n + 1).unwrap() >= real_bound(m, n).unwrap());
        }
    }
    for n in [50, 100, 1000] {
        for m in 2..20 {
            assert!(welch_bound(m + 1, n).unwrap() <= welch_bound(m, n).unwrap());
            assert!(complex_bound(m + 1, n).unwrap() <= complex_bound(m, n).unwrap());
        }
    }
}

#[test]
fn cosine_inequality_on_a_grid() {
    for i in 0..10_000 {
        let a = 2.0 + i as f64 * 0.01;
        assert!((PI / a).cos() >= 1.0 - 2.0 / a - 1e-15, "a = {a}");
    }
}

#[test]
fn bounds_never_exceed_one() {
    for m in 2..10 {
        for n in 2..500 {
            assert!(welch_bound(m, n).unwrap() <= 1.0);
            assert!(complex_bound(m, n).unwrap() < 1.0);
            assert!(real_bound(m, n).unwrap() < 1.0);
        }
    }
}

#[test]
fn exponential_growth_limits() {
    let a = 4usize;
    let complex: Vec<f64> = [8u32, 12, 16].iter().map(|&m| complex_bound(m as usize, a.pow(m)).unwrap()).collect();
    for w in complex.windows(2) {
        assert!((w[1] - 0.5).abs() < (w[0] - 0.5).abs(), "{complex:?}");
    }
    let limit = (PI / a as f64).cos();
    let real: Vec<f64> = [8u32, 12, 16, 20, 24, 28].iter().map(|&m| real_bound(m as usize, a.pow(m)).unwrap()).collect();
    // Decreasing, and within 1e-3 of cos(π/a) by M = 28.
    assert!(real.windows(2).all(|w| w[1] < w[0]), "{real:?}");
    assert!((real.last().unwrap() - limit).abs() < 1e-3, "{real:?}");
    assert!(real.last().unwrap() > complex.last().unwrap());
}
