use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use framecoh::bounds::{bound_3d, complex_bound, real_bound, welch_bound};
use framecoh::equivalence::{
    apply_flip, apply_wiggle, exhaustive_flip_oracle, linear_time_flip, FlipPattern,
    WigglePattern,
};
use framecoh::{average_coherence, spectral_norm, worst_case_coherence, Frame};

/// Random frame with unit columns; `complex` picks the field.
fn frame_strategy(max_rows: usize, max_cols: usize, complex: bool) -> impl Strategy<Value = Frame> {
    (1..=max_rows)
        .prop_flat_map(move |m| (Just(m), (m + 1).max(2)..=max_cols.max(m + 1)))
        .prop_flat_map(move |(m, n)| {
            let len = m * n * if complex { 2 } else { 1 };
            (Just(m), Just(n), prop::collection::vec(-1.0f64..1.0, len))
        })
        .prop_filter_map("degenerate column", move |(m, n, v)| {
            if complex {
                let data = v.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
                Frame::from_complex(m, n, data).ok()
            } else {
                Frame::from_real(m, n, v).ok()
            }
        })
}

fn any_frame() -> impl Strategy<Value = Frame> {
    prop_oneof![frame_strategy(6, 14, false), frame_strategy(6, 14, true)]
}

fn naive_gram(f: &Frame) -> Vec<Vec<Complex64>> {
    let n = f.cols();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..f.rows()).map(|r| f.get(r, i).conj() * f.get(r, j)).sum())
                .collect()
        })
        .collect()
}

fn naive_mu_nu(f: &Frame) -> (f64, f64) {
    let g = naive_gram(f);
    let n = g.len();
    let mut mu = 0.0f64;
    let mut nu = 0.0f64;
    for (i, gi) in g.iter().enumerate() {
        let mut row = Complex64::new(0.0, 0.0);
        for (_, &v) in gi.iter().enumerate().filter(|&(j, _)| j != i) {
            mu = mu.max(v.norm());
            row += v;
        }
        nu = nu.max(row.norm() / (n - 1) as f64);
    }
    (mu, nu)
}

fn signs_strategy(n: usize) -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coherence_matches_naive_gram(f in any_frame()) {
        let (mu, nu) = naive_mu_nu(&f);
        prop_assert!((worst_case_coherence(&f).unwrap() - mu).abs() <= 1e-12);
        prop_assert!((average_coherence(&f).unwrap() - nu).abs() <= 1e-12);
    }

    #[test]
    fn flipping_twice_is_identity(
        (f, signs) in any_frame().prop_flat_map(|f| { let n = f.cols(); (Just(f), signs_strategy(n)) })
    ) {
        let p = FlipPattern::new(signs).unwrap();
        let twice = apply_flip(&apply_flip(&f, &p).unwrap(), &p).unwrap();
        prop_assert_eq!(twice, f);
    }

    #[test]
    fn wiggling_preserves_norms_mu_and_spectral_norm(
        (f, angles) in any_frame().prop_flat_map(|f| {
            let n = f.cols();
            (Just(f), prop::collection::vec(0.0..2.0 * PI, n))
        })
    ) {
        let g = apply_wiggle(&f, &WigglePattern::from_angles(&angles)).unwrap();
        for (a, b) in g.column_norms().iter().zip(f.column_norms()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        prop_assert!((worst_case_coherence(&g).unwrap() - worst_case_coherence(&f).unwrap()).abs() <= 1e-12);
        let (sg, sf) = (spectral_norm(&g, 1e-14).unwrap(), spectral_norm(&f, 1e-14).unwrap());
        prop_assert!((sg - sf).abs() <= 1e-12 * sf.max(1.0));
    }

    #[test]
    fn spectral_norm_matches_dense_eigensolver(f in any_frame()) {
        let a = DMatrix::from_fn(f.rows(), f.cols(), |r, c| f.get(r, c));
        let top = (a.adjoint() * a).symmetric_eigenvalues().iter().fold(0.0f64, |m, &v| m.max(v)).sqrt();
        let ours = spectral_norm(&f, 1e-14).unwrap();
        prop_assert!((ours - top).abs() <= 1e-8 * top, "{} vs {}", ours, top);
    }

    #[test]
    fn coherence_is_permutation_invariant(
        (f, perm) in any_frame().prop_flat_map(|f| {
            let n = f.cols();
            (Just(f), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        })
    ) {
        let g = f.select_columns(&perm).unwrap();
        prop_assert!((worst_case_coherence(&g).unwrap() - worst_case_coherence(&f).unwrap()).abs() <= 1e-12);
        prop_assert!((average_coherence(&g).unwrap() - average_coherence(&f).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn measured_coherence_respects_every_bound(f in any_frame()) {
        let (m, n) = (f.rows(), f.cols());
        let mu = worst_case_coherence(&f).unwrap();
        prop_assert!(mu >= welch_bound(m, n).unwrap() - 1e-12);
        if m >= 2 {
            prop_assert!(mu >= complex_bound(m, n).unwrap() - 1e-12);
            if f.as_real().is_some() {
                prop_assert!(mu >= real_bound(m, n).unwrap() - 1e-12);
                if m == 3 {
                    prop_assert!(mu >= bound_3d(n).unwrap() - 1e-12);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_matches_full_enumeration(f in prop_oneof![frame_strategy(4, 10, false), frame_strategy(4, 9, true)]) {
        let n = f.cols();
        let oracle = exhaustive_flip_oracle(&f).unwrap();
        let mut best = f64::INFINITY;
        for index in 0..1u64 << n {
            let p = FlipPattern::from_index(index, n);
            best = best.min(naive_mu_nu(&apply_flip(&f, &p).unwrap()).1);
        }
        prop_assert!((oracle.min_nu - best).abs() <= 1e-12, "{} vs {}", oracle.min_nu, best);
        prop_assert!((average_coherence(&oracle.frame).unwrap() - oracle.min_nu).abs() <= 1e-12);
        prop_assert_eq!(oracle.pattern.signs()[0], 1);
        let (g, _) = linear_time_flip(&f).unwrap();
        prop_assert!(oracle.min_nu <= average_coherence(&g).unwrap() + 1e-12);
    }
}
