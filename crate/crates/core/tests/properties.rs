use std::sync::Arc;

use mishchenko_core::algebra::{contour_spectral_projection, AlgebraMatrix, FiniteGroup};
use mishchenko_core::chern::Cochain;
use mishchenko_core::fixtures::{random_fiber, random_similar, Backend};
use mishchenko_core::index::idempotent_census;
use mishchenko_core::space::{enumerate_tuples, OpenCover};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn backend(k: u8) -> Backend {
    match k % 3 {
        0 => Backend::Matrix(2),
        1 => Backend::Group(FiniteGroup::klein()),
        _ => Backend::Circle(3),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trace_is_tracial(k in 0u8..3, seed in 0u64..1000) {
        let b = backend(k);
        let alg = b.algebra().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = b.random_hermitian(&alg, 2, 1.0, &mut rng).unwrap();
        let y = b.random_hermitian(&alg, 2, 1.0, &mut rng).unwrap().scale(Complex64::new(0.3, 0.8));
        let xy = x.mul(&y).unwrap().trace_phi();
        let yx = y.mul(&x).unwrap().trace_phi();
        prop_assert!((xy - yx).norm() < 1e-12);
    }

    #[test]
    fn spectral_projection_fixes_projections(k in 0u8..3, seed in 0u64..1000, rank in 0usize..3) {
        let q = random_fiber(&backend(k), 2, rank, seed).unwrap();
        let e = contour_spectral_projection(&q, 64).unwrap();
        prop_assert!(e.max_abs_diff(&q).unwrap() < 1e-12);
    }

    #[test]
    fn census_trace_is_similarity_invariant(k in 0u8..3, seed in 0u64..1000, rank in 0usize..3) {
        let b = backend(k);
        let q = random_fiber(&b, 2, rank, seed).unwrap();
        let e = random_similar(&b, &q, 0.3, seed + 1).unwrap();
        let r = idempotent_census(&[e, q.clone()]).unwrap();
        prop_assert!((r.entries[0].trace_re - q.trace_phi().re).abs() < 1e-10);
        prop_assert!(r.max_imaginary < 1e-10);
    }

    #[test]
    fn coboundary_squares_to_zero(seed in 0u64..1000, points in 8usize..20) {
        let cover = Arc::new(OpenCover::circle_arcs(points, 3, 1).unwrap());
        let t3 = Arc::new(enumerate_tuples(&cover, 3, points + 20, seed).unwrap());
        let t2 = Arc::new(t3.faces().unwrap());
        let t1 = Arc::new(t2.faces().unwrap());
        let f = Cochain::from_fn(t1.clone(), |t| (t[0] as f64).sin() * (1.0 + t[1] as f64).ln());
        let df = f.coboundary(&t2).unwrap();
        prop_assert!(df.coboundary(&t3).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn identity_has_full_trace(m in 1usize..4) {
        let alg = Backend::Matrix(2).algebra().unwrap();
        prop_assert_eq!(AlgebraMatrix::identity(&alg, m).trace_phi().re, m as f64);
    }
}
