//! Index pairings at desk scale: the rank index of a formal difference of
//! projection fields, its twist by a flat bundle computed through Chern
//! cochains, and a trace census of idempotents.

use serde::Serialize;

use crate::algebra::{idempotent_to_projection, AlgebraMatrix};
use crate::chern::ProjectionField;
use crate::error::{Error, Result};
use crate::flat::{flatness_check, FlatProjection, FlatnessOptions, FlatnessReport};
use crate::space::SampledSpace;

/// Rank of a scalar projection field, which must not jump.
pub fn constant_rank(p: &ProjectionField) -> Result<usize> {
    if p.algebra().sites() != 1 || p.algebra().block_dim() != 1 {
        return Err(Error::InvalidAlgebra("rank counts need a scalar projection field".into()));
    }
    let rank = |v: &AlgebraMatrix| {
        crate::linalg::hermitian_part(&v.site_blocks()[0])
            .symmetric_eigenvalues()
            .iter()
            .filter(|&&l| l > 0.5)
            .count()
    };
    let first = p.values().first().map_or(0, rank);
    for (x, v) in p.values().iter().enumerate().skip(1) {
        let other = rank(v);
        if other != first {
            return Err(Error::RankJump { first, other, point: x });
        }
    }
    Ok(first)
}

/// `rank(P) - rank(Q)`, the pairing of `[P] - [Q]` with the class of the
/// unit.
pub fn index_simple(p: &ProjectionField, q: &ProjectionField) -> Result<i64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!("fields on {} and {} points", p.len(), q.len())));
    }
    Ok(constant_rank(p)? as i64 - constant_rank(q)? as i64)
}

#[derive(Debug, Clone, Serialize)]
pub struct IndexReport {
    pub ind_simple: i64,
    pub ind_a: f64,
    pub phi_q: f64,
    /// Distance from `ind_a` to `phi(q) Z`.
    pub integrality_residual: f64,
    /// Spread of `Ch^0(p_A)` around its mean.
    pub ch0_spread: f64,
    pub degree0: FlatnessReport,
    pub degree2: Option<FlatnessReport>,
}

/// Tolerances on the flatness certificates used by
/// [`l2_index_via_chern`].
#[derive(Debug, Clone, Copy)]
pub struct CertificateTolerances {
    pub degree0: f64,
    pub identity: f64,
    pub coboundary: f64,
}

impl Default for CertificateTolerances {
    fn default() -> Self {
        CertificateTolerances { degree0: 1e-10, identity: 1e-8, coboundary: 1e-6 }
    }
}

/// `min_k |value - k step|`
pub fn distance_to_lattice(value: f64, step: f64) -> f64 {
    if step == 0.0 {
        return value.abs();
    }
    let k = (value / step).round();
    (value - k * step).abs()
}

/// The flat-bundle twisted index of `[P] - [Q]`. Positive-degree Chern
/// cochains of `p_A` are certified to be coboundaries, so only degree zero
/// contributes: `ind_A = ind * Ch^0(p_A)`, reported with the measured
/// mean of `Ch^0(p_A)` rather than `phi(q)` itself.
pub fn l2_index_via_chern(
    space: &SampledSpace,
    fp: &FlatProjection,
    class: (&ProjectionField, &ProjectionField),
    options: &FlatnessOptions,
    with_degree_two: bool,
    tol: CertificateTolerances,
) -> Result<IndexReport> {
    let ind = index_simple(class.0, class.1)?;
    let degree0 = flatness_check(space, fp, 0, options)?;
    if !(degree0.degree0_residual < tol.degree0) {
        return Err(Error::CertificateFailed(format!(
            "degree-0 residual {:.3e} exceeds {:.1e}",
            degree0.degree0_residual, tol.degree0
        )));
    }
    let degree2 = if with_degree_two {
        let r = flatness_check(space, fp, 1, options)?;
        if !(r.identity_residual < tol.identity) {
            return Err(Error::CertificateFailed(format!(
                "pointwise identity residual {:.3e} exceeds {:.1e}",
                r.identity_residual, tol.identity
            )));
        }
        let cob = r.coboundary_residual.unwrap_or(f64::INFINITY);
        if !(cob < tol.coboundary) {
            return Err(Error::CertificateFailed(format!(
                "coboundary residual {cob:.3e} exceeds {:.1e}",
                tol.coboundary
            )));
        }
        Some(r)
    } else {
        None
    };
    let values: Vec<f64> = fp.p_a.values().iter().map(|v| v.trace_phi().re).collect();
    let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
    let ch0_spread = values.iter().fold(0.0_f64, |a, v| a.max((v - mean).abs()));
    let ind_a = ind as f64 * mean;
    let phi_q = degree0.phi_q;
    Ok(IndexReport {
        ind_simple: ind,
        ind_a,
        phi_q,
        integrality_residual: distance_to_lattice(ind_a, phi_q),
        ch0_spread,
        degree0,
        degree2,
    })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CensusEntry {
    pub size: usize,
    pub idempotency_residual: f64,
    pub trace_re: f64,
    pub trace_im: f64,
    /// Distance of the real trace outside `[0, m]`.
    pub range_violation: f64,
    /// `|phi(e) - phi(p)|` for the projection onto the range of `e`.
    pub projection_trace_diff: f64,
    /// Set when `phi(e)` is `0` or `m`: whether `e` is then `0` or `1`.
    pub trivial: Option<bool>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CensusReport {
    pub entries: Vec<CensusEntry>,
    pub max_imaginary: f64,
    pub max_range_violation: f64,
    pub max_projection_trace_diff: f64,
    /// Idempotents of trace `0` or `m` that are not `0` or `1`.
    pub nontrivial_extreme: usize,
}

pub fn idempotent_census(idempotents: &[AlgebraMatrix]) -> Result<CensusReport> {
    let entries = idempotents
        .iter()
        .map(|e| {
            let residual = e.idempotency_residual();
            if !(residual < 1e-8) {
                return Err(Error::NotIdempotent { residual });
            }
            let m = e.size();
            let trace = e.trace_phi();
            let p = idempotent_to_projection(e)?;
            let one = AlgebraMatrix::identity(e.algebra(), m);
            let extreme = trace.re.abs() < 1e-10 || (trace.re - m as f64).abs() < 1e-10;
            let trivial = extreme.then(|| e.norm() < 1e-8 || one.sub(e).map_or(false, |d| d.norm() < 1e-8));
            Ok(CensusEntry {
                size: m,
                idempotency_residual: residual,
                trace_re: trace.re,
                trace_im: trace.im,
                range_violation: (-trace.re).max(trace.re - m as f64).max(0.0),
                projection_trace_diff: (trace - p.trace_phi()).norm(),
                trivial,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fold = |f: fn(&CensusEntry) -> f64| entries.iter().map(f).fold(0.0, f64::max);
    Ok(CensusReport {
        max_imaginary: fold(|e| e.trace_im.abs()),
        max_range_violation: fold(|e| e.range_violation),
        max_projection_trace_diff: fold(|e| e.projection_trace_diff),
        nontrivial_extreme: entries.iter().filter(|e| e.trivial == Some(false)).count(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use num_complex::Complex64;

    use super::*;
    use crate::algebra::{FiniteGroup, SiteAlgebra};
    use crate::fixtures::{
        bott_field, circle_z3_fixture, half_trace_fixture, random_group_fixture, random_idempotent, random_similar, trivial_field,
        Backend,
    };
    use crate::linalg::CMatrix;

    fn options() -> FlatnessOptions {
        FlatnessOptions { tuple_budget: 80, seed: 1, ..FlatnessOptions::default() }
    }

    #[test]
    fn rank_index() {
        let one = trivial_field(10, 1, 1).unwrap();
        let zero = trivial_field(10, 1, 0).unwrap();
        assert_eq!(index_simple(&one, &zero).unwrap(), 1);
        assert_eq!(index_simple(&one, &one).unwrap(), 0);
        let s = SampledSpace::sphere(1).unwrap();
        let bott = bott_field(&s).unwrap();
        let line = trivial_field(s.len(), 2, 1).unwrap();
        // Both have rank one everywhere; the rank count cannot see the twist.
        assert_eq!(index_simple(&bott, &line).unwrap(), 0);
    }

    #[test]
    fn rank_jump_is_rejected() {
        let mut values = vec![CMatrix::identity(2, 2); 5];
        values[3] = CMatrix::from_diagonal_element(2, 2, Complex64::new(0.0, 0.0));
        values[3][(0, 0)] = Complex64::new(1.0, 0.0);
        let p = ProjectionField::scalar(values).unwrap();
        let q = trivial_field(5, 1, 0).unwrap();
        assert!(matches!(index_simple(&p, &q), Err(Error::RankJump { first: 2, other: 1, point: 3 })));
    }

    #[test]
    fn rank_is_similarity_invariant() {
        for seed in 0..10 {
            let e = random_idempotent(&Backend::Matrix(4), 1, 1, 0.3, seed).unwrap();
            let p = idempotent_to_projection(&e).unwrap();
            let field = ProjectionField::scalar(vec![p.site_blocks()[0].clone(); 3]).unwrap();
            let q = random_idempotent(&Backend::Matrix(4), 1, 1, 0.0, seed).unwrap();
            let field_q = ProjectionField::scalar(vec![q.site_blocks()[0].clone(); 3]).unwrap();
            assert_eq!(index_simple(&field, &field_q).unwrap(), 0);
        }
    }

    #[test]
    fn z3_index_is_the_plain_index() {
        let f = circle_z3_fixture(60).unwrap();
        let fp = f.flat_projection().unwrap();
        let one = trivial_field(60, 1, 1).unwrap();
        let zero = trivial_field(60, 1, 0).unwrap();
        let r = l2_index_via_chern(&f.space, &fp, (&one, &zero), &options(), true, Default::default()).unwrap();
        assert_eq!(r.ind_simple, 1);
        assert!((r.ind_a - 1.0).abs() < 1e-8);
        assert!(r.integrality_residual < 1e-8);
    }

    #[test]
    fn group_fixtures_have_integral_index() {
        for seed in 0..5 {
            let f = random_group_fixture(40, seed).unwrap();
            let fp = f.flat_projection().unwrap();
            let p = trivial_field(40, 3, 2).unwrap();
            let q = trivial_field(40, 1, 0).unwrap();
            let r = l2_index_via_chern(&f.space, &fp, (&p, &q), &options(), false, Default::default()).unwrap();
            assert_eq!(r.ind_simple, 2);
            assert!(r.integrality_residual < 1e-6);
        }
    }

    #[test]
    fn half_trace_fiber_gives_half_integers() {
        let f = half_trace_fixture(4, 40, 3).unwrap();
        let fp = f.flat_projection().unwrap();
        assert!((fp.cocycle.fiber().trace_phi().re - 0.5).abs() < 1e-14);
        let p = trivial_field(40, 3, 3).unwrap();
        let q = trivial_field(40, 1, 0).unwrap();
        let r = l2_index_via_chern(&f.space, &fp, (&p, &q), &options(), true, Default::default()).unwrap();
        assert!((r.ind_a - 1.5).abs() < 1e-10);
        assert!(r.integrality_residual < 1e-6);
        assert!(distance_to_lattice(r.ind_a, 1.0) > 0.4);
    }

    #[test]
    fn failing_certificate_is_an_error() {
        let f = circle_z3_fixture(60).unwrap();
        let fp = f.flat_projection().unwrap();
        let one = trivial_field(60, 1, 1).unwrap();
        let zero = trivial_field(60, 1, 0).unwrap();
        let tol = CertificateTolerances { degree0: 0.0, ..Default::default() };
        let err = l2_index_via_chern(&f.space, &fp, (&one, &zero), &options(), false, tol).unwrap_err();
        assert!(matches!(err, Error::CertificateFailed(_)));
    }

    #[test]
    fn census_of_trivial_and_random_idempotents() {
        let alg = Arc::new(SiteAlgebra::matrix(3).unwrap());
        let zero = AlgebraMatrix::zeros(&alg, 2);
        let one = AlgebraMatrix::identity(&alg, 2);
        let r = idempotent_census(&[zero, one]).unwrap();
        assert_eq!(r.entries[0].trivial, Some(true));
        assert_eq!(r.entries[1].trivial, Some(true));
        assert_eq!(r.entries[1].trace_re, 2.0);
        // phi(e) = rank / k for a conjugated rank-r projection in M_k.
        let k = 4;
        let backend = Backend::Matrix(k);
        let list: Vec<AlgebraMatrix> = (0..20)
            .map(|seed| {
                let r = (seed as usize) % (k + 1);
                let d: Vec<Complex64> = (0..k).map(|i| Complex64::new(if i < r { 1.0 } else { 0.0 }, 0.0)).collect();
                let p = AlgebraMatrix::new(
                    backend.algebra().unwrap(),
                    1,
                    vec![CMatrix::from_diagonal(&nalgebra::DVector::from_vec(d))],
                )
                .unwrap();
                random_similar(&backend, &p, 0.3, seed).unwrap()
            })
            .collect();
        let r = idempotent_census(&list).unwrap();
        for (seed, entry) in r.entries.iter().enumerate() {
            assert!((entry.trace_re - (seed % (k + 1)) as f64 / k as f64).abs() < 1e-10);
            let r = seed % (k + 1);
            if r != 0 && r != k {
                assert!(list[seed].selfadjoint_residual() > 1e-3);
            }
        }
        assert!(r.max_imaginary < 1e-10 && r.max_projection_trace_diff < 1e-10);
        assert_eq!(r.nontrivial_extreme, 0);
        let g = Backend::Group(FiniteGroup::cyclic(4).unwrap());
        let list: Vec<_> = (0..10).map(|s| random_idempotent(&g, 2, 1, 0.2, s).unwrap()).collect();
        let r = idempotent_census(&list).unwrap();
        assert!(r.max_range_violation == 0.0 && r.max_imaginary < 1e-10);
        let bad = AlgebraMatrix::identity(&alg, 1).scale(Complex64::new(0.5, 0.0));
        assert!(matches!(idempotent_census(&[bad]), Err(Error::NotIdempotent { .. })));
    }
}
