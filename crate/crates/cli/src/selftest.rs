//! Closed-form examples for every operation, each reduced to a residual.

use std::collections::BTreeMap;
use std::sync::Arc;

use mishchenko_core::algebra::{
    circle_algebra, circle_function, contour_spectral_projection, group_algebra, idempotent_to_projection,
    AlgebraMatrix, FiniteGroup, SiteAlgebra,
};
use mishchenko_core::chern::{
    affine_segment, chern_cochain, partial_derivatives_e, solve_coboundary, spectral_projection_field,
    tensor_projection, Cochain,
};
use mishchenko_core::fixtures::{bott_field, circle_z3_fixture, trivial_field, FlatFixture};
use mishchenko_core::flat::{build_flat_projection, flatness_check, validate_cocycle, FlatnessOptions, UnitaryCocycle};
use mishchenko_core::index::{idempotent_census, index_simple, l2_index_via_chern, CertificateTolerances};
use mishchenko_core::linalg::CMatrix;
use mishchenko_core::mishchenko::{
    crossed_module_ops as cm, m_inner, phi_iso, rank_one_to_crossed, y_inner, z_group_action, CrossedVector,
    ModuleSpace, ModuleVector, PrincipalBundle,
};
use mishchenko_core::quadrature::SimplexRule;
use mishchenko_core::space::{
    build_cover, cover_from_closed_family, enumerate_tuples, lemma_violations, refine_until_oscillation,
    CoverTupleSet, OpenCover, PartitionOfUnity, SampledSpace,
};
use mishchenko_core::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{Check, Outcome};

const EXACT: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn scalar(rows: &[&[f64]]) -> CMatrix {
    let n = rows.len();
    CMatrix::from_fn(n, n, |i, j| c(rows[i][j]))
}

fn over_c(m: CMatrix) -> Result<AlgebraMatrix> {
    let n = m.nrows();
    AlgebraMatrix::new(Arc::new(SiteAlgebra::scalars()), n, vec![m])
}

fn normalized(m: CMatrix) -> Result<AlgebraMatrix> {
    let k = m.nrows();
    AlgebraMatrix::new(Arc::new(SiteAlgebra::matrix(k)?), 1, vec![m])
}

fn random_values(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn z3_bundle(points: usize) -> Result<(FlatFixture, PrincipalBundle)> {
    let f = circle_z3_fixture(points)?;
    let (g, h) = f.group.clone().expect("group fixture");
    let (b, _) = PrincipalBundle::from_cocycle(&f.space, &g, &f.cover, &h)?;
    Ok((f, b))
}

/// `g_ij = q` on every overlap.
fn trivial_cocycle(q: AlgebraMatrix, cover: Arc<OpenCover>) -> Result<UnitaryCocycle> {
    let n = cover.len();
    let values = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|k| (k, q.clone())).collect();
    UnitaryCocycle::constant(q, cover, values)
}

/// A sphere sample with `0` and its two nearest neighbours.
fn close_triple() -> Result<(SampledSpace, [usize; 3])> {
    let s = SampledSpace::sphere(2)?;
    let mut order: Vec<usize> = (1..s.len()).collect();
    order.sort_by(|&a, &b| s.distance(0, a).total_cmp(&s.distance(0, b)));
    Ok((s, [0, order[0], order[1]]))
}

/// Each example as `(name, residual)`; every residual should vanish.
fn examples() -> Vec<(&'static str, Box<dyn Fn() -> Result<f64>>)> {
    let mut v: Vec<(&'static str, Box<dyn Fn() -> Result<f64>>)> = Vec::new();
    v.push(("mul_identity", Box::new(|| {
        let a = over_c(CMatrix::from_fn(2, 2, |i, j| Complex64::new(i as f64 + 1.0, j as f64 - 0.5)))?;
        AlgebraMatrix::identity(a.algebra(), 2).mul(&a)?.max_abs_diff(&a)
    })));
    v.push(("mul_group_law_z3", Box::new(|| {
        let g = FiniteGroup::cyclic(3)?;
        let (_, l) = group_algebra(&g);
        let mut worst = 0.0_f64;
        for a in 0..3 {
            for b in 0..3 {
                worst = worst.max(l[a].mul(&l[b])?.max_abs_diff(&l[g.mul(a, b)])?);
            }
        }
        Ok(worst)
    })));
    v.push(("trace_identity_m2", Box::new(|| {
        let (alg, _) = group_algebra(&FiniteGroup::cyclic(3)?);
        Ok((AlgebraMatrix::identity(&alg, 2).trace_phi() - c(2.0)).norm())
    })));
    v.push(("trace_lambda_z5", Box::new(|| {
        let g = FiniteGroup::cyclic(5)?;
        let (_, l) = group_algebra(&g);
        Ok((0..5).map(|a| (l[a].trace_phi() - c(if a == g.identity() { 1.0 } else { 0.0 })).norm()).fold(0.0, f64::max))
    })));
    v.push(("lambda_z2", Box::new(|| {
        let (_, l) = group_algebra(&FiniteGroup::cyclic(2)?);
        Ok((&l[1].site_blocks()[0] - scalar(&[&[0.0, 1.0], &[1.0, 0.0]])).norm())
    })));
    v.push(("lambda_z1", Box::new(|| {
        let (_, l) = group_algebra(&FiniteGroup::cyclic(1)?);
        Ok((&l[0].site_blocks()[0] - scalar(&[&[1.0]])).norm())
    })));
    v.push(("circle_trace_z", Box::new(|| {
        let a = Arc::new(circle_algebra(4)?);
        Ok(circle_function(&a, |z| z)?.trace_phi().norm())
    })));
    v.push(("circle_trace_one", Box::new(|| {
        let a = Arc::new(circle_algebra(4)?);
        Ok((circle_function(&a, |_| c(1.0))?.trace_phi() - c(1.0)).norm())
    })));
    v.push(("spectral_projection_fixed", Box::new(|| {
        let p = over_c(scalar(&[&[0.0, 0.0], &[0.0, 1.0]]))?;
        contour_spectral_projection(&p, 64)?.max_abs_diff(&p)
    })));
    v.push(("spectral_projection_separated", Box::new(|| {
        let a = over_c(scalar(&[&[0.1, 0.0], &[0.0, 0.9]]))?;
        let p = over_c(scalar(&[&[0.0, 0.0], &[0.0, 1.0]]))?;
        contour_spectral_projection(&a, 64)?.max_abs_diff(&p)
    })));
    v.push(("idempotent_projection_fixed", Box::new(|| {
        let p = normalized(scalar(&[&[1.0, 0.0], &[0.0, 0.0]]))?;
        idempotent_to_projection(&p)?.max_abs_diff(&p)
    })));
    v.push(("idempotent_trace_half", Box::new(|| {
        let e = normalized(scalar(&[&[1.0, 1.0], &[0.0, 0.0]]))?;
        let p = idempotent_to_projection(&e)?;
        Ok((e.trace_phi() - c(0.5)).norm().max((p.trace_phi() - c(0.5)).norm()))
    })));
    v.push(("cover_one_point", Box::new(|| {
        let s = SampledSpace::new(vec![vec![0.0, 0.0]])?;
        let (cover, part) = build_cover(&s, 1.0)?;
        Ok(if cover.len() == 1 { (part.value(0, 0) - 1.0).abs() } else { 1.0 })
    })));
    v.push(("cover_circle_12", Box::new(|| {
        let s = SampledSpace::circle(12)?;
        let radius = 1.05 * s.distance(0, 1);
        let (cover, part) = build_cover(&s, radius)?;
        let mut worst = 0.0_f64;
        for x in 0..12 {
            if cover.sets_containing(x).is_empty() {
                worst = 1.0;
            }
            let sum: f64 = (0..part.len()).map(|i| part.value(i, x)).sum();
            worst = worst.max((sum - 1.0).abs());
        }
        Ok(worst)
    })));
    v.push(("refine_constant_field", Box::new(|| {
        let s = SampledSpace::circle(12)?;
        let (cover, _) = build_cover(&s, 0.8)?;
        let p = trivial_field(12, 2, 1)?;
        let r = refine_until_oscillation(&s, &cover, |x, y| p.distance(x, y), 0.25)?;
        Ok(if r == cover { 0.0 } else { 1.0 })
    })));
    v.push(("refine_infinite_bound", Box::new(|| {
        let s = SampledSpace::sphere(1)?;
        let (cover, _) = build_cover(&s, 1.5)?;
        let p = bott_field(&s)?;
        let r = refine_until_oscillation(&s, &cover, |x, y| p.distance(x, y), f64::INFINITY)?;
        Ok(if r == cover { 0.0 } else { 1.0 })
    })));
    v.push(("cover_lemma_single_set", Box::new(|| {
        let s = SampledSpace::circle(16)?;
        let family = vec![(0..6).collect::<Vec<usize>>()];
        let cover = cover_from_closed_family(&s, &family, 0.3)?;
        Ok(lemma_violations(&cover, &family).len() as f64)
    })));
    v.push(("tuples_degree0", Box::new(|| {
        let s = SampledSpace::circle(10)?;
        let (cover, _) = build_cover(&s, 1.0)?;
        let t = enumerate_tuples(&Arc::new(cover), 0, 50, 1)?;
        let all = (0..10).all(|x| t.position(&[x]).is_some());
        Ok(if all && t.len() == 10 { 0.0 } else { 1.0 })
    })));
    v.push(("tuples_diagonal_budget", Box::new(|| {
        let s = SampledSpace::circle(10)?;
        let (cover, _) = build_cover(&s, 1.0)?;
        let t = enumerate_tuples(&Arc::new(cover), 2, 10, 1)?;
        let diag = t.tuples().iter().all(|u| u[0] == u[1] && u[1] == u[2]);
        Ok(if diag && t.len() == 10 { 0.0 } else { 1.0 })
    })));
    v.push(("coboundary_constant", Box::new(|| {
        let cover = Arc::new(OpenCover::new(4, vec![vec![0, 1, 2, 3]])?);
        let t0 = Arc::new(enumerate_tuples(&cover, 0, 4, 0)?);
        let t1 = Arc::new(enumerate_tuples(&cover, 1, 16, 0)?);
        Ok(Cochain::from_fn(t0, |_| 2.5).coboundary(&t1)?.sup_norm())
    })));
    v.push(("coboundary_exact", Box::new(|| {
        let cover = Arc::new(OpenCover::new(5, vec![vec![0, 1, 2, 3, 4]])?);
        let t1 = Arc::new(enumerate_tuples(&cover, 1, 25, 0)?);
        let t2 = Arc::new(enumerate_tuples(&cover, 2, 60, 0)?);
        let g = |x: usize| (x as f64).sin();
        Ok(Cochain::from_fn(t1, |t| g(t[1]) - g(t[0])).coboundary(&t2)?.sup_norm())
    })));
    v.push(("affine_segment_origin", Box::new(|| {
        let (s, t) = close_triple()?;
        let p = bott_field(&s)?;
        affine_segment(&p, &t, &[0.0, 0.0])?.max_abs_diff(p.value(0))
    })));
    v.push(("affine_segment_degenerate", Box::new(|| {
        let s = SampledSpace::sphere(1)?;
        let p = bott_field(&s)?;
        affine_segment(&p, &[3, 3, 3], &[0.3, 0.5])?.max_abs_diff(p.value(3))
    })));
    v.push(("spectral_field_origin", Box::new(|| {
        let (s, t) = close_triple()?;
        let p = bott_field(&s)?;
        spectral_projection_field(&p, &t, &[0.0, 0.0], 64)?.max_abs_diff(p.value(0))
    })));
    v.push(("spectral_field_constant", Box::new(|| {
        let p = trivial_field(4, 3, 2)?;
        spectral_projection_field(&p, &[0, 1, 2], &[0.2, 0.3], 64)?.max_abs_diff(p.value(0))
    })));
    v.push(("derivatives_constant", Box::new(|| {
        let p = trivial_field(4, 3, 1)?;
        let d = partial_derivatives_e(&p, &[0, 1, 2], &[0.2, 0.3], 64)?;
        Ok(d.iter().map(AlgebraMatrix::max_abs).fold(0.0, f64::max))
    })));
    v.push(("derivatives_repeated_vertex", Box::new(|| {
        let (s, t) = close_triple()?;
        let p = bott_field(&s)?;
        let d = partial_derivatives_e(&p, &[t[0], t[0], t[1]], &[0.2, 0.3], 64)?;
        Ok(d[0].max_abs())
    })));
    v.push(("chern_constant_field", Box::new(|| {
        let p = trivial_field(6, 2, 1)?;
        let cover = Arc::new(OpenCover::new(6, vec![(0..6).collect()])?);
        let t = Arc::new(enumerate_tuples(&cover, 2, 30, 3)?);
        Ok(chern_cochain(&p, 1, &t, &SimplexRule::default_for(1)?, 64)?.cochain.sup_norm())
    })));
    v.push(("tensor_unit_fiber", Box::new(|| {
        let s = SampledSpace::sphere(1)?;
        let p = bott_field(&s)?;
        let one = AlgebraMatrix::identity(&Arc::new(SiteAlgebra::scalars()), 1);
        let t = tensor_projection(&p, &one)?;
        (0..s.len()).map(|x| t.value(x).max_abs_diff(p.value(x))).try_fold(0.0_f64, |a, d| Ok(a.max(d?)))
    })));
    v.push(("tensor_unit_field", Box::new(|| {
        let g = FiniteGroup::cyclic(2)?;
        let (alg, l) = group_algebra(&g);
        let one = AlgebraMatrix::identity(&alg, 1);
        let q = one.add(&l[1])?.scale(c(0.5));
        let t = tensor_projection(&trivial_field(5, 1, 1)?, &q)?;
        (0..5).map(|x| t.value(x).max_abs_diff(&q)).try_fold(0.0_f64, |a, d| Ok(a.max(d?)))
    })));
    v.push(("solve_exact_cochain", Box::new(|| {
        let cover = Arc::new(OpenCover::new(5, vec![(0..5).collect()])?);
        let t1 = Arc::new(enumerate_tuples(&cover, 1, 25, 0)?);
        let t0 = Arc::new(t1.faces()?);
        let g = Cochain::from_fn(t0.clone(), |t| (t[0] as f64).cos());
        let dg = g.coboundary(&t1)?;
        let sol = solve_coboundary(&dg, Some(t0))?;
        Ok(sol.residual.max(sol.primitive.coboundary(&t1)?.sup_distance(&dg)?))
    })));
    v.push(("pairing_zero_cochain", Box::new(|| {
        let s = SampledSpace::sphere(1)?;
        let cover = Arc::new(OpenCover::stars(&s, 2)?);
        let chain = s.chain(2).expect("sphere chain").clone();
        let t = Arc::new(CoverTupleSet::empty(cover, 2).with_extra(chain.iter().map(|(t, _)| t.clone()))?);
        Ok(Cochain::zero(t).pair_with_chain(&chain)?.abs())
    })));
    v.push(("cocycle_trivial", Box::new(|| {
        let f = circle_z3_fixture(24)?;
        let (alg, _) = group_algebra(&FiniteGroup::cyclic(3)?);
        let cc = trivial_cocycle(AlgebraMatrix::identity(&alg, 1), f.cover.clone())?;
        Ok(validate_cocycle(&cc, &f.partition, None)?.worst())
    })));
    v.push(("cocycle_corruption_reported", Box::new(|| {
        let f = circle_z3_fixture(24)?;
        let mut cc = f.cocycle.clone();
        let (_, l) = group_algebra(&FiniteGroup::cyclic(3)?);
        let x = (0..24).find(|&x| f.cover.contains(0, x) && f.cover.contains(1, x)).expect("overlap");
        cc.set_transition(0, 1, x, Some(l[2].mul(cc.transition(0, 1, x).expect("defined"))?));
        let r = validate_cocycle(&cc, &f.partition, None)?;
        let named = r.cocycle > 0.5 && r.violations.iter().any(|v| v.3 == x);
        Ok(if named { 0.0 } else { 1.0 })
    })));
    v.push(("flat_single_set", Box::new(|| {
        let s = SampledSpace::circle(8)?;
        let cover = Arc::new(OpenCover::new(8, vec![(0..8).collect()])?);
        let part = PartitionOfUnity::from_cover(&s, &cover)?;
        let g = FiniteGroup::cyclic(2)?;
        let (alg, l) = group_algebra(&g);
        let q = AlgebraMatrix::identity(&alg, 1).add(&l[1])?.scale(c(0.5));
        let cc = UnitaryCocycle::constant(q.clone(), cover, BTreeMap::new())?.complete();
        let fp = build_flat_projection(&cc, &part)?;
        (0..8).map(|x| fp.p_a.value(x).max_abs_diff(&q)).try_fold(0.0_f64, |a, d| Ok(a.max(d?)))
    })));
    v.push(("flat_trivial_multiplicative", Box::new(|| {
        let s = SampledSpace::circle(30)?;
        let cover = Arc::new(OpenCover::circle_arcs(30, 3, 2)?);
        let part = PartitionOfUnity::from_cover(&s, &cover)?;
        let (alg, _) = group_algebra(&FiniteGroup::cyclic(3)?);
        let one = AlgebraMatrix::identity(&alg, 1);
        let cc = trivial_cocycle(one, cover)?;
        let fp = build_flat_projection(&cc, &part)?;
        let opts = FlatnessOptions { tuple_budget: 70, seed: 1, ..FlatnessOptions::default() };
        let r = flatness_check(&s, &fp, 1, &opts)?;
        Ok(r.identity_residual.max(r.coboundary_residual.unwrap_or(1.0) * 1e-6))
    })));
    v.push(("y_inner_indicator", Box::new(|| {
        let (_, b) = z3_bundle(12)?;
        let y0 = 7;
        let e = ModuleVector::indicator(ModuleSpace::Y, b.total_points(), y0);
        let ip = y_inner(&b, &e, &e)?;
        Ok(ip.iter().enumerate().map(|(x, v)| (v - c(if x == b.project(y0) { 1.0 } else { 0.0 })).norm()).fold(0.0, f64::max))
    })));
    v.push(("y_inner_translate", Box::new(|| {
        let (_, b) = z3_bundle(12)?;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = b.total_points();
        let xi = ModuleVector::new(ModuleSpace::Z, random_values(n, &mut rng));
        let zeta = ModuleVector::new(ModuleSpace::Z, random_values(n, &mut rng));
        let ip = y_inner(&b, &xi, &zeta)?;
        let mut worst = 0.0_f64;
        for g in 0..3 {
            let lhs = y_inner(&b, &z_group_action(&b, g, &xi)?, &z_group_action(&b, g, &zeta)?)?;
            worst = worst.max(max_diff(&lhs, &ip));
        }
        Ok(worst)
    })));
    v.push(("rank_one_zero", Box::new(|| {
        let (_, b) = z3_bundle(12)?;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = b.total_points();
        let xi = ModuleVector::new(ModuleSpace::Y, random_values(n, &mut rng));
        let zero = ModuleVector::zero(ModuleSpace::Y, n);
        Ok(if rank_one_to_crossed(&b, &xi, &zero)?.is_zero() { 0.0 } else { 1.0 })
    })));
    v.push(("rank_one_single_term", Box::new(|| {
        let (_, b) = z3_bundle(12)?;
        let n = b.total_points();
        let (y0, y1) = (b.fiber(4)[0], b.fiber(4)[1]);
        let e0 = ModuleVector::indicator(ModuleSpace::Y, n, y0);
        let e1 = ModuleVector::indicator(ModuleSpace::Y, n, y1);
        let th = rank_one_to_crossed(&b, &e0, &e1)?;
        let terms: Vec<usize> = (0..3).filter(|&g| th.values[g].iter().any(|v| v.norm() > 0.0)).collect();
        Ok(if terms == vec![b.offset(y0, y1).unwrap_or(usize::MAX)] { 0.0 } else { 1.0 })
    })));
    v.push(("v_identity", Box::new(|| {
        let (_, b) = z3_bundle(12)?;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xi = ModuleVector::new(ModuleSpace::Z, random_values(b.total_points(), &mut rng));
        Ok(z_group_action(&b, b.group().identity(), &xi)?.max_abs_diff(&xi))
    })));
    v.push(("v_inverse", Box::new(|| {
        let (_, b) = z3_bundle(12)?;
        let g = b.group().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let xi = ModuleVector::new(ModuleSpace::Z, random_values(b.total_points(), &mut rng));
        let mut worst = 0.0_f64;
        for a in 0..g.order() {
            worst = worst.max(z_group_action(&b, a, &z_group_action(&b, g.inv(a), &xi)?)?.max_abs_diff(&xi));
        }
        Ok(worst)
    })));
    v.push(("m_inner_identity_component", Box::new(|| {
        let (_, b) = z3_bundle(12)?;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = b.total_points();
        let xi = ModuleVector::new(ModuleSpace::M, random_values(n, &mut rng));
        let zeta = ModuleVector::new(ModuleSpace::M, random_values(n, &mut rng));
        let m = m_inner(&b, &xi, &zeta)?;
        let y = y_inner(&b, &xi.retag(ModuleSpace::Y), &zeta.retag(ModuleSpace::Y))?;
        Ok(max_diff(&m.values[b.group().identity()], &y))
    })));
    v.push(("crossed_identity_support", Box::new(|| {
        let (_, b) = z3_bundle(12)?;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = b.total_points();
        let e = b.group().identity();
        let a = ModuleVector::new(ModuleSpace::Z, random_values(n, &mut rng));
        let d = ModuleVector::new(ModuleSpace::Z, random_values(n, &mut rng));
        let ip = cm::inner(&b, &CrossedVector::at(3, e, &a), &CrossedVector::at(3, e, &d))?;
        let y = y_inner(&b, &a, &d)?;
        let mut worst = max_diff(&ip.values[e], &y);
        for t in (0..3).filter(|&t| t != e) {
            worst = worst.max(ip.values[t].iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
        Ok(worst)
    })));
    v.push(("phi_zero", Box::new(|| {
        let (_, b) = z3_bundle(12)?;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = b.total_points();
        let xi = ModuleVector::new(ModuleSpace::Y, random_values(n, &mut rng));
        let out = phi_iso(&b, &xi, &CrossedVector::zero(3, n))?;
        Ok(out.values.iter().map(|v| v.norm()).fold(0.0, f64::max))
    })));
    v.push(("index_one_zero", Box::new(|| {
        let i = index_simple(&trivial_field(5, 1, 1)?, &trivial_field(5, 1, 0)?)?;
        Ok((i - 1).abs() as f64)
    })));
    v.push(("index_p_p", Box::new(|| {
        let s = SampledSpace::sphere(1)?;
        let p = bott_field(&s)?;
        Ok(index_simple(&p, &p)?.abs() as f64)
    })));
    v.push(("index_trivial_cocycle", Box::new(|| {
        let s = SampledSpace::circle(30)?;
        let cover = Arc::new(OpenCover::circle_arcs(30, 3, 2)?);
        let part = PartitionOfUnity::from_cover(&s, &cover)?;
        let (alg, _) = group_algebra(&FiniteGroup::cyclic(3)?);
        let cc = trivial_cocycle(AlgebraMatrix::identity(&alg, 1), cover)?;
        let fp = build_flat_projection(&cc, &part)?;
        let opts = FlatnessOptions { tuple_budget: 70, seed: 2, ..FlatnessOptions::default() };
        let class = (trivial_field(30, 3, 2)?, trivial_field(30, 1, 1)?);
        let r = l2_index_via_chern(&s, &fp, (&class.0, &class.1), &opts, false, CertificateTolerances::default())?;
        Ok((r.ind_a - r.ind_simple as f64).abs())
    })));
    v.push(("census_zero_and_one", Box::new(|| {
        let (alg, _) = group_algebra(&FiniteGroup::cyclic(3)?);
        let zero = AlgebraMatrix::zeros(&alg, 2);
        let one = AlgebraMatrix::identity(&alg, 2);
        let r = idempotent_census(&[zero, one])?;
        let flagged = r.entries.iter().all(|e| e.trivial == Some(true));
        let traces = r.entries[0].trace_re.abs().max((r.entries[1].trace_re - 2.0).abs());
        Ok(if flagged { traces } else { 1.0 })
    })));
    v
}

pub fn run(tol_scale: f64) -> Outcome {
    let mut out = Outcome::default();
    let tol = EXACT * tol_scale;
    let list = examples();
    for (name, f) in &list {
        match f() {
            Ok(r) => out.check(Check::at_most(name, r, tol)),
            Err(e) => out.check(Check::failed(name, describe(&e))),
        }
    }
    out.detail("examples", list.len());
    out
}

fn describe(e: &Error) -> String {
    format!("{} ({e})", crate::tasks::invariant(e))
}
