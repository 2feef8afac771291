use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use mishchenko_core::algebra::{contour_spectral_projection, contour_spectral_projection_generic};
use mishchenko_core::chern::{chern_cochain, OSCILLATION_BOUND};
use mishchenko_core::fixtures::{bott_field, circle_z3_fixture, random_idempotent, Backend};
use mishchenko_core::flat::{flatness_check, FlatnessOptions};
use mishchenko_core::mishchenko::{m_inner, y_inner, ModuleSpace, ModuleVector, PrincipalBundle};
use mishchenko_core::quadrature::SimplexRule;
use mishchenko_core::space::{enumerate_tuples, refine_until_oscillation, OpenCover, SampledSpace};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bott_chern(c: &mut Criterion) {
    let space = SampledSpace::sphere(2).unwrap();
    let p = bott_field(&space).unwrap();
    let cover = Arc::new(OpenCover::stars(&space, 2).unwrap());
    let refined = Arc::new(refine_until_oscillation(&space, &cover, |x, y| p.distance(x, y), OSCILLATION_BOUND).unwrap());
    let upper = enumerate_tuples(&refined, 3, 400, 1).unwrap();
    let tuples = Arc::new(upper.faces().unwrap());
    let rule = SimplexRule::duffy(2, 16).unwrap();
    c.bench_function("chern_cochain/bott_sphere2", |b| {
        b.iter(|| chern_cochain(&p, 1, &tuples, &rule, 64).unwrap())
    });
}

fn z3_flatness(c: &mut Criterion) {
    let f = circle_z3_fixture(60).unwrap();
    let fp = f.flat_projection().unwrap();
    let options = FlatnessOptions { tuple_budget: 100, seed: 17, ..FlatnessOptions::default() };
    c.bench_function("flatness_check/circle_z3_degree2", |b| {
        b.iter(|| flatness_check(&f.space, &fp, 1, &options).unwrap())
    });
}

fn contour(c: &mut Criterion) {
    let backend = Backend::Matrix(4);
    let e = random_idempotent(&backend, 3, 2, 0.3, 9).unwrap();
    let mut g = c.benchmark_group("contour_projection");
    g.bench_function("eigenbasis", |b| b.iter(|| contour_spectral_projection(&e, 64).unwrap()));
    g.bench_function("resolvent", |b| b.iter(|| contour_spectral_projection_generic(&e, 64).unwrap()));
    g.finish();
}

fn inner_products(c: &mut Criterion) {
    let f = circle_z3_fixture(120).unwrap();
    let (g, h) = f.group.clone().unwrap();
    let (bundle, _) = PrincipalBundle::from_cocycle(&f.space, &g, &f.cover, &h).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = bundle.total_points();
    let mut vector = |space| {
        let v = (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        ModuleVector::new(space, v)
    };
    let (y1, y2) = (vector(ModuleSpace::Y), vector(ModuleSpace::Y));
    let (m1, m2) = (vector(ModuleSpace::M), vector(ModuleSpace::M));
    let mut grp = c.benchmark_group("mishchenko_inner");
    grp.bench_function("y", |b| b.iter(|| y_inner(&bundle, &y1, &y2).unwrap()));
    grp.bench_function("m", |b| b.iter(|| m_inner(&bundle, &m1, &m2).unwrap()));
    grp.finish();
}

criterion_group!(benches, bott_chern, z3_flatness, contour, inner_products);
criterion_main!(benches);
