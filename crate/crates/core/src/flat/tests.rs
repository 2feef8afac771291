use super::*;
use crate::algebra::{group_algebra, FiniteGroup};
use crate::chern::{chern_cochain, tensor_projection, ProjectionField};
use crate::fixtures::{
    circle_z3_fixture, random_fiber, random_projection_field, random_group_fixture, random_unitary_fixture, trivializable_cocycle,
    Backend,
};
use crate::space::{build_cover, enumerate_tuples, OpenCover, PartitionOfUnity, SampledSpace};

fn options(budget: usize) -> FlatnessOptions {
    FlatnessOptions { tuple_budget: budget, seed: 3, ..FlatnessOptions::default() }
}

#[test]
fn trivial_cocycle_has_zero_residuals() {
    let s = SampledSpace::circle(24).unwrap();
    let cover = Arc::new(OpenCover::circle_arcs(24, 4, 2).unwrap());
    let part = PartitionOfUnity::from_cover(&s, &cover).unwrap();
    let q = random_fiber(&Backend::Matrix(2), 2, 1, 5).unwrap();
    let values = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|k| (k, q.clone()))
        .collect();
    let c = UnitaryCocycle::constant(q.clone(), cover, values).unwrap();
    let r = validate_cocycle(&c, &part, None).unwrap();
    assert!(r.worst() < 1e-13, "{r:?}");
    assert!(r.violations.is_empty());
}

#[test]
fn z3_cocycle_is_valid_by_group_arithmetic() {
    let f = circle_z3_fixture(60).unwrap();
    let (g, h) = f.group.clone().unwrap();
    // Exhaustive check on group labels: h_ij h_jk = h_ik wherever the three
    // supports meet, with h_ii = e and h_ji = h_ij^-1.
    let label = |i: usize, j: usize| -> Option<usize> {
        if i == j {
            Some(g.identity())
        } else if let Some(&x) = h.get(&(i, j)) {
            Some(x)
        } else {
            h.get(&(j, i)).map(|&x| g.inv(x))
        }
    };
    let mut checked = 0;
    for x in 0..60 {
        let active: Vec<usize> = (0..3).filter(|&i| f.partition.value(i, x) > 0.0).collect();
        for &i in &active {
            for &j in &active {
                for &k in &active {
                    let (a, b, c) = (label(i, j).unwrap(), label(j, k).unwrap(), label(i, k).unwrap());
                    assert_eq!(g.mul(a, b), c);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 60);
    let r = validate_cocycle(&f.cocycle, &f.partition, None).unwrap();
    assert!(r.worst() < 1e-14, "{r:?}");
}

#[test]
fn corrupted_transition_is_reported_where_it_was_changed() {
    let mut f = circle_z3_fixture(60).unwrap();
    let (_, lambdas) = group_algebra(&FiniteGroup::cyclic(3).unwrap());
    let x = (0..60)
        .find(|&x| f.partition.value(0, x) > 0.0 && f.partition.value(2, x) > 0.0)
        .unwrap();
    f.cocycle.set_transition(0, 2, x, Some(lambdas[0].clone()));
    let r = validate_cocycle(&f.cocycle, &f.partition, None).unwrap();
    assert!(r.cocycle > 0.5);
    assert!(!r.violations.is_empty());
    assert!(r.violations.iter().all(|v| v.3 == x));
    let err = build_flat_projection(&f.cocycle, &f.partition).unwrap_err();
    assert!(matches!(err, Error::InvalidCocycle(ref m) if m.contains("cocycle")), "{err}");
}

#[test]
fn missing_transition_on_a_support_overlap_is_an_error() {
    let mut f = circle_z3_fixture(60).unwrap();
    let x = (0..60)
        .find(|&x| f.partition.value(0, x) > 0.0 && f.partition.value(1, x) > 0.0)
        .unwrap();
    f.cocycle.set_transition(0, 1, x, None);
    let err = validate_cocycle(&f.cocycle, &f.partition, None).unwrap_err();
    assert!(matches!(err, Error::MissingTransition { i: 0, j: 1, point } if point == x));
}

#[test]
fn single_set_gives_the_constant_fiber() {
    let s = SampledSpace::circle(10).unwrap();
    let cover = Arc::new(OpenCover::new(10, vec![(0..10).collect()]).unwrap());
    let part = PartitionOfUnity::from_cover(&s, &cover).unwrap();
    let q = random_fiber(&Backend::Circle(4), 2, 1, 1).unwrap();
    let c = UnitaryCocycle::constant(q.clone(), cover, BTreeMap::new()).unwrap().complete();
    let fp = build_flat_projection(&c, &part).unwrap();
    for v in fp.p_a.values() {
        assert!(v.max_abs_diff(&q).unwrap() < 1e-15);
    }
}

#[test]
fn z3_projection_entries_are_weighted_translations() {
    let f = circle_z3_fixture(60).unwrap();
    let fp = f.flat_projection().unwrap();
    let (_, lambdas) = group_algebra(&FiniteGroup::cyclic(3).unwrap());
    let h = |i: usize, j: usize| [[0, 1, 2], [2, 0, 1], [1, 2, 0]][i][j];
    for x in 0..60 {
        for i in 0..3 {
            for j in 0..3 {
                let w = (f.partition.value(i, x) * f.partition.value(j, x)).sqrt();
                let expected = lambdas[h(i, j)].scale(Complex64::new(w, 0.0));
                let got = fp.p_a.value(x).entry(i, j);
                assert!(got.max_abs_diff(&expected).unwrap() < 1e-15);
            }
        }
        let vx = &fp.v[x];
        assert!((vx.iter().map(|a| a * a).sum::<f64>() - 1.0).abs() < 1e-14);
    }
    assert!(fp.idempotency_residual < 1e-14);
}

#[test]
fn random_cocycles_give_projections() {
    for seed in 0..6 {
        let f = random_group_fixture(48, seed).unwrap();
        let fp = f.flat_projection().unwrap();
        assert!(fp.idempotency_residual < 1e-10);
        for v in fp.p.values() {
            assert!(v.is_projection(1e-12));
        }
    }
    for backend in [Backend::Matrix(2), Backend::Group(FiniteGroup::cyclic(2).unwrap()), Backend::Circle(4)] {
        let f = random_unitary_fixture(&backend, 2, 1, 4, 40, 11).unwrap();
        let fp = f.flat_projection().unwrap();
        assert!(fp.idempotency_residual < 1e-10, "{backend:?}: {}", fp.idempotency_residual);
        assert!(fp.validation.worst() < 1e-12);
    }
}

#[test]
fn corrupting_any_overlap_value_breaks_idempotency() {
    let f = random_group_fixture(40, 2).unwrap();
    let n = f.cover.len();
    let (g, _) = f.group.clone().unwrap();
    let (_, lambdas) = group_algebra(&g);
    let mut tried = 0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for x in 0..40 {
                if f.partition.value(i, x) * f.partition.value(j, x) == 0.0 {
                    continue;
                }
                let mut c = f.cocycle.clone();
                // A different unitary: the old value times a nontrivial
                // translation, or minus it in the trivial group.
                let old = c.transition(i, j, x).unwrap().clone();
                let new = if g.order() > 1 { old.mul(&lambdas[1]).unwrap() } else { old.scale(Complex64::new(-1.0, 0.0)) };
                c.set_transition(i, j, x, Some(new));
                let values = assemble_unchecked(&c, &f.partition).unwrap();
                assert!(values[x].idempotency_residual() > 1e-6, "({i}, {j}) at {x}");
                tried += 1;
            }
        }
    }
    assert!(tried > 0);
}

#[test]
fn degree_zero_flatness() {
    let f = circle_z3_fixture(60).unwrap();
    let fp = f.flat_projection().unwrap();
    let r = flatness_check(&f.space, &fp, 0, &options(80)).unwrap();
    assert!(r.degree0_residual < 1e-10);
    assert!((r.phi_q - 1.0).abs() < 1e-15);
}

#[test]
fn z3_flatness_in_degree_two() {
    let f = circle_z3_fixture(60).unwrap();
    let fp = f.flat_projection().unwrap();
    let r = flatness_check(&f.space, &fp, 1, &options(120)).unwrap();
    assert!(r.identity_residual < 1e-8, "{r:?}");
    assert!(r.coboundary_residual.unwrap() < 1e-6, "{r:?}");
    assert!(r.degree0_residual < 1e-10);
    assert!(r.working_cover_sets >= 3);
}

#[test]
fn complex_fibers_satisfy_the_identity_nontrivially() {
    // The circle-algebra fiber makes p_A complex, so Ch^2(p_A) vanishing is
    // not forced by the real-field symmetry; compare against a generic
    // complex field of the same size on the same tuples.
    let f = random_unitary_fixture(&Backend::Circle(4), 2, 1, 3, 36, 7).unwrap();
    let fp = f.flat_projection().unwrap();
    assert!(fp.p_a.values().iter().any(|v| !v.is_real()));
    let r = flatness_check(&f.space, &fp, 1, &options(60)).unwrap();
    assert!(r.identity_residual < 1e-8, "{r:?}");
    assert!(r.coboundary_residual.unwrap() < 1e-6);
    assert!(((r.phi_q) - fp.cocycle.fiber().trace_phi().re).abs() < 1e-15);
    assert!((r.degree0_residual) < 1e-10);

    let generic = random_projection_field(&f.space, &Backend::Circle(4), 2, 1, 0.3, 9).unwrap();
    let cover = Arc::new(
        crate::space::refine_until_oscillation(&f.space, &f.cover, |x, y| generic.distance(x, y), 0.25).unwrap(),
    );
    let tuples = Arc::new(enumerate_tuples(&cover, 2, cover.len() + 60, 2).unwrap());
    let ch = chern_cochain(&generic, 1, &tuples, &SimplexRule::default_for(1).unwrap(), 64).unwrap();
    assert!(ch.cochain.sup_norm() > 1e-6, "control field gave {}", ch.cochain.sup_norm());
}

#[test]
fn trivializable_cocycle_matches_the_tensor_product() {
    // p_A = W (p (x) q) W* with W = diag(u_i) unitary onto the range, so
    // Ch^2(p_A) = Ch^2(p (x) q) = Ch^2(p) phi(q) tuple by tuple.
    let s = SampledSpace::sphere(1).unwrap();
    let (cover, part) = build_cover(&s, 0.9).unwrap();
    let cover = Arc::new(cover);
    let backend = Backend::Circle(3);
    let q = random_fiber(&backend, 2, 1, 2).unwrap();
    let c = trivializable_cocycle(&backend, &q, cover.clone(), 4).unwrap().complete();
    let fp = build_flat_projection(&c, &part).unwrap();
    let working = Arc::new(working_cover(&s, &fp, None).unwrap());
    let tuples = Arc::new(enumerate_tuples(&working, 2, working.len() + 30, 1).unwrap());
    let rule = SimplexRule::default_for(1).unwrap();
    let pq: ProjectionField = tensor_projection(&fp.p, &q).unwrap();
    let a = chern_cochain(&fp.p_a, 1, &tuples, &rule, 64).unwrap();
    let b = chern_cochain(&pq, 1, &tuples, &rule, 64).unwrap();
    assert!(a.cochain.sup_distance(&b.cochain).unwrap() < 1e-10);
}
