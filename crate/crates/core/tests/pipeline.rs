use std::sync::Arc;

use mishchenko_core::chern::{chern_cochain, solve_coboundary, OSCILLATION_BOUND};
use mishchenko_core::fixtures::{bott_field, random_fiber, random_group_fixture, trivializable_cocycle, Backend};
use mishchenko_core::flat::{build_flat_projection, flatness_check, FlatnessOptions};
use mishchenko_core::mishchenko::{m_inner, PrincipalBundle};
use mishchenko_core::quadrature::SimplexRule;
use mishchenko_core::space::{build_cover, refine_until_oscillation, CoverTupleSet, SampledSpace};
use mishchenko_core::Error;

#[test]
fn bott_pairing_on_a_metric_cover() {
    let s = SampledSpace::sphere(3).unwrap();
    let p = bott_field(&s).unwrap();
    let (c, _) = build_cover(&s, 0.3).unwrap();
    let c = Arc::new(refine_until_oscillation(&s, &c, |x, y| p.distance(x, y), OSCILLATION_BOUND).unwrap());
    let chain = s.chain(2).unwrap();
    let tuples = Arc::new(CoverTupleSet::empty(c, 2).with_extra(chain.iter().map(|(t, _)| t.clone())).unwrap());
    let ch = chern_cochain(&p, 1, &tuples, &SimplexRule::default_for(1).unwrap(), 64).unwrap();
    let pairing = ch.cochain.pair_with_chain(chain).unwrap();
    assert!((pairing - 1.0).abs() < 0.05, "{pairing}");
    let sol = solve_coboundary(&ch.cochain, None).unwrap();
    assert!(sol.relative > 0.1);
}

#[test]
fn flat_bundle_over_the_sphere() {
    let s = SampledSpace::sphere(1).unwrap();
    let (cover, part) = build_cover(&s, 0.9).unwrap();
    let backend = Backend::Circle(3);
    let q = random_fiber(&backend, 2, 1, 6).unwrap();
    let c = trivializable_cocycle(&backend, &q, Arc::new(cover), 2).unwrap().complete();
    let fp = build_flat_projection(&c, &part).unwrap();
    let opts = FlatnessOptions { tuple_budget: s.len() + 30, seed: 5, ..FlatnessOptions::default() };
    let r = flatness_check(&s, &fp, 1, &opts).unwrap();
    assert!(r.identity_residual < 1e-8, "{r:?}");
    assert!(r.coboundary_residual.unwrap() < 1e-6);
    assert!(r.degree0_residual < 1e-10);
}

#[test]
fn mishchenko_module_projection_is_the_flat_bundle_projection() {
    let f = random_group_fixture(36, 12).unwrap();
    let (g, h) = f.group.clone().unwrap();
    let (b, sections) = PrincipalBundle::from_cocycle(&f.space, &g, &f.cover, &h).unwrap();
    let from_sections = build_flat_projection(&sections.mishchenko_cocycle(&b).unwrap(), &f.partition).unwrap();
    let direct = f.flat_projection().unwrap();
    let frame = sections.frame(&b, &f.partition);
    let (alg, lambdas) = mishchenko_core::algebra::group_algebra(&g);
    for x in 0..f.space.len() {
        assert!(from_sections.p_a.value(x).max_abs_diff(direct.p_a.value(x)).unwrap() < 1e-15);
        for i in 0..frame.len() {
            for j in 0..frame.len() {
                let e = m_inner(&b, &frame[i], &frame[j]).unwrap().element_at(&alg, &lambdas, x).unwrap();
                assert!(e.max_abs_diff(&direct.p_a.value(x).entry(i, j)).unwrap() < 1e-12);
            }
        }
    }
}

#[test]
fn unrefined_cover_is_rejected_by_the_chern_cochain() {
    let s = SampledSpace::sphere(1).unwrap();
    let p = bott_field(&s).unwrap();
    let whole = mishchenko_core::space::OpenCover::new(s.len(), vec![(0..s.len()).collect()]).unwrap();
    let far = (0..s.len()).max_by(|&a, &b| s.distance(0, a).total_cmp(&s.distance(0, b))).unwrap();
    let tuples = Arc::new(CoverTupleSet::empty(Arc::new(whole), 2).with_extra([vec![0, far, 1]]).unwrap());
    let err = chern_cochain(&p, 1, &tuples, &SimplexRule::default_for(1).unwrap(), 64).unwrap_err();
    assert!(matches!(err, Error::OscillationViolated { .. }));
}
