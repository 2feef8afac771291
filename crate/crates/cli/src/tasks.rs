//! The experiment tasks. Each returns the checks it ran; numerical
//! failures become failed checks named after the violated invariant.

use std::collections::BTreeMap;
use std::sync::Arc;

use mishchenko_core::algebra::{group_algebra, FiniteGroup};
use mishchenko_core::chern::{chern_cochain, solve_coboundary, ProjectionField, OSCILLATION_BOUND};
use mishchenko_core::flat::{
    build_flat_projection, flatness_cochains, sample_spacing, validate_cocycle, FlatProjection, FlatnessOptions,
    FlatnessReport,
};
use mishchenko_core::index::{index_simple, l2_index_via_chern, CertificateTolerances};
use mishchenko_core::mishchenko::crossed_module_ops::tensor_inner;
use mishchenko_core::mishchenko::{
    group_function_adjoint, group_function_product, m_inner, m_right_action, phi_iso, y_inner, z_group_action,
    CrossedVector, GroupFunction, ModuleSpace, ModuleVector, PrincipalBundle, Sections,
};
use mishchenko_core::quadrature::SimplexRule;
use mishchenko_core::space::{
    cover_from_closed_family, enumerate_tuples, lemma_violations, refine_until_oscillation, CoverTupleSet,
    OpenCover, PartitionOfUnity, SampledSpace,
};
use mishchenko_core::Error;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{self, ConfigError, ExperimentConfig, FamilySpec, FieldSpec, Tolerances};
use crate::report::{num, Check, Outcome, Table};

#[derive(Debug)]
pub enum TaskError {
    Config(ConfigError),
    Numerical(Error),
}

impl From<ConfigError> for TaskError {
    fn from(e: ConfigError) -> Self {
        TaskError::Config(e)
    }
}

impl From<Error> for TaskError {
    fn from(e: Error) -> Self {
        TaskError::Numerical(e)
    }
}

pub type TaskResult = Result<Outcome, TaskError>;

pub struct Context {
    pub seed: u64,
    pub tol: Tolerances,
}

/// The invariant a core error reports a violation of.
pub fn invariant(e: &Error) -> &'static str {
    match e {
        Error::InvalidCocycle(_) | Error::MissingTransition { .. } => "cocycle",
        Error::CoverPrecondition(_) => "cover_lemma",
        Error::OscillationViolated { .. } => "oscillation",
        Error::RankJump { .. } => "constant_rank",
        Error::CertificateFailed(_) => "certificate",
        Error::NotIdempotent { .. } => "idempotency",
        Error::NotProjection(_) => "projection",
        Error::InvalidBundle(_) => "bundle",
        Error::ContourPierced { .. } => "spectral_gap",
        Error::ChainEscapesCover(_) | Error::MissingFace(_) => "tuple_coverage",
        _ => "numerics",
    }
}

fn failure(out: &mut Outcome, e: &Error) {
    out.check(Check::failed(invariant(e), e.to_string()));
}

fn options(c: &ExperimentConfig, ctx: &Context, space: &SampledSpace, n: usize) -> Result<FlatnessOptions, Error> {
    Ok(FlatnessOptions {
        tuple_budget: c.budgets.tuples.unwrap_or(space.len() + 40),
        seed: ctx.seed,
        contour_nodes: c.budgets.contour_nodes,
        rule: if n > 0 { Some(SimplexRule::duffy(2 * n, c.budgets.simplex_nodes)?) } else { None },
        thickening: None,
    })
}

struct Flat {
    space: SampledSpace,
    fp: FlatProjection,
    group: Option<(FiniteGroup, BTreeMap<(usize, usize), usize>)>,
}

/// Validates the configured cocycle and builds `p_A`; `None` when the
/// cocycle fails validation (the failed checks are already recorded).
fn flat_projection(c: &ExperimentConfig, ctx: &Context, out: &mut Outcome) -> Result<Option<Flat>, TaskError> {
    let s = config::space(c)?;
    let (cover, partition) = config::cover(c, &s)?;
    let resolved = config::cocycle(c, &cover)?;
    out.detail("points", s.space.len());
    out.detail("cover_sets", cover.len());
    let report = match validate_cocycle(&resolved.cocycle, &partition, None) {
        Ok(r) => r,
        Err(e) => {
            failure(out, &e);
            return Ok(None);
        }
    };
    let tol = ctx.tol.cocycle;
    for (name, v) in [
        ("cocycle", report.cocycle),
        ("unitarity", report.unitarity),
        ("diagonal", report.diagonal),
        ("fiber_projection", report.fiber),
        ("support", report.support),
    ] {
        out.check(Check::at_most(name, v, tol));
    }
    if !report.violations.is_empty() {
        let v: Vec<BTreeMap<&str, usize>> = report
            .violations
            .iter()
            .map(|&(i, j, k, x)| BTreeMap::from([("i", i), ("j", j), ("k", k), ("point", x)]))
            .collect();
        out.detail("cocycle_violations", v);
    }
    if report.worst() > tol {
        return Ok(None);
    }
    let fp = match build_flat_projection(&resolved.cocycle, &partition) {
        Ok(fp) => fp,
        Err(e) => {
            failure(out, &e);
            return Ok(None);
        }
    };
    out.check(Check::at_most("idempotency", fp.idempotency_residual, tol));
    out.detail("phi_q", fp.cocycle.fiber().trace_phi().re);
    Ok(Some(Flat { space: s.space, fp, group: resolved.group }))
}

fn flatness_checks(out: &mut Outcome, r: &FlatnessReport, tol: &Tolerances) {
    if r.degree == 0 {
        out.check(Check::at_most("degree0", r.degree0_residual, tol.degree0));
        return;
    }
    let d = r.degree * 2;
    out.check(Check::at_most(&format!("identity_degree{d}"), r.identity_residual, tol.identity));
    out.check(Check::at_most(
        &format!("coboundary_degree{d}"),
        r.coboundary_residual.unwrap_or(f64::NAN),
        tol.coboundary,
    ));
    out.check(Check::at_most(&format!("closed_degree{d}"), r.cocycle_residual.unwrap_or(f64::NAN), tol.coboundary));
    out.check(Check::at_most(&format!("imaginary_degree{d}"), r.max_imaginary, tol.imaginary));
}

fn cochain_table(name: &str, tuples: &CoverTupleSet, columns: &[&[f64]]) -> Table {
    let mut t = Table::new(name, vec!["index", "tuple", "owner", "ch_pa", "ch_p"]);
    for i in 0..tuples.len() {
        let tuple: Vec<String> = tuples.tuple(i).iter().map(|x| x.to_string()).collect();
        let mut row = vec![i.to_string(), tuple.join(" "), tuples.owner(i).to_string()];
        row.extend(columns.iter().map(|c| num(c[i])));
        t.push(row);
    }
    t
}

fn projection_table(name: &str, p: &ProjectionField) -> Table {
    let mut t = Table::new(name, vec!["point", "site", "row", "col", "re", "im"]);
    for (x, v) in p.values().iter().enumerate() {
        for (s, b) in v.site_blocks().iter().enumerate() {
            for r in 0..b.nrows() {
                for c in 0..b.ncols() {
                    let z = b[(r, c)];
                    if z.norm() > 0.0 {
                        t.push(vec![x.to_string(), s.to_string(), r.to_string(), c.to_string(), num(z.re), num(z.im)]);
                    }
                }
            }
        }
    }
    t
}

pub fn flatness(c: &ExperimentConfig, ctx: &Context) -> TaskResult {
    let mut out = Outcome::default();
    let Some(flat) = flat_projection(c, ctx, &mut out)? else {
        return Ok(out);
    };
    out.tables.push(projection_table("p_a.csv", &flat.fp.p_a));
    let mut degrees = vec![0];
    if c.degree > 0 {
        degrees.push(c.degree);
    }
    let mut reports = Vec::new();
    for n in degrees {
        let opts = options(c, ctx, &flat.space, n)?;
        match flatness_cochains(&flat.space, &flat.fp, n, &opts) {
            Ok((r, ch)) => {
                flatness_checks(&mut out, &r, &ctx.tol);
                let tuples = ch.ch_pa.tuples().clone();
                out.tables.push(cochain_table(
                    &format!("cochain_degree{}.csv", 2 * n),
                    &tuples,
                    &[ch.ch_pa.values(), ch.ch_p.values()],
                ));
                reports.push(r);
            }
            Err(e) => failure(&mut out, &e),
        }
    }
    out.detail("reports", reports);
    Ok(out)
}

pub fn chern(c: &ExperimentConfig, ctx: &Context) -> TaskResult {
    let mut out = Outcome::default();
    let n = c.degree;
    let spec = c.field.clone().ok_or_else(|| ConfigError::at("/field", "required for this task"))?;
    let flat_field = if matches!(spec, FieldSpec::Flat) {
        match flat_projection(c, ctx, &mut out)? {
            Some(f) => Some(f.fp.p_a),
            None => return Ok(out),
        }
    } else {
        None
    };
    let s = config::space(c)?;
    let (cover, _) = config::cover(c, &s)?;
    let p = config::field(c, &spec, &s.space, flat_field.as_ref(), ctx.seed, "/field")?;
    let refined = refine_until_oscillation(&s.space, &cover, |x, y| p.distance(x, y), OSCILLATION_BOUND)?;
    let refined = Arc::new(refined);
    out.detail("points", s.space.len());
    out.detail("cover_sets", cover.len());
    out.detail("refined_sets", refined.len());
    let budget = c.budgets.tuples.unwrap_or(s.space.len() + 40).max(refined.len()).max(s.space.len());
    let upper = Arc::new(enumerate_tuples(&refined, 2 * n + 1, budget, ctx.seed)?);
    let mut tuples = upper.faces()?;
    let chain = s.space.chain(2 * n).cloned();
    if let Some(chain) = &chain {
        match tuples.clone().with_extra(chain.iter().map(|(t, _)| t.clone())) {
            Ok(t) => tuples = t,
            Err(e) => {
                out.detail("pairing_skipped", e.to_string());
            }
        }
    }
    let tuples = Arc::new(tuples);
    let rule = if n > 0 { SimplexRule::duffy(2 * n, c.budgets.simplex_nodes)? } else { SimplexRule::default_for(0)? };
    let ch = match chern_cochain(&p, n, &tuples, &rule, c.budgets.contour_nodes) {
        Ok(ch) => ch,
        Err(e) => {
            failure(&mut out, &e);
            return Ok(out);
        }
    };
    out.check(Check::at_most("imaginary", ch.max_imaginary, ctx.tol.imaginary));
    let closed = ch.cochain.cocycle_residual(&upper)?;
    out.check(Check::at_most("closed", closed, ctx.tol.coboundary));
    out.detail("tuples", tuples.len());
    out.detail("sup_norm", ch.cochain.sup_norm());
    out.detail("closed_residual", closed);
    if n > 0 {
        let sol = solve_coboundary(&ch.cochain, None)?;
        out.detail("coboundary_residual", sol.residual);
        out.detail("coboundary_relative", sol.relative);
    }
    if let Some(chain) = &chain {
        if let Ok(pairing) = ch.cochain.pair_with_chain(chain) {
            out.detail("pairing", pairing);
            if matches!(spec, FieldSpec::Bott) && n == 1 {
                out.check(Check::at_most("bott_pairing", (pairing - 1.0).abs(), ctx.tol.pairing));
            }
        }
    }
    let mut t = Table::new("chern.csv", vec!["index", "tuple", "owner", "value"]);
    for i in 0..tuples.len() {
        let tuple: Vec<String> = tuples.tuple(i).iter().map(|x| x.to_string()).collect();
        t.push(vec![i.to_string(), tuple.join(" "), tuples.owner(i).to_string(), num(ch.cochain.values()[i])]);
    }
    out.tables.push(t);
    Ok(out)
}

pub fn index(c: &ExperimentConfig, ctx: &Context) -> TaskResult {
    let mut out = Outcome::default();
    let class = c.class.clone().ok_or_else(|| ConfigError::at("/class", "required for this task"))?;
    let Some(flat) = flat_projection(c, ctx, &mut out)? else {
        return Ok(out);
    };
    out.tables.push(projection_table("p_a.csv", &flat.fp.p_a));
    let p = config::field(c, &class.p, &flat.space, None, ctx.seed, "/class/p")?;
    let q = config::field(c, &class.q, &flat.space, None, ctx.seed.wrapping_add(1), "/class/q")?;
    for (at, f) in [("/class/p", &p), ("/class/q", &q)] {
        if f.algebra().sites() != 1 || f.algebra().block_dim() != 1 {
            return Err(ConfigError::at(at, "index classes must be scalar fields").into());
        }
    }
    if let Err(e) = index_simple(&p, &q) {
        failure(&mut out, &e);
        return Ok(out);
    }
    let opts = options(c, ctx, &flat.space, 1)?;
    let tol = CertificateTolerances {
        degree0: ctx.tol.degree0,
        identity: ctx.tol.identity,
        coboundary: ctx.tol.coboundary,
    };
    match l2_index_via_chern(&flat.space, &flat.fp, (&p, &q), &opts, class.degree_two, tol) {
        Ok(r) => {
            out.check(Check::holds("certificate", true, "flatness certificate holds"));
            let scale = (r.ind_simple.unsigned_abs() as f64).max(1.0);
            out.check(Check::at_most("integrality", r.integrality_residual, ctx.tol.degree0 * scale));
            out.detail("report", r);
        }
        Err(e) => failure(&mut out, &e),
    }
    Ok(out)
}

fn random_values(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// The bundle of the configuration: explicit orbits and action, or glued
/// from a group cocycle on the configured cover.
struct Bundle {
    bundle: PrincipalBundle,
    frame: Option<(Sections, PartitionOfUnity, Option<FlatProjection>)>,
}

fn bundle(c: &ExperimentConfig, ctx: &Context, out: &mut Outcome) -> Result<Option<Bundle>, TaskError> {
    let (_, group) = config::algebra(c)?;
    let group = group.ok_or_else(|| ConfigError::at("/algebra", "principal bundles need a group algebra"))?;
    if let Some(spec) = &c.bundle {
        let order = group.order();
        if spec.action.len() != order {
            return Err(ConfigError::at("/bundle/action", format!("need {order} permutations")).into());
        }
        let total = spec.action[0].len();
        let mut quotient = vec![usize::MAX; total];
        for (x, orbit) in spec.orbits.iter().enumerate() {
            for (k, &y) in orbit.iter().enumerate() {
                let at = format!("/bundle/orbits/{x}/{k}");
                if y >= total {
                    return Err(ConfigError::at(at, format!("point {y} outside {total} points")).into());
                }
                if quotient[y] != usize::MAX {
                    return Err(ConfigError::at(at, format!("point {y} lies in two orbits")).into());
                }
                quotient[y] = x;
            }
        }
        if let Some(y) = quotient.iter().position(|&x| x == usize::MAX) {
            return Err(ConfigError::at("/bundle/orbits", format!("point {y} lies in no orbit")).into());
        }
        let coords = SampledSpace::new((0..total).map(|y| vec![y as f64]).collect())?;
        let b = match PrincipalBundle::new(coords, group, spec.action.clone(), quotient) {
            Ok(b) => b,
            Err(e) => {
                failure(out, &e);
                return Ok(None);
            }
        };
        out.check(Check::holds("bundle", true, "free right action with the given orbits"));
        let frame = if c.cover.is_some() {
            let s = config::space(c)?;
            if s.space.len() != b.base_points() {
                return Err(ConfigError::at(
                    "/space",
                    format!("{} points for {} orbits", s.space.len(), b.base_points()),
                )
                .into());
            }
            let (cover, partition) = config::cover(c, &s)?;
            let sections = Sections::least(&b, &cover)?;
            Some((sections, partition, None))
        } else {
            None
        };
        return Ok(Some(Bundle { bundle: b, frame }));
    }
    let Some(flat) = flat_projection(c, ctx, out)? else {
        return Ok(None);
    };
    let (g, elements) = flat.group.clone().ok_or_else(|| ConfigError::at("/cocycle", "need a group cocycle"))?;
    let cover = flat.fp.cocycle.cover().clone();
    let (b, sections) = PrincipalBundle::from_cocycle(&flat.space, &g, &cover, &elements)?;
    out.check(Check::holds("bundle", true, "glued from the group cocycle"));
    let partition = flat.fp.partition.clone();
    Ok(Some(Bundle { bundle: b, frame: Some((sections, partition, Some(flat.fp))) }))
}

pub fn mishchenko_verify(c: &ExperimentConfig, ctx: &Context) -> TaskResult {
    let mut out = Outcome::default();
    let Some(Bundle { bundle: b, frame }) = bundle(c, ctx, &mut out)? else {
        return Ok(out);
    };
    let g = b.group().clone();
    let order = g.order();
    let n = b.total_points();
    out.detail("total_points", n);
    out.detail("base_points", b.base_points());
    out.detail("group_order", order);
    let tol = ctx.tol.module;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    let mut bump = |k: &'static str, v: f64| {
        let e = worst.entry(k).or_insert(0.0);
        *e = e.max(v);
    };
    let mut min_eigen = f64::INFINITY;
    for _ in 0..c.budgets.pairs {
        let xi = ModuleVector::new(ModuleSpace::Z, random_values(n, &mut rng));
        let zeta = ModuleVector::new(ModuleSpace::Z, random_values(n, &mut rng));
        bump("v_identity", z_group_action(&b, g.identity(), &xi)?.max_abs_diff(&xi));
        let ip = y_inner(&b, &xi, &zeta)?;
        for a in 0..order {
            let back = z_group_action(&b, a, &z_group_action(&b, g.inv(a), &xi)?)?;
            bump("v_inverse", back.max_abs_diff(&xi));
            let va = z_group_action(&b, a, &xi)?;
            let vb = z_group_action(&b, a, &zeta)?;
            bump("v_isometry", max_diff(&y_inner(&b, &va, &vb)?, &ip));
        }
        let xm = xi.retag(ModuleSpace::M);
        let zm = zeta.retag(ModuleSpace::M);
        let m = m_inner(&b, &xm, &zm)?;
        bump("m_identity_component", max_diff(&m.values[g.identity()], &ip));
        bump("m_adjoint", group_function_adjoint(&g, &m).max_abs_diff(&m_inner(&b, &zm, &xm)?));
        let f = GroupFunction { values: (0..order).map(|_| random_values(b.base_points(), &mut rng)).collect() };
        let lhs = m_inner(&b, &xm, &m_right_action(&b, &zm, &f)?)?;
        bump("m_module", lhs.max_abs_diff(&group_function_product(&g, &m, &f)));
        min_eigen = min_eigen.min(m_inner(&b, &xm, &xm)?.min_eigenvalue(&g)?);
        let y1 = ModuleVector::new(ModuleSpace::Y, random_values(n, &mut rng));
        let y2 = ModuleVector::new(ModuleSpace::Y, random_values(n, &mut rng));
        let z1 = CrossedVector { values: (0..order).map(|_| random_values(n, &mut rng)).collect() };
        let z2 = CrossedVector { values: (0..order).map(|_| random_values(n, &mut rng)).collect() };
        let lhs = tensor_inner(&b, (&y1, &z1), (&y2, &z2))?;
        let rhs = m_inner(&b, &phi_iso(&b, &y1, &z1)?, &phi_iso(&b, &y2, &z2)?)?;
        bump("phi_isometry", lhs.max_abs_diff(&rhs));
    }
    let ones = ModuleVector::new(ModuleSpace::Y, vec![Complex64::new(1.0, 0.0); n]);
    let target = ModuleVector::new(ModuleSpace::Z, random_values(n, &mut rng));
    let image = phi_iso(&b, &ones, &CrossedVector::at(order, g.identity(), &target))?;
    bump("phi_surjective", image.max_abs_diff(&target.retag(ModuleSpace::M)));
    if let Some((sections, partition, fp)) = &frame {
        let rho = sections.frame(&b, partition);
        let xi = ModuleVector::new(ModuleSpace::M, random_values(n, &mut rng));
        let mut rebuilt = ModuleVector::zero(ModuleSpace::M, n);
        for r in &rho {
            rebuilt = rebuilt.add(&m_right_action(&b, r, &m_inner(&b, r, &xi)?)?);
        }
        bump("frame_reconstruction", rebuilt.max_abs_diff(&xi));
        let direct = match fp {
            Some(fp) => Some(fp.p_a.clone()),
            None => match sections.mishchenko_cocycle(&b).and_then(|cc| build_flat_projection(&cc, partition)) {
                Ok(fp) => Some(fp.p_a),
                Err(e) => {
                    failure(&mut out, &e);
                    None
                }
            },
        };
        if let Some(p_a) = direct {
            let (alg, lambdas) = group_algebra(&g);
            let mut gram = 0.0_f64;
            for (i, ri) in rho.iter().enumerate() {
                for (j, rj) in rho.iter().enumerate() {
                    let e = m_inner(&b, ri, rj)?;
                    for x in 0..b.base_points() {
                        let got = e.element_at(&alg, &lambdas, x)?;
                        gram = gram.max(got.max_abs_diff(&p_a.value(x).entry(i, j))?);
                    }
                }
            }
            bump("frame_gram_is_p_a", gram);
        }
    }
    for (k, v) in &worst {
        out.check(Check::at_most(k, *v, tol));
    }
    out.check(Check::at_most("m_positivity", (-min_eigen).max(0.0), tol));
    out.detail("pairs", c.budgets.pairs);
    out.detail("min_eigenvalue", min_eigen);
    Ok(out)
}

/// Sets of `cover` meeting every `K_i` of some subfamily with empty
/// intersection, by enumerating all subfamilies.
fn exhaustive_violations(cover: &OpenCover, family: &[Vec<usize>]) -> (usize, usize) {
    let n = cover.points();
    let member: Vec<Vec<bool>> = family
        .iter()
        .map(|k| {
            let mut m = vec![false; n];
            k.iter().for_each(|&x| m[x] = true);
            m
        })
        .collect();
    let l = family.len();
    let (mut checked, mut failures) = (0, 0);
    for u in cover.sets() {
        for mask in 1u64..(1 << l) {
            let idx: Vec<usize> = (0..l).filter(|i| mask >> i & 1 == 1).collect();
            let meets_all = idx.iter().all(|&i| u.iter().any(|&x| member[i][x]));
            let common = (0..n).any(|x| idx.iter().all(|&i| member[i][x]));
            checked += 1;
            if meets_all && !common {
                failures += 1;
            }
        }
    }
    (checked, failures)
}

pub fn cover_lemma(c: &ExperimentConfig, ctx: &Context) -> TaskResult {
    let mut out = Outcome::default();
    let s = config::space(c)?.space;
    let spec = c.family.clone().ok_or_else(|| ConfigError::at("/family", "required for this task"))?;
    let n = s.len();
    let mut families: Vec<(Vec<Vec<usize>>, f64)> = Vec::new();
    match spec {
        FamilySpec::Explicit { sets, thickening } => {
            if sets.is_empty() || sets.len() > 12 {
                return Err(ConfigError::at("/family/explicit/sets", "need between 1 and 12 sets").into());
            }
            for (a, k) in sets.iter().enumerate() {
                if k.is_empty() {
                    return Err(ConfigError::at(format!("/family/explicit/sets/{a}"), "closed sets must be non-empty").into());
                }
                if let Some(b) = k.iter().position(|&x| x >= n) {
                    return Err(ConfigError::at(format!("/family/explicit/sets/{a}/{b}"), "point outside the space").into());
                }
            }
            families.push((sets, thickening.unwrap_or(0.0)));
        }
        FamilySpec::Random { families: count, max_sets, thickening } => {
            if count == 0 {
                return Err(ConfigError::at("/family/random/families", "must be positive").into());
            }
            if max_sets == 0 || max_sets > 12 {
                return Err(ConfigError::at("/family/random/max_sets", "need between 1 and 12 sets").into());
            }
            let diameter = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| s.distance(x, y)).fold(0.0, f64::max);
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            for _ in 0..count {
                let l = rng.random_range(1..=max_sets);
                let family = (0..l)
                    .map(|_| {
                        let center = rng.random_range(0..n);
                        let r = rng.random_range(0.15..0.6) * diameter;
                        (0..n).filter(|&x| s.distance(center, x) < r).collect()
                    })
                    .collect();
                let t = thickening.unwrap_or_else(|| rng.random_range(0.0..1.5) * sample_spacing(&s));
                families.push((family, t));
            }
        }
    }
    let (mut checked, mut failures, mut flagged, mut sets) = (0, 0, 0, 0);
    let mut rows = Table::new("cover_sets.csv", vec!["family", "set", "points", "members"]);
    for (f, (family, t)) in families.iter().enumerate() {
        let cover = match cover_from_closed_family(&s, family, *t) {
            Ok(cv) => cv,
            Err(e) => {
                failure(&mut out, &e);
                return Ok(out);
            }
        };
        let (ch, fl) = exhaustive_violations(&cover, family);
        checked += ch;
        failures += fl;
        flagged += lemma_violations(&cover, family).len();
        sets += cover.len();
        for (i, u) in cover.sets().iter().enumerate() {
            let m: Vec<String> = u.iter().map(|x| x.to_string()).collect();
            rows.push(vec![f.to_string(), i.to_string(), u.len().to_string(), m.join(" ")]);
        }
    }
    out.check(Check::holds("lemma_exhaustive", failures == 0, format!("{failures} of {checked} pairs violate")));
    out.check(Check::holds("lemma_violations", flagged == 0, format!("{flagged} sets flagged")));
    out.detail("families", families.len());
    out.detail("cover_sets", sets);
    out.detail("pairs_checked", checked);
    out.tables.push(rows);
    Ok(out)
}
