//! Flat bundles from locally constant unitary cocycles.
//!
//! A cocycle `g_ij` with values in the unitaries of `q M_m(A) q` and a
//! partition of unity `chi_i` give the projection
//! `p_A = [sqrt(chi_i chi_j) g_ij]` of size `N m` and the scalar projection
//! `p = [sqrt(chi_i chi_j)] = v v*`, `v = (sqrt(chi_i))`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{group_algebra, AlgebraMatrix, FiniteGroup, SiteAlgebra};
use crate::chern::{chern_cochain, solve_coboundary, ChernCochain, Cochain, ProjectionField, OSCILLATION_BOUND};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quadrature::SimplexRule;
use crate::space::{
    cover_from_closed_family, enumerate_tuples, lemma_violations, refine_until, CoverTupleSet,
    OpenCover, PartitionOfUnity, SampledSpace,
};

/// Transition values per point; `None` where undefined.
pub type Transition = Vec<Option<AlgebraMatrix>>;

#[derive(Debug, Clone)]
pub struct UnitaryCocycle {
    fiber: AlgebraMatrix,
    cover: Arc<OpenCover>,
    transitions: BTreeMap<(usize, usize), Transition>,
}

impl UnitaryCocycle {
    /// Arbitrary pointwise transitions; pairs left out are treated as
    /// undefined until [`UnitaryCocycle::complete`] fills them.
    pub fn new(
        fiber: AlgebraMatrix,
        cover: Arc<OpenCover>,
        transitions: BTreeMap<(usize, usize), Transition>,
    ) -> Result<Self> {
        for (&(i, j), t) in &transitions {
            if i >= cover.len() || j >= cover.len() {
                return Err(Error::InvalidCocycle(format!("pair ({i}, {j}) outside the cover")));
            }
            if t.len() != cover.points() {
                return Err(Error::InvalidCocycle(format!(
                    "transition ({i}, {j}) has {} point values",
                    t.len()
                )));
            }
            for g in t.iter().flatten() {
                if g.size() != fiber.size() || **g.algebra() != **fiber.algebra() {
                    return Err(Error::InvalidCocycle(format!(
                        "transition ({i}, {j}) does not match the fiber"
                    )));
                }
            }
        }
        Ok(UnitaryCocycle { fiber, cover, transitions })
    }

    /// Constant transitions on each overlap `V_i cap V_j`.
    pub fn constant(
        fiber: AlgebraMatrix,
        cover: Arc<OpenCover>,
        values: BTreeMap<(usize, usize), AlgebraMatrix>,
    ) -> Result<Self> {
        let transitions = values
            .into_iter()
            .map(|((i, j), g)| {
                let t = (0..cover.points())
                    .map(|x| (cover.contains(i, x) && cover.contains(j, x)).then(|| g.clone()))
                    .collect();
                ((i, j), t)
            })
            .collect();
        Self::new(fiber, cover, transitions)
    }

    /// Group-valued cocycle `g_ij = lambda_{h_ij}` with fiber `1` in the
    /// group algebra.
    pub fn from_group_elements(
        group: &FiniteGroup,
        cover: Arc<OpenCover>,
        elements: &BTreeMap<(usize, usize), usize>,
    ) -> Result<Self> {
        let (algebra, lambdas) = group_algebra(group);
        let fiber = AlgebraMatrix::identity(&algebra, 1);
        let values = elements.iter().map(|(&k, &g)| (k, lambdas[g].clone())).collect();
        Ok(Self::constant(fiber, cover, values)?.complete())
    }

    /// Sets `g_ii = q` on `V_i` and `g_ji = g_ij*` where `g_ji` is absent.
    pub fn complete(mut self) -> Self {
        let n = self.cover.len();
        for i in 0..n {
            self.transitions.entry((i, i)).or_insert_with(|| {
                (0..self.cover.points())
                    .map(|x| self.cover.contains(i, x).then(|| self.fiber.clone()))
                    .collect()
            });
        }
        let keys: Vec<(usize, usize)> = self.transitions.keys().copied().collect();
        for (i, j) in keys {
            if !self.transitions.contains_key(&(j, i)) {
                let t: Transition = self.transitions[&(i, j)]
                    .iter()
                    .map(|g| g.as_ref().map(AlgebraMatrix::adjoint))
                    .collect();
                self.transitions.insert((j, i), t);
            }
        }
        self
    }

    pub fn fiber(&self) -> &AlgebraMatrix {
        &self.fiber
    }

    pub fn cover(&self) -> &Arc<OpenCover> {
        &self.cover
    }

    pub fn algebra(&self) -> &Arc<SiteAlgebra> {
        self.fiber.algebra()
    }

    pub fn transition(&self, i: usize, j: usize, x: usize) -> Option<&AlgebraMatrix> {
        self.transitions.get(&(i, j)).and_then(|t| t[x].as_ref())
    }

    /// Overwrites one transition value.
    pub fn set_transition(&mut self, i: usize, j: usize, x: usize, g: Option<AlgebraMatrix>) {
        let n = self.cover.points();
        self.transitions.entry((i, j)).or_insert_with(|| vec![None; n])[x] = g;
    }
}

/// Worst violation of each cocycle identity over the support overlaps.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct CocycleReport {
    /// `||q^2 - q|| + ||q* - q||`
    pub fiber: f64,
    /// `||g_ii - q||`
    pub diagonal: f64,
    /// `max(||q g - g||, ||g q - g||)`
    pub support: f64,
    /// `max(||g* g - q||, ||g g* - q||)`
    pub unitarity: f64,
    /// `||g_ij g_jk - g_ik||` on triple support overlaps
    pub cocycle: f64,
    /// Largest change of a transition inside one set of the working cover.
    pub local_variation: Option<f64>,
    /// Up to 16 offending `(i, j, k, point)` for the cocycle identity.
    pub violations: Vec<(usize, usize, usize, usize)>,
}

impl CocycleReport {
    pub fn worst(&self) -> f64 {
        [self.fiber, self.diagonal, self.support, self.unitarity, self.cocycle, self.local_variation.unwrap_or(0.0)]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Checks every identity on the closed supports: `g_ij` is needed where
/// `chi_i chi_j > 0`, triples where `chi_i chi_j chi_k > 0`. With a
/// working cover, also measures how far each `g_ij` is from constant on
/// its sets.
pub fn validate_cocycle(
    cocycle: &UnitaryCocycle,
    partition: &PartitionOfUnity,
    working: Option<&OpenCover>,
) -> Result<CocycleReport> {
    let n = cocycle.cover.len();
    if partition.len() != n {
        return Err(Error::InvalidPartition(format!("{} functions for {n} sets", partition.len())));
    }
    let q = &cocycle.fiber;
    let mut r = CocycleReport {
        fiber: q.idempotency_residual() + q.selfadjoint_residual(),
        ..CocycleReport::default()
    };
    let points = cocycle.cover.points();
    let supports: Vec<Vec<bool>> =
        (0..n).map(|i| (0..points).map(|x| partition.value(i, x) > 0.0).collect()).collect();
    let need = |i: usize, j: usize, x: usize| -> Result<&AlgebraMatrix> {
        cocycle.transition(i, j, x).ok_or(Error::MissingTransition { i, j, point: x })
    };
    for x in 0..points {
        let active: Vec<usize> = (0..n).filter(|&i| supports[i][x]).collect();
        for &i in &active {
            r.diagonal = r.diagonal.max(need(i, i, x)?.sub(q)?.norm());
            for &j in &active {
                let g = need(i, j, x)?;
                r.support = r.support.max(q.mul(g)?.sub(g)?.norm()).max(g.mul(q)?.sub(g)?.norm());
                let gs = g.adjoint();
                r.unitarity = r
                    .unitarity
                    .max(gs.mul(g)?.sub(q)?.norm())
                    .max(g.mul(&gs)?.sub(q)?.norm());
                for &k in &active {
                    let v = g.mul(need(j, k, x)?)?.sub(need(i, k, x)?)?.norm();
                    if v > 1e-10 && r.violations.len() < 16 {
                        r.violations.push((i, j, k, x));
                    }
                    r.cocycle = r.cocycle.max(v);
                }
            }
        }
    }
    if let Some(w) = working {
        let mut worst = 0.0_f64;
        for set in w.sets() {
            for i in 0..n {
                for j in 0..n {
                    let defined: Vec<&AlgebraMatrix> = set
                        .iter()
                        .filter(|&&x| supports[i][x] && supports[j][x])
                        .filter_map(|&x| cocycle.transition(i, j, x))
                        .collect();
                    if let Some((first, rest)) = defined.split_first() {
                        for g in rest {
                            worst = worst.max(g.sub(first)?.max_abs());
                        }
                    }
                }
            }
        }
        r.local_variation = Some(worst);
    }
    Ok(r)
}

#[derive(Debug, Clone)]
pub struct FlatProjection {
    pub p_a: ProjectionField,
    pub p: ProjectionField,
    /// `v(x) = (sqrt(chi_i(x)))_i`, with `v* v = 1` and `v v* = p`.
    pub v: Vec<Vec<f64>>,
    pub cocycle: UnitaryCocycle,
    pub partition: PartitionOfUnity,
    pub validation: CocycleReport,
    /// `max_x ||p_A(x)^2 - p_A(x)||`
    pub idempotency_residual: f64,
}

/// Default tolerance on the cocycle identities before building `p_A`.
pub const COCYCLE_TOLERANCE: f64 = 1e-10;

pub fn build_flat_projection(cocycle: &UnitaryCocycle, partition: &PartitionOfUnity) -> Result<FlatProjection> {
    let validation = validate_cocycle(cocycle, partition, None)?;
    if validation.worst() > COCYCLE_TOLERANCE {
        return Err(Error::InvalidCocycle(describe(&validation)));
    }
    assemble(cocycle, partition, validation)
}

/// Builds `p_A` without validating, for sensitivity experiments.
pub fn assemble_unchecked(cocycle: &UnitaryCocycle, partition: &PartitionOfUnity) -> Result<Vec<AlgebraMatrix>> {
    let n = cocycle.cover.len();
    let alg = cocycle.algebra().clone();
    let m = cocycle.fiber.size();
    let zero = AlgebraMatrix::zeros(&alg, m);
    (0..cocycle.cover.points())
        .map(|x| {
            let blocks_in: Vec<Vec<AlgebraMatrix>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let w = (partition.value(i, x) * partition.value(j, x)).sqrt();
                            match cocycle.transition(i, j, x) {
                                Some(g) if w > 0.0 => g.scale(Complex64::new(w, 0.0)),
                                _ => zero.clone(),
                            }
                        })
                        .collect()
                })
                .collect();
            block_matrix(&alg, m, &blocks_in)
        })
        .collect()
}

fn assemble(cocycle: &UnitaryCocycle, partition: &PartitionOfUnity, validation: CocycleReport) -> Result<FlatProjection> {
    let n = cocycle.cover.len();
    let m = cocycle.fiber.size();
    let points = cocycle.cover.points();
    let values = assemble_unchecked(cocycle, partition)?;
    let idempotency_residual = values.iter().map(|v| v.idempotency_residual()).fold(0.0, f64::max);
    let p_a = ProjectionField::new(cocycle.algebra().clone(), n * m, values)?;
    let v: Vec<Vec<f64>> =
        (0..points).map(|x| (0..n).map(|i| partition.value(i, x).sqrt()).collect()).collect();
    let p = ProjectionField::scalar(
        v.iter()
            .map(|vx| CMatrix::from_fn(n, n, |i, j| Complex64::new(vx[i] * vx[j], 0.0)))
            .collect(),
    )?;
    Ok(FlatProjection {
        p_a,
        p,
        v,
        cocycle: cocycle.clone(),
        partition: partition.clone(),
        validation,
        idempotency_residual,
    })
}

/// `N x N` grid of `m x m` matrices over the algebra into one matrix.
fn block_matrix(alg: &Arc<SiteAlgebra>, m: usize, grid: &[Vec<AlgebraMatrix>]) -> Result<AlgebraMatrix> {
    let n = grid.len();
    let k = alg.block_dim();
    let dim = n * m * k;
    let blocks = (0..alg.sites())
        .map(|s| {
            let mut out = CMatrix::zeros(dim, dim);
            for (i, row) in grid.iter().enumerate() {
                for (j, g) in row.iter().enumerate() {
                    out.view_mut((i * m * k, j * m * k), (m * k, m * k)).copy_from(&g.site_blocks()[s]);
                }
            }
            out
        })
        .collect();
    AlgebraMatrix::new(alg.clone(), n * m, blocks)
}

fn describe(r: &CocycleReport) -> String {
    let mut parts = Vec::new();
    for (name, v) in [
        ("fiber projection", r.fiber),
        ("g_ii = q", r.diagonal),
        ("q g = g = g q", r.support),
        ("unitarity g* g = g g* = q", r.unitarity),
        ("cocycle g_ij g_jk = g_ik", r.cocycle),
    ] {
        if v > COCYCLE_TOLERANCE {
            parts.push(format!("{name} violated by {v:.3e}"));
        }
    }
    if let Some(&(i, j, k, x)) = r.violations.first() {
        parts.push(format!("first cocycle violation at (i, j, k) = ({i}, {j}, {k}), point {x}"));
    }
    parts.join("; ")
}

/// Budgets for [`flatness_check`].
#[derive(Debug, Clone)]
pub struct FlatnessOptions {
    /// Total tuples of degree `2n + 1` (diagonals included).
    pub tuple_budget: usize,
    pub seed: u64,
    pub contour_nodes: usize,
    /// Simplex rule of degree `2n`; `None` uses the default.
    pub rule: Option<SimplexRule>,
    /// Thickening radius in the cover lemma; `None` uses 1.5 times the
    /// largest nearest-neighbour distance.
    pub thickening: Option<f64>,
}

impl Default for FlatnessOptions {
    fn default() -> Self {
        FlatnessOptions { tuple_budget: 0, seed: 0, contour_nodes: 64, rule: None, thickening: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FlatnessReport {
    pub degree: usize,
    pub phi_q: f64,
    pub working_cover_sets: usize,
    pub tuples: usize,
    /// (a) `sup |Ch^2n(p_A) - Ch^2n(p) phi(q)|`
    pub identity_residual: f64,
    /// (b) least-squares residual of `Ch^2n(p_A) = d f` (n >= 1)
    pub coboundary_residual: Option<f64>,
    pub coboundary_relative: Option<f64>,
    /// `sup |d Ch^2n(p_A)|` on the degree `2n + 1` tuples
    pub cocycle_residual: Option<f64>,
    /// (c) `sup |Ch^0(p_A) - phi(q)|`
    pub degree0_residual: f64,
    pub max_imaginary: f64,
    pub ch_pa_sup: f64,
    pub ch_p_sup: f64,
    pub validation: CocycleReport,
}

/// Largest nearest-neighbour distance in the sample.
pub fn sample_spacing(space: &SampledSpace) -> f64 {
    (0..space.len())
        .map(|x| {
            (0..space.len())
                .filter(|&y| y != x)
                .map(|y| space.distance(x, y))
                .fold(f64::INFINITY, f64::min)
        })
        .filter(|d| d.is_finite())
        .fold(0.0, f64::max)
}

/// The cover used for Chern cochains of a flat bundle: adapted to the
/// closed overlaps `K_ij = supp chi_i cap supp chi_j`, refining the
/// cocycle's cover, with both projections of oscillation at most 1/4 and
/// every transition constant on each set.
pub fn working_cover(space: &SampledSpace, fp: &FlatProjection, thickening: Option<f64>) -> Result<OpenCover> {
    let n = fp.cocycle.cover.len();
    let supports: Vec<Vec<usize>> = (0..n).map(|i| fp.partition.support(i)).collect();
    let mut family = Vec::new();
    for i in 0..n {
        for j in i..n {
            let k: Vec<usize> = supports[i].iter().copied().filter(|x| supports[j].binary_search(x).is_ok()).collect();
            if !k.is_empty() {
                family.push(k);
            }
        }
    }
    let eps = thickening.unwrap_or_else(|| 1.5 * sample_spacing(space));
    let lemma = cover_from_closed_family(space, &family, eps)?;
    let base = lemma.intersect(&fp.cocycle.cover)?;
    let constant_on = |set: &[usize]| {
        for i in 0..n {
            for j in 0..n {
                let mut first: Option<&AlgebraMatrix> = None;
                for &x in set {
                    if fp.partition.value(i, x) * fp.partition.value(j, x) > 0.0 {
                        if let Some(g) = fp.cocycle.transition(i, j, x) {
                            match first {
                                None => first = Some(g),
                                Some(f) => {
                                    if f.max_abs_diff(g).map_or(true, |d| d > 1e-12) {
                                        return false;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        true
    };
    let accept = |set: &[usize]| {
        crate::space::oscillation_of(set, |x, y| fp.p_a.distance(x, y)) <= OSCILLATION_BOUND
            && crate::space::oscillation_of(set, |x, y| fp.p.distance(x, y)) <= OSCILLATION_BOUND
            && constant_on(set)
    };
    let refined = refine_until(space, &base, accept)?;
    let bad = lemma_violations(&refined, &family);
    if !bad.is_empty() {
        return Err(Error::CoverPrecondition(format!(
            "cover-lemma implication fails on {} working sets",
            bad.len()
        )));
    }
    for (u, set) in refined.sets().iter().enumerate() {
        if !accept(set) {
            return Err(Error::CoverPrecondition(format!(
                "working set {u} violates the oscillation bound or transition constancy"
            )));
        }
    }
    Ok(refined)
}

/// Cochain-level flatness: degree-0 identity, the pointwise identity
/// `Ch^2n(p_A) = Ch^2n(p) phi(q)` and the coboundary certificate for
/// `Ch^2n(p_A)`.
pub fn flatness_check(
    space: &SampledSpace,
    fp: &FlatProjection,
    n: usize,
    options: &FlatnessOptions,
) -> Result<FlatnessReport> {
    Ok(flatness_cochains(space, fp, n, options)?.0)
}

/// The cochains behind a [`FlatnessReport`]: `Ch^2n(p_A)` and `Ch^2n(p)`
/// on the same tuples.
#[derive(Debug, Clone)]
pub struct FlatnessCochains {
    pub ch_pa: Cochain,
    pub ch_p: Cochain,
}

/// [`flatness_check`] together with the cochains it compared.
pub fn flatness_cochains(
    space: &SampledSpace,
    fp: &FlatProjection,
    n: usize,
    options: &FlatnessOptions,
) -> Result<(FlatnessReport, FlatnessCochains)> {
    let working = Arc::new(working_cover(space, fp, options.thickening)?);
    let validation = validate_cocycle(&fp.cocycle, &fp.partition, Some(&working))?;
    if validation.worst() > COCYCLE_TOLERANCE {
        return Err(Error::CoverPrecondition(format!(
            "transitions not constant on working sets: {:.3e}",
            validation.worst()
        )));
    }
    let phi_q = fp.cocycle.fiber.trace_phi().re;
    let budget = options.tuple_budget.max(working.len()).max(working.points());
    let t0 = Arc::new(enumerate_tuples(&working, 0, budget, options.seed)?);
    let ch0 = chern_cochain(&fp.p_a, 0, &t0, &SimplexRule::default_for(0)?, options.contour_nodes)?;
    let degree0_residual = ch0.cochain.values().iter().fold(0.0_f64, |a, v| a.max((v - phi_q).abs()));
    if n == 0 {
        let p0 = chern_cochain(&fp.p, 0, &t0, &SimplexRule::default_for(0)?, options.contour_nodes)?;
        let cochains = FlatnessCochains { ch_pa: ch0.cochain.clone(), ch_p: p0.cochain };
        let report = FlatnessReport {
            degree: 0,
            phi_q,
            working_cover_sets: working.len(),
            tuples: t0.len(),
            identity_residual: degree0_residual,
            coboundary_residual: None,
            coboundary_relative: None,
            cocycle_residual: None,
            degree0_residual,
            max_imaginary: ch0.max_imaginary,
            ch_pa_sup: ch0.cochain.sup_norm(),
            ch_p_sup: cochains.ch_p.sup_norm(),
            validation,
        };
        return Ok((report, cochains));
    }
    let rule = match &options.rule {
        Some(r) => r.clone(),
        None => SimplexRule::default_for(n)?,
    };
    let upper = Arc::new(enumerate_tuples(&working, 2 * n + 1, budget, options.seed)?);
    let tuples: Arc<CoverTupleSet> = Arc::new(upper.faces()?);
    let ch_pa: ChernCochain = chern_cochain(&fp.p_a, n, &tuples, &rule, options.contour_nodes)?;
    let ch_p: ChernCochain = chern_cochain(&fp.p, n, &tuples, &rule, options.contour_nodes)?;
    let identity_residual = ch_pa
        .cochain
        .values()
        .iter()
        .zip(ch_p.cochain.values())
        .fold(0.0_f64, |a, (x, y)| a.max((x - y * phi_q).abs()));
    let cocycle_residual = ch_pa.cochain.cocycle_residual(&upper)?;
    let solution = solve_coboundary(&ch_pa.cochain, None)?;
    let report = FlatnessReport {
        degree: n,
        phi_q,
        working_cover_sets: working.len(),
        tuples: tuples.len(),
        identity_residual,
        coboundary_residual: Some(solution.residual),
        coboundary_relative: Some(solution.relative),
        cocycle_residual: Some(cocycle_residual),
        degree0_residual,
        max_imaginary: ch_pa.max_imaginary.max(ch_p.max_imaginary).max(ch0.max_imaginary),
        ch_pa_sup: ch_pa.cochain.sup_norm(),
        ch_p_sup: ch_p.cochain.sup_norm(),
        validation,
    };
    Ok((report, FlatnessCochains { ch_pa: ch_pa.cochain, ch_p: ch_p.cochain }))
}

#[cfg(test)]
mod tests;
