//! Module formulas for a principal bundle `X~ -> X` with finite structure
//! group `G` acting freely on the right: Rieffel's bimodule `Y`, its
//! equivariant version `Z`, the crossed product `Z x| G`, the Mishchenko
//! module `M` and the isomorphism `Phi: Y* (x) (Z x| G) -> M`.
//!
//! All vectors are finitely supported functions on the sampled total
//! space, so every formula is a finite sum.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{group_algebra, AlgebraElement, AlgebraMatrix, FiniteGroup, SiteAlgebra};
use crate::error::{Error, Result};
use crate::flat::UnitaryCocycle;
use crate::linalg::CMatrix;
use crate::space::{OpenCover, PartitionOfUnity, SampledSpace};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone)]
pub struct PrincipalBundle {
    total: SampledSpace,
    group: FiniteGroup,
    /// `action[g][y] = y . g`
    action: Vec<Vec<usize>>,
    quotient: Vec<usize>,
    fibers: Vec<Vec<usize>>,
}

impl PrincipalBundle {
    /// Checks the right action law, freeness and that the fibers of
    /// `quotient` are exactly the orbits.
    pub fn new(
        total: SampledSpace,
        group: FiniteGroup,
        action: Vec<Vec<usize>>,
        quotient: Vec<usize>,
    ) -> Result<Self> {
        let n = total.len();
        let order = group.order();
        if action.len() != order || action.iter().any(|a| a.len() != n) {
            return Err(Error::InvalidBundle(format!("need {order} permutations of {n} points")));
        }
        if quotient.len() != n {
            return Err(Error::InvalidBundle(format!("quotient map has {} entries", quotient.len())));
        }
        for (g, perm) in action.iter().enumerate() {
            let mut seen = vec![false; n];
            for &y in perm {
                if y >= n || std::mem::replace(&mut seen[y], true) {
                    return Err(Error::InvalidBundle(format!("action of {g} is not a permutation")));
                }
            }
        }
        for y in 0..n {
            if action[group.identity()][y] != y {
                return Err(Error::InvalidBundle("identity acts nontrivially".into()));
            }
            for g in 0..order {
                for h in 0..order {
                    if action[h][action[g][y]] != action[group.mul(g, h)][y] {
                        return Err(Error::InvalidBundle(format!(
                            "(y.g).h != y.(gh) at y = {y}, g = {g}, h = {h}"
                        )));
                    }
                }
                if g != group.identity() && action[g][y] == y {
                    return Err(Error::InvalidBundle(format!("{g} fixes point {y}")));
                }
            }
        }
        let base = quotient.iter().copied().max().map_or(0, |m| m + 1);
        let mut fibers = vec![Vec::new(); base];
        for (y, &x) in quotient.iter().enumerate() {
            fibers[x].push(y);
        }
        for (x, fiber) in fibers.iter().enumerate() {
            if fiber.is_empty() {
                return Err(Error::InvalidBundle(format!("empty fiber over {x}")));
            }
            let mut orbit: Vec<usize> = (0..order).map(|g| action[g][fiber[0]]).collect();
            orbit.sort_unstable();
            if orbit != *fiber {
                return Err(Error::InvalidBundle(format!("fiber over {x} is not one orbit")));
            }
        }
        Ok(PrincipalBundle { total, group, action, quotient, fibers })
    }

    /// The bundle glued from `V_i x G` by `phi_i phi_j^-1 (x, h) = (x, g_ij h)`.
    /// Point `x |G| + g` has coordinate `g` in the chart of the first set
    /// containing `x`. Returns the bundle and its sections
    /// `s_i(x) = phi_i^-1(x, e)`.
    pub fn from_cocycle(
        base: &SampledSpace,
        group: &FiniteGroup,
        cover: &OpenCover,
        elements: &BTreeMap<(usize, usize), usize>,
    ) -> Result<(Self, Sections)> {
        let order = group.order();
        let label = |i: usize, j: usize| -> Option<usize> {
            if i == j {
                Some(group.identity())
            } else {
                elements.get(&(i, j)).copied().or_else(|| elements.get(&(j, i)).map(|&g| group.inv(g)))
            }
        };
        let mut points = Vec::with_capacity(base.len() * order);
        let mut quotient = Vec::with_capacity(base.len() * order);
        for x in 0..base.len() {
            for g in 0..order {
                let mut p = base.point(x).to_vec();
                p.push(g as f64);
                points.push(p);
                quotient.push(x);
            }
        }
        let action = (0..order)
            .map(|t| (0..base.len() * order).map(|y| (y / order) * order + group.mul(y % order, t)).collect())
            .collect();
        let mut sections = vec![vec![None; base.len()]; cover.len()];
        for x in 0..base.len() {
            let home = *cover
                .sets_containing(x)
                .first()
                .ok_or_else(|| Error::InvalidCover(format!("point {x} is not covered")))?;
            for &i in cover.sets_containing(x) {
                // Home coordinate g with g_{i,home} g = e.
                let g = label(home, i).ok_or(Error::MissingTransition { i: home, j: i, point: x })?;
                sections[i][x] = Some(x * order + g);
            }
        }
        let bundle = PrincipalBundle::new(SampledSpace::new(points)?, group.clone(), action, quotient)?;
        let sections = Sections::new(&bundle, cover, sections)?;
        Ok((bundle, sections))
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn total(&self) -> &SampledSpace {
        &self.total
    }

    pub fn total_points(&self) -> usize {
        self.quotient.len()
    }

    pub fn base_points(&self) -> usize {
        self.fibers.len()
    }

    pub fn act(&self, y: usize, g: usize) -> usize {
        self.action[g][y]
    }

    pub fn project(&self, y: usize) -> usize {
        self.quotient[y]
    }

    pub fn fiber(&self, x: usize) -> &[usize] {
        &self.fibers[x]
    }

    /// The unique `g` with `y = z . g`, for `y`, `z` in one fiber.
    pub fn offset(&self, z: usize, y: usize) -> Option<usize> {
        (0..self.group.order()).find(|&g| self.action[g][z] == y)
    }
}

/// Local sections `s_i(x) = phi_i^-1(x, e)` over the sets of a cover.
#[derive(Debug, Clone, PartialEq)]
pub struct Sections {
    cover: Arc<OpenCover>,
    points: Vec<Vec<Option<usize>>>,
}

impl Sections {
    pub fn new(bundle: &PrincipalBundle, cover: &OpenCover, points: Vec<Vec<Option<usize>>>) -> Result<Self> {
        if cover.points() != bundle.base_points() || points.len() != cover.len() {
            return Err(Error::InvalidBundle("sections do not match the cover".into()));
        }
        for (i, row) in points.iter().enumerate() {
            for x in 0..cover.points() {
                match row[x] {
                    Some(y) if bundle.project(y) != x => {
                        return Err(Error::InvalidBundle(format!("section {i} leaves the fiber over {x}")))
                    }
                    None if cover.contains(i, x) => {
                        return Err(Error::InvalidBundle(format!("section {i} undefined at {x}")))
                    }
                    _ => {}
                }
            }
        }
        Ok(Sections { cover: Arc::new(cover.clone()), points })
    }

    /// Lexicographically least fiber point over every point of every set.
    pub fn least(bundle: &PrincipalBundle, cover: &OpenCover) -> Result<Self> {
        let points = (0..cover.len())
            .map(|i| {
                (0..cover.points())
                    .map(|x| cover.contains(i, x).then(|| bundle.fiber(x)[0]))
                    .collect()
            })
            .collect();
        Self::new(bundle, cover, points)
    }

    pub fn cover(&self) -> &Arc<OpenCover> {
        &self.cover
    }

    pub fn section(&self, i: usize, x: usize) -> Option<usize> {
        self.points[i][x]
    }

    /// `phi_i(y) = (p(y), g)` with `y = s_i(p(y)) . g`.
    pub fn chart(&self, bundle: &PrincipalBundle, i: usize, y: usize) -> Option<usize> {
        self.points[i][bundle.project(y)].and_then(|s| bundle.offset(s, y))
    }

    /// `g_ij(x)` with `s_j(x) = s_i(x) . g_ij(x)`.
    pub fn transition(&self, bundle: &PrincipalBundle, i: usize, j: usize, x: usize) -> Option<usize> {
        let si = self.points[i][x]?;
        let sj = self.points[j][x]?;
        bundle.offset(si, sj)
    }

    /// The group cocycle `(i, j) -> g_ij`, constant on each overlap, or
    /// `None` on an overlap where it varies.
    pub fn constant_transitions(&self, bundle: &PrincipalBundle) -> Option<BTreeMap<(usize, usize), usize>> {
        let mut out = BTreeMap::new();
        for i in 0..self.cover.len() {
            for j in 0..self.cover.len() {
                let mut value = None;
                for &x in self.cover.set(i) {
                    if let Some(g) = self.transition(bundle, i, j, x) {
                        match value {
                            None => value = Some(g),
                            Some(v) if v != g => return None,
                            _ => {}
                        }
                    }
                }
                if let Some(v) = value {
                    out.insert((i, j), v);
                }
            }
        }
        Some(out)
    }

    /// `g_ij(x) -> lambda_{g_ij(x)}` pointwise, with fiber `1` in the
    /// group algebra.
    pub fn mishchenko_cocycle(&self, bundle: &PrincipalBundle) -> Result<UnitaryCocycle> {
        let (algebra, lambdas) = group_algebra(&bundle.group);
        let n = self.cover.len();
        let mut transitions = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let t: Vec<Option<AlgebraMatrix>> = (0..self.cover.points())
                    .map(|x| self.transition(bundle, i, j, x).map(|g| lambdas[g].clone()))
                    .collect();
                if t.iter().any(Option::is_some) {
                    transitions.insert((i, j), t);
                }
            }
        }
        UnitaryCocycle::new(AlgebraMatrix::identity(&algebra, 1), self.cover.clone(), transitions)
    }

    /// The frame `sqrt(rho_i)`, `rho_i(y) = chi_i(p(y))` where
    /// `phi_i(y) = (p(y), e)` and zero elsewhere.
    pub fn frame(&self, bundle: &PrincipalBundle, partition: &PartitionOfUnity) -> Vec<ModuleVector> {
        (0..self.cover.len())
            .map(|i| {
                let mut v = vec![ZERO; bundle.total_points()];
                for x in 0..bundle.base_points() {
                    if let Some(y) = self.points[i][x] {
                        v[y] = Complex64::new(partition.value(i, x).sqrt(), 0.0);
                    }
                }
                ModuleVector::new(ModuleSpace::M, v)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuleSpace {
    /// Rieffel's bimodule over `C_0(X~) x| G` and `C(X)`.
    Y,
    /// `Y` with the `G`-action `V`.
    Z,
    /// The Mishchenko module over `C(X) (x) C*_r(G)`.
    M,
}

impl ModuleSpace {
    fn name(self) -> &'static str {
        match self {
            ModuleSpace::Y => "Y",
            ModuleSpace::Z => "Z",
            ModuleSpace::M => "M",
        }
    }
}

/// A finitely supported function on the total space.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleVector {
    pub space: ModuleSpace,
    pub values: Vec<Complex64>,
}

impl ModuleVector {
    pub fn new(space: ModuleSpace, values: Vec<Complex64>) -> Self {
        ModuleVector { space, values }
    }

    pub fn zero(space: ModuleSpace, points: usize) -> Self {
        Self::new(space, vec![ZERO; points])
    }

    pub fn indicator(space: ModuleSpace, points: usize, y: usize) -> Self {
        let mut v = Self::zero(space, points);
        v.values[y] = Complex64::new(1.0, 0.0);
        v
    }

    /// Same function viewed in another module.
    pub fn retag(&self, space: ModuleSpace) -> Self {
        Self::new(space, self.values.clone())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.space, self.values.iter().map(|v| v.conj()).collect())
    }

    /// Pointwise product.
    pub fn times(&self, other: &Self) -> Self {
        Self::new(self.space, self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.space, self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    fn expect(&self, allowed: &[ModuleSpace], expected: &'static str) -> Result<()> {
        if allowed.contains(&self.space) {
            Ok(())
        } else {
            Err(Error::ModuleMismatch { expected, found: self.space.name() })
        }
    }
}

/// `f in C_c(G, C_0(X~))`, `values[g][y] = f(g)(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossedElement {
    pub values: Vec<Vec<Complex64>>,
}

impl CrossedElement {
    /// `f lambda_g` for a function `f` on the total space.
    pub fn monomial(order: usize, g: usize, f: Vec<Complex64>) -> Self {
        let n = f.len();
        let mut values = vec![vec![ZERO; n]; order];
        values[g] = f;
        CrossedElement { values }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().flatten().all(|v| *v == ZERO)
    }
}

/// A function on `G x X`, i.e. an element of `C(X) (x) C[G]`;
/// `values[t][x]` is the coefficient of `lambda_t` at `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupFunction {
    pub values: Vec<Vec<Complex64>>,
}

impl GroupFunction {
    pub fn zero(order: usize, points: usize) -> Self {
        GroupFunction { values: vec![vec![ZERO; points]; order] }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `sum_t a(t)(x) lambda_t` in the group algebra.
    pub fn element_at(&self, algebra: &Arc<SiteAlgebra>, lambdas: &[AlgebraElement], x: usize) -> Result<AlgebraElement> {
        let mut out = AlgebraMatrix::zeros(algebra, 1);
        for (t, row) in self.values.iter().enumerate() {
            out = out.add(&lambdas[t].scale(row[x]))?;
        }
        Ok(out)
    }

    /// Smallest eigenvalue of `a(x)` in the regular representation, over
    /// all `x`, after checking self-adjointness `a(t^-1) = conj a(t)`.
    pub fn min_eigenvalue(&self, group: &FiniteGroup) -> Result<f64> {
        let (algebra, lambdas) = group_algebra(group);
        let points = self.values.first().map_or(0, Vec::len);
        let mut worst = f64::INFINITY;
        for x in 0..points {
            let a = self.element_at(&algebra, &lambdas, x)?;
            let block: &CMatrix = &a.site_blocks()[0];
            if a.selfadjoint_residual() > 1e-10 * (1.0 + a.norm()) {
                return Err(Error::NotProjection(format!("inner product not self-adjoint at {x}")));
            }
            let h = crate::linalg::hermitian_part(block);
            worst = worst.min(h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min));
        }
        Ok(worst)
    }
}

/// `f in C_c(G, Z)`, `values[g]` a function on the total space.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossedVector {
    pub values: Vec<Vec<Complex64>>,
}

impl CrossedVector {
    pub fn zero(order: usize, points: usize) -> Self {
        CrossedVector { values: vec![vec![ZERO; points]; order] }
    }

    /// `xi` placed at `g`.
    pub fn at(order: usize, g: usize, xi: &ModuleVector) -> Self {
        let mut v = Self::zero(order, xi.values.len());
        v.values[g] = xi.values.clone();
        v
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn check_len(b: &PrincipalBundle, v: &[Complex64]) -> Result<()> {
    if v.len() != b.total_points() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} on a total space of {} points",
            v.len(),
            b.total_points()
        )));
    }
    Ok(())
}

fn fiber_inner(b: &PrincipalBundle, xi: &[Complex64], zeta: &[Complex64]) -> Vec<Complex64> {
    (0..b.base_points())
        .map(|x| b.fiber(x).iter().map(|&y| xi[y].conj() * zeta[y]).sum())
        .collect()
}

fn translate(b: &PrincipalBundle, g: usize, xi: &[Complex64]) -> Vec<Complex64> {
    (0..xi.len()).map(|y| xi[b.act(y, g)]).collect()
}

/// `<xi|zeta>(x) = sum_{p(y) = x} conj(xi) zeta (y)`, on `Y` or `Z`.
pub fn y_inner(b: &PrincipalBundle, xi: &ModuleVector, zeta: &ModuleVector) -> Result<Vec<Complex64>> {
    xi.expect(&[ModuleSpace::Y, ModuleSpace::Z], "Y or Z")?;
    zeta.expect(&[ModuleSpace::Y, ModuleSpace::Z], "Y or Z")?;
    check_len(b, &xi.values)?;
    check_len(b, &zeta.values)?;
    Ok(fiber_inner(b, &xi.values, &zeta.values))
}

/// `f . xi = sum_g f(g) alpha_g(xi)` with `alpha_g(xi)(y) = xi(y . g)`.
pub fn y_left_action(b: &PrincipalBundle, f: &CrossedElement, xi: &ModuleVector) -> Result<ModuleVector> {
    xi.expect(&[ModuleSpace::Y, ModuleSpace::Z], "Y or Z")?;
    check_len(b, &xi.values)?;
    let mut out = vec![ZERO; xi.values.len()];
    for (g, fg) in f.values.iter().enumerate() {
        check_len(b, fg)?;
        let moved = translate(b, g, &xi.values);
        for y in 0..out.len() {
            out[y] += fg[y] * moved[y];
        }
    }
    Ok(ModuleVector::new(xi.space, out))
}

/// `Theta_{xi,zeta}(v) = xi <zeta|v>` with the inner product pulled back
/// along `p`.
pub fn rank_one_apply(
    b: &PrincipalBundle,
    xi: &ModuleVector,
    zeta: &ModuleVector,
    v: &ModuleVector,
) -> Result<ModuleVector> {
    let ip = y_inner(b, zeta, v)?;
    Ok(ModuleVector::new(
        v.space,
        (0..xi.values.len()).map(|y| xi.values[y] * ip[b.project(y)]).collect(),
    ))
}

/// `Phi(Theta_{xi,zeta})(g) = xi alpha_g(conj zeta)`.
pub fn rank_one_to_crossed(b: &PrincipalBundle, xi: &ModuleVector, zeta: &ModuleVector) -> Result<CrossedElement> {
    check_len(b, &xi.values)?;
    check_len(b, &zeta.values)?;
    let conj = zeta.conj();
    let values = (0..b.group.order())
        .map(|g| {
            let moved = translate(b, g, &conj.values);
            xi.values.iter().zip(moved).map(|(a, c)| a * c).collect()
        })
        .collect();
    Ok(CrossedElement { values })
}

/// `V(g)(xi)(y) = xi(y . g)` on `Z`.
pub fn z_group_action(b: &PrincipalBundle, g: usize, xi: &ModuleVector) -> Result<ModuleVector> {
    xi.expect(&[ModuleSpace::Z], "Z")?;
    check_len(b, &xi.values)?;
    Ok(ModuleVector::new(ModuleSpace::Z, translate(b, g, &xi.values)))
}

/// `<xi|zeta>(t)(x) = sum_{p(y) = x} conj(xi(y)) zeta(y . t)` on `M`.
pub fn m_inner(b: &PrincipalBundle, xi: &ModuleVector, zeta: &ModuleVector) -> Result<GroupFunction> {
    xi.expect(&[ModuleSpace::M], "M")?;
    zeta.expect(&[ModuleSpace::M], "M")?;
    check_len(b, &xi.values)?;
    check_len(b, &zeta.values)?;
    let values = (0..b.group.order())
        .map(|t| fiber_inner(b, &xi.values, &translate(b, t, &zeta.values)))
        .collect();
    Ok(GroupFunction { values })
}

/// `(xi . f)(y) = sum_g f(g)(p(y)) xi(y . g^-1)` on `M`.
pub fn m_right_action(b: &PrincipalBundle, xi: &ModuleVector, f: &GroupFunction) -> Result<ModuleVector> {
    xi.expect(&[ModuleSpace::M], "M")?;
    check_len(b, &xi.values)?;
    let mut out = vec![ZERO; xi.values.len()];
    for (g, fg) in f.values.iter().enumerate() {
        let moved = translate(b, b.group.inv(g), &xi.values);
        for y in 0..out.len() {
            out[y] += fg[b.project(y)] * moved[y];
        }
    }
    Ok(ModuleVector::new(ModuleSpace::M, out))
}

/// Product in `C(X) (x) C[G]`: `(a b)(t) = sum_s a(s) b(s^-1 t)`.
pub fn group_function_product(group: &FiniteGroup, a: &GroupFunction, c: &GroupFunction) -> GroupFunction {
    let order = group.order();
    let points = a.values.first().map_or(0, Vec::len);
    let mut out = GroupFunction::zero(order, points);
    for s in 0..order {
        for u in 0..order {
            let t = group.mul(s, u);
            for x in 0..points {
                out.values[t][x] += a.values[s][x] * c.values[u][x];
            }
        }
    }
    out
}

/// `a*(t) = conj a(t^-1)`.
pub fn group_function_adjoint(group: &FiniteGroup, a: &GroupFunction) -> GroupFunction {
    GroupFunction {
        values: (0..group.order())
            .map(|t| a.values[group.inv(t)].iter().map(|v| v.conj()).collect())
            .collect(),
    }
}

/// Inner product, left action of `C_0(X~) x| G` and right action of
/// `C(X) (x) C[G]` on `Z x| G`.
pub mod crossed_module_ops {
    use super::*;

    /// `<xi|zeta>(t) = sum_g <xi(g)|zeta(g t)>`.
    pub fn inner(b: &PrincipalBundle, xi: &CrossedVector, zeta: &CrossedVector) -> Result<GroupFunction> {
        let order = b.group.order();
        let mut out = GroupFunction::zero(order, b.base_points());
        for t in 0..order {
            for g in 0..order {
                check_len(b, &xi.values[g])?;
                let ip = fiber_inner(b, &xi.values[g], &zeta.values[b.group.mul(g, t)]);
                for (o, v) in out.values[t].iter_mut().zip(ip) {
                    *o += v;
                }
            }
        }
        Ok(out)
    }

    /// `(f . xi)(t) = sum_g f(g) V(g)(xi(g^-1 t))`.
    pub fn left_action(b: &PrincipalBundle, f: &CrossedElement, xi: &CrossedVector) -> Result<CrossedVector> {
        let order = b.group.order();
        let mut out = CrossedVector::zero(order, b.total_points());
        for t in 0..order {
            for g in 0..order {
                let moved = translate(b, g, &xi.values[b.group.mul(b.group.inv(g), t)]);
                for (y, o) in out.values[t].iter_mut().enumerate() {
                    *o += f.values[g][y] * moved[y];
                }
            }
        }
        Ok(out)
    }

    /// `(xi . f)(t) = sum_g xi(g) f(g^-1 t)`, with `f(s)` pulled back to
    /// the total space.
    pub fn right_action(b: &PrincipalBundle, xi: &CrossedVector, f: &GroupFunction) -> Result<CrossedVector> {
        let order = b.group.order();
        let mut out = CrossedVector::zero(order, b.total_points());
        for t in 0..order {
            for g in 0..order {
                let s = b.group.mul(b.group.inv(g), t);
                for (y, o) in out.values[t].iter_mut().enumerate() {
                    *o += xi.values[g][y] * f.values[s][b.project(y)];
                }
            }
        }
        Ok(out)
    }

    /// Inner product on `Y* (x) (Z x| G)`:
    /// `<<xi1| (x) zeta1, <xi2| (x) zeta2> = <zeta1 | Phi(Theta_{xi1,xi2}) . zeta2>`.
    pub fn tensor_inner(
        b: &PrincipalBundle,
        (xi1, zeta1): (&ModuleVector, &CrossedVector),
        (xi2, zeta2): (&ModuleVector, &CrossedVector),
    ) -> Result<GroupFunction> {
        let f = rank_one_to_crossed(b, xi1, xi2)?;
        inner(b, zeta1, &left_action(b, &f, zeta2)?)
    }
}

/// `Phi(<xi| (x) zeta) = sum_g V(g^-1)(conj(xi) zeta(g))`, a vector of `M`.
pub fn phi_iso(b: &PrincipalBundle, xi: &ModuleVector, zeta: &CrossedVector) -> Result<ModuleVector> {
    check_len(b, &xi.values)?;
    let mut out = vec![ZERO; b.total_points()];
    for (g, zg) in zeta.values.iter().enumerate() {
        check_len(b, zg)?;
        let prod: Vec<Complex64> = xi.values.iter().zip(zg).map(|(a, z)| a.conj() * z).collect();
        let moved = translate(b, b.group.inv(g), &prod);
        for (o, v) in out.iter_mut().zip(moved) {
            *o += v;
        }
    }
    Ok(ModuleVector::new(ModuleSpace::M, out))
}
