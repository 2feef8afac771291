//! Experiment configuration: JSON schema and resolution into core objects.
//!
//! Every resolution error carries a JSON pointer into the config.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use mishchenko_core::algebra::{circle_algebra, group_algebra, AlgebraMatrix, FiniteGroup, SiteAlgebra};
use mishchenko_core::chern::ProjectionField;
use mishchenko_core::fixtures::{bott_field, random_projection_field, trivial_field, Backend};
use mishchenko_core::linalg::CMatrix;
use mishchenko_core::space::{build_cover, OpenCover, PartitionOfUnity, SampledSpace};
use num_complex::Complex64;
use serde::Deserialize;
use serde_path_to_error::Segment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Chern,
    Flatness,
    MishchenkoVerify,
    Index,
    CoverLemma,
    Selftest,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Chern => "chern",
            Task::Flatness => "flatness",
            Task::MishchenkoVerify => "mishchenko-verify",
            Task::Index => "index",
            Task::CoverLemma => "cover-lemma",
            Task::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Option<Task>,
    pub space: Option<SpaceSpec>,
    pub cover: Option<CoverSpec>,
    /// Explicit partition values `chi_i(x)`; absent means tents on the cover.
    pub partition: Option<Vec<Vec<f64>>>,
    pub algebra: Option<AlgebraSpec>,
    pub cocycle: Option<CocycleSpec>,
    pub field: Option<FieldSpec>,
    pub bundle: Option<BundleSpec>,
    pub class: Option<ClassSpec>,
    pub family: Option<FamilySpec>,
    /// Chern degree `n` (cochains of degree `2n`).
    #[serde(default = "one")]
    pub degree: usize,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn one() -> usize {
    1
}

// Specs with variants are externally tagged (`{"circle": 60}`), which
// keeps error paths exact: serde buffers internally tagged enums.

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    /// Equispaced points on the unit circle.
    Circle(usize),
    /// Icosphere after this many subdivisions.
    Sphere(usize),
    Torus { n1: usize, n2: usize, big: f64, small: f64 },
    /// Explicit coordinates.
    Points(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CoverSpec {
    /// Circular arcs of a circle sample; `halo` extra points on each side.
    Arcs { count: usize, halo: Option<usize> },
    /// Metric balls around a greedy net.
    Balls { radius: f64 },
    /// Open stars of a triangulated builtin.
    Stars,
    Sets(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Klein,
    Quaternion,
    Table(Vec<Vec<usize>>),
    Product(Box<GroupSpec>, Box<GroupSpec>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraSpec {
    Group(GroupSpec),
    /// Grid model of `C(S^1)` with this many sites.
    Circle(usize),
    /// `M_k(C)` with the normalized trace.
    Matrix(usize),
    Scalars,
}

/// A complex number as `[re, im]` or a bare real.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexSpec {
    fn value(self) -> Complex64 {
        match self {
            ComplexSpec::Real(r) => Complex64::new(r, 0.0),
            ComplexSpec::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// An element of `M_m(A)`.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixSpec {
    /// `lambda_g` in `M_1` of a group algebra.
    Lambda(usize),
    /// The unit of `M_m(A)`.
    Identity(usize),
    /// One `mk x mk` block per site, rows of complex entries.
    Dense { size: usize, sites: Vec<Vec<Vec<ComplexSpec>>> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupTransition {
    pub i: usize,
    pub j: usize,
    pub g: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitaryTransition {
    pub i: usize,
    pub j: usize,
    pub value: MatrixSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CocycleSpec {
    /// Constant group elements `g_ij` on each overlap (fiber `1`).
    Group(Vec<GroupTransition>),
    /// Constant unitaries `g_ij` with `g_ii = q`.
    Unitary { fiber: MatrixSpec, transitions: Vec<UnitaryTransition> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Bott,
    Trivial { size: usize, rank: usize },
    /// `u(x) p_0 u(x)*` over the configured algebra.
    Random { size: usize, rank: usize, amplitude: f64 },
    /// The flat-bundle projection `p_A` of the configured cocycle.
    Flat,
}

/// A principal bundle given by orbit lists and the right action.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSpec {
    /// `orbits[x]` lists the points of the fiber over `x`.
    pub orbits: Vec<Vec<usize>>,
    /// `action[g][y] = y . g`.
    pub action: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub p: FieldSpec,
    pub q: FieldSpec,
    #[serde(default = "yes")]
    pub degree_two: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Explicit { sets: Vec<Vec<usize>>, thickening: Option<f64> },
    /// Random metric balls: `families` families of up to `max_sets` sets.
    Random { families: usize, max_sets: usize, thickening: Option<f64> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    /// Tuples of the top degree; defaults to points plus 40.
    pub tuples: Option<usize>,
    #[serde(default = "contour_nodes")]
    pub contour_nodes: usize,
    /// Gauss-Legendre nodes per axis of the Duffy simplex rule.
    #[serde(default = "simplex_nodes")]
    pub simplex_nodes: usize,
    #[serde(default)]
    pub seed: u64,
    /// Random vector pairs for module checks.
    #[serde(default = "pairs")]
    pub pairs: usize,
}

fn contour_nodes() -> usize {
    64
}

fn simplex_nodes() -> usize {
    16
}

fn pairs() -> usize {
    20
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { tuples: None, contour_nodes: 64, simplex_nodes: 16, seed: 0, pairs: 20 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "t_cocycle")]
    pub cocycle: f64,
    #[serde(default = "t_degree0")]
    pub degree0: f64,
    #[serde(default = "t_identity")]
    pub identity: f64,
    #[serde(default = "t_coboundary")]
    pub coboundary: f64,
    #[serde(default = "t_module")]
    pub module: f64,
    #[serde(default = "t_imaginary")]
    pub imaginary: f64,
    #[serde(default = "t_pairing")]
    pub pairing: f64,
}

fn t_cocycle() -> f64 {
    1e-10
}
fn t_degree0() -> f64 {
    1e-10
}
fn t_identity() -> f64 {
    1e-8
}
fn t_coboundary() -> f64 {
    1e-6
}
fn t_module() -> f64 {
    1e-10
}
fn t_imaginary() -> f64 {
    1e-10
}
fn t_pairing() -> f64 {
    0.05
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cocycle: t_cocycle(),
            degree0: t_degree0(),
            identity: t_identity(),
            coboundary: t_coboundary(),
            module: t_module(),
            imaginary: t_imaginary(),
            pairing: t_pairing(),
        }
    }
}

impl Tolerances {
    pub fn scaled(&self, s: f64) -> Tolerances {
        Tolerances {
            cocycle: self.cocycle * s,
            degree0: self.degree0 * s,
            identity: self.identity * s,
            coboundary: self.coboundary * s,
            module: self.module * s,
            imaginary: self.imaginary * s,
            pairing: self.pairing * s,
        }
    }
}

/// A configuration error located by a JSON pointer.
#[derive(Debug, Clone)]
pub struct ConfigError {
    pub pointer: String,
    pub message: String,
}

impl ConfigError {
    pub fn at(pointer: impl Into<String>, message: impl fmt::Display) -> Self {
        ConfigError { pointer: pointer.into(), message: message.to_string() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "config error at {at}: {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

fn pointer(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => {}
        }
    }
    out
}

pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let message = e.inner().to_string();
        ConfigError::at(pointer(e.path()), message)
    })
}

pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::at("", format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

type Res<T> = Result<T, ConfigError>;

fn required<'a, T>(v: &'a Option<T>, name: &str) -> Res<&'a T> {
    v.as_ref().ok_or_else(|| ConfigError::at(format!("/{name}"), "required for this task"))
}

fn positive(value: usize, at: &str) -> Res<()> {
    if value == 0 {
        return Err(ConfigError::at(at, "must be positive"));
    }
    Ok(())
}

/// Which builtin produced the space; covers by stars need the mesh.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub space: SampledSpace,
    pub spec: SpaceSpec,
}

pub fn space(c: &ExperimentConfig) -> Res<Resolved> {
    let spec = required(&c.space, "space")?.clone();
    let s = match &spec {
        SpaceSpec::Circle(points) => SampledSpace::circle(*points),
        SpaceSpec::Sphere(subdivisions) => SampledSpace::sphere(*subdivisions),
        SpaceSpec::Torus { n1, n2, big, small } => SampledSpace::torus(*n1, *n2, *big, *small),
        SpaceSpec::Points(coordinates) => SampledSpace::new(coordinates.clone()),
    }
    .map_err(|e| ConfigError::at("/space", e))?;
    Ok(Resolved { space: s, spec })
}

pub fn cover(c: &ExperimentConfig, s: &Resolved) -> Res<(Arc<OpenCover>, PartitionOfUnity)> {
    let spec = required(&c.cover, "cover")?;
    let n = s.space.len();
    let (cover, tents) = match spec {
        CoverSpec::Arcs { count, halo } => {
            if !matches!(s.spec, SpaceSpec::Circle(_)) {
                return Err(ConfigError::at("/cover/arcs", "arcs need a circle space"));
            }
            positive(*count, "/cover/arcs/count")?;
            let halo = halo.unwrap_or_else(|| (n / count / 4).max(1));
            (OpenCover::circle_arcs(n, *count, halo).map_err(|e| ConfigError::at("/cover/arcs", e))?, None)
        }
        CoverSpec::Balls { radius } => {
            let (c, p) = build_cover(&s.space, *radius).map_err(|e| ConfigError::at("/cover/balls/radius", e))?;
            (c, Some(p))
        }
        CoverSpec::Stars => {
            let degree = match s.spec {
                SpaceSpec::Sphere(_) | SpaceSpec::Torus { .. } => 2,
                SpaceSpec::Circle(_) => 1,
                SpaceSpec::Points(_) => {
                    return Err(ConfigError::at("/cover", "stars need a builtin mesh"));
                }
            };
            (OpenCover::stars(&s.space, degree).map_err(|e| ConfigError::at("/cover", e))?, None)
        }
        CoverSpec::Sets(sets) => {
            for (a, set) in sets.iter().enumerate() {
                for (b, &x) in set.iter().enumerate() {
                    if x >= n {
                        return Err(ConfigError::at(
                            format!("/cover/sets/{a}/{b}"),
                            format!("point {x} outside a space of {n} points"),
                        ));
                    }
                }
            }
            (OpenCover::new(n, sets.clone()).map_err(|e| ConfigError::at("/cover/sets", e))?, None)
        }
    };
    let partition = match (&c.partition, tents) {
        (Some(values), _) => {
            if values.len() != cover.len() {
                return Err(ConfigError::at(
                    "/partition",
                    format!("{} functions for {} sets", values.len(), cover.len()),
                ));
            }
            for (i, v) in values.iter().enumerate() {
                if v.len() != n {
                    return Err(ConfigError::at(format!("/partition/{i}"), format!("{} values for {n} points", v.len())));
                }
            }
            PartitionOfUnity::new(&cover, values.clone()).map_err(|e| ConfigError::at("/partition", e))?
        }
        (None, Some(p)) => p,
        (None, None) => PartitionOfUnity::from_cover(&s.space, &cover).map_err(|e| ConfigError::at("/cover", e))?,
    };
    Ok((Arc::new(cover), partition))
}

fn group_at(spec: &GroupSpec, at: &str) -> Res<FiniteGroup> {
    let g = match spec {
        GroupSpec::Cyclic(n) => FiniteGroup::cyclic(*n),
        GroupSpec::Dihedral(n) => FiniteGroup::dihedral(*n),
        GroupSpec::Symmetric(n) => FiniteGroup::symmetric(*n),
        GroupSpec::Klein => Ok(FiniteGroup::klein()),
        GroupSpec::Quaternion => Ok(FiniteGroup::quaternion()),
        GroupSpec::Table(t) => FiniteGroup::from_table(t.clone()),
        GroupSpec::Product(a, b) => {
            let a = group_at(a, &format!("{at}/product/0"))?;
            let b = group_at(b, &format!("{at}/product/1"))?;
            Ok(FiniteGroup::direct_product(&a, &b))
        }
    };
    g.map_err(|e| ConfigError::at(at, e))
}

/// The configured algebra, with the group when it is a group algebra.
pub fn algebra(c: &ExperimentConfig) -> Res<(Arc<SiteAlgebra>, Option<FiniteGroup>)> {
    match required(&c.algebra, "algebra")? {
        AlgebraSpec::Group(group) => {
            let g = group_at(group, "/algebra/group")?;
            Ok((group_algebra(&g).0, Some(g)))
        }
        AlgebraSpec::Circle(sites) => {
            let a = circle_algebra(*sites).map_err(|e| ConfigError::at("/algebra/circle", e))?;
            Ok((Arc::new(a), None))
        }
        AlgebraSpec::Matrix(k) => {
            let a = SiteAlgebra::matrix(*k).map_err(|e| ConfigError::at("/algebra/matrix", e))?;
            Ok((Arc::new(a), None))
        }
        AlgebraSpec::Scalars => Ok((Arc::new(SiteAlgebra::scalars()), None)),
    }
}

pub fn backend(c: &ExperimentConfig) -> Res<Backend> {
    match required(&c.algebra, "algebra")? {
        AlgebraSpec::Group(group) => Ok(Backend::Group(group_at(group, "/algebra/group")?)),
        AlgebraSpec::Circle(sites) => Ok(Backend::Circle(*sites)),
        AlgebraSpec::Matrix(k) => Ok(Backend::Matrix(*k)),
        AlgebraSpec::Scalars => Ok(Backend::Matrix(1)),
    }
}

fn matrix(
    spec: &MatrixSpec,
    algebra: &Arc<SiteAlgebra>,
    group: Option<&FiniteGroup>,
    at: &str,
) -> Res<AlgebraMatrix> {
    match spec {
        MatrixSpec::Lambda(lambda) => {
            let g = group.ok_or_else(|| ConfigError::at(format!("{at}/lambda"), "lambda needs a group algebra"))?;
            if *lambda >= g.order() {
                return Err(ConfigError::at(
                    format!("{at}/lambda"),
                    format!("element {lambda} outside a group of order {}", g.order()),
                ));
            }
            Ok(group_algebra(g).1.swap_remove(*lambda))
        }
        MatrixSpec::Identity(identity) => {
            positive(*identity, &format!("{at}/identity"))?;
            Ok(AlgebraMatrix::identity(algebra, *identity))
        }
        MatrixSpec::Dense { size, sites: blocks } => {
            let dim = size * algebra.block_dim();
            if blocks.len() != algebra.sites() {
                return Err(ConfigError::at(
                    format!("{at}/dense/sites"),
                    format!("{} blocks for {} sites", blocks.len(), algebra.sites()),
                ));
            }
            let mut out = Vec::with_capacity(blocks.len());
            for (s, rows) in blocks.iter().enumerate() {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(ConfigError::at(format!("{at}/dense/sites/{s}"), format!("block must be {dim} x {dim}")));
                }
                out.push(CMatrix::from_fn(dim, dim, |r, c| rows[r][c].value()));
            }
            AlgebraMatrix::new(algebra.clone(), *size, out).map_err(|e| ConfigError::at(format!("{at}/dense"), e))
        }
    }
}

/// Cocycle in overlap form, with the group data when it is group-valued.
pub struct ResolvedCocycle {
    pub cocycle: mishchenko_core::flat::UnitaryCocycle,
    pub group: Option<(FiniteGroup, BTreeMap<(usize, usize), usize>)>,
}

fn pair_in_cover(i: usize, j: usize, cover: &OpenCover, at: &str) -> Res<()> {
    for (name, v) in [("i", i), ("j", j)] {
        if v >= cover.len() {
            return Err(ConfigError::at(
                format!("{at}/{name}"),
                format!("set {v} outside a cover of {} sets", cover.len()),
            ));
        }
    }
    Ok(())
}

pub fn cocycle(c: &ExperimentConfig, cover: &Arc<OpenCover>) -> Res<ResolvedCocycle> {
    use mishchenko_core::flat::UnitaryCocycle;
    let (alg, group) = algebra(c)?;
    match required(&c.cocycle, "cocycle")? {
        CocycleSpec::Group(transitions) => {
            let g = group.ok_or_else(|| ConfigError::at("/algebra", "group cocycles need a group algebra"))?;
            let mut elements = BTreeMap::new();
            for (a, t) in transitions.iter().enumerate() {
                let at = format!("/cocycle/group/{a}");
                pair_in_cover(t.i, t.j, cover, &at)?;
                if t.g >= g.order() {
                    return Err(ConfigError::at(
                        format!("{at}/g"),
                        format!("element {} outside a group of order {}", t.g, g.order()),
                    ));
                }
                if elements.insert((t.i, t.j), t.g).is_some() {
                    return Err(ConfigError::at(at, format!("duplicate pair ({}, {})", t.i, t.j)));
                }
            }
            let cocycle = UnitaryCocycle::from_group_elements(&g, cover.clone(), &elements)
                .map_err(|e| ConfigError::at("/cocycle", e))?;
            Ok(ResolvedCocycle { cocycle, group: Some((g, elements)) })
        }
        CocycleSpec::Unitary { fiber, transitions } => {
            let q = matrix(fiber, &alg, group.as_ref(), "/cocycle/unitary/fiber")?;
            let mut values = BTreeMap::new();
            for (a, t) in transitions.iter().enumerate() {
                let at = format!("/cocycle/unitary/transitions/{a}");
                pair_in_cover(t.i, t.j, cover, &at)?;
                let v = matrix(&t.value, &alg, group.as_ref(), &format!("{at}/value"))?;
                if v.size() != q.size() {
                    return Err(ConfigError::at(format!("{at}/value"), "size differs from the fiber"));
                }
                if values.insert((t.i, t.j), v).is_some() {
                    return Err(ConfigError::at(at, format!("duplicate pair ({}, {})", t.i, t.j)));
                }
            }
            let cocycle = UnitaryCocycle::constant(q, cover.clone(), values)
                .map_err(|e| ConfigError::at("/cocycle", e))?
                .complete();
            Ok(ResolvedCocycle { cocycle, group: None })
        }
    }
}

/// A projection field; `flat` must be supplied by the caller for `Flat`.
pub fn field(
    c: &ExperimentConfig,
    spec: &FieldSpec,
    s: &SampledSpace,
    flat: Option<&ProjectionField>,
    seed: u64,
    at: &str,
) -> Res<ProjectionField> {
    let out = match spec {
        FieldSpec::Bott => bott_field(s),
        FieldSpec::Trivial { size, rank } => {
            if rank > size {
                return Err(ConfigError::at(format!("{at}/trivial/rank"), "rank exceeds size"));
            }
            positive(*size, &format!("{at}/trivial/size"))?;
            trivial_field(s.len(), *size, *rank)
        }
        FieldSpec::Random { size, rank, amplitude } => {
            if rank > size {
                return Err(ConfigError::at(format!("{at}/random/rank"), "rank exceeds size"));
            }
            positive(*size, &format!("{at}/random/size"))?;
            random_projection_field(s, &backend(c)?, *size, *rank, *amplitude, seed)
        }
        FieldSpec::Flat => {
            return flat.cloned().ok_or_else(|| ConfigError::at(at, "flat field needs a cocycle"));
        }
    };
    out.map_err(|e| ConfigError::at(at, e))
}

/// Budget checks: every configured budget must be positive.
pub fn validate_budgets(b: &Budgets) -> Res<()> {
    if let Some(t) = b.tuples {
        positive(t, "/budgets/tuples")?;
    }
    positive(b.contour_nodes, "/budgets/contour_nodes")?;
    positive(b.simplex_nodes, "/budgets/simplex_nodes")?;
    positive(b.pairs, "/budgets/pairs")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointers_follow_the_json_structure() {
        let e = parse(r#"{"cocycle": {"unitary": {"fiber": {"identity": 1}, "transitions": [{"i": 0, "j": "1"}]}}}"#)
            .unwrap_err();
        assert_eq!(e.pointer, "/cocycle/unitary/transitions/0/j");
        let e = parse(r#"{"cover": {"sets": [[0, 1], [2, "x"]]}}"#).unwrap_err();
        assert_eq!(e.pointer, "/cover/sets/1/1");
        let e = parse(r#"{"tolerances": {"cocycle": 1e-9, "idnetity": 1.0}}"#).unwrap_err();
        assert!(e.pointer.starts_with("/tolerances"), "{e}");
        assert!(e.message.contains("idnetity"));
    }

    #[test]
    fn defaults_and_matrices() {
        let c = parse(r#"{"task": "cover-lemma"}"#).unwrap();
        assert_eq!(c.task, Some(Task::CoverLemma));
        assert_eq!(c.degree, 1);
        assert_eq!(c.budgets.contour_nodes, 64);
        assert_eq!(c.tolerances.scaled(10.0).cocycle, 1e-9);

        let alg = Arc::new(SiteAlgebra::matrix(2).unwrap());
        let spec: MatrixSpec = serde_json::from_str(r#"{"dense": {"size": 1, "sites": [[[[0, 1], 0], [0, 2.5]]]}}"#).unwrap();
        let m = matrix(&spec, &alg, None, "").unwrap();
        assert_eq!(m.site_blocks()[0][(0, 0)], Complex64::new(0.0, 1.0));
        assert_eq!(m.site_blocks()[0][(1, 1)], Complex64::new(2.5, 0.0));
        let bad: MatrixSpec = serde_json::from_str(r#"{"dense": {"size": 1, "sites": [[[1]]]}}"#).unwrap();
        assert_eq!(matrix(&bad, &alg, None, "/m").unwrap_err().pointer, "/m/dense/sites/0");
        let lam: MatrixSpec = serde_json::from_str(r#"{"lambda": 1}"#).unwrap();
        assert!(matrix(&lam, &alg, None, "/m").is_err());
    }

    #[test]
    fn cover_sets_are_range_checked() {
        let c = parse(
            r#"{"space": {"circle": 5}, "cover": {"sets": [[0, 1, 2, 3], [3, 9]]}}"#,
        )
        .unwrap();
        let s = space(&c).unwrap();
        assert_eq!(cover(&c, &s).unwrap_err().pointer, "/cover/sets/1/1");
    }
}
