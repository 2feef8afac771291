//! Reproducible inputs shared by tests, benchmarks and the command line:
//! the Bott projection, random smooth projection fields over the three
//! algebra backends, random fibers and flat bundles over the circle.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{circle_algebra, circle_points, group_algebra, AlgebraMatrix, FiniteGroup, SiteAlgebra};
use crate::chern::ProjectionField;
use crate::error::{Error, Result};
use crate::linalg::{cmatmul, CMatrix};
use crate::flat::{build_flat_projection, FlatProjection, UnitaryCocycle};
use crate::space::{OpenCover, PartitionOfUnity, SampledSpace};

/// `(1 + x . sigma) / 2` at the normalized sample coordinates of a
/// subset of the 2-sphere in `R^3`.
pub fn bott_field(space: &SampledSpace) -> Result<ProjectionField> {
    if space.ambient_dim() != 3 {
        return Err(Error::InvalidSpace("Bott projection needs points in R^3".into()));
    }
    let values = space
        .points()
        .iter()
        .map(|p| {
            let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            let (x, y, z) = (p[0] / n, p[1] / n, p[2] / n);
            CMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new((1.0 + z) / 2.0, 0.0),
                    Complex64::new(x / 2.0, -y / 2.0),
                    Complex64::new(x / 2.0, y / 2.0),
                    Complex64::new((1.0 - z) / 2.0, 0.0),
                ],
            )
        })
        .collect();
    ProjectionField::scalar(values)
}

/// Constant rank-`rank` projection in `M_size(C)`.
pub fn trivial_field(points: usize, size: usize, rank: usize) -> Result<ProjectionField> {
    let d = DVector::from_iterator(
        size,
        (0..size).map(|i| Complex64::new(if i < rank { 1.0 } else { 0.0 }, 0.0)),
    );
    ProjectionField::scalar(vec![CMatrix::from_diagonal(&d); points])
}

/// The algebras used for randomized checks.
#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    /// `M_k(C)` with the normalized trace.
    Matrix(usize),
    /// Group algebra of a finite group in its regular representation.
    Group(FiniteGroup),
    /// Grid model of `C(S^1)` with `n` sites.
    Circle(usize),
}

impl Backend {
    pub fn algebra(&self) -> Result<Arc<SiteAlgebra>> {
        match self {
            Backend::Matrix(k) => Ok(Arc::new(SiteAlgebra::matrix(*k)?)),
            Backend::Group(g) => Ok(group_algebra(g).0),
            Backend::Circle(n) => Ok(Arc::new(circle_algebra(*n)?)),
        }
    }

    /// Random self-adjoint element of `M_m(A)` with entries of size about
    /// `scale`.
    pub fn random_hermitian(
        &self,
        algebra: &Arc<SiteAlgebra>,
        m: usize,
        scale: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<AlgebraMatrix> {
        let mut gaussian = |rows: usize| {
            CMatrix::from_fn(rows, rows, |_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
            })
        };
        let hermitian = |h: CMatrix| (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        let blocks = match self {
            Backend::Matrix(k) => vec![hermitian(gaussian(m * k))],
            Backend::Group(g) => {
                // sum_g H_g (x) lambda_g with H_{g^-1} = H_g^*.
                let (_, lambdas) = group_algebra(g);
                let n = g.order();
                let coeffs: Vec<CMatrix> = (0..n).map(|_| gaussian(m)).collect();
                let mut block = CMatrix::zeros(m * n, m * n);
                for h in 0..n {
                    let sym = (&coeffs[h] + coeffs[g.inv(h)].adjoint()) * Complex64::new(0.5, 0.0);
                    block += sym.kronecker(&lambdas[h].site_blocks()[0]);
                }
                vec![hermitian(block)]
            }
            Backend::Circle(n) => {
                // A + z B + conj(z) B^*, smooth in the grid variable.
                let a = hermitian(gaussian(m));
                let b = gaussian(m) * Complex64::new(0.5, 0.0);
                circle_points(*n)
                    .into_iter()
                    .map(|z| hermitian(&a + &b * z + b.adjoint() * z.conj()))
                    .collect()
            }
        };
        AlgebraMatrix::new(algebra.clone(), m, blocks)
    }
}

/// `exp(i h)` sitewise for self-adjoint `h`.
pub fn unitary_exp(h: &AlgebraMatrix) -> AlgebraMatrix {
    h.map_sites(|b| {
        let eig = crate::linalg::hermitian_part(b).symmetric_eigen();
        let phases = DVector::from_iterator(
            b.nrows(),
            eig.eigenvalues.iter().map(|l| Complex64::from_polar(1.0, *l)),
        );
        cmatmul(&(&eig.eigenvectors * CMatrix::from_diagonal(&phases)), &eig.eigenvectors.adjoint())
    })
}

/// Random projection `u p_0 u*` with `p_0 = diag(1, .., 1, 0, ..)` of
/// rank `rank` (as multiples of the unit) and a random unitary `u`.
pub fn random_fiber(backend: &Backend, m: usize, rank: usize, seed: u64) -> Result<AlgebraMatrix> {
    let algebra = backend.algebra()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diag: Vec<f64> = (0..m).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    let p0 = AlgebraMatrix::diagonal_scalars(&algebra, &diag);
    let u = unitary_exp(&backend.random_hermitian(&algebra, m, 1.5, &mut rng)?);
    let q = u.mul(&p0)?.mul(&u.adjoint())?;
    Ok(q.map_sites(crate::linalg::hermitian_part))
}

/// Smooth random field `x -> u(x) p_0 u(x)*` with
/// `u(x) = exp(i sum_a x_a h_a)`; `amplitude` controls how fast it turns.
pub fn random_projection_field(
    space: &SampledSpace,
    backend: &Backend,
    m: usize,
    rank: usize,
    amplitude: f64,
    seed: u64,
) -> Result<ProjectionField> {
    let algebra = backend.algebra()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let generators = (0..space.ambient_dim())
        .map(|_| backend.random_hermitian(&algebra, m, amplitude, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let diag: Vec<f64> = (0..m).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    let p0 = AlgebraMatrix::diagonal_scalars(&algebra, &diag);
    let values = space
        .points()
        .iter()
        .map(|x| {
            let mut h = AlgebraMatrix::zeros(&algebra, m);
            for (g, xa) in generators.iter().zip(x) {
                h = h.add(&g.scale(Complex64::new(*xa, 0.0)))?;
            }
            let u = unitary_exp(&h);
            Ok(u.mul(&p0)?.mul(&u.adjoint())?.map_sites(crate::linalg::hermitian_part))
        })
        .collect::<Result<Vec<_>>>()?;
    ProjectionField::new(algebra, m, values)
}

/// A flat bundle over a sampled circle: arcs, tents and a cocycle.
#[derive(Debug, Clone)]
pub struct FlatFixture {
    pub space: SampledSpace,
    pub cover: Arc<OpenCover>,
    pub partition: PartitionOfUnity,
    pub cocycle: UnitaryCocycle,
    /// Group and `h_ij` for group-valued cocycles with fiber `1`.
    pub group: Option<(FiniteGroup, BTreeMap<(usize, usize), usize>)>,
}

impl FlatFixture {
    pub fn flat_projection(&self) -> Result<FlatProjection> {
        build_flat_projection(&self.cocycle, &self.partition)
    }
}

fn circle_arcs(points: usize, arcs: usize) -> Result<(SampledSpace, Arc<OpenCover>, PartitionOfUnity)> {
    let space = SampledSpace::circle(points)?;
    // Halo below half an arc keeps triple overlaps empty for three or more arcs.
    let halo = (points / arcs / 4).max(1);
    let cover = Arc::new(OpenCover::circle_arcs(points, arcs, halo)?);
    let partition = PartitionOfUnity::from_cover(&space, &cover)?;
    Ok((space, cover, partition))
}

/// Group cocycle on `arcs` arcs with `g_{i,i+1} = lambda_{h_i}`, indices
/// mod `arcs`.
pub fn circle_group_fixture(points: usize, group: &FiniteGroup, elements: &[usize]) -> Result<FlatFixture> {
    let arcs = elements.len();
    if arcs < 3 {
        return Err(Error::InvalidCover("circle cocycles need at least three arcs".into()));
    }
    let (space, cover, partition) = circle_arcs(points, arcs)?;
    let mut h = BTreeMap::new();
    for (i, &g) in elements.iter().enumerate() {
        let j = (i + 1) % arcs;
        if i < j {
            h.insert((i, j), g);
        } else {
            h.insert((j, i), group.inv(g));
        }
    }
    let cocycle = UnitaryCocycle::from_group_elements(group, cover.clone(), &h)?;
    Ok(FlatFixture { space, cover, partition, cocycle, group: Some((group.clone(), h)) })
}

/// Three arcs on the circle, `G = Z/3`, `g_01 = g_12 = lambda_1`,
/// `g_02 = lambda_2`.
pub fn circle_z3_fixture(points: usize) -> Result<FlatFixture> {
    let z3 = FiniteGroup::cyclic(3)?;
    // g_20 = g_02^-1 = lambda_1.
    circle_group_fixture(points, &z3, &[1, 1, 1])
}

/// Groups of order at most six.
pub fn small_groups() -> Vec<FiniteGroup> {
    let mut out: Vec<FiniteGroup> = (1..=6).map(|n| FiniteGroup::cyclic(n).expect("cyclic")).collect();
    out.push(FiniteGroup::klein());
    out.push(FiniteGroup::dihedral(3).expect("dihedral"));
    out
}

/// Random group cocycle: 3 to 8 arcs, a random group of order at most 6
/// and random transitions.
pub fn random_group_fixture(points: usize, seed: u64) -> Result<FlatFixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = small_groups();
    let group = &groups[rng.random_range(0..groups.len())];
    let arcs = rng.random_range(3..=8);
    let elements: Vec<usize> = (0..arcs).map(|_| rng.random_range(0..group.order())).collect();
    circle_group_fixture(points, group, &elements)
}

/// Random unitary of `q M_m(A) q`: `q exp(i q h q)`.
pub fn random_fiber_unitary(
    backend: &Backend,
    q: &AlgebraMatrix,
    scale: f64,
    rng: &mut ChaCha8Rng,
) -> Result<AlgebraMatrix> {
    let h = backend.random_hermitian(q.algebra(), q.size(), scale, rng)?;
    let qhq = q.mul(&h)?.mul(q)?.map_sites(crate::linalg::hermitian_part);
    q.mul(&unitary_exp(&qhq))
}

/// Circle cocycle with fiber a random projection `q` and random
/// transitions in the unitaries of `q M_m(A) q`.
pub fn random_unitary_fixture(
    backend: &Backend,
    m: usize,
    rank: usize,
    arcs: usize,
    points: usize,
    seed: u64,
) -> Result<FlatFixture> {
    let q = random_fiber(backend, m, rank, seed)?;
    unitary_fixture_with_fiber(backend, q, arcs, points, seed)
}

/// Circle cocycle with the given fiber and random transitions.
pub fn unitary_fixture_with_fiber(
    backend: &Backend,
    q: AlgebraMatrix,
    arcs: usize,
    points: usize,
    seed: u64,
) -> Result<FlatFixture> {
    let (space, cover, partition) = circle_arcs(points, arcs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let mut values = BTreeMap::new();
    for i in 0..arcs {
        let j = (i + 1) % arcs;
        values.insert((i.min(j), i.max(j)), random_fiber_unitary(backend, &q, 2.0, &mut rng)?);
    }
    let cocycle = UnitaryCocycle::constant(q, cover.clone(), values)?.complete();
    Ok(FlatFixture { space, cover, partition, cocycle, group: None })
}

/// Fiber a rank-one projection of `M_2(C)` (so `phi(q) = 1/2`) and random
/// phases as transitions.
pub fn half_trace_fixture(arcs: usize, points: usize, seed: u64) -> Result<FlatFixture> {
    let backend = Backend::Matrix(2);
    let algebra = backend.algebra()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = unitary_exp(&backend.random_hermitian(&algebra, 1, 1.5, &mut rng)?);
    let p0 = AlgebraMatrix::new(
        algebra.clone(),
        1,
        vec![CMatrix::from_diagonal(&DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]))],
    )?;
    let q = u.mul(&p0)?.mul(&u.adjoint())?.map_sites(crate::linalg::hermitian_part);
    unitary_fixture_with_fiber(&backend, q, arcs, points, seed)
}

/// Idempotent `s q s^-1` with `q = random_fiber(..)`.
pub fn random_idempotent(backend: &Backend, m: usize, rank: usize, spread: f64, seed: u64) -> Result<AlgebraMatrix> {
    let q = random_fiber(backend, m, rank, seed)?;
    random_similar(backend, &q, spread, seed.wrapping_add(1))
}

/// `s e s^-1` with `s = 1 + spread (h + i k)` for random self-adjoint
/// `h`, `k`.
pub fn random_similar(backend: &Backend, e: &AlgebraMatrix, spread: f64, seed: u64) -> Result<AlgebraMatrix> {
    let algebra = e.algebra().clone();
    let m = e.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = backend.random_hermitian(&algebra, m, spread, &mut rng)?;
    let k = backend.random_hermitian(&algebra, m, spread, &mut rng)?;
    let s = AlgebraMatrix::identity(&algebra, m).add(&h)?.add(&k.scale(Complex64::new(0.0, 1.0)))?;
    let blocks = s
        .site_blocks()
        .iter()
        .map(|b| {
            b.clone()
                .try_inverse()
                .ok_or_else(|| Error::NotIdempotent { residual: f64::INFINITY })
        })
        .collect::<Result<Vec<_>>>()?;
    let inverse = AlgebraMatrix::new(algebra, m, blocks)?;
    s.mul(e)?.mul(&inverse)
}

/// Trivializable cocycle `g_ij = u_i u_j*` over any cover, with `u_i`
/// random unitaries of `q M_m(A) q`.
pub fn trivializable_cocycle(
    backend: &Backend,
    q: &AlgebraMatrix,
    cover: Arc<OpenCover>,
    seed: u64,
) -> Result<UnitaryCocycle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = (0..cover.len())
        .map(|_| random_fiber_unitary(backend, q, 2.0, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let mut values = BTreeMap::new();
    for i in 0..cover.len() {
        for j in 0..cover.len() {
            if cover.set(i).iter().any(|x| cover.contains(j, *x)) {
                values.insert((i, j), u[i].mul(&u[j].adjoint())?);
            }
        }
    }
    UnitaryCocycle::constant(q.clone(), cover, values)
}
