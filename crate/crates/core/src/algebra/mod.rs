//! Site-indexed block-matrix algebras with a weighted normalized trace.
//!
//! An algebra is a finite set of sites `S`, a block size `k` and positive
//! weights `w_s` summing to one. An element is a `k x k` complex matrix per
//! site and the trace is `phi(a) = sum_s w_s Tr(a(s)) / k`.

mod calculus;
mod group;

pub use calculus::{
    contour_spectral_projection, contour_spectral_projection_generic, idempotent_to_projection,
    HermitianContour, DEFAULT_CONTOUR_NODES, RESOLVENT_LIMIT,
};
pub(crate) use calculus::resolvents;
#[cfg(test)]
pub(crate) use calculus::eigen_projection_oracle as calculus_oracle;
pub use group::{group_algebra, group_element, FiniteGroup};

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, cmatmul, CMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct SiteAlgebra {
    weights: Vec<f64>,
    block_dim: usize,
}

impl SiteAlgebra {
    pub fn new(weights: Vec<f64>, block_dim: usize) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidAlgebra("no sites".into()));
        }
        if block_dim == 0 {
            return Err(Error::InvalidAlgebra("block dimension must be positive".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidAlgebra(format!("non-positive site weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidAlgebra(format!("weights sum to {total}, expected 1")));
        }
        Ok(SiteAlgebra { weights, block_dim })
    }

    /// Uniform weights over `sites` sites.
    pub fn uniform(sites: usize, block_dim: usize) -> Result<Self> {
        if sites == 0 {
            return Err(Error::InvalidAlgebra("no sites".into()));
        }
        Self::new(vec![1.0 / sites as f64; sites], block_dim)
    }

    /// The complex numbers; `phi` on `M_m` is then the unnormalized trace.
    pub fn scalars() -> Self {
        SiteAlgebra { weights: vec![1.0], block_dim: 1 }
    }

    /// `M_k(C)` with the normalized trace.
    pub fn matrix(k: usize) -> Result<Self> {
        Self::new(vec![1.0], k)
    }

    pub fn sites(&self) -> usize {
        self.weights.len()
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Equispaced grid points `z_s = exp(2 pi i s / n)`.
pub fn circle_points(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|s| Complex64::from_polar(1.0, std::f64::consts::TAU * s as f64 / n as f64))
        .collect()
}

/// Grid model of `C(S^1)`: `n` uniform sites with `k = 1`. The trace is the
/// uniform average, exact on Laurent polynomials of degree below `n`.
pub fn circle_algebra(n: usize) -> Result<SiteAlgebra> {
    SiteAlgebra::uniform(n, 1)
}

/// The element of a circle algebra given by evaluating `f` on the grid.
pub fn circle_function(
    algebra: &Arc<SiteAlgebra>,
    f: impl Fn(Complex64) -> Complex64,
) -> Result<AlgebraElement> {
    if algebra.block_dim != 1 {
        return Err(Error::InvalidAlgebra("circle function needs block dimension 1".into()));
    }
    let blocks = circle_points(algebra.sites())
        .into_iter()
        .map(|z| CMatrix::from_element(1, 1, f(z)))
        .collect();
    AlgebraMatrix::new(algebra.clone(), 1, blocks)
}

/// An `m x m` matrix over a site algebra, stored as one `mk x mk` complex
/// matrix per site; block `(i, j)` occupies rows `i*k..(i+1)*k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraMatrix {
    algebra: Arc<SiteAlgebra>,
    size: usize,
    blocks: Vec<CMatrix>,
}

/// Elements of the algebra itself are the `1 x 1` matrices.
pub type AlgebraElement = AlgebraMatrix;

impl AlgebraMatrix {
    pub fn new(algebra: Arc<SiteAlgebra>, size: usize, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != algebra.sites() {
            return Err(Error::DimensionMismatch(format!(
                "{} site blocks for {} sites",
                blocks.len(),
                algebra.sites()
            )));
        }
        let dim = size * algebra.block_dim;
        if let Some(b) = blocks.iter().find(|b| b.nrows() != dim || b.ncols() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "site block is {}x{}, expected {dim}x{dim}",
                b.nrows(),
                b.ncols()
            )));
        }
        Ok(AlgebraMatrix { algebra, size, blocks })
    }

    pub fn zeros(algebra: &Arc<SiteAlgebra>, size: usize) -> Self {
        let dim = size * algebra.block_dim;
        AlgebraMatrix {
            algebra: algebra.clone(),
            size,
            blocks: vec![CMatrix::zeros(dim, dim); algebra.sites()],
        }
    }

    pub fn identity(algebra: &Arc<SiteAlgebra>, size: usize) -> Self {
        let dim = size * algebra.block_dim;
        AlgebraMatrix {
            algebra: algebra.clone(),
            size,
            blocks: vec![CMatrix::identity(dim, dim); algebra.sites()],
        }
    }

    /// The complex matrix `c` with every entry read as a multiple of 1.
    pub fn from_scalar_matrix(algebra: &Arc<SiteAlgebra>, c: &CMatrix) -> Result<Self> {
        if c.nrows() != c.ncols() {
            return Err(Error::DimensionMismatch("scalar matrix must be square".into()));
        }
        let unit = CMatrix::identity(algebra.block_dim, algebra.block_dim);
        let block = c.kronecker(&unit);
        Ok(AlgebraMatrix {
            algebra: algebra.clone(),
            size: c.nrows(),
            blocks: vec![block; algebra.sites()],
        })
    }

    /// Assembles an `m x m` matrix from a row-major grid of algebra elements.
    pub fn from_entries(algebra: &Arc<SiteAlgebra>, entries: &[Vec<AlgebraElement>]) -> Result<Self> {
        let m = entries.len();
        let k = algebra.block_dim;
        let mut out = Self::zeros(algebra, m);
        for (i, row) in entries.iter().enumerate() {
            if row.len() != m {
                return Err(Error::DimensionMismatch("entry grid is not square".into()));
            }
            for (j, e) in row.iter().enumerate() {
                if e.size != 1 || *e.algebra != **algebra {
                    return Err(Error::AlgebraMismatch);
                }
                for (dst, src) in out.blocks.iter_mut().zip(&e.blocks) {
                    dst.view_mut((i * k, j * k), (k, k)).copy_from(src);
                }
            }
        }
        Ok(out)
    }

    pub fn algebra(&self) -> &Arc<SiteAlgebra> {
        &self.algebra
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Per-site matrices of dimension `size * block_dim`.
    pub fn site_blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn into_site_blocks(self) -> Vec<CMatrix> {
        self.blocks
    }

    /// Entry `(i, j)` as an algebra element.
    pub fn entry(&self, i: usize, j: usize) -> AlgebraElement {
        let k = self.algebra.block_dim;
        AlgebraMatrix {
            algebra: self.algebra.clone(),
            size: 1,
            blocks: self
                .blocks
                .iter()
                .map(|b| b.view((i * k, j * k), (k, k)).into_owned())
                .collect(),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.algebra, &other.algebra) && *self.algebra != *other.algebra {
            return Err(Error::AlgebraMismatch);
        }
        if self.size != other.size {
            return Err(Error::DimensionMismatch(format!(
                "sizes {} and {}",
                self.size, other.size
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(AlgebraMatrix {
            algebra: self.algebra.clone(),
            size: self.size,
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn map_sites(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        AlgebraMatrix {
            algebra: self.algebra.clone(),
            size: self.size,
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, cmatmul)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_sites(|a| a * c)
    }

    pub fn adjoint(&self) -> Self {
        self.map_sites(|a| a.adjoint())
    }

    /// `phi(a) = sum_i phi(a_ii)`.
    pub fn trace_phi(&self) -> Complex64 {
        let k = self.algebra.block_dim as f64;
        self.blocks
            .iter()
            .zip(&self.algebra.weights)
            .map(|(b, w)| b.trace() * (w / k))
            .sum()
    }

    /// C*-norm: the largest site operator norm.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(linalg::op_norm).fold(0.0, f64::max)
    }

    /// Largest entry modulus over all sites.
    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// `||e^2 - e||`.
    pub fn idempotency_residual(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| linalg::op_norm(&(cmatmul(b, b) - b)))
            .fold(0.0, f64::max)
    }

    /// `||e* - e||`.
    pub fn selfadjoint_residual(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| linalg::op_norm(&(b.adjoint() - b)))
            .fold(0.0, f64::max)
    }

    pub fn is_projection(&self, tol: f64) -> bool {
        self.idempotency_residual() < tol && self.selfadjoint_residual() < tol
    }

    /// Block-diagonal sum, `self` in the upper-left corner.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if *self.algebra != *other.algebra {
            return Err(Error::AlgebraMismatch);
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| {
                let n = a.nrows() + b.nrows();
                let mut out = CMatrix::zeros(n, n);
                out.view_mut((0, 0), a.shape()).copy_from(a);
                out.view_mut(a.shape(), b.shape()).copy_from(b);
                out
            })
            .collect();
        Ok(AlgebraMatrix {
            algebra: self.algebra.clone(),
            size: self.size + other.size,
            blocks,
        })
    }

    /// `p (x) q` for a complex matrix `p`: entry `(i*m + a, j*m + b)` is
    /// `p_ij q_ab`, so the outer index comes from `p`.
    pub fn scalar_tensor(p: &CMatrix, q: &Self) -> Result<Self> {
        if p.nrows() != p.ncols() {
            return Err(Error::DimensionMismatch("scalar factor must be square".into()));
        }
        Ok(AlgebraMatrix {
            algebra: q.algebra.clone(),
            size: p.nrows() * q.size,
            blocks: q.blocks.iter().map(|b| p.kronecker(b)).collect(),
        })
    }

    /// True when every site matrix has vanishing imaginary part.
    pub fn is_real(&self) -> bool {
        self.blocks.iter().all(linalg::is_real)
    }

    /// Diagonal of real numbers read as multiples of 1, one per matrix index.
    pub fn diagonal_scalars(algebra: &Arc<SiteAlgebra>, diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|x| Complex64::new(*x, 0.0)));
        Self::from_scalar_matrix(algebra, &CMatrix::from_diagonal(&d)).expect("square")
    }
}

#[cfg(test)]
pub(crate) fn complex(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(alg: &Arc<SiteAlgebra>, m: usize, rng: &mut ChaCha8Rng) -> AlgebraMatrix {
        let dim = m * alg.block_dim();
        let blocks = (0..alg.sites())
            .map(|_| {
                CMatrix::from_fn(dim, dim, |_, _| {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                })
            })
            .collect();
        AlgebraMatrix::new(alg.clone(), m, blocks).unwrap()
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(SiteAlgebra::new(vec![0.5, 0.4], 1).is_err());
        assert!(SiteAlgebra::new(vec![1.5, -0.5], 1).is_err());
        assert!(SiteAlgebra::new(vec![], 1).is_err());
        assert!(SiteAlgebra::new(vec![1.0], 0).is_err());
    }

    #[test]
    fn identity_is_neutral_and_unital() {
        let alg = Arc::new(SiteAlgebra::new(vec![0.25, 0.75], 3).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&alg, 2, &mut rng);
        let one = AlgebraMatrix::identity(&alg, 2);
        assert_eq!(one.mul(&a).unwrap().max_abs_diff(&a).unwrap(), 0.0);
        assert!((one.trace_phi() - complex(2.0)).norm() < 1e-15);
    }

    #[test]
    fn product_matches_flattened_dense_product() {
        // Oracle: multiply m x m grids of k x k blocks entry by entry.
        let alg = Arc::new(SiteAlgebra::new(vec![0.5, 0.3, 0.2], 2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (a, b) = (random_matrix(&alg, 3, &mut rng), random_matrix(&alg, 3, &mut rng));
        let ab = a.mul(&b).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = AlgebraMatrix::zeros(&alg, 1);
                for l in 0..3 {
                    let term = a.entry(i, l).mul(&b.entry(l, j)).unwrap();
                    acc = acc.add(&term).unwrap();
                }
                assert!(ab.entry(i, j).max_abs_diff(&acc).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn trace_of_gram_is_weighted_frobenius() {
        let alg = Arc::new(SiteAlgebra::new(vec![0.1, 0.9], 2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&alg, 2, &mut rng);
        let gram = a.adjoint().mul(&a).unwrap().trace_phi();
        let oracle: f64 = a
            .site_blocks()
            .iter()
            .zip(alg.weights())
            .map(|(b, w)| w / 2.0 * b.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        assert!((gram - complex(oracle)).norm() < 1e-12);
    }

    #[test]
    fn circle_traces() {
        let alg = Arc::new(circle_algebra(4).unwrap());
        let z = circle_function(&alg, |z| z).unwrap();
        assert!(z.trace_phi().norm() < 1e-15);
        let one = circle_function(&alg, |_| ONE).unwrap();
        assert!((one.trace_phi() - ONE).norm() < 1e-15);
        let alg8 = Arc::new(circle_algebra(8).unwrap());
        let f = circle_function(&alg8, |z| z.powi(3) * z.conj().powi(3)).unwrap();
        assert!((f.trace_phi() - ONE).norm() < 1e-14);
    }

    #[test]
    fn entries_round_trip() {
        let alg = Arc::new(SiteAlgebra::new(vec![0.5, 0.5], 2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_matrix(&alg, 3, &mut rng);
        let grid: Vec<Vec<_>> = (0..3).map(|i| (0..3).map(|j| a.entry(i, j)).collect()).collect();
        let back = AlgebraMatrix::from_entries(&alg, &grid).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn scalar_tensor_with_unit_is_identity_layout() {
        let alg = Arc::new(SiteAlgebra::matrix(2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = random_matrix(&alg, 2, &mut rng);
        let one = CMatrix::identity(1, 1);
        assert_eq!(AlgebraMatrix::scalar_tensor(&one, &q).unwrap(), q);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
        #[test]
        fn trace_is_tracial(seed in 0u64..10_000, m in 1usize..4, k in 1usize..4, sites in 1usize..4) {
            let alg = Arc::new(SiteAlgebra::uniform(sites, k).unwrap());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&alg, m, &mut rng);
            let b = random_matrix(&alg, m, &mut rng);
            let ab = a.mul(&b).unwrap().trace_phi();
            let ba = b.mul(&a).unwrap().trace_phi();
            proptest::prop_assert!((ab - ba).norm() < 1e-10);
            let gram = a.adjoint().mul(&a).unwrap().trace_phi();
            proptest::prop_assert!(gram.re >= 0.0 && gram.im.abs() < 1e-12);
        }
    }

    #[test]
    fn faithful_on_positives() {
        let alg = Arc::new(SiteAlgebra::new(vec![0.2, 0.8], 2).unwrap());
        let zero = AlgebraMatrix::zeros(&alg, 2);
        let gram = zero.adjoint().mul(&zero).unwrap().trace_phi();
        assert_eq!(gram.norm(), 0.0);
        // A nonzero element supported on one site still has positive trace.
        let mut blocks = vec![CMatrix::zeros(2, 2); 2];
        blocks[1][(0, 1)] = complex(1e-3);
        let a = AlgebraMatrix::new(alg.clone(), 1, blocks).unwrap();
        assert!(a.adjoint().mul(&a).unwrap().trace_phi().re > 0.0);
    }
}
