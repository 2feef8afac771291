//! Alexander-Spanier cochains and the tracial Chern character of
//! projection fields.
//!
//! For a tuple `x = (x_0..x_2n)` inside an oscillation-1/4 cover set,
//! `a(x,t) = p(x_0) + sum_i t_i (p(x_i) - p(x_0))` is within 1/4 of a
//! projection, `e(x,t)` is its spectral projection on `|lambda - 1| = 1/2`,
//! and
//!
//! `Ch^2n(p)(x) = kappa_n int_{Delta^2n} sum_sigma sign(sigma) phi(e d_sigma(1) e ... d_sigma(2n) e) dt`
//!
//! with `kappa_n = (-1)^n / n! * (i / 2 pi)^n`.

mod cochain;
mod kernel;

pub use cochain::{solve_coboundary, CoboundarySolution, Cochain};

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::{contour_spectral_projection, AlgebraMatrix, HermitianContour, SiteAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Field};
use crate::quadrature::SimplexRule;
use crate::space::CoverTupleSet;

/// Admissible distance from `p(x_0)` for the affine segment.
pub const OSCILLATION_BOUND: f64 = 0.25;

/// A projection in `M_m(A)` at every sample point.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionField {
    algebra: Arc<SiteAlgebra>,
    size: usize,
    values: Vec<AlgebraMatrix>,
}

impl ProjectionField {
    /// Checks that every value is a projection within `1e-8`.
    pub fn new(algebra: Arc<SiteAlgebra>, size: usize, values: Vec<AlgebraMatrix>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DimensionMismatch("projection field without points".into()));
        }
        for (x, v) in values.iter().enumerate() {
            if **v.algebra() != *algebra {
                return Err(Error::AlgebraMismatch);
            }
            if v.size() != size {
                return Err(Error::DimensionMismatch(format!("value at {x} has size {}", v.size())));
            }
            let (idem, adj) = (v.idempotency_residual(), v.selfadjoint_residual());
            if !(idem < 1e-8 && adj < 1e-8) {
                return Err(Error::NotProjection(format!(
                    "value at point {x}: |p^2 - p| = {idem:.2e}, |p* - p| = {adj:.2e}"
                )));
            }
        }
        Ok(ProjectionField { algebra, size, values })
    }

    pub fn constant(q: &AlgebraMatrix, points: usize) -> Result<Self> {
        Self::new(q.algebra().clone(), q.size(), vec![q.clone(); points])
    }

    /// Scalar field in `M_m(C)` from complex matrices.
    pub fn scalar(values: Vec<CMatrix>) -> Result<Self> {
        let algebra = Arc::new(SiteAlgebra::scalars());
        let size = values.first().map_or(0, |v| v.nrows());
        let values = values
            .into_iter()
            .map(|v| AlgebraMatrix::new(algebra.clone(), v.nrows(), vec![v]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(algebra, size, values)
    }

    pub fn algebra(&self) -> &Arc<SiteAlgebra> {
        &self.algebra
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, x: usize) -> &AlgebraMatrix {
        &self.values[x]
    }

    pub fn values(&self) -> &[AlgebraMatrix] {
        &self.values
    }

    /// `||p(x) - p(y)||`.
    pub fn distance(&self, x: usize, y: usize) -> f64 {
        if x == y {
            return 0.0;
        }
        self.values[x].sub(&self.values[y]).expect("same algebra").norm()
    }

    /// `max_i ||p(x_i) - p(x_0)||`.
    pub fn tuple_oscillation(&self, tuple: &[usize]) -> f64 {
        tuple[1..].iter().map(|&x| self.distance(tuple[0], x)).fold(0.0, f64::max)
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch("fields on different samples".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.direct_sum(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProjectionField { algebra: self.algebra.clone(), size: self.size + other.size, values })
    }

    fn check_tuple(&self, tuple: &[usize]) -> Result<()> {
        if tuple.is_empty() || tuple.iter().any(|&x| x >= self.len()) {
            return Err(Error::DimensionMismatch(format!("tuple {tuple:?} outside the sample")));
        }
        let oscillation = self.tuple_oscillation(tuple);
        if oscillation > OSCILLATION_BOUND + 1e-12 {
            return Err(Error::OscillationViolated {
                tuple: tuple.to_vec(),
                oscillation,
                bound: OSCILLATION_BOUND,
            });
        }
        Ok(())
    }
}

/// `(p (x) q)_{ij} = p_ij q` for a scalar field `p` and a projection `q`.
pub fn tensor_projection(p: &ProjectionField, q: &AlgebraMatrix) -> Result<ProjectionField> {
    if *p.algebra != SiteAlgebra::scalars() {
        return Err(Error::AlgebraMismatch);
    }
    if !q.is_projection(1e-8) {
        return Err(Error::NotProjection("fiber is not a projection".into()));
    }
    let values = p
        .values
        .iter()
        .map(|v| AlgebraMatrix::scalar_tensor(&v.site_blocks()[0], q))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProjectionField { algebra: q.algebra().clone(), size: p.size * q.size(), values })
}

/// `a_p(x, t) = p(x_0) + sum_i t_i (p(x_i) - p(x_0))`.
pub fn affine_segment(p: &ProjectionField, tuple: &[usize], t: &[f64]) -> Result<AlgebraMatrix> {
    if t.len() + 1 != tuple.len() {
        return Err(Error::DimensionMismatch(format!(
            "simplex point of dimension {} for a tuple of length {}",
            t.len(),
            tuple.len()
        )));
    }
    p.check_tuple(tuple)?;
    let p0 = p.value(tuple[0]);
    let mut acc = p0.clone();
    for (&x, &ti) in tuple[1..].iter().zip(t) {
        let d = p.value(x).sub(p0)?;
        acc = acc.add(&d.scale(Complex64::new(ti, 0.0)))?;
    }
    Ok(acc)
}

/// `e_p(x, t)`, the contour spectral projection of the affine segment.
pub fn spectral_projection_field(
    p: &ProjectionField,
    tuple: &[usize],
    t: &[f64],
    contour_nodes: usize,
) -> Result<AlgebraMatrix> {
    contour_spectral_projection(&affine_segment(p, tuple, t)?, contour_nodes)
}

fn site_derivatives<T: Field>(a: &CMatrix, ds: &[CMatrix], nodes: usize) -> Result<Vec<CMatrix>> {
    let hc = HermitianContour::<T>::new(&T::from_cmatrix(a), nodes)?;
    let dd = hc.divided_differences();
    Ok(ds
        .iter()
        .map(|d| {
            let b = hc.derivative_in_eigenbasis(&T::from_cmatrix(d), &dd);
            T::into_cmatrix(hc.from_eigenbasis(&b))
        })
        .collect())
}

/// `d e_p(x, t) / d t_s` for `s = 1..len(t)`: the contour integral of
/// `(lambda - a)^{-1} (p(x_s) - p(x_0)) (lambda - a)^{-1}`.
pub fn partial_derivatives_e(
    p: &ProjectionField,
    tuple: &[usize],
    t: &[f64],
    contour_nodes: usize,
) -> Result<Vec<AlgebraMatrix>> {
    let a = affine_segment(p, tuple, t)?;
    let p0 = p.value(tuple[0]);
    let diffs: Vec<AlgebraMatrix> =
        tuple[1..].iter().map(|&x| p.value(x).sub(p0)).collect::<Result<_>>()?;
    let sites = p.algebra.sites();
    let mut per_direction: Vec<Vec<CMatrix>> = vec![Vec::with_capacity(sites); diffs.len()];
    for s in 0..sites {
        let ds: Vec<CMatrix> = diffs.iter().map(|d| d.site_blocks()[s].clone()).collect();
        let block = &a.site_blocks()[s];
        let real = crate::linalg::is_real(block) && ds.iter().all(crate::linalg::is_real);
        let out = if real {
            site_derivatives::<f64>(block, &ds, contour_nodes)?
        } else {
            site_derivatives::<Complex64>(block, &ds, contour_nodes)?
        };
        for (dst, m) in per_direction.iter_mut().zip(out) {
            dst.push(m);
        }
    }
    per_direction
        .into_iter()
        .map(|blocks| AlgebraMatrix::new(p.algebra.clone(), p.size, blocks))
        .collect()
}

/// `(-1)^n / n! * (i / 2 pi)^n`.
pub fn chern_normalization(n: usize) -> Complex64 {
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Complex64::new(0.0, 1.0 / std::f64::consts::TAU).powi(n as i32) * (sign / factorial)
}

/// A Chern cochain with the largest discarded imaginary part.
#[derive(Debug, Clone)]
pub struct ChernCochain {
    pub cochain: Cochain,
    pub max_imaginary: f64,
}

/// Which evaluation of the contour integrals to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourMethod {
    /// Closed-form trapezoid rule in the eigenbasis of each site block.
    Eigenbasis,
    /// Explicit resolvents at every node.
    Resolvent,
}

/// `Ch^2n_phi(p)` on every tuple of `tuples` (degree `2n`); `n = 0` gives
/// `x -> phi(p(x))`.
pub fn chern_cochain(
    p: &ProjectionField,
    n: usize,
    tuples: &Arc<CoverTupleSet>,
    rule: &SimplexRule,
    contour_nodes: usize,
) -> Result<ChernCochain> {
    chern_cochain_with(p, n, tuples, rule, contour_nodes, ContourMethod::Eigenbasis)
}

pub fn chern_cochain_with(
    p: &ProjectionField,
    n: usize,
    tuples: &Arc<CoverTupleSet>,
    rule: &SimplexRule,
    contour_nodes: usize,
    method: ContourMethod,
) -> Result<ChernCochain> {
    if n > 2 {
        return Err(Error::UnsupportedDegree(n));
    }
    if tuples.degree() != 2 * n {
        return Err(Error::DimensionMismatch(format!(
            "degree {} tuples for Ch^{}",
            tuples.degree(),
            2 * n
        )));
    }
    if tuples.cover().points() != p.len() {
        return Err(Error::DimensionMismatch(format!(
            "field on {} points, cover on {}",
            p.len(),
            tuples.cover().points()
        )));
    }
    if n > 0 && rule.degree() != 2 * n {
        return Err(Error::DimensionMismatch(format!(
            "simplex rule of degree {} for Ch^{}",
            rule.degree(),
            2 * n
        )));
    }
    let kappa = chern_normalization(n);
    let values: Vec<Complex64> = tuples
        .tuples()
        .par_iter()
        .map(|t| {
            if n == 0 {
                return Ok(p.value(t[0]).trace_phi());
            }
            p.check_tuple(t)?;
            Ok(tuple_integral(p, t, rule, contour_nodes, method)? * kappa)
        })
        .collect::<Result<Vec<_>>>()?;
    let max_imaginary = values.iter().fold(0.0_f64, |a, v| a.max(v.im.abs()));
    let cochain = Cochain::new(tuples.clone(), values.iter().map(|v| v.re).collect())?;
    Ok(ChernCochain { cochain, max_imaginary })
}

/// `int_Delta sum_s (w_s / k) sum_sigma sign Tr(e d e ... d e)` without the
/// normalization constant.
fn tuple_integral(
    p: &ProjectionField,
    tuple: &[usize],
    rule: &SimplexRule,
    nodes: usize,
    method: ContourMethod,
) -> Result<Complex64> {
    let alg = &p.algebra;
    let k = alg.block_dim() as f64;
    let p0 = p.value(tuple[0]);
    let mut total = Complex64::new(0.0, 0.0);
    for s in 0..alg.sites() {
        let base = &p0.site_blocks()[s];
        let ds: Vec<CMatrix> =
            tuple[1..].iter().map(|&x| &p.value(x).site_blocks()[s] - base).collect();
        // A vanishing or repeated direction kills every antisymmetrized term.
        let degenerate = ds.iter().any(|d| d.iter().all(|z| *z == Complex64::new(0.0, 0.0)))
            || (0..ds.len()).any(|i| (i + 1..ds.len()).any(|j| ds[i] == ds[j]));
        if degenerate {
            continue;
        }
        let site_value = match method {
            ContourMethod::Eigenbasis => {
                if crate::linalg::is_real(base) && ds.iter().all(crate::linalg::is_real) {
                    site_integral::<f64>(base, &ds, rule, nodes)?
                } else {
                    site_integral::<Complex64>(base, &ds, rule, nodes)?
                }
            }
            ContourMethod::Resolvent => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (t, w) in rule.nodes().iter().zip(rule.weights()) {
                    let a = affine(base, &ds, t);
                    acc += kernel::integrand_generic(&a, &ds, nodes)? * *w;
                }
                acc
            }
        };
        total += site_value * (alg.weights()[s] / k);
    }
    Ok(total)
}

fn affine<T: Field>(base: &DMatrix<T>, ds: &[DMatrix<T>], t: &[f64]) -> DMatrix<T> {
    let mut a = base.clone();
    for (d, ti) in ds.iter().zip(t) {
        a += d.map(|z| z.scale(*ti));
    }
    a
}

fn site_integral<T: Field>(base: &CMatrix, ds: &[CMatrix], rule: &SimplexRule, nodes: usize) -> Result<Complex64> {
    let base = T::from_cmatrix(base);
    let ds: Vec<DMatrix<T>> = ds.iter().map(T::from_cmatrix).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (t, w) in rule.nodes().iter().zip(rule.weights()) {
        acc += kernel::integrand(&affine(&base, &ds, t), &ds, nodes)? * *w;
    }
    Ok(acc)
}
