//! Holomorphic functional calculus on the circle `|lambda - 1| = 1/2`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::AlgebraMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, cmatmul, CMatrix, Field, RMatrix};

pub const DEFAULT_CONTOUR_NODES: usize = 64;
/// Largest admissible resolvent norm at a contour node.
pub const RESOLVENT_LIMIT: f64 = 1e4;

const CENTER: f64 = 1.0;
const RADIUS: f64 = 0.5;
/// Pairs of eigenvalues closer than this use the cancellation-free
/// divided difference.
const CLOSE_PAIR: f64 = 1e-3;

fn contour_node(j: usize, nodes: usize) -> Complex64 {
    let theta = std::f64::consts::TAU * j as f64 / nodes as f64;
    Complex64::new(CENTER, 0.0) + Complex64::from_polar(RADIUS, theta)
}

fn check_nodes(nodes: usize) -> Result<()> {
    if nodes < 2 {
        return Err(Error::InvalidAlgebra(format!("{nodes} contour nodes")));
    }
    Ok(())
}

/// Trapezoid rule on the contour for a Hermitian matrix, evaluated in its
/// eigenbasis. For an eigenvalue `lambda` with `rho = (lambda - 1) / r`
/// the `M`-node rule sums to `1 / (1 - rho^M)` exactly, so the projection
/// and its directional derivatives are closed-form in the eigenbasis.
#[derive(Debug, Clone)]
pub struct HermitianContour<T: Field> {
    values: Vec<f64>,
    vectors: DMatrix<T>,
    coefficients: Vec<f64>,
    nodes: usize,
}

impl<T: Field> HermitianContour<T> {
    /// `a` must be Hermitian up to rounding; its Hermitian part is used.
    pub fn new(a: &DMatrix<T>, nodes: usize) -> Result<Self> {
        check_nodes(nodes)?;
        let h = (a + a.adjoint()).scale(0.5);
        let eig = h.symmetric_eigen();
        let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let mut worst = 0.0_f64;
        for &v in &values {
            let nearest = (0..nodes)
                .map(|j| (contour_node(j, nodes) - v).norm())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(1.0 / nearest);
        }
        if !(worst <= RESOLVENT_LIMIT) {
            return Err(Error::ContourPierced { norm: worst, limit: RESOLVENT_LIMIT });
        }
        let coefficients = values.iter().map(|&v| trapezoid_weight(v, nodes)).collect();
        Ok(HermitianContour { values, vectors: eig.eigenvectors, coefficients, nodes })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn eigenvectors(&self) -> &DMatrix<T> {
        &self.vectors
    }

    /// The projection in the eigenbasis is `diag(coefficients)`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn projection(&self) -> DMatrix<T> {
        let n = self.values.len();
        let scaled = DMatrix::from_fn(n, n, |i, j| {
            self.vectors[(i, j)].scale(self.coefficients[j])
        });
        T::matmul(&scaled, &self.vectors.adjoint())
    }

    /// Divided differences of the eigenvalue weight function; the
    /// derivative of the projection along `D` is `V ((V* D V) o C) V*`.
    pub fn divided_differences(&self) -> RMatrix {
        let n = self.values.len();
        let mut c = RMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = divided_difference(
                    self.values[i],
                    self.values[j],
                    self.coefficients[i],
                    self.coefficients[j],
                    self.nodes,
                );
                c[(i, j)] = v;
                c[(j, i)] = v;
            }
        }
        c
    }

    pub fn to_eigenbasis(&self, d: &DMatrix<T>) -> DMatrix<T> {
        T::matmul(&T::matmul(&self.vectors.adjoint(), d), &self.vectors)
    }

    pub fn from_eigenbasis(&self, b: &DMatrix<T>) -> DMatrix<T> {
        T::matmul(&T::matmul(&self.vectors, b), &self.vectors.adjoint())
    }

    /// Derivative of `t -> e(a + t d)` at `t = 0`, in the eigenbasis.
    pub fn derivative_in_eigenbasis(&self, d: &DMatrix<T>, dd: &RMatrix) -> DMatrix<T> {
        let b = self.to_eigenbasis(d);
        b.zip_map(dd, |x, c| x.scale(c))
    }

    pub fn derivative(&self, d: &DMatrix<T>) -> DMatrix<T> {
        let dd = self.divided_differences();
        self.from_eigenbasis(&self.derivative_in_eigenbasis(d, &dd))
    }
}

/// `1 / (1 - rho^M)`, written in `sigma = 1 / rho` outside the contour so
/// that no power overflows.
fn trapezoid_weight(lambda: f64, nodes: usize) -> f64 {
    let rho = (lambda - CENTER) / RADIUS;
    let m = nodes as i32;
    if rho.abs() <= 1.0 {
        1.0 / (1.0 - rho.powi(m))
    } else {
        let s = (1.0 / rho).powi(m);
        -s / (1.0 - s)
    }
}

fn divided_difference(li: f64, lj: f64, ci: f64, cj: f64, nodes: usize) -> f64 {
    let gap = li - lj;
    let ri = (li - CENTER) / RADIUS;
    let rj = (lj - CENTER) / RADIUS;
    let inside = (ri.abs() <= 1.0, rj.abs() <= 1.0);
    if gap.abs() >= CLOSE_PAIR || inside.0 != inside.1 {
        if gap == 0.0 {
            return 0.0;
        }
        return (ci - cj) / gap;
    }
    // (x^M - y^M) / (x - y) = sum_l x^l y^(M-1-l)
    let power_sum = |x: f64, y: f64| {
        let mut acc = 0.0;
        let mut xl = 1.0;
        let mut yl = y.powi(nodes as i32 - 1);
        let inv_y = if y != 0.0 { 1.0 / y } else { 0.0 };
        for l in 0..nodes {
            if y == 0.0 {
                // Only the l = M-1 term survives.
                if l == nodes - 1 {
                    acc += xl;
                }
            } else {
                acc += xl * yl;
                yl *= inv_y;
            }
            xl *= x;
        }
        acc
    };
    if inside.0 {
        ci * cj * power_sum(ri, rj) / RADIUS
    } else {
        let (si, sj) = (1.0 / ri, 1.0 / rj);
        let m = nodes as i32;
        let di = 1.0 / (1.0 - si.powi(m));
        let dj = 1.0 / (1.0 - sj.powi(m));
        di * dj * si * sj * power_sum(si, sj) / RADIUS
    }
}

/// Resolvents and trapezoid weights at the contour nodes:
/// `e ~ sum_j w_j (lambda_j - a)^{-1}` with `w_j = r e^{i theta_j} / M`.
pub(crate) fn resolvents(a: &CMatrix, nodes: usize) -> Result<Vec<(Complex64, CMatrix)>> {
    check_nodes(nodes)?;
    let n = a.nrows();
    let mut out = Vec::with_capacity(nodes);
    for j in 0..nodes {
        let z = contour_node(j, nodes);
        let shifted = CMatrix::from_diagonal_element(n, n, z) - a;
        let r = shifted
            .lu()
            .try_inverse()
            .ok_or(Error::ContourPierced { norm: f64::INFINITY, limit: RESOLVENT_LIMIT })?;
        let norm = linalg::op_norm(&r);
        if !(norm <= RESOLVENT_LIMIT) {
            return Err(Error::ContourPierced { norm, limit: RESOLVENT_LIMIT });
        }
        out.push(((z - CENTER) / nodes as f64, r));
    }
    Ok(out)
}

fn generic_site(a: &CMatrix, nodes: usize) -> Result<CMatrix> {
    let n = a.nrows();
    let mut e = CMatrix::zeros(n, n);
    for (w, r) in resolvents(a, nodes)? {
        e += r * w;
    }
    Ok(e)
}

fn is_hermitian(a: &CMatrix) -> bool {
    linalg::hermitian_defect(a) <= 1e-13 * (1.0 + linalg::max_abs(a))
}

pub(crate) fn spectral_projection_site(a: &CMatrix, nodes: usize) -> Result<CMatrix> {
    if !is_hermitian(a) {
        return generic_site(a, nodes);
    }
    if linalg::is_real(a) {
        let re = a.map(|z| z.re);
        Ok(linalg::to_complex(&HermitianContour::<f64>::new(&re, nodes)?.projection()))
    } else {
        Ok(HermitianContour::<Complex64>::new(a, nodes)?.projection())
    }
}

/// `(1 / 2 pi i) oint (lambda - a)^{-1} d lambda` over `|lambda - 1| = 1/2`,
/// counterclockwise, by the `nodes`-point trapezoid rule. Self-adjoint site
/// blocks are evaluated exactly in their eigenbasis.
pub fn contour_spectral_projection(a: &AlgebraMatrix, nodes: usize) -> Result<AlgebraMatrix> {
    let blocks = a
        .site_blocks()
        .iter()
        .map(|b| spectral_projection_site(b, nodes))
        .collect::<Result<Vec<_>>>()?;
    AlgebraMatrix::new(a.algebra().clone(), a.size(), blocks)
}

/// Same rule evaluated through explicit resolvents at every node.
pub fn contour_spectral_projection_generic(
    a: &AlgebraMatrix,
    nodes: usize,
) -> Result<AlgebraMatrix> {
    let blocks = a
        .site_blocks()
        .iter()
        .map(|b| generic_site(b, nodes))
        .collect::<Result<Vec<_>>>()?;
    AlgebraMatrix::new(a.algebra().clone(), a.size(), blocks)
}

/// The projection `e e* (1 + (e - e*)(e* - e))^{-1}` onto the range of an
/// idempotent `e`.
pub fn idempotent_to_projection(e: &AlgebraMatrix) -> Result<AlgebraMatrix> {
    let residual = e.idempotency_residual();
    if !(residual < 1e-8) {
        return Err(Error::NotIdempotent { residual });
    }
    let blocks = e
        .site_blocks()
        .iter()
        .map(|b| {
            let n = b.nrows();
            let bs = b.adjoint();
            let diff = b - &bs;
            let x = CMatrix::identity(n, n) + cmatmul(&diff, &(-&diff));
            let x_inv = x
                .cholesky()
                .ok_or_else(|| Error::NotProjection("range correction not positive".into()))?
                .inverse();
            let p = cmatmul(&cmatmul(b, &bs), &x_inv);
            Ok(linalg::hermitian_part(&p))
        })
        .collect::<Result<Vec<_>>>()?;
    AlgebraMatrix::new(e.algebra().clone(), e.size(), blocks)
}

/// Eigenprojection onto eigenvalues above 1/2 of a Hermitian matrix.
#[cfg(test)]
pub(crate) fn eigen_projection_oracle(a: &CMatrix) -> CMatrix {
    let eig = linalg::hermitian_part(a).symmetric_eigen();
    let n = a.nrows();
    let mask = nalgebra::DVector::from_iterator(
        n,
        eig.eigenvalues.iter().map(|&v| Complex64::new(if v > 0.5 { 1.0 } else { 0.0 }, 0.0)),
    );
    &eig.eigenvectors * CMatrix::from_diagonal(&mask) * eig.eigenvectors.adjoint()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::SiteAlgebra;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let g = CMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        g.qr().q()
    }

    /// Hermitian matrix with prescribed spectrum in a random basis.
    fn with_spectrum(values: &[f64], rng: &mut ChaCha8Rng) -> CMatrix {
        let u = random_unitary(values.len(), rng);
        let d = nalgebra::DVector::from_iterator(values.len(), values.iter().map(|v| Complex64::new(*v, 0.0)));
        &u * CMatrix::from_diagonal(&d) * u.adjoint()
    }

    fn scalar(a: CMatrix) -> AlgebraMatrix {
        let n = a.nrows();
        AlgebraMatrix::new(Arc::new(SiteAlgebra::scalars()), n, vec![a]).unwrap()
    }

    #[test]
    fn diagonal_inputs() {
        let alg = Arc::new(SiteAlgebra::scalars());
        let p = AlgebraMatrix::diagonal_scalars(&alg, &[0.0, 1.0]);
        let e = contour_spectral_projection(&p, 64).unwrap();
        assert!(e.max_abs_diff(&p).unwrap() < 1e-11);
        let a = AlgebraMatrix::diagonal_scalars(&alg, &[0.1, 0.9]);
        let e = contour_spectral_projection(&a, 64).unwrap();
        assert!(e.max_abs_diff(&p).unwrap() < 1e-12);
    }

    #[test]
    fn matches_eigenprojection_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.random_range(2..9);
            let values: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        rng.random_range(0.0..0.25)
                    } else {
                        rng.random_range(0.75..1.0)
                    }
                })
                .collect();
            let a = with_spectrum(&values, &mut rng);
            let oracle = eigen_projection_oracle(&a);
            let e = contour_spectral_projection(&scalar(a.clone()), 64).unwrap();
            assert!(linalg::max_abs(&(&e.site_blocks()[0] - &oracle)) < 1e-10);
            let g = contour_spectral_projection_generic(&scalar(a), 64).unwrap();
            assert!(linalg::max_abs(&(&g.site_blocks()[0] - &oracle)) < 1e-10);
        }
    }

    #[test]
    fn eigen_path_is_the_trapezoid_rule() {
        // Spectrum near the contour, where truncation error is visible:
        // both routes must agree on the same quadrature value.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = with_spectrum(&[0.3, 0.62, 0.7, 1.4, 1.7], &mut rng);
        for nodes in [8, 16, 64] {
            let fast = contour_spectral_projection(&scalar(a.clone()), nodes).unwrap();
            let slow = contour_spectral_projection_generic(&scalar(a.clone()), nodes).unwrap();
            assert!(fast.max_abs_diff(&slow).unwrap() < 1e-12, "nodes {nodes}");
        }
    }

    #[test]
    fn derivative_matches_generic_and_difference_quotient() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        // Repeated eigenvalues exercise the close-pair branch.
        let a = with_spectrum(&[0.05, 0.05, 0.2, 0.8, 0.8 + 1e-9, 0.95], &mut rng);
        let d = with_spectrum(&[-0.1, 0.05, 0.0, 0.1, 0.02, -0.03], &mut rng);
        let hc = HermitianContour::<Complex64>::new(&a, 64).unwrap();
        let fast = hc.derivative(&d);
        let mut slow = CMatrix::zeros(6, 6);
        for (w, r) in resolvents(&a, 64).unwrap() {
            slow += cmatmul(&cmatmul(&r, &d), &r) * w;
        }
        assert!(linalg::max_abs(&(&fast - &slow)) < 1e-12);
        let h = 1e-5;
        let plus = spectral_projection_site(&(&a + &d * Complex64::new(h, 0.0)), 64).unwrap();
        let minus = spectral_projection_site(&(&a - &d * Complex64::new(h, 0.0)), 64).unwrap();
        let fd = (plus - minus) / Complex64::new(2.0 * h, 0.0);
        assert!(linalg::max_abs(&(&fast - &fd)) < 1e-8);
    }

    #[test]
    fn divided_differences_agree_across_branches() {
        let nodes = 64;
        for (li, lj) in [(0.55, 0.5505), (0.1, 0.1004), (1.3, 1.3002), (0.8, 0.8)] {
            let ci = trapezoid_weight(li, nodes);
            let cj = trapezoid_weight(lj, nodes);
            let close = divided_difference(li, lj, ci, cj, nodes);
            let direct = if li == lj {
                let h = 1e-6;
                (trapezoid_weight(li + h, nodes) - trapezoid_weight(li - h, nodes)) / (2.0 * h)
            } else {
                (ci - cj) / (li - lj)
            };
            assert!((close - direct).abs() < 1e-6 * (1.0 + direct.abs()), "{li} {lj}");
        }
    }

    #[test]
    fn doubling_nodes_is_stable_away_from_the_contour() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let a = with_spectrum(&[0.0, 0.1, 0.2, 0.8, 0.85, 1.0], &mut rng);
        let e64 = spectral_projection_site(&a, 64).unwrap();
        let e128 = spectral_projection_site(&a, 128).unwrap();
        assert!(linalg::max_abs(&(e64 - e128)) < 1e-12);
    }

    #[test]
    fn pierced_contour_is_reported() {
        let alg = Arc::new(SiteAlgebra::scalars());
        let a = AlgebraMatrix::diagonal_scalars(&alg, &[0.5, 1.0]);
        assert!(matches!(
            contour_spectral_projection(&a, 64),
            Err(Error::ContourPierced { .. })
        ));
        let non_normal = scalar(CMatrix::from_row_slice(
            2,
            2,
            &[0.5, 1.0, 0.0, 1.0].map(|x| Complex64::new(x, 0.0)),
        ));
        assert!(contour_spectral_projection(&non_normal, 64).is_err());
    }

    #[test]
    fn oblique_idempotent_projection() {
        let alg = Arc::new(SiteAlgebra::matrix(2).unwrap());
        let e = AlgebraMatrix::new(
            alg.clone(),
            1,
            vec![CMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 0.0].map(|x| Complex64::new(x, 0.0)))],
        )
        .unwrap();
        assert!((e.trace_phi().re - 0.5).abs() < 1e-15);
        let p = idempotent_to_projection(&e).unwrap();
        assert!(p.is_projection(1e-12));
        assert!((p.trace_phi() - e.trace_phi()).norm() < 1e-12);
        // The range of e is spanned by (1, 0).
        let expected = AlgebraMatrix::new(
            alg,
            1,
            vec![CMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0].map(|x| Complex64::new(x, 0.0)))],
        )
        .unwrap();
        assert!(p.max_abs_diff(&expected).unwrap() < 1e-12);
        let q = idempotent_to_projection(&p).unwrap();
        assert!(q.max_abs_diff(&p).unwrap() < 1e-14);
    }

    #[test]
    fn conjugated_projection_recovers_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..10 {
            let n = rng.random_range(2..7);
            let rank = rng.random_range(0..=n);
            let diag: Vec<f64> = (0..n).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
            let p0 = with_spectrum(&diag, &mut rng);
            let s = CMatrix::identity(n, n)
                + CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4)));
            let e = &s * &p0 * s.clone().try_inverse().unwrap();
            let p = idempotent_to_projection(&scalar(e.clone())).unwrap();
            assert!(p.is_projection(1e-9));
            let eig_rank = linalg::hermitian_part(&p.site_blocks()[0])
                .symmetric_eigenvalues()
                .iter()
                .filter(|v| **v > 0.5)
                .count();
            assert_eq!(eig_rank, rank);
            assert!((p.trace_phi() - Complex64::new(rank as f64, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn rejects_non_idempotent() {
        let alg = Arc::new(SiteAlgebra::scalars());
        let a = AlgebraMatrix::diagonal_scalars(&alg, &[0.5]);
        assert!(matches!(idempotent_to_projection(&a), Err(Error::NotIdempotent { .. })));
    }
}
