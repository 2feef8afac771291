//! Dense complex matrix helpers shared by the algebra and Chern modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

/// Scalars the eigenbasis kernels run over: `f64` for real symmetric
/// data, `Complex64` otherwise.
pub trait Field: nalgebra::ComplexField<RealField = f64> + Copy {
    fn to_c64(self) -> Complex64;
    fn matmul(a: &DMatrix<Self>, b: &DMatrix<Self>) -> DMatrix<Self>;
    /// Converts a complex matrix, dropping imaginary parts for `f64`.
    fn from_cmatrix(m: &CMatrix) -> DMatrix<Self>;
    fn into_cmatrix(m: DMatrix<Self>) -> CMatrix;
}

impl Field for f64 {
    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn matmul(a: &RMatrix, b: &RMatrix) -> RMatrix {
        a * b
    }
    fn from_cmatrix(m: &CMatrix) -> RMatrix {
        m.map(|z| z.re)
    }
    fn into_cmatrix(m: RMatrix) -> CMatrix {
        to_complex(&m)
    }
}

impl Field for Complex64 {
    fn to_c64(self) -> Complex64 {
        self
    }
    fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
        cmatmul(a, b)
    }
    fn from_cmatrix(m: &CMatrix) -> CMatrix {
        m.clone()
    }
    fn into_cmatrix(m: CMatrix) -> CMatrix {
        m
    }
}

#[cfg(test)]
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Splits a complex matrix into its real and imaginary parts.
pub fn split(m: &CMatrix) -> (RMatrix, RMatrix) {
    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im);
    (re, im)
}

pub fn join(re: &RMatrix, im: &RMatrix) -> CMatrix {
    re.zip_map(im, Complex64::new)
}

pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Complex product through four real products; nalgebra's generic complex
/// kernel is an order of magnitude slower than the real one.
pub fn cmatmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "cmatmul: inner dimensions differ");
    if a.nrows() * b.ncols() <= 16 {
        return a * b;
    }
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    join(&re, &im)
}

/// Largest singular value.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.nrows() == m.ncols() && hermitian_defect(m) == 0.0 {
        return m
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(0.0_f64, |acc, x| acc.max(x.abs()));
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, x| acc.max(*x))
}

/// max |m - m*| entrywise.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn is_real(m: &CMatrix) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// Hermitian part (m + m*)/2, used to strip rounding noise before a
/// symmetric eigendecomposition.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZERO: Complex64 = Complex64::new(0.0, 0.0);

    #[test]
    fn fast_product_matches_naive() {
        let a = CMatrix::from_fn(7, 5, |i, j| Complex64::new(i as f64 - 0.3 * j as f64, (i * j) as f64 * 0.1));
        let b = CMatrix::from_fn(5, 6, |i, j| Complex64::new((i + 2 * j) as f64 * 0.2, 1.0 - j as f64));
        let diff = max_abs(&(cmatmul(&a, &b) - &a * &b));
        assert!(diff < 1e-12, "diff {diff}");
    }

    #[test]
    fn op_norm_of_diagonal() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.5, 0.0),
            Complex64::new(-2.0, 0.0),
        ]));
        assert!((op_norm(&m) - 2.0).abs() < 1e-14);
        let nilpotent = CMatrix::from_row_slice(2, 2, &[ZERO, Complex64::new(3.0, 0.0), ZERO, ZERO]);
        assert!((op_norm(&nilpotent) - 3.0).abs() < 1e-12);
    }
}
