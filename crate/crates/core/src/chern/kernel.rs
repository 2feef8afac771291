//! Antisymmetrized trace integrand `sum_sigma sign(sigma) Tr(e d_sigma(1) e ... d_sigma(2n) e)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::HermitianContour;
use crate::error::{Error, Result};
use crate::linalg::{cmatmul, CMatrix, Field};

/// Permutations of `0..n` with their signs.
pub(crate) fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, f64)>) {
        let n = used.len();
        if prefix.len() == n {
            let mut inversions = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if prefix[i] > prefix[j] {
                        inversions += 1;
                    }
                }
            }
            out.push((prefix.clone(), if inversions % 2 == 0 { 1.0 } else { -1.0 }));
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// `sum_i c_i sum_j x_ij y_ji`, the trace of `diag(c) x y`.
fn weighted_trace_product<T: Field>(c: &[f64], x: &DMatrix<T>, y: &DMatrix<T>) -> Complex64 {
    let n = x.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = T::zero();
        for j in 0..n {
            row += x[(i, j)] * y[(j, i)];
        }
        acc += row.to_c64() * c[i];
    }
    acc
}

/// Integrand at `a` with directions `ds` (two or four of them), using the
/// exact trapezoid projection in the eigenbasis of `a`.
pub(crate) fn integrand<T: Field>(a: &DMatrix<T>, ds: &[DMatrix<T>], nodes: usize) -> Result<Complex64> {
    let hc = HermitianContour::new(a, nodes)?;
    let dd = hc.divided_differences();
    let b: Vec<DMatrix<T>> = ds.iter().map(|d| hc.derivative_in_eigenbasis(d, &dd)).collect();
    let c = hc.coefficients();
    match b.len() {
        2 => Ok(weighted_trace_product(c, &b[0], &b[1]) - weighted_trace_product(c, &b[1], &b[0])),
        4 => {
            let mut pairs = vec![vec![None; 4]; 4];
            for x in 0..4 {
                for y in 0..4 {
                    if x != y {
                        pairs[x][y] = Some(T::matmul(&b[x], &b[y]));
                    }
                }
            }
            let mut total = Complex64::new(0.0, 0.0);
            for (s, sign) in signed_permutations(4) {
                let left = pairs[s[0]][s[1]].as_ref().expect("distinct");
                let right = pairs[s[2]][s[3]].as_ref().expect("distinct");
                total += weighted_trace_product(c, left, right) * sign;
            }
            Ok(total)
        }
        k => Err(Error::UnsupportedDegree(k / 2)),
    }
}

/// Same integrand through explicit resolvents at each contour node.
pub(crate) fn integrand_generic(a: &CMatrix, ds: &[CMatrix], nodes: usize) -> Result<Complex64> {
    let n = a.nrows();
    let resolvents = crate::algebra::resolvents(a, nodes)?;
    let mut e = CMatrix::zeros(n, n);
    let mut de = vec![CMatrix::zeros(n, n); ds.len()];
    for (w, r) in &resolvents {
        e += r * *w;
        for (acc, d) in de.iter_mut().zip(ds) {
            *acc += cmatmul(&cmatmul(r, d), r) * *w;
        }
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (s, sign) in signed_permutations(ds.len()) {
        let mut prod = e.clone();
        for &i in &s {
            prod = cmatmul(&prod, &de[i]);
        }
        total += prod.trace() * sign;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_signs() {
        let p = signed_permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().map(|x| x.1).sum::<f64>(), 0.0);
        assert_eq!(signed_permutations(4).len(), 24);
        assert_eq!(p[1], (vec![0, 2, 1], -1.0));
    }
}
