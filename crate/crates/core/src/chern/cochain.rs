use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::{Chain, CoverTupleSet};

/// Real-valued cochain on a sampled tuple set.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    tuples: Arc<CoverTupleSet>,
    values: Vec<f64>,
}

impl Cochain {
    pub fn new(tuples: Arc<CoverTupleSet>, values: Vec<f64>) -> Result<Self> {
        if values.len() != tuples.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} tuples",
                values.len(),
                tuples.len()
            )));
        }
        Ok(Cochain { tuples, values })
    }

    pub fn zero(tuples: Arc<CoverTupleSet>) -> Self {
        let n = tuples.len();
        Cochain { tuples, values: vec![0.0; n] }
    }

    /// Evaluates `f` on every tuple.
    pub fn from_fn(tuples: Arc<CoverTupleSet>, f: impl Fn(&[usize]) -> f64) -> Self {
        let values = tuples.tuples().iter().map(|t| f(t)).collect();
        Cochain { tuples, values }
    }

    pub fn degree(&self) -> usize {
        self.tuples.degree()
    }

    pub fn tuples(&self) -> &Arc<CoverTupleSet> {
        &self.tuples
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, tuple: &[usize]) -> Option<f64> {
        self.tuples.position(tuple).map(|i| self.values[i])
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `sup |self - other|` over tuples of `self`, matched by tuple.
    pub fn sup_distance(&self, other: &Cochain) -> Result<f64> {
        let mut worst = 0.0_f64;
        for (t, v) in self.tuples.tuples().iter().zip(&self.values) {
            let w = other.value_at(t).ok_or_else(|| Error::MissingFace(t.clone()))?;
            worst = worst.max((v - w).abs());
        }
        Ok(worst)
    }

    pub fn scale(&self, c: f64) -> Cochain {
        Cochain { tuples: self.tuples.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    /// `(df)(x_0..x_{k+1}) = sum_j (-1)^j f(x_0..^x_j..x_{k+1})` on every
    /// tuple of `target`.
    pub fn coboundary(&self, target: &Arc<CoverTupleSet>) -> Result<Cochain> {
        if target.degree() != self.degree() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "coboundary of a degree {} cochain onto degree {} tuples",
                self.degree(),
                target.degree()
            )));
        }
        let ops = incidence(target, &self.tuples)?;
        let values = ops
            .iter()
            .map(|row| row.iter().map(|&(c, s)| s * self.values[c]).sum())
            .collect();
        Ok(Cochain { tuples: target.clone(), values })
    }

    /// `max |dc|` over `target`.
    pub fn cocycle_residual(&self, target: &Arc<CoverTupleSet>) -> Result<f64> {
        Ok(self.coboundary(target)?.sup_norm())
    }

    /// `sum sign * c(tuple)` over the chain.
    pub fn pair_with_chain(&self, chain: &Chain) -> Result<f64> {
        let mut total = 0.0;
        for (t, s) in chain {
            if t.len() != self.degree() + 1 {
                return Err(Error::DimensionMismatch(format!(
                    "chain tuple {t:?} against a degree {} cochain",
                    self.degree()
                )));
            }
            if self.tuples.cover().owner(t).is_none() {
                return Err(Error::ChainEscapesCover(t.clone()));
            }
            total += s * self.value_at(t).ok_or_else(|| Error::MissingFace(t.clone()))?;
        }
        Ok(total)
    }
}

/// Sparse rows of the coboundary from `lower` to `upper` tuples, with
/// repeated faces merged.
fn incidence(upper: &CoverTupleSet, lower: &CoverTupleSet) -> Result<Vec<Vec<(usize, f64)>>> {
    upper
        .tuples()
        .iter()
        .map(|t| {
            let mut row: Vec<(usize, f64)> = Vec::with_capacity(t.len());
            for j in 0..t.len() {
                let mut face = t.clone();
                face.remove(j);
                let col = lower.position(&face).ok_or(Error::MissingFace(face))?;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                match row.iter_mut().find(|(c, _)| *c == col) {
                    Some(entry) => entry.1 += sign,
                    None => row.push((col, sign)),
                }
            }
            row.retain(|(_, s)| *s != 0.0);
            Ok(row)
        })
        .collect()
}

/// Least-squares primitive of a cochain.
#[derive(Debug, Clone)]
pub struct CoboundarySolution {
    pub primitive: Cochain,
    /// `||df - c||_2`
    pub residual: f64,
    /// `residual / ||c||_2`, zero when `c` vanishes.
    pub relative: f64,
    pub iterations: usize,
}

/// Minimum-norm least-squares solution of `df = c` with `f` on the faces
/// of the tuples of `c` (or on `lower` when given), by LSQR from zero.
pub fn solve_coboundary(c: &Cochain, lower: Option<Arc<CoverTupleSet>>) -> Result<CoboundarySolution> {
    let lower = match lower {
        Some(l) => l,
        None => Arc::new(c.tuples.faces()?),
    };
    let rows = incidence(&c.tuples, &lower)?;
    let ncols = lower.len();
    let b = &c.values;
    let apply = |x: &[f64]| -> Vec<f64> {
        rows.iter().map(|r| r.iter().map(|&(j, s)| s * x[j]).sum()).collect()
    };
    let apply_t = |y: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; ncols];
        for (r, yi) in rows.iter().zip(y) {
            for &(j, s) in r {
                out[j] += s * yi;
            }
        }
        out
    };
    let (x, iterations) = lsqr(apply, apply_t, b, ncols, 1e-15, 4 * ncols + 200);
    let primitive = Cochain { tuples: lower, values: x };
    let fitted = apply(&primitive.values);
    let residual = fitted.iter().zip(b).map(|(f, v)| (f - v) * (f - v)).sum::<f64>().sqrt();
    let norm = c.l2_norm();
    let relative = if norm > 0.0 { residual / norm } else { 0.0 };
    Ok(CoboundarySolution { primitive, residual, relative, iterations })
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Paige-Saunders LSQR without damping; stops when the normal-equation
/// residual falls below `tol` relative to `||A|| ||r||`.
fn lsqr(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    apply_t: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    ncols: usize,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, usize) {
    let mut x = vec![0.0; ncols];
    let mut u = b.to_vec();
    let mut beta = norm2(&u);
    if beta == 0.0 || ncols == 0 {
        return (x, 0);
    }
    u.iter_mut().for_each(|v| *v /= beta);
    let mut v = apply_t(&u);
    let mut alpha = norm2(&v);
    if alpha == 0.0 {
        return (x, 0);
    }
    v.iter_mut().for_each(|e| *e /= alpha);
    let mut w = v.clone();
    let mut phi_bar = beta;
    let mut rho_bar = alpha;
    let mut a_norm_sq = 0.0;
    let bnorm = beta;
    for it in 1..=max_iter {
        let av = apply(&v);
        for (ui, ai) in u.iter_mut().zip(&av) {
            *ui = ai - alpha * *ui;
        }
        beta = norm2(&u);
        if beta > 0.0 {
            u.iter_mut().for_each(|e| *e /= beta);
        }
        a_norm_sq += alpha * alpha + beta * beta;
        let atu = apply_t(&u);
        for (vi, ai) in v.iter_mut().zip(&atu) {
            *vi = ai - beta * *vi;
        }
        alpha = norm2(&v);
        if alpha > 0.0 {
            v.iter_mut().for_each(|e| *e /= alpha);
        }
        let rho = rho_bar.hypot(beta);
        let c = rho_bar / rho;
        let s = beta / rho;
        let theta = s * alpha;
        rho_bar = -c * alpha;
        let phi = c * phi_bar;
        phi_bar *= s;
        for ((xi, wi), vi) in x.iter_mut().zip(w.iter_mut()).zip(&v) {
            *xi += (phi / rho) * *wi;
            *wi = vi - (theta / rho) * *wi;
        }
        let normal_residual = phi_bar * alpha * c.abs();
        if phi_bar <= tol * bnorm
            || normal_residual <= tol * a_norm_sq.sqrt() * phi_bar
            || alpha == 0.0
        {
            return (x, it);
        }
    }
    (x, max_iter)
}
