//! Quadrature on the standard simplex `{t_i >= 0, sum t_i <= 1}`.

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexRule {
    degree: usize,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl SimplexRule {
    /// Collapsed-cube product rule: Gauss-Legendre with `per_axis` points
    /// on `[0,1]^d`, mapped by `t_j = u_j prod_{i<j} (1 - u_i)` with
    /// Jacobian `prod_i (1 - u_i)^(d - i)`.
    pub fn duffy(degree: usize, per_axis: usize) -> Result<Self> {
        if degree == 0 {
            return Ok(SimplexRule { degree, nodes: vec![vec![]], weights: vec![1.0] });
        }
        if per_axis == 0 {
            return Err(Error::DimensionMismatch("simplex rule needs nodes".into()));
        }
        let gl = GaussLegendre::new(per_axis.try_into().expect("nonzero"));
        let line: Vec<(f64, f64)> = gl
            .as_node_weight_pairs()
            .into_iter()
            .map(|(x, w)| ((x + 1.0) / 2.0, w / 2.0))
            .collect();
        let total = per_axis.pow(degree as u32);
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut digits = vec![0usize; degree];
        for _ in 0..total {
            let mut t = Vec::with_capacity(degree);
            let mut remaining = 1.0;
            let mut w = 1.0;
            for (i, &d) in digits.iter().enumerate() {
                let (u, wu) = line[d];
                t.push(remaining * u);
                w *= wu * (1.0 - u).powi((degree - 1 - i) as i32);
                remaining *= 1.0 - u;
            }
            nodes.push(t);
            weights.push(w);
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < per_axis {
                    break;
                }
                *d = 0;
            }
        }
        Ok(SimplexRule { degree, nodes, weights })
    }

    /// 16 points per axis for `Delta^2`, 8 for `Delta^4`.
    pub fn default_for(n: usize) -> Result<Self> {
        match n {
            0 => Self::duffy(0, 1),
            1 => Self::duffy(2, 16),
            2 => Self::duffy(4, 8),
            _ => Err(Error::UnsupportedDegree(n)),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(t, w)| w * f(t)).sum()
    }
}
