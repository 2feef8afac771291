//! Finite metric samples of compact spaces, covers, partitions of unity and
//! tuple sets near the diagonal.

mod cover;
mod lemma;
mod tuples;

pub use cover::{oscillation as oscillation_of, build_cover, refine_until, refine_until_oscillation, OpenCover, PartitionOfUnity};
pub use lemma::{cover_from_closed_family, lemma_violations};
pub use tuples::{enumerate_tuples, CoverTupleSet};

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Oriented simplicial chain: point-index tuples in increasing order, each
/// with a sign so that the chain is a cycle.
pub type Chain = Vec<(Vec<usize>, f64)>;

/// A finite sample of a compact space with the Euclidean metric of its
/// ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSpace {
    points: Vec<Vec<f64>>,
    chains: BTreeMap<usize, Chain>,
}

impl SampledSpace {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidSpace("no points".into()));
        }
        let d = points[0].len();
        for (i, p) in points.iter().enumerate() {
            if p.len() != d {
                return Err(Error::InvalidSpace(format!("point {i} has dimension {}", p.len())));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidSpace(format!("point {i} has a non-finite coordinate")));
            }
        }
        Ok(SampledSpace { points, chains: BTreeMap::new() })
    }

    /// Attaches an oriented chain of the given degree.
    pub fn with_chain(mut self, degree: usize, chain: Chain) -> Result<Self> {
        for (t, _) in &chain {
            if t.len() != degree + 1 {
                return Err(Error::InvalidSpace(format!(
                    "chain tuple {t:?} does not have {} entries",
                    degree + 1
                )));
            }
            if t.iter().any(|&i| i >= self.points.len()) {
                return Err(Error::InvalidSpace(format!("chain tuple {t:?} out of range")));
            }
        }
        self.chains.insert(degree, chain);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.points[i]
            .iter()
            .zip(&self.points[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn chain(&self, degree: usize) -> Option<&Chain> {
        self.chains.get(&degree)
    }

    /// `n` equispaced points on the unit circle with the counterclockwise
    /// fundamental 1-cycle.
    pub fn circle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSpace("circle needs at least 3 points".into()));
        }
        let points = (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let faces: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
        Self::new(points)?.with_chain(1, orient(faces))
    }

    /// Icosphere obtained by `subdivisions` rounds of edge midpoint
    /// subdivision, with the outward-oriented fundamental 2-cycle.
    pub fn sphere(subdivisions: usize) -> Result<Self> {
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let mut verts: Vec<[f64; 3]> = vec![
            [-1.0, t, 0.0],
            [1.0, t, 0.0],
            [-1.0, -t, 0.0],
            [1.0, -t, 0.0],
            [0.0, -1.0, t],
            [0.0, 1.0, t],
            [0.0, -1.0, -t],
            [0.0, 1.0, -t],
            [t, 0.0, -1.0],
            [t, 0.0, 1.0],
            [-t, 0.0, -1.0],
            [-t, 0.0, 1.0],
        ];
        let normalize = |v: [f64; 3]| {
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            [v[0] / n, v[1] / n, v[2] / n]
        };
        for v in verts.iter_mut() {
            *v = normalize(*v);
        }
        let mut faces: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..subdivisions {
            let mut midpoints = std::collections::HashMap::new();
            let mut next = Vec::with_capacity(faces.len() * 4);
            let mut mid = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| {
                *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    let (p, q) = (verts[a], verts[b]);
                    verts.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                    verts.len() - 1
                })
            };
            for [a, b, c] in faces {
                let ab = mid(a, b, &mut verts);
                let bc = mid(b, c, &mut verts);
                let ca = mid(c, a, &mut verts);
                next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            faces = next;
        }
        // Make every face counterclockwise seen from outside.
        let oriented: Vec<Vec<usize>> = faces
            .into_iter()
            .map(|[a, b, c]| {
                let (p, q, r) = (verts[a], verts[b], verts[c]);
                let u = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
                let v = [r[0] - p[0], r[1] - p[1], r[2] - p[2]];
                let n = [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ];
                let outward = n[0] * (p[0] + q[0] + r[0])
                    + n[1] * (p[1] + q[1] + r[1])
                    + n[2] * (p[2] + q[2] + r[2]);
                if outward > 0.0 {
                    vec![a, b, c]
                } else {
                    vec![a, c, b]
                }
            })
            .collect();
        let points = verts.into_iter().map(|v| v.to_vec()).collect();
        Self::new(points)?.with_chain(2, orient(oriented))
    }

    /// `n1 x n2` grid on the torus of revolution with radii `big > small`.
    pub fn torus(n1: usize, n2: usize, big: f64, small: f64) -> Result<Self> {
        if n1 < 3 || n2 < 3 || !(big > small && small > 0.0) {
            return Err(Error::InvalidSpace("torus needs n1, n2 >= 3 and big > small > 0".into()));
        }
        let idx = |i: usize, j: usize| (i % n1) * n2 + (j % n2);
        let mut points = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            let u = std::f64::consts::TAU * i as f64 / n1 as f64;
            for j in 0..n2 {
                let v = std::f64::consts::TAU * j as f64 / n2 as f64;
                let rad = big + small * v.cos();
                points.push(vec![rad * u.cos(), rad * u.sin(), small * v.sin()]);
            }
        }
        let mut faces = Vec::with_capacity(2 * n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                faces.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                faces.push(vec![idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        Self::new(points)?.with_chain(2, orient(faces))
    }
}

/// Sorts each oriented simplex, recording the permutation parity as sign.
pub fn orient(simplices: Vec<Vec<usize>>) -> Chain {
    simplices
        .into_iter()
        .map(|mut s| {
            let mut sign = 1.0;
            for i in 0..s.len() {
                for j in 0..s.len() - 1 - i {
                    if s[j] > s[j + 1] {
                        s.swap(j, j + 1);
                        sign = -sign;
                    }
                }
            }
            (s, sign)
        })
        .collect()
}

/// Boundary of an ordered chain, as a sparse map from faces to coefficients.
pub fn chain_boundary(chain: &Chain) -> BTreeMap<Vec<usize>, f64> {
    let mut out = BTreeMap::new();
    for (t, s) in chain {
        for j in 0..t.len() {
            let mut face = t.clone();
            face.remove(j);
            let sign = if j % 2 == 0 { *s } else { -*s };
            *out.entry(face).or_insert(0.0) += sign;
        }
    }
    out.retain(|_, v: &mut f64| v.abs() > 1e-12);
    out
}
