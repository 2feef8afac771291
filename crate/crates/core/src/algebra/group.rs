//! Finite groups given by multiplication tables, and their regular representation.

use std::sync::Arc;

use num_complex::Complex64;

use super::{AlgebraElement, AlgebraMatrix, SiteAlgebra};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// `table[g][h]` is the index of `g h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        for (g, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {g} has length {}", row.len())));
            }
            if let Some(h) = row.iter().find(|h| **h >= n) {
                return Err(Error::InvalidGroup(format!("product {h} out of range in row {g}")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!(
                            "not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut inverses = Vec::with_capacity(n);
        for g in 0..n {
            let inv = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {g} has no inverse")))?;
            inverses.push(inv);
        }
        Ok(FiniteGroup { table, identity, inverses })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::from_table((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect())
    }

    pub fn klein() -> Self {
        Self::direct_product(&Self::cyclic(2).unwrap(), &Self::cyclic(2).unwrap())
    }

    /// Dihedral group of order `2n`; `r^a s^b` has index `a + n b`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("dihedral group needs n >= 1".into()));
        }
        let elem = |i: usize| (i % n, i / n);
        let table = (0..2 * n)
            .map(|x| {
                (0..2 * n)
                    .map(|y| {
                        let ((a, b), (c, d)) = (elem(x), elem(y));
                        let rot = if b == 0 { (a + c) % n } else { (a + n - c) % n };
                        rot + n * ((b + d) % 2)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(table)
    }

    /// Symmetric group on `n <= 5` letters, permutations in lexicographic
    /// order so the identity has index 0; `(s t)(x) = s(t(x))`.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n == 0 || n > 5 {
            return Err(Error::InvalidGroup(format!("symmetric group on {n} letters unsupported")));
        }
        let perms = permutations(n);
        let index = |p: &[usize]| perms.iter().position(|q| q == p).unwrap();
        let table = perms
            .iter()
            .map(|s| {
                perms
                    .iter()
                    .map(|t| index(&t.iter().map(|&x| s[x]).collect::<Vec<_>>()))
                    .collect()
            })
            .collect();
        Self::from_table(table)
    }

    /// Quaternion group; index `u + 4 s` stands for `(-1)^s u` with
    /// `u` in `1, i, j, k`.
    pub fn quaternion() -> Self {
        // Unit products as (sign, unit).
        const UNIT: [[(usize, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        let table = (0..8)
            .map(|x: usize| {
                (0..8)
                    .map(|y: usize| {
                        let (s, u) = UNIT[x % 4][y % 4];
                        u + 4 * ((s + x / 4 + y / 4) % 2)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(table).expect("quaternion table is a group")
    }

    /// `(g, h)` has index `g * |b| + h`.
    pub fn direct_product(a: &Self, b: &Self) -> Self {
        let (na, nb) = (a.order(), b.order());
        let table = (0..na * nb)
            .map(|x| {
                (0..na * nb)
                    .map(|y| a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb))
                    .collect()
            })
            .collect();
        Self::from_table(table).expect("product of groups is a group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inverses[g]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in permutations(n - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|x| if x >= first { x + 1 } else { x }));
            out.push(p);
        }
    }
    out
}

/// The reduced group algebra as one site of block size `|G|`, together with
/// the permutation unitaries `(lambda_g)_{x,y} = [x = g y]`.
pub fn group_algebra(group: &FiniteGroup) -> (Arc<SiteAlgebra>, Vec<AlgebraElement>) {
    let n = group.order();
    let algebra = Arc::new(SiteAlgebra::matrix(n).expect("positive order"));
    let lambdas = (0..n)
        .map(|g| {
            let mut m = CMatrix::zeros(n, n);
            for y in 0..n {
                m[(group.mul(g, y), y)] = Complex64::new(1.0, 0.0);
            }
            AlgebraMatrix::new(algebra.clone(), 1, vec![m]).expect("site count matches")
        })
        .collect();
    (algebra, lambdas)
}

/// `sum_g f(g) lambda_g`.
pub fn group_element(
    group: &FiniteGroup,
    algebra: &Arc<SiteAlgebra>,
    coefficients: &[Complex64],
) -> Result<AlgebraElement> {
    let n = group.order();
    if coefficients.len() != n || algebra.block_dim() != n || algebra.sites() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients for a group of order {n}",
            coefficients.len()
        )));
    }
    let mut m = CMatrix::zeros(n, n);
    for (g, c) in coefficients.iter().enumerate() {
        for y in 0..n {
            m[(group.mul(g, y), y)] += c;
        }
    }
    AlgebraMatrix::new(algebra.clone(), 1, vec![m])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_groups() -> Vec<FiniteGroup> {
        let mut gs: Vec<_> = (1..=8).map(|n| FiniteGroup::cyclic(n).unwrap()).collect();
        gs.push(FiniteGroup::klein());
        gs.push(FiniteGroup::dihedral(3).unwrap());
        gs.push(FiniteGroup::dihedral(4).unwrap());
        gs.push(FiniteGroup::symmetric(3).unwrap());
        gs.push(FiniteGroup::quaternion());
        gs.push(FiniteGroup::direct_product(
            &FiniteGroup::cyclic(2).unwrap(),
            &FiniteGroup::cyclic(3).unwrap(),
        ));
        gs
    }

    #[test]
    fn z2_regular_representation() {
        let (_, l) = group_algebra(&FiniteGroup::cyclic(2).unwrap());
        let swap = CMatrix::from_row_slice(
            2,
            2,
            &[0.0, 1.0, 1.0, 0.0].map(|x| Complex64::new(x, 0.0)),
        );
        assert_eq!(l[1].site_blocks()[0], swap);
    }

    #[test]
    fn trivial_group() {
        let (alg, l) = group_algebra(&FiniteGroup::cyclic(1).unwrap());
        assert_eq!(alg.block_dim(), 1);
        assert_eq!(l[0].site_blocks()[0][(0, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn regular_representation_is_unitary_homomorphism() {
        for g in all_groups() {
            let (alg, l) = group_algebra(&g);
            let one = AlgebraMatrix::identity(&alg, 1);
            for a in 0..g.order() {
                assert_eq!(l[a].adjoint().mul(&l[a]).unwrap(), one);
                let expected = if a == g.identity() { 1.0 } else { 0.0 };
                assert_eq!(l[a].trace_phi(), Complex64::new(expected, 0.0));
                for b in 0..g.order() {
                    assert_eq!(l[a].mul(&l[b]).unwrap(), l[g.mul(a, b)]);
                }
            }
        }
    }

    #[test]
    fn s3_has_36_consistent_products() {
        let g = FiniteGroup::symmetric(3).unwrap();
        assert_eq!(g.order(), 6);
        let (_, l) = group_algebra(&g);
        let mut checked = 0;
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(l[a].mul(&l[b]).unwrap(), l[g.mul(a, b)]);
                checked += 1;
            }
        }
        assert_eq!(checked, 36);
        // S_3 is not abelian.
        assert!((0..6).any(|a| (0..6).any(|b| g.mul(a, b) != g.mul(b, a))));
    }

    #[test]
    fn z3_lambda_products() {
        let g = FiniteGroup::cyclic(3).unwrap();
        let (_, l) = group_algebra(&g);
        assert_eq!(l[1].mul(&l[1]).unwrap(), l[2]);
        assert_eq!(l[1].mul(&l[2]).unwrap(), l[0]);
    }

    #[test]
    fn rejects_invalid_tables() {
        // Not associative: a Latin square that is not a group.
        let bad = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(FiniteGroup::from_table(bad), Err(Error::InvalidGroup(_))));
        // No inverses: multiplication modulo 3 on {0,1,2} with identity 1.
        let no_inv = (0..3).map(|a| (0..3).map(|b| (a * b) % 3).collect()).collect();
        assert!(FiniteGroup::from_table(no_inv).is_err());
        assert!(FiniteGroup::from_table(vec![vec![0, 5], vec![1, 0]]).is_err());
    }

    #[test]
    fn group_element_is_linear_combination() {
        let g = FiniteGroup::dihedral(3).unwrap();
        let (alg, l) = group_algebra(&g);
        let coeffs: Vec<_> = (0..6).map(|i| Complex64::new(i as f64, -0.5 * i as f64)).collect();
        let f = group_element(&g, &alg, &coeffs).unwrap();
        let mut acc = AlgebraMatrix::zeros(&alg, 1);
        for (c, lg) in coeffs.iter().zip(&l) {
            acc = acc.add(&lg.scale(*c)).unwrap();
        }
        assert_eq!(f, acc);
        assert_eq!(f.trace_phi(), coeffs[g.identity()]);
    }

    #[test]
    fn orders_and_inverses() {
        assert_eq!(FiniteGroup::symmetric(4).unwrap().order(), 24);
        assert_eq!(FiniteGroup::quaternion().order(), 8);
        let q = FiniteGroup::quaternion();
        // i^2 = -1 and -1 is central.
        assert_eq!(q.mul(1, 1), 4);
        assert!((0..8).all(|g| q.mul(4, g) == q.mul(g, 4)));
        for g in all_groups() {
            for a in 0..g.order() {
                assert_eq!(g.mul(a, g.inv(a)), g.identity());
            }
        }
    }
}
