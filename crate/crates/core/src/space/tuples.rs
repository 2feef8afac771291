use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::OpenCover;
use crate::error::{Error, Result};

/// Sampled `(k+1)`-tuples near the diagonal: each tuple lies in one set of
/// the cover, recorded as its owner.
#[derive(Debug, Clone)]
pub struct CoverTupleSet {
    degree: usize,
    cover: Arc<OpenCover>,
    tuples: Vec<Vec<usize>>,
    owners: Vec<usize>,
    index: HashMap<Vec<usize>, usize>,
}

impl PartialEq for CoverTupleSet {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.tuples == other.tuples && self.owners == other.owners
    }
}

impl CoverTupleSet {
    pub fn empty(cover: Arc<OpenCover>, degree: usize) -> Self {
        CoverTupleSet { degree, cover, tuples: Vec::new(), owners: Vec::new(), index: HashMap::new() }
    }

    /// Adds `tuple` if new and returns its position.
    pub fn insert(&mut self, tuple: Vec<usize>) -> Result<usize> {
        if tuple.len() != self.degree + 1 {
            return Err(Error::DimensionMismatch(format!(
                "tuple of length {} in a degree {} set",
                tuple.len(),
                self.degree
            )));
        }
        if let Some(&i) = self.index.get(&tuple) {
            return Ok(i);
        }
        if tuple.iter().any(|&x| x >= self.cover.points()) {
            return Err(Error::ChainEscapesCover(tuple));
        }
        let owner = self.cover.owner(&tuple).ok_or_else(|| Error::ChainEscapesCover(tuple.clone()))?;
        let i = self.tuples.len();
        self.index.insert(tuple.clone(), i);
        self.tuples.push(tuple);
        self.owners.push(owner);
        Ok(i)
    }

    pub fn with_extra(mut self, tuples: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        for t in tuples {
            self.insert(t)?;
        }
        Ok(self)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn cover(&self) -> &Arc<OpenCover> {
        &self.cover
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn tuple(&self, i: usize) -> &[usize] {
        &self.tuples[i]
    }

    pub fn owner(&self, i: usize) -> usize {
        self.owners[i]
    }

    pub fn position(&self, tuple: &[usize]) -> Option<usize> {
        self.index.get(tuple).copied()
    }

    /// All faces of all tuples, one degree lower, in first-seen order.
    pub fn faces(&self) -> Result<CoverTupleSet> {
        if self.degree == 0 {
            return Err(Error::DimensionMismatch("degree 0 tuples have no faces".into()));
        }
        let mut out = CoverTupleSet::empty(self.cover.clone(), self.degree - 1);
        for t in &self.tuples {
            for j in 0..t.len() {
                let mut f = t.clone();
                f.remove(j);
                out.insert(f)?;
            }
        }
        Ok(out)
    }
}

/// All diagonal tuples `(x, ..., x)` followed by seeded random tuples:
/// pick a cover set uniformly, then `k + 1` of its points with
/// replacement, until `budget` tuples exist or draws run out.
pub fn enumerate_tuples(
    cover: &Arc<OpenCover>,
    degree: usize,
    budget: usize,
    seed: u64,
) -> Result<CoverTupleSet> {
    if budget < cover.len() {
        return Err(Error::InvalidCover(format!(
            "tuple budget {budget} below the number of sets {}",
            cover.len()
        )));
    }
    let mut set = CoverTupleSet::empty(cover.clone(), degree);
    for x in 0..cover.points() {
        set.insert(vec![x; degree + 1])?;
    }
    if degree == 0 {
        return Ok(set);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = 0;
    while set.len() < budget && draws < 20 * budget {
        draws += 1;
        let u = cover.set(rng.random_range(0..cover.len()));
        let t: Vec<usize> = (0..=degree).map(|_| u[rng.random_range(0..u.len())]).collect();
        set.insert(t)?;
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_cover, SampledSpace};

    fn circle_cover() -> Arc<OpenCover> {
        let s = SampledSpace::circle(12).unwrap();
        Arc::new(build_cover(&s, 0.8).unwrap().0)
    }

    #[test]
    fn degree_zero_is_all_points() {
        let c = circle_cover();
        let t = enumerate_tuples(&c, 0, 100, 1).unwrap();
        assert_eq!(t.len(), 12);
        assert!(t.tuples().iter().enumerate().all(|(i, x)| x == &vec![i]));
    }

    #[test]
    fn diagonal_budget_gives_only_diagonals() {
        let c = circle_cover();
        let t = enumerate_tuples(&c, 2, 12, 1).unwrap();
        assert_eq!(t.len(), 12);
        assert!(t.tuples().iter().all(|x| x[0] == x[1] && x[1] == x[2]));
    }

    #[test]
    fn reproducible_fixture() {
        let c = circle_cover();
        let a = enumerate_tuples(&c, 2, 20, 7).unwrap();
        let b = enumerate_tuples(&c, 2, 20, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 20);
        let recorded: Vec<Vec<usize>> = vec![
            vec![4, 2, 4],
            vec![1, 11, 1],
            vec![1, 1, 3],
            vec![4, 4, 5],
            vec![4, 6, 5],
            vec![6, 7, 5],
            vec![4, 3, 4],
            vec![8, 10, 8],
        ];
        assert_eq!(&a.tuples()[12..], &recorded[..]);
        for i in 0..a.len() {
            let owner = a.owner(i);
            assert!(a.tuple(i).iter().all(|&x| c.contains(owner, x)));
        }
    }

    #[test]
    fn faces_are_closed_and_owned() {
        let c = circle_cover();
        let t = enumerate_tuples(&c, 2, 40, 3).unwrap();
        let f = t.faces().unwrap();
        for tuple in t.tuples() {
            for j in 0..3 {
                let mut face = tuple.clone();
                face.remove(j);
                assert!(f.position(&face).is_some());
            }
        }
    }

    #[test]
    fn escaping_tuple_is_rejected() {
        let c = circle_cover();
        let t = CoverTupleSet::empty(c, 1);
        assert!(matches!(t.with_extra([vec![0, 6]]), Err(Error::ChainEscapesCover(_))));
    }
}
