use crate::error::{Error, Result};

use super::SampledSpace;

/// Finite cover of a sampled space by point subsets (each sorted).
#[derive(Debug, Clone, PartialEq)]
pub struct OpenCover {
    sets: Vec<Vec<usize>>,
    membership: Vec<Vec<usize>>,
}

impl OpenCover {
    pub fn new(points: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut membership = vec![Vec::new(); points];
        let mut clean = Vec::with_capacity(sets.len());
        for (s, mut set) in sets.into_iter().enumerate() {
            set.sort_unstable();
            set.dedup();
            if set.is_empty() {
                return Err(Error::InvalidCover(format!("set {s} is empty")));
            }
            if let Some(&x) = set.iter().find(|&&x| x >= points) {
                return Err(Error::InvalidCover(format!("set {s} contains point {x} out of range")));
            }
            for &x in &set {
                membership[x].push(s);
            }
            clean.push(set);
        }
        if let Some(x) = membership.iter().position(|m| m.is_empty()) {
            return Err(Error::InvalidCover(format!("point {x} is not covered")));
        }
        Ok(OpenCover { sets: clean, membership })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn points(&self) -> usize {
        self.membership.len()
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> &[usize] {
        &self.sets[i]
    }

    /// Indices of the sets containing point `x`, increasing.
    pub fn sets_containing(&self, x: usize) -> &[usize] {
        &self.membership[x]
    }

    pub fn contains(&self, set: usize, x: usize) -> bool {
        self.sets[set].binary_search(&x).is_ok()
    }

    /// First set that contains every point of `tuple`.
    pub fn owner(&self, tuple: &[usize]) -> Option<usize> {
        let (first, rest) = tuple.split_first()?;
        self.membership[*first]
            .iter()
            .copied()
            .find(|&s| rest.iter().all(|&x| self.contains(s, x)))
    }

    /// True when every set of `self` lies inside some set of `coarser`.
    pub fn refines(&self, coarser: &OpenCover) -> bool {
        self.sets.iter().all(|s| coarser.owner(s).is_some())
    }

    /// Common refinement `{U cap V}`, empty and repeated sets dropped.
    pub fn intersect(&self, other: &OpenCover) -> Result<OpenCover> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for a in &self.sets {
            for b in &other.sets {
                let c: Vec<usize> = a.iter().copied().filter(|x| b.binary_search(x).is_ok()).collect();
                if !c.is_empty() && seen.insert(c.clone()) {
                    out.push(c);
                }
            }
        }
        OpenCover::new(self.points(), out)
    }

    /// Vertex stars of an oriented chain: the set for vertex `v` holds `v`
    /// and every vertex sharing a simplex with it.
    pub fn stars(space: &SampledSpace, degree: usize) -> Result<OpenCover> {
        let chain = space
            .chain(degree)
            .ok_or_else(|| Error::InvalidCover(format!("no chain of degree {degree}")))?;
        let mut sets: Vec<Vec<usize>> = (0..space.len()).map(|v| vec![v]).collect();
        for (t, _) in chain {
            for &v in t {
                sets[v].extend_from_slice(t);
            }
        }
        OpenCover::new(space.len(), sets)
    }

    /// `count` overlapping arcs on a circle sampled by `points` equispaced
    /// points; arc `i` runs over indices `[i n / count - halo, (i + 1) n / count + halo)`.
    pub fn circle_arcs(points: usize, count: usize, halo: usize) -> Result<OpenCover> {
        if count == 0 || count > points {
            return Err(Error::InvalidCover(format!("{count} arcs on {points} points")));
        }
        let sets = (0..count)
            .map(|i| {
                let start = (i * points / count) as isize - halo as isize;
                let end = ((i + 1) * points / count + halo) as isize;
                (start..end)
                    .map(|x| x.rem_euclid(points as isize) as usize)
                    .collect()
            })
            .collect();
        OpenCover::new(points, sets)
    }
}

/// `values[i][x] = chi_i(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionOfUnity {
    values: Vec<Vec<f64>>,
}

impl PartitionOfUnity {
    /// Checks non-negativity, `sum_i chi_i = 1` within `1e-12` and
    /// `supp chi_i` inside set `i`.
    pub fn new(cover: &OpenCover, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != cover.len() {
            return Err(Error::InvalidPartition(format!(
                "{} functions for {} sets",
                values.len(),
                cover.len()
            )));
        }
        let n = cover.points();
        for (i, row) in values.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidPartition(format!("function {i} has {} values", row.len())));
            }
            for (x, &v) in row.iter().enumerate() {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::InvalidPartition(format!("chi_{i}({x}) = {v}")));
                }
                if v > 0.0 && !cover.contains(i, x) {
                    return Err(Error::InvalidPartition(format!(
                        "chi_{i} is positive at {x} outside its set"
                    )));
                }
            }
        }
        for x in 0..n {
            let s: f64 = values.iter().map(|r| r[x]).sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidPartition(format!("sum at point {x} is {s}")));
            }
        }
        Ok(PartitionOfUnity { values })
    }

    /// Normalizes non-negative weights that are positive exactly where
    /// the function may be supported.
    pub fn normalized(cover: &OpenCover, mut weights: Vec<Vec<f64>>) -> Result<Self> {
        let n = cover.points();
        for x in 0..n {
            let s: f64 = weights.iter().map(|r| r[x]).sum();
            if !(s > 0.0) {
                return Err(Error::InvalidPartition(format!("all weights vanish at {x}")));
            }
            for r in weights.iter_mut() {
                r[x] /= s;
            }
        }
        Self::new(cover, weights)
    }

    /// Tent functions `chi_i ~ d(x, X \ U_i)`, positive on all of `U_i`.
    pub fn from_cover(space: &SampledSpace, cover: &OpenCover) -> Result<Self> {
        let weights = cover
            .sets()
            .iter()
            .enumerate()
            .map(|(i, set)| {
                let outside: Vec<usize> = (0..space.len()).filter(|&y| !cover.contains(i, y)).collect();
                let mut row = vec![0.0; space.len()];
                for &x in set {
                    row[x] = if outside.is_empty() {
                        1.0
                    } else {
                        outside.iter().map(|&y| space.distance(x, y)).fold(f64::INFINITY, f64::min)
                    };
                }
                row
            })
            .collect();
        Self::normalized(cover, weights)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, i: usize, x: usize) -> f64 {
        self.values[i][x]
    }

    pub fn function(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    /// `supp chi_i` as a sorted point list.
    pub fn support(&self, i: usize) -> Vec<usize> {
        (0..self.values[i].len()).filter(|&x| self.values[i][x] > 0.0).collect()
    }
}

/// Balls of radius `radius` around a greedy net with separation
/// `radius / 2`, and tents `max(0, radius - d)`.
pub fn build_cover(space: &SampledSpace, radius: f64) -> Result<(OpenCover, PartitionOfUnity)> {
    if !(radius > 0.0) {
        return Err(Error::InvalidCover(format!("radius {radius} must be positive")));
    }
    let centers = net(space, &(0..space.len()).collect::<Vec<_>>(), radius / 2.0);
    let sets: Vec<Vec<usize>> = centers
        .iter()
        .map(|&c| (0..space.len()).filter(|&x| space.distance(c, x) < radius).collect())
        .collect();
    let weights = centers
        .iter()
        .map(|&c| (0..space.len()).map(|x| (radius - space.distance(c, x)).max(0.0)).collect())
        .collect();
    let cover = OpenCover::new(space.len(), sets)?;
    let partition = PartitionOfUnity::normalized(&cover, weights)?;
    Ok((cover, partition))
}

/// Drops repeated sets and sets strictly inside another, keeping order.
fn maximal_sets(mut sets: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for s in sets.iter_mut() {
        s.sort_unstable();
    }
    let subset = |a: &[usize], b: &[usize]| a.iter().all(|x| b.binary_search(x).is_ok());
    let mut keep: Vec<Vec<usize>> = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        let dominated = sets.iter().enumerate().any(|(j, t)| {
            j != i && t.len() >= s.len() && subset(s, t) && (t.len() > s.len() || j < i)
        });
        if !dominated {
            keep.push(s.clone());
        }
    }
    keep
}

/// Greedy maximal subset of `candidates` with pairwise distances `>= sep`.
fn net(space: &SampledSpace, candidates: &[usize], sep: f64) -> Vec<usize> {
    let mut centers: Vec<usize> = Vec::new();
    for &x in candidates {
        if centers.iter().all(|&c| space.distance(c, x) >= sep) {
            centers.push(x);
        }
    }
    centers
}

/// Replaces every set failing `accept` by metric balls inside it, halving
/// the radius until each piece is accepted. Singletons must be accepted.
pub fn refine_until(
    space: &SampledSpace,
    cover: &OpenCover,
    accept: impl Fn(&[usize]) -> bool,
) -> Result<OpenCover> {
    let mut out = Vec::new();
    for set in cover.sets() {
        split(space, set, None, &accept, &mut out);
    }
    OpenCover::new(cover.points(), maximal_sets(out))
}

fn split(
    space: &SampledSpace,
    set: &[usize],
    radius: Option<f64>,
    accept: &impl Fn(&[usize]) -> bool,
    out: &mut Vec<Vec<usize>>,
) {
    if set.len() <= 1 || accept(set) {
        out.push(set.to_vec());
        return;
    }
    let radius = radius.unwrap_or_else(|| {
        let mut d = 0.0_f64;
        for (a, &x) in set.iter().enumerate() {
            for &y in &set[a + 1..] {
                d = d.max(space.distance(x, y));
            }
        }
        d / 2.0
    });
    if radius < 1e-12 {
        out.extend(set.iter().map(|&x| vec![x]));
        return;
    }
    for c in net(space, set, radius / 2.0) {
        let piece: Vec<usize> = set.iter().copied().filter(|&x| space.distance(c, x) < radius).collect();
        split(space, &piece, Some(radius / 2.0), accept, out);
    }
}

/// Refinement in which `max ||p(x) - p(x')|| <= bound` on every set, for a
/// field given by `distance(x, x') = ||p(x) - p(x')||`.
pub fn refine_until_oscillation(
    space: &SampledSpace,
    cover: &OpenCover,
    distance: impl Fn(usize, usize) -> f64,
    bound: f64,
) -> Result<OpenCover> {
    if bound == f64::INFINITY {
        return Ok(cover.clone());
    }
    refine_until(space, cover, |set| oscillation(set, &distance) <= bound)
}

pub fn oscillation(set: &[usize], distance: impl Fn(usize, usize) -> f64) -> f64 {
    let mut worst = 0.0_f64;
    for (a, &x) in set.iter().enumerate() {
        for &y in &set[a + 1..] {
            worst = worst.max(distance(x, y));
        }
    }
    worst
}
