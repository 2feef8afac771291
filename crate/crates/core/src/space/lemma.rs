//! Covers adapted to a finite family of closed sets.

use std::collections::{BTreeSet, HashSet};

use super::{OpenCover, SampledSpace};
use crate::error::Result;

/// A cover `{U}` such that whenever `U` meets every `K_i` with `i` in a
/// non-empty `I`, the intersection of those `K_i` is non-empty.
///
/// The intersections `C` of subfamilies of `K` are processed by decreasing
/// depth `#{i : C inside K_i}`, ties broken lexicographically. Each `C`
/// contributes the points `L` of `C` not yet covered, thickened by
/// `thickening` and with every `K_j` not containing `C` removed. The points
/// outside all `K_i` form the last set.
pub fn cover_from_closed_family(
    space: &SampledSpace,
    family: &[Vec<usize>],
    thickening: f64,
) -> Result<OpenCover> {
    let n = space.len();
    let members: Vec<Vec<bool>> = family
        .iter()
        .map(|k| {
            let mut m = vec![false; n];
            for &x in k {
                m[x] = true;
            }
            m
        })
        .collect();

    let mut intersections: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut frontier: Vec<Vec<usize>> = Vec::new();
    for k in family {
        let mut k = k.clone();
        k.sort_unstable();
        k.dedup();
        if !k.is_empty() && intersections.insert(k.clone()) {
            frontier.push(k);
        }
    }
    while let Some(c) = frontier.pop() {
        for m in &members {
            let d: Vec<usize> = c.iter().copied().filter(|&x| m[x]).collect();
            if !d.is_empty() && intersections.insert(d.clone()) {
                frontier.push(d);
            }
        }
    }

    let depth = |c: &[usize]| members.iter().filter(|m| c.iter().all(|&x| m[x])).count();
    let mut ordered: Vec<(usize, Vec<usize>)> =
        intersections.into_iter().map(|c| (depth(&c), c)).collect();
    ordered.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));

    let mut covered = vec![false; n];
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    for (_, c) in &ordered {
        let rest: Vec<usize> = c.iter().copied().filter(|&x| !covered[x]).collect();
        if rest.is_empty() {
            continue;
        }
        let banned: Vec<&Vec<bool>> =
            members.iter().filter(|m| !c.iter().all(|&x| m[x])).collect();
        let set: Vec<usize> = (0..n)
            .filter(|&y| !banned.iter().any(|m| m[y]))
            .filter(|&y| rest.iter().any(|&x| x == y || space.distance(x, y) < thickening))
            .collect();
        for &y in &set {
            covered[y] = true;
        }
        if seen.insert(set.clone()) {
            sets.push(set);
        }
    }
    let outside: Vec<usize> = (0..n).filter(|&y| !members.iter().any(|m| m[y])).collect();
    if !outside.is_empty() && seen.insert(outside.clone()) {
        sets.push(outside);
    }
    OpenCover::new(n, sets)
}

/// Sets of `cover` violating the implication for some index set. A set
/// is fine exactly when the `K_i` it meets have a common point, since
/// every smaller index set has a larger intersection.
pub fn lemma_violations(cover: &OpenCover, family: &[Vec<usize>]) -> Vec<usize> {
    let n = cover.points();
    let members: Vec<Vec<bool>> = family
        .iter()
        .map(|k| {
            let mut m = vec![false; n];
            for &x in k {
                m[x] = true;
            }
            m
        })
        .collect();
    (0..cover.len())
        .filter(|&u| {
            let hits: Vec<&Vec<bool>> = members
                .iter()
                .filter(|m| cover.set(u).iter().any(|&x| m[x]))
                .collect();
            !hits.is_empty() && !(0..n).any(|x| hits.iter().all(|m| m[x]))
        })
        .collect()
}
