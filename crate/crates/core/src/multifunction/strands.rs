use serde::Serialize;

use super::GridMultifunction;
use crate::error::{Error, Result};
use crate::metric::sup_dist;

/// Two member points at adjacent nodes joined by an unambiguous matching.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchedEdge {
    pub from: (usize, usize),
    pub to: (usize, usize),
    pub distance: f64,
}

/// A cluster of points at node `nodes.0` that cannot be matched one-to-one
/// with the nearby cluster at node `nodes.1`: the weights on either side
/// must still have equal totals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MergeRecord {
    pub nodes: (usize, usize),
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    /// Equal cardinalities, but two matchings cost nearly the same.
    pub ambiguous: bool,
}

/// Decomposition of a sampled graph into strands: maximal chains of member
/// points linked by unambiguous matchings between adjacent nodes.
#[derive(Clone, Debug, Serialize)]
pub struct StrandSystem {
    pub tol: f64,
    /// First point id of each node; point `j` of node `v` has id `offsets[v] + j`.
    pub offsets: Vec<usize>,
    /// Strand component of each point id.
    pub component: Vec<usize>,
    pub component_count: usize,
    pub edges: Vec<MatchedEdge>,
    pub merges: Vec<MergeRecord>,
}

impl StrandSystem {
    pub fn point_id(&self, node: usize, j: usize) -> usize {
        self.offsets[node] + j
    }

    pub fn node_points(&self, node: usize) -> std::ops::Range<usize> {
        self.offsets[node]..self.offsets[node + 1]
    }

    pub fn component_of(&self, node: usize, j: usize) -> usize {
        self.component[self.point_id(node, j)]
    }

    pub fn ambiguous_count(&self) -> usize {
        self.merges.iter().filter(|r| r.ambiguous).count()
    }

    /// Number of points in each component.
    pub fn component_sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.component_count];
        for &c in &self.component {
            s[c] += 1;
        }
        s
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

const MAX_MATCHING: usize = 8;

/// Cheapest and second-cheapest perfect matchings between `left` and
/// `right` using only pairs within `tol`.
fn best_two(d: &[Vec<f64>], left: &[usize], right: &[usize], tol: f64) -> (Option<(f64, Vec<usize>)>, Option<f64>) {
    let s = left.len();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut second: Option<f64> = None;
    let mut perm = Vec::with_capacity(s);
    let mut used = vec![false; s];
    #[allow(clippy::too_many_arguments)]
    fn go(
        d: &[Vec<f64>],
        left: &[usize],
        right: &[usize],
        tol: f64,
        cost: f64,
        perm: &mut Vec<usize>,
        used: &mut [bool],
        best: &mut Option<(f64, Vec<usize>)>,
        second: &mut Option<f64>,
    ) {
        let i = perm.len();
        if i == left.len() {
            match best {
                Some((b, _)) if cost >= *b => {
                    if second.map_or(true, |s| cost < s) {
                        *second = Some(cost);
                    }
                }
                _ => {
                    if let Some((b, _)) = best.take() {
                        *second = Some(b);
                    }
                    *best = Some((cost, perm.clone()));
                }
            }
            return;
        }
        for j in 0..right.len() {
            let dist = d[left[i]][right[j]];
            if !used[j] && dist <= tol {
                used[j] = true;
                perm.push(j);
                go(d, left, right, tol, cost + dist, perm, used, best, second);
                perm.pop();
                used[j] = false;
            }
        }
    }
    go(d, left, right, tol, 0.0, &mut perm, &mut used, &mut best, &mut second);
    (best, second)
}

/// Matches member points between every pair of adjacent nodes.
///
/// Points closer than `tol` are related; each connected cluster of the
/// relation is either matched one-to-one (when the cheapest bijection beats
/// every other by more than `tol/2`) or recorded as a merge.
pub fn build_strand_system(f: &GridMultifunction, tol: f64) -> Result<StrandSystem> {
    if !(tol > 0.0) {
        return Err(Error::NonPositiveEpsilon(tol));
    }
    if tol < f.modulus() {
        return Err(Error::Precondition(format!(
            "tolerance {tol} is below the observed modulus of continuity {}",
            f.modulus()
        )));
    }
    let mut offsets = Vec::with_capacity(f.node_count() + 1);
    let mut total = 0;
    for v in f.values() {
        offsets.push(total);
        total += v.len();
    }
    offsets.push(total);
    let mut uf = UnionFind((0..total).collect());
    let mut edges = Vec::new();
    let mut merges = Vec::new();

    for (a, b) in f.adjacent_pairs() {
        let pa = f.value(a).points();
        let pb = f.value(b).points();
        let d: Vec<Vec<f64>> =
            pa.iter().map(|x| pb.iter().map(|y| sup_dist(x.coords(), y.coords())).collect()).collect();
        let mut seen_a = vec![false; pa.len()];
        let mut seen_b = vec![false; pb.len()];
        for start in 0..pa.len() {
            if seen_a[start] {
                continue;
            }
            let (mut left, mut right) = (vec![start], Vec::new());
            seen_a[start] = true;
            let mut frontier = vec![(true, start)];
            while let Some((is_a, i)) = frontier.pop() {
                if is_a {
                    for j in 0..pb.len() {
                        if !seen_b[j] && d[i][j] <= tol {
                            seen_b[j] = true;
                            right.push(j);
                            frontier.push((false, j));
                        }
                    }
                } else {
                    for j in 0..pa.len() {
                        if !seen_a[j] && d[j][i] <= tol {
                            seen_a[j] = true;
                            left.push(j);
                            frontier.push((true, j));
                        }
                    }
                }
            }
            left.sort_unstable();
            right.sort_unstable();
            let mut ambiguous = false;
            if left.len() == right.len() && left.len() <= MAX_MATCHING {
                let (best, second) = best_two(&d, &left, &right, tol);
                if let Some((cost, perm)) = best {
                    if second.map_or(true, |s| s - cost > tol / 2.0) {
                        for (i, &j) in perm.iter().enumerate() {
                            let (x, y) = (left[i], right[j]);
                            uf.union(offsets[a] + x, offsets[b] + y);
                            edges.push(MatchedEdge { from: (a, x), to: (b, y), distance: d[x][y] });
                        }
                        continue;
                    }
                    ambiguous = true;
                }
            } else if left.len() == right.len() {
                ambiguous = true;
            }
            merges.push(MergeRecord { nodes: (a, b), left, right, ambiguous });
        }
        // tol ≥ modulus guarantees every point of b has a partner
        debug_assert!(seen_b.iter().all(|&s| s));
    }

    let mut label = vec![usize::MAX; total];
    let mut component = vec![0; total];
    let mut count = 0;
    for id in 0..total {
        let r = uf.find(id);
        if label[r] == usize::MAX {
            label[r] = count;
            count += 1;
        }
        component[id] = label[r];
    }
    Ok(StrandSystem { tol, offsets, component, component_count: count, edges, merges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{FiniteSubset, Point};
    use crate::multifunction::sample_multifunction;

    fn set(v: &[f64]) -> FiniteSubset {
        FiniteSubset::from_points(v.iter().map(|&x| Point::new(vec![x]).unwrap()).collect()).unwrap()
    }

    #[test]
    fn single_valued_is_one_strand() {
        let f = sample_multifunction(2, 1, 6, 1, |x| Ok(set(&[(x[0] + x[1]) / 2.0]))).unwrap();
        let s = build_strand_system(&f, f.modulus().max(1e-3)).unwrap();
        assert_eq!(s.component_count, 1);
        assert!(s.merges.is_empty());
    }

    #[test]
    fn crossing_strands_merge_in_the_middle() {
        let f = sample_multifunction(1, 1, 8, 2, |x| Ok(set(&[x[0], 1.0 - x[0]]))).unwrap();
        let s = build_strand_system(&f, 0.2).unwrap();
        assert!(!s.merges.is_empty());
        let mid = f.node_at(&[4]);
        assert_eq!(f.value(mid).len(), 1);
        assert!(s.merges.iter().all(|r| {
            let (a, b) = r.nodes;
            (a as i64 - mid as i64).abs() <= 2 && (b as i64 - mid as i64).abs() <= 2
        }));
        // two strands on each side plus the merged middle region
        let far_left = s.component_of(0, 0);
        let far_left2 = s.component_of(0, 1);
        assert_ne!(far_left, far_left2);
    }

    #[test]
    fn tolerance_below_modulus_rejected() {
        let f = sample_multifunction(1, 1, 4, 1, |x| Ok(set(&[x[0]]))).unwrap();
        assert!(build_strand_system(&f, 0.1).is_err());
    }
}
