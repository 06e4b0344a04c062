//! Points of the unit cube, finite subsets and weighted configurations,
//! with the sup metric, the Hausdorff metric and the configuration metric.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `[0,1]^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidPoint("zero-dimensional point".into()));
        }
        for &c in &coords {
            if !c.is_finite() || !(0.0..=1.0).contains(&c) {
                return Err(Error::InvalidPoint(format!("coordinate {c} outside [0,1]")));
            }
        }
        Ok(Point { coords })
    }

    /// Builds a point after clamping every coordinate into `[0,1]`.
    /// Non-finite coordinates are still rejected.
    pub fn clamped(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords.into_iter().map(|c| if c.is_finite() { c.clamp(0.0, 1.0) } else { c }).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Lexicographic order on coordinates using the IEEE total order.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        for (a, b) in self.coords.iter().zip(&other.coords) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.coords.len().cmp(&other.coords.len())
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Vec<f64> {
        p.coords
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, got: b });
    }
    Ok(())
}

/// Sup-norm distance on raw coordinate slices. Panics on length mismatch.
pub(crate) fn sup_dist(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
}

/// `d(x,y) = max_i |x_i - y_i|`.
pub fn sup_metric(x: &Point, y: &Point) -> Result<f64> {
    check_dims(x.dim(), y.dim())?;
    Ok(sup_dist(&x.coords, &y.coords))
}

/// A nonempty set of at most `bound` distinct points, kept in lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSubset {
    points: Vec<Point>,
    bound: usize,
}

impl FiniteSubset {
    /// Canonicalizes `points` (sort, drop exact duplicates) and checks the bound.
    pub fn new(mut points: Vec<Point>, bound: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        let d = points[0].dim();
        for p in &points {
            check_dims(d, p.dim())?;
        }
        points.sort_by(|a, b| a.lex_cmp(b));
        points.dedup_by(|a, b| a.lex_cmp(b) == Ordering::Equal);
        if points.len() > bound {
            return Err(Error::CardinalityExceeded { got: points.len(), bound });
        }
        Ok(FiniteSubset { points, bound })
    }

    /// A subset whose bound equals its own cardinality.
    pub fn from_points(points: Vec<Point>) -> Result<Self> {
        let n = points.len();
        let s = FiniteSubset::new(points, n.max(1))?;
        Ok(s)
    }

    pub fn singleton(p: Point) -> Self {
        FiniteSubset { points: vec![p], bound: 1 }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn with_bound(mut self, bound: usize) -> Result<Self> {
        if self.points.len() > bound {
            return Err(Error::CardinalityExceeded { got: self.points.len(), bound });
        }
        self.bound = bound;
        Ok(self)
    }
}

impl Serialize for FiniteSubset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.points.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteSubset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pts = Vec::<Point>::deserialize(d)?;
        FiniteSubset::from_points(pts).map_err(serde::de::Error::custom)
    }
}

fn directed_hausdorff(a: &[Point], b: &[Point]) -> f64 {
    a.iter()
        .map(|x| b.iter().map(|y| sup_dist(&x.coords, &y.coords)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Hausdorff distance between two finite subsets under the sup metric.
pub fn hausdorff_distance(a: &FiniteSubset, b: &FiniteSubset) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    check_dims(a.dim(), b.dim())?;
    Ok(directed_hausdorff(&a.points, &b.points).max(directed_hausdorff(&b.points, &a.points)))
}

/// Hausdorff distance on raw point lists; both lists must be nonempty.
pub(crate) fn hausdorff_raw(a: &[Point], b: &[Point]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

/// One atom `x^mult` of a configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: Point,
    pub mult: usize,
}

/// An unordered `k`-tuple of points, stored as distinct points with multiplicities.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    atoms: Vec<Atom>,
    total: usize,
}

impl Configuration {
    /// Merges atoms at equal points and sorts them. Zero multiplicities are rejected.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptySet);
        }
        let d = atoms[0].point.dim();
        let mut atoms = atoms;
        for a in &atoms {
            check_dims(d, a.point.dim())?;
            if a.mult == 0 {
                return Err(Error::InvalidConfiguration("zero multiplicity".into()));
            }
        }
        atoms.sort_by(|a, b| a.point.lex_cmp(&b.point).then(a.mult.cmp(&b.mult)));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if last.point.lex_cmp(&a.point) == Ordering::Equal => last.mult += a.mult,
                _ => merged.push(a),
            }
        }
        let total = merged.iter().map(|a| a.mult).sum();
        Ok(Configuration { atoms: merged, total })
    }

    pub fn from_pairs(pairs: Vec<(Point, usize)>) -> Result<Self> {
        Configuration::new(pairs.into_iter().map(|(point, mult)| Atom { point, mult }).collect())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_weight(&self) -> usize {
        self.total
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].point.dim()
    }

    /// The expanded `k`-tuple in canonical order.
    pub fn expanded(&self) -> Vec<&Point> {
        self.atoms.iter().flat_map(|a| std::iter::repeat(&a.point).take(a.mult)).collect()
    }
}

impl Serialize for Configuration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.atoms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let atoms = Vec::<Atom>::deserialize(d)?;
        Configuration::new(atoms).map_err(serde::de::Error::custom)
    }
}

/// Largest `k` for which the configuration distance enumerates permutations.
pub const BRUTE_FORCE_MAX_WEIGHT: usize = 6;

/// `d_k(u,v) = min over permutations of max_i d(x_{σ(i)}, y_i)`.
pub fn config_distance(u: &Configuration, v: &Configuration) -> Result<f64> {
    if u.total_weight() != v.total_weight() {
        return Err(Error::WeightMismatch(u.total_weight(), v.total_weight()));
    }
    check_dims(u.dim(), v.dim())?;
    let xs = u.expanded();
    let ys = v.expanded();
    let cost: Vec<Vec<f64>> =
        xs.iter().map(|x| ys.iter().map(|y| sup_dist(&x.coords, &y.coords)).collect()).collect();
    if xs.len() <= BRUTE_FORCE_MAX_WEIGHT {
        Ok(permutation_bottleneck(&cost))
    } else {
        Ok(bottleneck_assignment(&cost))
    }
}

/// Exhaustive minimum over all permutations of the maximum matched cost.
pub fn permutation_bottleneck(cost: &[Vec<f64>]) -> f64 {
    fn rec(cost: &[Vec<f64>], row: usize, used: &mut [bool], cur: f64, best: &mut f64) {
        if cur >= *best {
            return;
        }
        if row == cost.len() {
            *best = cur;
            return;
        }
        for j in 0..cost.len() {
            if !used[j] {
                used[j] = true;
                rec(cost, row + 1, used, cur.max(cost[row][j]), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut used = vec![false; cost.len()];
    rec(cost, 0, &mut used, 0.0, &mut best);
    if cost.is_empty() {
        0.0
    } else {
        best
    }
}

/// Bottleneck assignment by bisection over the sorted cost values with a
/// bipartite perfect-matching feasibility test.
pub fn bottleneck_assignment(cost: &[Vec<f64>]) -> f64 {
    let n = cost.len();
    if n == 0 {
        return 0.0;
    }
    let mut vals: Vec<f64> = cost.iter().flatten().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    let (mut lo, mut hi) = (0usize, vals.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_perfect_matching(cost, vals[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    vals[lo]
}

fn has_perfect_matching(cost: &[Vec<f64>], thr: f64) -> bool {
    let n = cost.len();
    let mut match_col: Vec<Option<usize>> = vec![None; n];
    fn augment(
        r: usize,
        cost: &[Vec<f64>],
        thr: f64,
        seen: &mut [bool],
        match_col: &mut [Option<usize>],
    ) -> bool {
        for c in 0..cost.len() {
            if cost[r][c] <= thr && !seen[c] {
                seen[c] = true;
                if match_col[c].map_or(true, |r2| augment(r2, cost, thr, seen, match_col)) {
                    match_col[c] = Some(r);
                    return true;
                }
            }
        }
        false
    }
    for r in 0..n {
        let mut seen = vec![false; n];
        if !augment(r, cost, thr, &mut seen, &mut match_col) {
            return false;
        }
    }
    true
}

/// The map `q_k`: forget multiplicities.
pub fn forget_weights(u: &Configuration) -> FiniteSubset {
    FiniteSubset {
        points: u.atoms.iter().map(|a| a.point.clone()).collect(),
        bound: u.total_weight(),
    }
}

/// Membership of `x` in the closed `eps`-neighborhood of `a`.
pub fn epsilon_neighborhood_indicator(a: &FiniteSubset, x: &Point, eps: f64) -> Result<bool> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    check_dims(a.dim(), x.dim())?;
    Ok(a.points.iter().any(|p| sup_dist(&p.coords, &x.coords) <= eps))
}
