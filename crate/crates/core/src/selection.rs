//! Homological selection tests and the explicit low-dimensional selections.
//!
//! A multifunction `f: D^m → Sub_k(D^n)` admits a homological selection when
//! the projection of its graph pair `(gr f, gr f|∂D^m)` onto `(D^m, ∂D^m)`
//! induces a nonzero map on `H_m`. The graph is thickened to a cubical
//! ε-neighbourhood, so every verdict is reported per rung of an ε-ladder.

use std::collections::VecDeque;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::cubical::{Cube, CubicalPair};
use crate::error::{Error, Result};
use crate::homology::{ClassOrder, HomologyGroup};
use crate::metric::{FiniteSubset, Point};
use crate::multifunction::{build_strand_system, lift_to_configuration, GridMultifunction, LiftOutcome};

/// Default ε-ladder, in grid steps.
pub const DEFAULT_EPS_STEPS: [usize; 3] = [2, 3, 4];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Admits,
    Fails,
}

/// One rung of the ε-ladder.
#[derive(Clone, Debug, Serialize)]
pub struct SelectionRung {
    pub eps_steps: usize,
    pub eps: f64,
    /// `H_m` of the thickened graph pair.
    pub relative: HomologyGroup,
    /// `H_m(D^m, ∂D^m)` computed at the same resolution.
    pub domain: HomologyGroup,
    /// The induced map as a row: the image in `H_m(D^m, ∂D^m) ≅ Z` of each
    /// generator of `relative`.
    pub induced: Vec<i64>,
    /// Orders of the generators of `relative` (`None` for free ones).
    pub generator_orders: Vec<Option<u64>>,
    pub verdict: Verdict,
    /// Order of `[∂D^m × {v}]` in `H_{m−1}` of the thickened graph, when the
    /// boundary value is a constant singleton `{v}`.
    pub boundary_class_order: Option<ClassOrder>,
    pub critical_cells: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelectionReport {
    pub resolution: usize,
    pub m: usize,
    pub n: usize,
    pub eps_steps: Vec<usize>,
    pub rungs: Vec<SelectionRung>,
}

impl SelectionReport {
    /// The common verdict of all rungs, if they agree.
    pub fn verdict(&self) -> Option<Verdict> {
        let first = self.rungs.first()?.verdict;
        self.rungs.iter().all(|r| r.verdict == first).then_some(first)
    }
}

/// Grid vertex (doubled coordinates) nearest to a codomain point.
fn codomain_vertex(p: &Point, resolution: usize) -> Vec<u32> {
    p.coords().iter().map(|&y| 2 * (y * resolution as f64).round() as u32).collect()
}

fn boundary_order(pair: &CubicalPair, f: &GridMultifunction) -> Result<Option<ClassOrder>> {
    let Some(v) = f.constant_boundary_value() else {
        return Ok(None);
    };
    let z = pair.boundary_cycle(&codomain_vertex(&v, f.resolution()))?;
    pair.class_order(f.m() - 1, &z).map(Some)
}

/// The selection test at a single `eps`.
pub fn homological_selection_test(f: &GridMultifunction, eps: f64) -> Result<SelectionRung> {
    let pair = f.epsilon_graph_pair(eps)?;
    let ph = pair.projection_homology()?;
    let domain = CubicalPair::domain(f.m(), f.resolution())?.projection_homology()?;
    let verdict = if ph.is_nonzero() { Verdict::Admits } else { Verdict::Fails };
    let boundary_class_order = if f.m() >= 1 { boundary_order(&pair, f)? } else { None };
    Ok(SelectionRung {
        eps_steps: (eps / f.step()).round() as usize,
        eps,
        relative: ph.relative,
        domain: domain.relative,
        induced: ph.images,
        generator_orders: ph.orders,
        verdict,
        boundary_class_order,
        critical_cells: ph.critical_cells,
    })
}

/// Runs the selection test at `eps = s · step` for each `s` in `eps_steps`.
pub fn selection_report(f: &GridMultifunction, eps_steps: &[usize]) -> Result<SelectionReport> {
    if eps_steps.is_empty() {
        return Err(Error::Precondition("empty eps ladder".into()));
    }
    let rungs = eps_steps
        .iter()
        .map(|&s| homological_selection_test(f, s as f64 * f.step()))
        .collect::<Result<Vec<_>>>()?;
    Ok(SelectionReport { resolution: f.resolution(), m: f.m(), n: f.n(), eps_steps: eps_steps.to_vec(), rungs })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryOrderReport {
    pub weight: u64,
    pub eps: f64,
    pub order: ClassOrder,
    /// Whether the order divides the weight.
    pub divides: bool,
}

/// Order of the boundary class `[∂D^m × {v}]` for a multifunction with
/// constant boundary value `{v}` that lifts to configurations of total
/// weight `weight`. A weighted lift makes `weight · [∂D^m × {v}] = 0`, so
/// the order divides the weight.
pub fn boundary_class_order_check(f: &GridMultifunction, weight: u64, eps_steps: usize) -> Result<BoundaryOrderReport> {
    let Some(v) = f.constant_boundary_value() else {
        return Err(Error::Precondition("the boundary value is not a constant singleton".into()));
    };
    let tol = f.modulus().max(f.step()) * (1.0 + 1e-9);
    let strands = build_strand_system(f, tol)?;
    match lift_to_configuration(f, &strands, weight)? {
        LiftOutcome::Lifted(_) => {}
        other => {
            let status = serde_json::to_value(&other)?["status"].as_str().unwrap_or("unknown").to_string();
            return Err(Error::Precondition(format!(
                "no lift of total weight {weight} ({status}); use the plain selection test instead"
            )));
        }
    }
    let eps = eps_steps as f64 * f.step();
    let pair = f.epsilon_graph_pair(eps)?;
    let z = pair.boundary_cycle(&codomain_vertex(&v, f.resolution()))?;
    let order = pair.class_order(f.m() - 1, &z)?;
    let divides = order.divides(weight);
    Ok(BoundaryOrderReport { weight, eps, order, divides })
}

/// The selection `x ↦ min f(x)` of a multifunction into `[0,1]`.
pub fn min_selection(f: &GridMultifunction) -> Result<GridMultifunction> {
    if f.n() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: f.n() });
    }
    let values = f
        .values()
        .iter()
        .map(|v| {
            let low = v.points().iter().map(|p| p.coords()[0]).fold(f64::INFINITY, f64::min);
            Ok(FiniteSubset::singleton(Point::new(vec![low])?))
        })
        .collect::<Result<Vec<_>>>()?;
    GridMultifunction::new(f.m(), 1, f.resolution(), 1, values)
}

/// Whether a selection's thickened graph sits inside that of `f` and maps
/// onto a generator, so that it witnesses a nonzero induced map for `f`.
pub fn witnesses_selection(f: &GridMultifunction, selection: &GridMultifunction, eps: f64) -> Result<bool> {
    let own = selection.epsilon_graph_pair(eps)?;
    let ambient = f.epsilon_graph_pair(eps)?;
    if !own.total.is_subset(&ambient.total) {
        return Ok(false);
    }
    let ph = own.projection_homology()?;
    Ok(ph.images.iter().filter(|&&x| x != 0).count() == 1 && ph.images.iter().all(|x| x.abs() <= 1))
}

/// An edge path in the thickened graph of a multifunction on `[0,1]`.
#[derive(Clone, Debug, Serialize)]
pub struct PathSelection {
    pub eps: f64,
    /// Vertices of the path in `[0,1]^{1+n}`.
    pub vertices: Vec<Vec<f64>>,
    /// The path as a signed 1-chain; each edge is given by its doubled
    /// integer coordinates (odd along the axis it spans).
    pub chain: Vec<(Vec<u32>, i64)>,
    /// Coefficient of the projected chain on every edge of `[0,1]`; it is
    /// `1` exactly when the chain represents the generator of `H_1(I, ∂I)`.
    pub degree: i64,
}

/// A simple edge path in the ε-thickened graph from a point over `0` to a
/// point over `1`, found by breadth-first search.
pub fn path_selection(f: &GridMultifunction, eps: f64) -> Result<PathSelection> {
    if f.m() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: f.m() });
    }
    let pair = f.epsilon_graph_pair(eps)?;
    let dims = 1 + f.n();
    let r = f.resolution();
    let top = 2 * r as u32;
    let mut adjacent: FxHashMap<Cube, Vec<(Cube, Cube, i64)>> = FxHashMap::default();
    for &e in pair.total.cells(1) {
        let faces = e.faces(dims);
        let (head, tail) = if faces[0].1 > 0 { (faces[0].0, faces[1].0) } else { (faces[1].0, faces[0].0) };
        adjacent.entry(tail).or_default().push((head, e, 1));
        adjacent.entry(head).or_default().push((tail, e, -1));
    }
    let mut parent: FxHashMap<Cube, Option<(Cube, Cube, i64)>> = FxHashMap::default();
    let mut queue = VecDeque::new();
    for &v in pair.total.cells(0) {
        if v.coord(0) == 0 {
            parent.insert(v, None);
            queue.push_back(v);
        }
    }
    let mut end = None;
    while let Some(v) = queue.pop_front() {
        if v.coord(0) == top {
            end = Some(v);
            break;
        }
        for &(w, e, s) in adjacent.get(&v).map_or(&[][..], |x| x) {
            if !parent.contains_key(&w) {
                parent.insert(w, Some((v, e, s)));
                queue.push_back(w);
            }
        }
    }
    let Some(end) = end else {
        return Err(Error::Precondition(format!(
            "the thickened graph at eps {eps} does not connect the fibres over 0 and 1; try a larger eps"
        )));
    };
    let mut vertices = vec![end];
    let mut chain = Vec::new();
    let mut cur = end;
    while let Some(Some((prev, e, s))) = parent.get(&cur) {
        chain.push((*e, *s));
        vertices.push(*prev);
        cur = *prev;
    }
    vertices.reverse();
    chain.reverse();
    let mut projected = vec![0i64; r];
    for &(e, s) in &chain {
        if let Some(d) = pair.project(e) {
            if d.dim() == 1 {
                projected[(d.coord(0) / 2) as usize] += s;
            }
        }
    }
    let degree = if projected.iter().all(|&x| x == projected[0]) { projected[0] } else { 0 };
    Ok(PathSelection {
        eps,
        vertices: vertices.iter().map(|v| v.center(dims, r)).collect(),
        chain: chain.iter().map(|&(e, s)| (e.coords(dims), s)).collect(),
        degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multifunction::sample_multifunction;

    fn set(xs: &[f64]) -> FiniteSubset {
        FiniteSubset::from_points(xs.iter().map(|&x| Point::new(vec![x]).unwrap()).collect()).unwrap()
    }

    #[test]
    fn identity_on_the_interval_admits() {
        let f = sample_multifunction(1, 1, 16, 1, |x| Ok(set(&[x[0]]))).unwrap();
        let rep = selection_report(&f, &DEFAULT_EPS_STEPS).unwrap();
        assert_eq!(rep.verdict(), Some(Verdict::Admits));
        assert!(rep.rungs.iter().all(|r| r.induced.iter().map(|x| x.abs()).collect::<Vec<_>>() == vec![1]));
        assert_eq!(rep.rungs[0].domain, HomologyGroup::free(1));
    }

    #[test]
    fn min_selection_examples() {
        let f = sample_multifunction(1, 1, 8, 2, |x| Ok(set(&[x[0], 1.0]))).unwrap();
        let s = min_selection(&f).unwrap();
        for node in 0..s.node_count() {
            assert_eq!(s.value(node).points()[0].coords()[0], s.node_coords(node)[0]);
        }
        let c = sample_multifunction(1, 1, 8, 2, |_| Ok(set(&[0.2, 0.8]))).unwrap();
        assert!(min_selection(&c).unwrap().values().iter().all(|v| v.points()[0].coords()[0] == 0.2));
        let two = sample_multifunction(1, 2, 4, 1, |x| {
            Ok(FiniteSubset::singleton(Point::new(vec![x[0], x[0]]).unwrap()))
        })
        .unwrap();
        assert!(matches!(min_selection(&two), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn min_selection_witnesses_the_crossing() {
        let f = sample_multifunction(1, 1, 16, 2, |x| Ok(set(&[x[0], 1.0 - x[0]]))).unwrap();
        let s = min_selection(&f).unwrap();
        assert!(s.modulus() <= f.modulus() + 1e-12);
        assert!(witnesses_selection(&f, &s, 2.0 / 16.0).unwrap());
    }

    #[test]
    fn path_through_the_crossing() {
        let f = sample_multifunction(1, 1, 16, 2, |x| Ok(set(&[x[0], 1.0 - x[0]]))).unwrap();
        let p = path_selection(&f, 2.0 / 16.0).unwrap();
        assert_eq!(p.degree, 1);
        assert_eq!(p.vertices.first().unwrap()[0], 0.0);
        assert_eq!(p.vertices.last().unwrap()[0], 1.0);
        for v in &p.vertices {
            // sup distance to the lines y = x and y = 1 − x
            let near = 0.5 * (v[1] - v[0]).abs().min((v[1] - 1.0 + v[0]).abs());
            assert!(near <= 2.0 / 16.0 + 0.5 / 16.0 + 1e-12, "{v:?}");
        }
    }

    #[test]
    fn disconnected_path_is_reported() {
        let f = sample_multifunction(1, 1, 8, 1, |x| Ok(set(&[if x[0] < 0.5 { 0.0 } else { 1.0 }]))).unwrap();
        assert!(matches!(path_selection(&f, 1.0 / 8.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn single_valued_boundary_order_is_one() {
        let f = sample_multifunction(1, 1, 8, 1, |x| Ok(set(&[0.5 + 0.25 * (std::f64::consts::PI * x[0]).sin()])))
            .unwrap();
        let rep = boundary_class_order_check(&f, 1, 2).unwrap();
        assert_eq!(rep.order, ClassOrder::Finite(1));
        assert!(rep.divides);
    }

    #[test]
    fn non_constant_boundary_is_refused() {
        let f = sample_multifunction(1, 1, 8, 1, |x| Ok(set(&[x[0]]))).unwrap();
        assert!(matches!(boundary_class_order_check(&f, 1, 2), Err(Error::Precondition(_))));
    }
}
