//! Set-valued maps sampled on a regular grid over `[0,1]^m`, their graphs,
//! and cubical ε-neighborhoods of those graphs.

mod lift;
mod strands;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubical::{cartesian, Cube, CubicalComplex, CubicalPair, MAX_AXES, MAX_RESOLUTION};
use crate::error::{Error, Result};
use crate::metric::{hausdorff_raw, FiniteSubset, Point};

pub use lift::{lift_to_configuration, ConfigurationLift, LiftCertificate, LiftOutcome};
pub use strands::{build_strand_system, MatchedEdge, MergeRecord, StrandSystem};

/// Values of a set-valued map at the nodes `j/r`, `j ∈ {0..r}^m`, stored
/// row-major with the first axis varying slowest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct GridMultifunction {
    m: usize,
    n: usize,
    resolution: usize,
    k: usize,
    values: Vec<FiniteSubset>,
    modulus: f64,
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    m: usize,
    n: usize,
    resolution: usize,
    k: usize,
    values: Vec<Vec<Vec<f64>>>,
}

impl TryFrom<RawGrid> for GridMultifunction {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        let values = raw
            .values
            .into_iter()
            .enumerate()
            .map(|(i, pts)| {
                let pts = pts
                    .into_iter()
                    .enumerate()
                    .map(|(j, p)| {
                        Point::new(p).map_err(|e| Error::Schema { path: format!("values[{i}][{j}]"), msg: e.to_string() })
                    })
                    .collect::<Result<Vec<_>>>()?;
                FiniteSubset::new(pts, raw.k).map_err(|e| Error::Schema { path: format!("values[{i}]"), msg: e.to_string() })
            })
            .collect::<Result<Vec<_>>>()?;
        GridMultifunction::new(raw.m, raw.n, raw.resolution, raw.k, values)
    }
}

impl From<GridMultifunction> for RawGrid {
    fn from(g: GridMultifunction) -> RawGrid {
        RawGrid {
            m: g.m,
            n: g.n,
            resolution: g.resolution,
            k: g.k,
            values: g.values.iter().map(|v| v.points().iter().map(|p| p.coords().to_vec()).collect()).collect(),
        }
    }
}

impl GridMultifunction {
    pub fn new(m: usize, n: usize, resolution: usize, k: usize, values: Vec<FiniteSubset>) -> Result<Self> {
        if m == 0 || n == 0 || m + n > MAX_AXES {
            return Err(Error::InvalidGrid(format!("need m, n ≥ 1 and m + n ≤ {MAX_AXES}, got m={m}, n={n}")));
        }
        if resolution == 0 || resolution > MAX_RESOLUTION {
            return Err(Error::InvalidGrid(format!("resolution {resolution} outside 1..={MAX_RESOLUTION}")));
        }
        let nodes = (resolution + 1).pow(m as u32);
        if values.len() != nodes {
            return Err(Error::InvalidGrid(format!("expected {nodes} node values, got {}", values.len())));
        }
        for v in &values {
            if v.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.dim() });
            }
            if v.len() > k {
                return Err(Error::CardinalityExceeded { got: v.len(), bound: k });
            }
        }
        let values = values.into_iter().map(|v| v.with_bound(k)).collect::<Result<Vec<_>>>()?;
        let mut g = GridMultifunction { m, n, resolution, k, values, modulus: 0.0 };
        g.modulus = g.compute_modulus();
        Ok(g)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn step(&self) -> f64 {
        1.0 / self.resolution as f64
    }

    pub fn values(&self) -> &[FiniteSubset] {
        &self.values
    }

    pub fn value(&self, node: usize) -> &FiniteSubset {
        &self.values[node]
    }

    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    /// Largest Hausdorff distance between values at adjacent nodes.
    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    /// Multi-index of a node.
    pub fn node_index(&self, node: usize) -> Vec<usize> {
        let side = self.resolution + 1;
        let mut j = vec![0; self.m];
        let mut rest = node;
        for a in (0..self.m).rev() {
            j[a] = rest % side;
            rest /= side;
        }
        j
    }

    pub fn node_at(&self, j: &[usize]) -> usize {
        j.iter().fold(0, |acc, &x| acc * (self.resolution + 1) + x)
    }

    pub fn node_coords(&self, node: usize) -> Vec<f64> {
        self.node_index(node).iter().map(|&x| x as f64 / self.resolution as f64).collect()
    }

    /// Whether a node lies on the boundary of the domain cube.
    pub fn is_boundary_node(&self, node: usize) -> bool {
        self.node_index(node).iter().any(|&x| x == 0 || x == self.resolution)
    }

    /// Pairs `(a, b)` of nodes differing by one step along one axis, `a < b`.
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let side = self.resolution + 1;
        for node in 0..self.node_count() {
            let j = self.node_index(node);
            for a in 0..self.m {
                if j[a] < self.resolution {
                    out.push((node, node + side.pow((self.m - 1 - a) as u32)));
                }
            }
        }
        out
    }

    fn compute_modulus(&self) -> f64 {
        self.adjacent_pairs()
            .par_iter()
            .map(|&(a, b)| hausdorff_raw(self.values[a].points(), self.values[b].points()))
            .reduce(|| 0.0, f64::max)
    }

    /// One point `(x, y)` per node `x` and member `y ∈ f(x)`.
    pub fn graph_samples(&self) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for node in 0..self.node_count() {
            let x = self.node_coords(node);
            for y in self.values[node].points() {
                let mut c = x.clone();
                c.extend_from_slice(y.coords());
                out.push(Point::new(c).expect("graph sample lies in the unit cube"));
            }
        }
        out.sort_by(|a, b| a.lex_cmp(b));
        out.dedup();
        out
    }

    /// Whether the value is the same singleton at every boundary node.
    pub fn constant_boundary_value(&self) -> Option<Point> {
        let mut found: Option<&FiniteSubset> = None;
        for node in (0..self.node_count()).filter(|&v| self.is_boundary_node(v)) {
            let v = &self.values[node];
            match found {
                None => found = Some(v),
                Some(f) if f.points() == v.points() => {}
                Some(_) => return None,
            }
        }
        found.filter(|f| f.len() == 1).map(|f| f.points()[0].clone())
    }

    /// The cubical ε-neighborhood of the graph and its part over `∂D^m`.
    ///
    /// A cube is kept when its center is within `eps` (sup metric) of a graph
    /// sample; faces of kept cubes are added.
    pub fn epsilon_graph_pair(&self, eps: f64) -> Result<CubicalPair> {
        if !(eps > 0.0) {
            return Err(Error::NonPositiveEpsilon(eps));
        }
        let step = self.step();
        if eps < step * (1.0 - 1e-9) {
            return Err(Error::EpsilonTooSmall { eps, step });
        }
        let r = self.resolution;
        let top = 2 * r as i64;
        let e = eps * 2.0 * r as f64 + 1e-9;
        let reach = |x: f64| -> (u32, u32) {
            let lo = (x - e).ceil().max(0.0) as i64;
            let hi = ((x + e).floor() as i64).min(top);
            (lo.min(top + 1) as u32, hi.max(-1) as u32)
        };
        let m = self.m;
        let n = self.n;
        let side = 2 * r + 1;
        let positions = cartesian(&vec![(0, 2 * r as u32); m], 1);
        let seeds: Vec<Vec<Cube>> = positions
            .par_iter()
            .map(|d| {
                let dc = d.coords(m);
                let node_ranges: Vec<(u32, u32)> = dc
                    .iter()
                    .map(|&x| {
                        let lo = ((x as f64 - e) / 2.0).ceil().max(0.0) as u32;
                        let hi = (((x as f64 + e) / 2.0).floor() as u32).min(r as u32);
                        (lo, hi)
                    })
                    .collect();
                let mut mark = vec![false; side.pow(n as u32)];
                let mut touched: Vec<usize> = Vec::new();
                for nd in cartesian(&node_ranges, 1) {
                    let j: Vec<usize> = nd.coords(m).iter().map(|&x| x as usize).collect();
                    for y in self.values[self.node_at(&j)].points() {
                        let ranges: Vec<(u32, u32)> =
                            y.coords().iter().map(|&t| reach(t * 2.0 * r as f64)).collect();
                        if ranges.iter().any(|&(lo, hi)| lo > hi) {
                            continue;
                        }
                        for c in cartesian(&ranges, 1) {
                            let idx = c.coords(n).iter().fold(0usize, |acc, &x| acc * side + x as usize);
                            if !mark[idx] {
                                mark[idx] = true;
                                touched.push(idx);
                            }
                        }
                    }
                }
                touched.sort_unstable();
                touched
                    .into_iter()
                    .map(|mut idx| {
                        let mut c = dc.clone();
                        let mut cod = vec![0u32; n];
                        for b in (0..n).rev() {
                            cod[b] = (idx % side) as u32;
                            idx /= side;
                        }
                        c.extend(cod);
                        Cube::new(&c)
                    })
                    .collect()
            })
            .collect();
        let total = CubicalComplex::closure(m + n, r, seeds.into_iter().flatten())?;
        CubicalPair::new(total, m)
    }
}

/// Evaluates `f` at every grid node.
pub fn sample_multifunction<F>(m: usize, n: usize, resolution: usize, k: usize, f: F) -> Result<GridMultifunction>
where
    F: Fn(&[f64]) -> Result<FiniteSubset> + Sync,
{
    if m == 0 || resolution == 0 || resolution > MAX_RESOLUTION {
        return Err(Error::InvalidGrid(format!("invalid sampling grid m={m}, resolution={resolution}")));
    }
    let nodes = (resolution + 1).pow(m as u32);
    let values = (0..nodes)
        .into_par_iter()
        .map(|node| {
            let mut rest = node;
            let mut x = vec![0.0; m];
            for a in (0..m).rev() {
                x[a] = (rest % (resolution + 1)) as f64 / resolution as f64;
                rest /= resolution + 1;
            }
            let v = f(&x)?;
            if v.len() > k {
                return Err(Error::CardinalityExceeded { got: v.len(), bound: k });
            }
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    GridMultifunction::new(m, n, resolution, k, values)
}
