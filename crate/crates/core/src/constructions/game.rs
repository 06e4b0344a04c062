use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use super::{cube_to_disk, disk_to_cube, disk_to_square, square_to_disk, Wedge, P2};
use crate::error::Result;
use crate::games::{ColumnMinFn, CostFn, Game, Lattice};
use crate::metric::sup_dist;
use crate::multifunction::GridMultifunction;
use crate::nearest::SupTree;

/// Sup distance to a densely sampled graph `{(x, y) : y ∈ f(x)}`.
pub struct DistanceCost {
    tree: SupTree,
    domain: Lattice,
    /// Values of the sample at domain node `k` are `values[offsets[k]..offsets[k + 1]]`.
    offsets: Vec<usize>,
    values: Vec<Vec<f64>>,
}

impl DistanceCost {
    fn build(domain: Lattice, values_at: Vec<Vec<Vec<f64>>>) -> DistanceCost {
        let dim = domain.axes + values_at.iter().flatten().next().map_or(0, Vec::len);
        let mut flat = Vec::new();
        let mut offsets = vec![0];
        let mut values = Vec::new();
        for (k, ys) in values_at.into_iter().enumerate() {
            let x = domain.coords(k);
            for y in ys {
                flat.extend_from_slice(&x);
                flat.extend_from_slice(&y);
                values.push(y);
            }
            offsets.push(values.len());
        }
        DistanceCost { tree: SupTree::from_flat(dim, flat), domain, offsets, values }
    }

    /// `F(x, y)`.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut q = x.to_vec();
        q.extend_from_slice(y);
        self.tree.distance(&q)
    }

    /// `F` at a point of the product, domain coordinates first.
    pub fn eval_joined(&self, p: &[f64]) -> f64 {
        self.tree.distance(p)
    }

    /// `min over grid nodes y of F(x, y)` for the grid with `resolution`
    /// intervals per axis. Exchanging the two minima turns this into a
    /// minimum over samples `(x', y')` of `max(|x − x'|, dist(y', grid))`,
    /// and only samples with `x'` close to `x` can win.
    pub fn column_min(&self, x: &[f64], resolution: usize) -> f64 {
        let r = resolution as f64;
        let off_grid = |y: &[f64]| y.iter().map(|v| (v - (v * r).round() / r).abs()).fold(0.0, f64::max);
        let s = self.domain.step();
        let side = self.domain.side() as isize;
        let home: Vec<isize> = x.iter().map(|v| ((v / s).round() as isize).clamp(0, side - 1)).collect();
        let mut best = f64::INFINITY;
        let scan = |node: &[isize], best: &mut f64| {
            let k = node.iter().fold(0usize, |acc, &c| acc * side as usize + c as usize);
            let dx = x.iter().zip(node).map(|(v, &c)| (v - c as f64 * s).abs()).fold(0.0, f64::max);
            if dx >= *best {
                return;
            }
            for y in &self.values[self.offsets[k]..self.offsets[k + 1]] {
                *best = best.min(dx.max(off_grid(y)));
            }
        };
        scan(&home, &mut best);
        let reach = (best / s + 0.5).ceil() as isize;
        let lo: Vec<isize> = home.iter().map(|&c| (c - reach).max(0)).collect();
        let hi: Vec<isize> = home.iter().map(|&c| (c + reach).min(side - 1)).collect();
        let mut cur = lo.clone();
        loop {
            scan(&cur, &mut best);
            let mut a = cur.len();
            loop {
                if a == 0 {
                    return best;
                }
                a -= 1;
                if cur[a] < hi[a] {
                    cur[a] += 1;
                    break;
                }
                cur[a] = lo[a];
            }
        }
    }

    pub fn samples(&self) -> usize {
        self.tree.len()
    }

    pub fn domain_dim(&self) -> usize {
        self.domain.axes
    }

    /// Domain grid spacing of the samples.
    pub fn spacing(&self) -> f64 {
        self.domain.step()
    }
}

/// The distance cost of a sampled multifunction.
pub fn distance_cost(f: &GridMultifunction) -> DistanceCost {
    let values = (0..f.node_count()).map(|k| f.value(k).points().iter().map(|p| p.coords().to_vec()).collect()).collect();
    DistanceCost::build(Lattice::new(f.m(), f.resolution()), values)
}

/// Distance cost of a map on `[0,1]^2` sampled at `resolution` without
/// building an intermediate multifunction.
fn sampled_cost(resolution: usize, f: impl Fn(&[f64]) -> Vec<[f64; 2]> + Sync) -> DistanceCost {
    let domain = Lattice::new(2, resolution);
    let values = (0..domain.len())
        .into_par_iter()
        .map(|k| f(&domain.coords(k)).into_iter().map(|y| y.to_vec()).collect())
        .collect();
    DistanceCost::build(domain, values)
}

/// Domain resolution of the graph samples behind the counterexample costs.
pub const GRAPH_RESOLUTION: usize = 512;

struct Costs {
    wedge: Wedge,
    /// Graph of `f1: A_1 → Sub_3(A_2)`, player 2's response.
    g1: DistanceCost,
    /// Graph of `f2: A_2 → A_1`, player 1's response.
    g2: DistanceCost,
}

fn costs() -> &'static Costs {
    static COSTS: OnceLock<Costs> = OnceLock::new();
    COSTS.get_or_init(|| {
        let wedge = Wedge::default();
        let g1 = sampled_cost(GRAPH_RESOLUTION, |u| {
            wedge.f1(square_to_disk(u)).into_iter().map(disk_to_cube).collect()
        });
        let g2 = sampled_cost(GRAPH_RESOLUTION, |v| vec![disk_to_square(wedge.f2(cube_to_disk(v)))]);
        Costs { wedge, g1, g2 }
    })
}

/// Two players on `[0,1]^2` whose best responses are `f2` (player 1) and
/// `f1` (player 2): `r_1(a) = F_{f2}(a_2, a_1)`, `r_2(a) = F_{f1}(a_1, a_2)`.
/// The graphs of `f1` and `f2` do not meet, so the game has no equilibrium.
pub fn counterexample_game() -> Result<Game> {
    costs();
    let r1: CostFn = Arc::new(|a: &[f64]| costs().g2.eval(&a[2..4], &a[0..2]));
    let r2: CostFn = Arc::new(|a: &[f64]| costs().g1.eval(&a[0..2], &a[2..4]));
    let column_min: ColumnMinFn = Arc::new(|i, a: &[f64], r| {
        if i == 0 {
            costs().g2.column_min(&a[2..4], r)
        } else {
            costs().g1.column_min(&a[0..2], r)
        }
    });
    Ok(Game::new("no_equilibrium", vec![2, 2], vec![r1, r2])?.with_lipschitz(1.0).with_column_min(column_min))
}

/// Behaviour of `f1 ∘ f2` on one half of an arc `α_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapCase {
    /// Index `i` of the arc `α_i` (1-based).
    pub arc: usize,
    /// The marked arc containing the samples, e.g. `A3A1`.
    pub on: String,
    /// The marked arc predicted to contain the moving value.
    pub predicted: String,
    pub samples: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub resolution: usize,
    pub samples: usize,
    /// `min over the circle grid of d(x, f1(f2(x)))`, sup metric on `[0,1]^2`.
    pub gap: f64,
    /// Angle (degrees) on `C` where the minimum is attained.
    pub argmin_angle: f64,
    pub cases: Vec<GapCase>,
}

fn arc_name(j: usize) -> String {
    format!("A{}A{}", j + 1, (j + 1) % 3 + 1)
}

/// Whether direction `deg` lies on the closed counterclockwise arc `A_{j+1}A_{j+2}`.
fn on_arc(w: &Wedge, j: usize, deg: f64) -> bool {
    let from = w.circle.marks[j];
    let to = w.circle.marks[(j + 1) % 3];
    (deg - from).rem_euclid(360.0) <= (to - from).rem_euclid(360.0) + 1e-9
        || (deg - from).rem_euclid(360.0) >= 360.0 - 1e-9
}

/// Measures how far `f1 ∘ f2` stays from the identity on the circle `C`,
/// sampled at `4·resolution` equally spaced angles.
pub fn no_fixed_point_gap(resolution: usize) -> GapReport {
    let w = &costs().wedge;
    let n = 4 * resolution.max(1);
    let mut gap = f64::INFINITY;
    let mut argmin_angle = 0.0;
    // cases[i][side]: (samples, holds)
    let mut tally = [[(0usize, true); 2]; 3];
    for k in 0..n {
        let deg = 360.0 * k as f64 / n as f64;
        let x = w.circle.at_angle(deg);
        let ys = w.f1(w.f2(x));
        let xc = disk_to_cube(x);
        for y in &ys {
            let d = sup_dist(&xc, &disk_to_cube(*y));
            if d < gap {
                gap = d;
                argmin_angle = deg;
            }
        }
        for i in 0..3 {
            let delta = (deg - w.circle.marks[i] + 180.0).rem_euclid(360.0) - 180.0;
            if delta.abs() < 1e-9 || delta.abs() >= 60.0 - 1e-9 {
                continue;
            }
            let (side, predicted) = if delta < 0.0 { (0, i) } else { (1, (i + 2) % 3) };
            let moving: Vec<&P2> =
                ys.iter().filter(|y| (0..3).all(|j| sup_dist(&y[..], &w.circle.mark(j + 1)[..]) > 1e-9)).collect();
            let ok = moving.iter().all(|y| on_arc(w, predicted, w.circle.angle_of(**y)));
            tally[i][side].0 += 1;
            tally[i][side].1 &= ok;
        }
    }
    let mut cases = Vec::new();
    for i in 0..3 {
        for side in 0..2 {
            let (on, predicted) = if side == 0 { ((i + 2) % 3, i) } else { (i, (i + 2) % 3) };
            cases.push(GapCase {
                arc: i + 1,
                on: arc_name(on),
                predicted: arc_name(predicted),
                samples: tally[i][side].0,
                holds: tally[i][side].1,
            });
        }
    }
    GapReport { resolution, samples: n, gap, argmin_angle, cases }
}

/// Smallest sup distance between the graph of `f1` and the transposed graph
/// `{(f2(x), x)}` of `f2`, over `x` on the grid of `A_2` with `resolution`
/// intervals per axis. Returns the distance and the minimizing `(a_1, a_2)`
/// in cube coordinates.
pub fn graph_separation(resolution: usize) -> (f64, Vec<f64>) {
    let c = costs();
    let lat = Lattice::new(2, resolution);
    let (d, k) = (0..lat.len())
        .into_par_iter()
        .map(|k| {
            let v = lat.coords(k);
            let u = disk_to_square(c.wedge.f2(cube_to_disk(&v)));
            (c.g1.eval(&u, &v), k)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("nonempty grid");
    let v = lat.coords(k);
    let mut p = disk_to_square(c.wedge.f2(cube_to_disk(&v))).to_vec();
    p.extend(v);
    (d, p)
}

/// Gap reports at several resolutions.
pub fn gap_study(resolutions: &[usize]) -> Vec<GapReport> {
    resolutions.iter().map(|&r| no_fixed_point_gap(r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{best_response, response_field, ResponseOptions};
    use crate::metric::{FiniteSubset, Point};

    #[test]
    fn distance_cost_vanishes_on_the_graph() {
        let f = crate::multifunction::sample_multifunction(1, 1, 8, 2, |x| {
            FiniteSubset::from_points(vec![Point::new(vec![x[0]])?, Point::new(vec![1.0 - x[0]])?])
        })
        .unwrap();
        let c = distance_cost(&f);
        assert_eq!(c.eval(&[0.25], &[0.75]), 0.0);
        assert_eq!(c.eval(&[0.25], &[0.25]), 0.0);
        assert!((c.eval(&[0.25], &[0.5]) - 0.125).abs() < 1e-12);
        assert!(c.eval(&[0.9], &[0.1]) >= 0.0);
    }

    #[test]
    fn column_min_matches_a_full_scan() {
        let c = &costs().g1;
        for r in [8, 13, 32] {
            let own = Lattice::new(2, r);
            for k in 0..40 {
                let x = [(k * 7 % 41) as f64 / 40.0, (k * 11 % 37) as f64 / 36.0];
                let scan = (0..own.len()).map(|j| c.eval(&x, &own.coords(j))).fold(f64::INFINITY, f64::min);
                assert!((c.column_min(&x, r) - scan).abs() < 1e-12, "{x:?} {r}");
            }
        }
    }

    #[test]
    fn gap_is_positive_and_stable() {
        let a = no_fixed_point_gap(64);
        let b = no_fixed_point_gap(128);
        assert!(a.gap > 0.05, "{a:?}");
        assert!((a.gap - b.gap).abs() <= 0.1 * a.gap);
        assert!(a.cases.iter().all(|c| c.holds && c.samples > 0), "{:?}", a.cases);
        assert_eq!(a.cases[0].on, "A3A1");
        assert_eq!(a.cases[0].predicted, "A1A2");
    }

    #[test]
    fn graphs_are_separated_by_less_than_the_circle_gap() {
        let (d, p) = graph_separation(64);
        assert!(d > 0.0);
        assert!(d < no_fixed_point_gap(64).gap);
        let f2 = disk_to_square(costs().wedge.f2(cube_to_disk(&p[2..4])));
        assert!(sup_dist(&f2, &p[0..2]) < 1e-12);
    }

    /// Sup distance from `(x, y)` to the graph of `f1`, by scanning a fine
    /// local grid of domain points around `x`.
    fn graph_distance(w: &Wedge, x: &[f64], y: &[f64], radius: f64) -> f64 {
        let n = 24;
        let mut best = f64::INFINITY;
        for i in 0..=n {
            for j in 0..=n {
                let x2 = [x[0] - radius + 2.0 * radius * i as f64 / n as f64, x[1] - radius + 2.0 * radius * j as f64 / n as f64];
                if x2.iter().any(|v| !(0.0..=1.0).contains(v)) {
                    continue;
                }
                let dx = sup_dist(x, &x2);
                for v in w.f1(square_to_disk(&x2)) {
                    best = best.min(dx.max(sup_dist(y, &disk_to_cube(v))));
                }
            }
        }
        best
    }

    #[test]
    fn response_field_tracks_the_graph_of_f1() {
        let g = counterexample_game().unwrap();
        let w = Wedge::default();
        let r = 32;
        let h = 1.0 / r as f64;
        let opts = ResponseOptions::new(r, 0.5 * h);
        let field = response_field(&g, 1, &opts).unwrap();
        for node in (0..field.field.node_count()).step_by(7) {
            let x = field.field.node_coords(node);
            let own = best_response(&g, 1, &[x[0], x[1], 0.0, 0.0], &opts).unwrap();
            assert_eq!(own.to_subset(3).unwrap().points(), field.field.value(node).points());
            for y in w.f1(square_to_disk(&x)) {
                let y = disk_to_cube(y);
                let near = own.selected.iter().map(|s| sup_dist(s, &y)).fold(f64::INFINITY, f64::min);
                assert!(near <= 0.5 * h + 1e-9, "{x:?} {y:?} {near}");
            }
            for s in own.representatives.iter().chain(&own.selected) {
                let d = graph_distance(&w, &x, s, 2.0 * h);
                assert!(d <= 2.0 * h, "{x:?} {s:?} {d}");
            }
        }
    }
}
