//! The branched examples: `g_P`, the three-petal wedge `h_C`, the game maps
//! `f1`, `f2`, and cell structures for the graphs of `g_P` and `h_C`.
//!
//! Points of the model disks are plain `[f64; 2]` in disk coordinates. The
//! domain disk is identified with the unit square by the radial map
//! [`square_to_disk`]; the codomain disk by the affine map [`disk_to_cube`].

mod cw;
mod game;

use crate::error::Result;
use crate::metric::{FiniteSubset, Point};
use crate::multifunction::{sample_multifunction, GridMultifunction};

pub use cw::{cw_gr_gp, cw_gr_hc, gr_hc_report, CwReport};
pub use game::{
    counterexample_game, distance_cost, gap_study, graph_separation, no_fixed_point_gap, DistanceCost, GapCase, GapReport,
    GRAPH_RESOLUTION,
};

pub type P2 = [f64; 2];

fn polar(r: f64, deg: f64) -> P2 {
    let t = deg.to_radians();
    [r * t.cos(), r * t.sin()]
}

fn angle_deg(p: P2) -> f64 {
    p[1].atan2(p[0]).to_degrees().rem_euclid(360.0)
}

fn norm(p: P2) -> f64 {
    p[0].hypot(p[1])
}

fn snap(x: f64) -> f64 {
    let s = (x * 1e12).round() / 1e12;
    if s == 0.0 {
        0.0
    } else {
        s
    }
}

/// Radial homeomorphism from `[0,1]^2` onto the unit disk.
pub fn square_to_disk(u: &[f64]) -> P2 {
    let p = [2.0 * u[0] - 1.0, 2.0 * u[1] - 1.0];
    let n2 = norm(p);
    if n2 == 0.0 {
        return [0.0, 0.0];
    }
    let ninf = p[0].abs().max(p[1].abs());
    [p[0] * ninf / n2, p[1] * ninf / n2]
}

/// Inverse of [`square_to_disk`]; points outside the disk are clamped.
pub fn disk_to_square(z: P2) -> [f64; 2] {
    let n2 = norm(z).min(1.0);
    if n2 == 0.0 {
        return [0.5, 0.5];
    }
    let scale = n2 / norm(z);
    let z = [z[0] * scale, z[1] * scale];
    let ninf = z[0].abs().max(z[1].abs());
    let p = [z[0] * n2 / ninf, z[1] * n2 / ninf];
    [((p[0] + 1.0) / 2.0).clamp(0.0, 1.0), ((p[1] + 1.0) / 2.0).clamp(0.0, 1.0)]
}

/// Affine embedding of the unit disk into `[0,1]^2`.
pub fn disk_to_cube(y: P2) -> [f64; 2] {
    [((y[0] + 1.0) / 2.0).clamp(0.0, 1.0), ((y[1] + 1.0) / 2.0).clamp(0.0, 1.0)]
}

pub fn cube_to_disk(v: &[f64]) -> P2 {
    [2.0 * v[0] - 1.0, 2.0 * v[1] - 1.0]
}

/// Converts disk points to a finite subset of the unit cube.
pub fn to_subset(points: &[P2], embed: fn(P2) -> [f64; 2]) -> Result<FiniteSubset> {
    let pts = points
        .iter()
        .map(|&p| {
            let c = embed(p);
            Point::new(vec![snap(c[0]), snap(c[1])])
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteSubset::from_points(pts)
}

/// A circle with three marked points `A_1, A_2, A_3` in counterclockwise
/// order. `I_1 = A_2A_3`, `I_2 = A_3A_1`, `I_3 = A_1A_2`, and `P_i` runs
/// over the rest of the circle from the end of `I_i` to its beginning.
#[derive(Clone, Debug, PartialEq)]
pub struct CirclePath {
    pub center: P2,
    pub radius: f64,
    /// Angles of `A_1, A_2, A_3` in degrees.
    pub marks: [f64; 3],
}

impl Default for CirclePath {
    fn default() -> Self {
        CirclePath { center: [0.0, 0.0], radius: 0.5, marks: [90.0, 210.0, 330.0] }
    }
}

impl CirclePath {
    pub fn at_angle(&self, deg: f64) -> P2 {
        let p = polar(self.radius, deg);
        [self.center[0] + p[0], self.center[1] + p[1]]
    }

    /// `A_i` for `i ∈ {1, 2, 3}`.
    pub fn mark(&self, i: usize) -> P2 {
        self.at_angle(self.marks[i - 1])
    }

    fn sweep(&self, from: f64, to: f64) -> f64 {
        (to - from).rem_euclid(360.0)
    }

    /// `P_i(τ)` for `τ ∈ [0, 1]`.
    pub fn path(&self, i: usize, tau: f64) -> P2 {
        let start = self.marks[(i + 1) % 3];
        let end = self.marks[i % 3];
        self.at_angle(start + self.sweep(start, end) * tau)
    }

    /// Angle on the circle of a point (relative to the center).
    pub fn angle_of(&self, p: P2) -> f64 {
        angle_deg([p[0] - self.center[0], p[1] - self.center[1]])
    }
}

/// `g_P` on the disk. Radius `t ≤ ½`, angle `2πa`:
/// `{P(0), P(2t), P(2at)}`; beyond radius ½ the value at radius ½ is
/// shrunk linearly to the origin, reaching it on the unit circle.
pub fn g_p(path: impl Fn(f64) -> P2, x: P2) -> Vec<P2> {
    let r = norm(x);
    let a = angle_deg(x) / 360.0;
    let (t, shrink) = if r <= 0.5 { (r, 1.0) } else { (0.5, 1.0 - 2.0 * (r.min(1.0) - 0.5)) };
    let mut v = vec![path(0.0), path(2.0 * t), path(2.0 * a * t)];
    for p in v.iter_mut() {
        *p = [p[0] * shrink, p[1] * shrink];
    }
    v
}

/// Three convex rose petals `r ≤ ρ0 cos(3(φ − θ_i)/2)`, `|φ − θ_i| ≤ 60°`,
/// meeting only at the origin, each parametrized by the disk of radius ½
/// through radial scaling about an interior center.
#[derive(Clone, Debug, PartialEq)]
pub struct WedgeLayout {
    pub rho0: f64,
    /// Axis angles of the petals in degrees.
    pub axes: [f64; 3],
    /// Interior center of each petal as a fraction of `rho0` along its axis.
    pub center_fraction: f64,
}

impl Default for WedgeLayout {
    fn default() -> Self {
        WedgeLayout { rho0: 0.5, axes: [60.0, 180.0, 300.0], center_fraction: 0.5 }
    }
}

fn wrap180(d: f64) -> f64 {
    (d + 180.0).rem_euclid(360.0) - 180.0
}

impl WedgeLayout {
    pub fn center(&self, i: usize) -> P2 {
        polar(self.rho0 * self.center_fraction, self.axes[i - 1])
    }

    /// Boundary radius of petal `i` in direction `deg`, or `None` outside its sector.
    pub fn petal_radius(&self, i: usize, deg: f64) -> Option<f64> {
        let d = wrap180(deg - self.axes[i - 1]);
        (d.abs() <= 60.0).then(|| (self.rho0 * (1.5 * d).to_radians().cos()).max(0.0))
    }

    /// The petal whose sector contains direction `deg` and its boundary radius.
    pub fn outline(&self, deg: f64) -> (usize, f64) {
        (1..=3)
            .filter_map(|i| self.petal_radius(i, deg).map(|r| (i, r)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("petal sectors cover every direction")
    }

    pub fn contains(&self, i: usize, z: P2) -> bool {
        let r = norm(z);
        if r == 0.0 {
            return true;
        }
        self.petal_radius(i, angle_deg(z)).map_or(false, |rho| r <= rho + 1e-15)
    }

    pub fn petal_of(&self, z: P2) -> Option<usize> {
        if norm(z) == 0.0 {
            return None;
        }
        (1..=3).find(|&i| self.contains(i, z))
    }

    /// Distance from the center of petal `i` to its boundary in direction `deg`.
    pub fn exit_distance(&self, i: usize, deg: f64) -> f64 {
        let c = self.center(i);
        let dir = polar(1.0, deg);
        let (mut lo, mut hi) = (0.0, 2.0 * self.rho0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.contains(i, [c[0] + mid * dir[0], c[1] + mid * dir[1]]) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Direction from the center of petal `i` to the wedge point.
    fn wedge_direction(&self, i: usize) -> f64 {
        let c = self.center(i);
        angle_deg([-c[0], -c[1]])
    }

    /// Coordinates `(t, a)` in the radius-½ model disk of a point of petal `i`.
    /// The wedge point has `(½, ½)`; the tip opposite it has `(½, 0)`.
    pub fn to_model(&self, i: usize, z: P2) -> (f64, f64) {
        let c = self.center(i);
        let d = [z[0] - c[0], z[1] - c[1]];
        let rad = norm(d);
        if rad == 0.0 {
            return (0.0, 0.0);
        }
        let psi = angle_deg(d);
        let t = (0.5 * rad / self.exit_distance(i, psi)).min(0.5);
        let a = (0.5 + (psi - self.wedge_direction(i)) / 360.0).rem_euclid(1.0);
        (t, a)
    }

    /// Inverse of [`WedgeLayout::to_model`].
    pub fn from_model(&self, i: usize, t: f64, a: f64) -> P2 {
        let c = self.center(i);
        let psi = self.wedge_direction(i) + 360.0 * (a - 0.5);
        let p = polar(2.0 * t * self.exit_distance(i, psi), psi);
        [c[0] + p[0], c[1] + p[1]]
    }

    /// Point on the boundary of the petals in direction `deg`.
    pub fn outline_point(&self, deg: f64) -> P2 {
        polar(self.outline(deg).1, deg)
    }
}

/// The shared data of the wedge constructions.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Wedge {
    pub circle: CirclePath,
    pub layout: WedgeLayout,
}

impl Wedge {
    fn model_value(&self, i: usize, t: f64, a: f64) -> Vec<P2> {
        let t = t.min(0.5);
        let circle = &self.circle;
        let path = |tau: f64| circle.path(i, tau);
        g_p(path, polar(t, 360.0 * a))
    }

    /// Value on the petals (including their boundaries), if `z` lies on one.
    fn petal_value(&self, z: P2) -> Option<Vec<P2>> {
        if norm(z) == 0.0 {
            return Some(vec![self.circle.mark(1), self.circle.mark(2), self.circle.mark(3)]);
        }
        let i = self.layout.petal_of(z)?;
        let (t, a) = self.layout.to_model(i, z);
        Some(self.model_value(i, t, a))
    }

    /// Value at the petal boundary point in direction `deg`.
    fn outline_value(&self, deg: f64) -> Vec<P2> {
        let (i, rho) = self.layout.outline(deg);
        if rho <= 0.0 {
            return vec![self.circle.mark(1), self.circle.mark(2), self.circle.mark(3)];
        }
        let (_, a) = self.layout.to_model(i, polar(rho, deg));
        self.model_value(i, 0.5, a)
    }

    /// `h_C`: `g_{P_i}` on petal `i`, and outside the petals the outline
    /// value shrunk linearly to the origin, reaching it on the unit circle.
    pub fn h_c(&self, z: P2) -> Vec<P2> {
        if let Some(v) = self.petal_value(z) {
            return v;
        }
        let deg = angle_deg(z);
        let rho = self.layout.outline(deg).1;
        let r = norm(z).min(1.0);
        let lambda = ((r - rho) / (1.0 - rho)).clamp(0.0, 1.0);
        let c = self.circle.center;
        self.outline_value(deg)
            .into_iter()
            .map(|p| [c[0] + (1.0 - lambda) * (p[0] - c[0]), c[1] + (1.0 - lambda) * (p[1] - c[1])])
            .collect()
    }

    /// `f1`: `h_C` on the petals, constant along radial segments outside.
    pub fn f1(&self, z: P2) -> Vec<P2> {
        self.petal_value(z).unwrap_or_else(|| self.outline_value(angle_deg(z)))
    }

    /// Boundary point of petal `i` reached from `A_i + δ` (degrees) on the circle.
    fn arc_image(&self, i: usize, delta: f64) -> P2 {
        let deg = self.layout.axes[i - 1] + delta;
        let rho = self.layout.petal_radius(i, deg).unwrap_or(0.0);
        polar(rho, deg)
    }

    /// `f2` on the circle: arc `α_i` (within 60° of `A_i`) runs once around
    /// the boundary of petal `i`, ends at the wedge point, `A_i` at the tip.
    pub fn f2_on_circle(&self, deg: f64) -> P2 {
        let (i, delta) = (1..=3)
            .map(|i| (i, wrap180(deg - self.circle.marks[i - 1])))
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap();
        self.arc_image(i, delta)
    }

    /// `f2` on the whole disk: coned to the origin inside the circle and
    /// constant along rays outside it.
    pub fn f2(&self, x: P2) -> P2 {
        let c = self.circle.center;
        let d = [x[0] - c[0], x[1] - c[1]];
        let r = norm(d);
        if r == 0.0 {
            return [0.0, 0.0];
        }
        let y = self.f2_on_circle(angle_deg(d));
        let s = (r / self.circle.radius).min(1.0);
        [s * y[0], s * y[1]]
    }

    /// The petal tip of petal `i`, diametrically opposite the wedge point.
    pub fn tip(&self, i: usize) -> P2 {
        self.arc_image(i, 0.0)
    }

    pub fn sample_h_c(&self, resolution: usize) -> Result<GridMultifunction> {
        sample_multifunction(2, 2, resolution, 3, |u| to_subset(&self.h_c(square_to_disk(u)), disk_to_cube))
    }

    pub fn sample_f1(&self, resolution: usize) -> Result<GridMultifunction> {
        sample_multifunction(2, 2, resolution, 3, |u| to_subset(&self.f1(square_to_disk(u)), disk_to_cube))
    }

    pub fn sample_f2(&self, resolution: usize) -> Result<GridMultifunction> {
        sample_multifunction(2, 2, resolution, 1, |v| to_subset(&[self.f2(cube_to_disk(v))], disk_to_square_p2))
    }
}

fn disk_to_square_p2(z: P2) -> [f64; 2] {
    disk_to_square(z)
}

/// `g_{P_i}` on the domain square for the default circle.
pub fn sample_g_p(resolution: usize, i: usize) -> Result<GridMultifunction> {
    let circle = CirclePath::default();
    sample_multifunction(2, 2, resolution, 3, |u| {
        to_subset(&g_p(|tau| circle.path(i, tau), square_to_disk(u)), disk_to_cube)
    })
}

/// The `d`-th roots `z ↦ {w : w^d = z}` on the unit disk, sampled on the
/// domain square. With `pinch`, the roots are pulled to the origin over the
/// annulus `|z| ≥ ¾`, so the value on the boundary circle is the constant `{0}`.
pub fn root_cover(resolution: usize, degree: u32, pinch: bool) -> Result<GridMultifunction> {
    if degree == 0 {
        return Err(crate::Error::Precondition("root cover needs degree ≥ 1".into()));
    }
    let d = degree as f64;
    sample_multifunction(2, 2, resolution, degree as usize, |u| {
        let z = square_to_disk(u);
        let r = norm(z);
        let theta = angle_deg(z);
        let scale = r.powf(1.0 / d) * if pinch { (4.0 * (1.0 - r)).min(1.0) } else { 1.0 };
        let roots: Vec<P2> = (0..degree).map(|k| polar(scale, (theta + 360.0 * k as f64) / d)).collect();
        to_subset(&roots, disk_to_cube)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_cover_values() {
        let f = root_cover(8, 3, false).unwrap();
        let corner = f.node_at(&[8, 4]);
        assert_eq!(f.value(corner).len(), 3);
        let centre = f.node_at(&[4, 4]);
        assert_eq!(f.value(centre).len(), 1);
        let pinched = root_cover(8, 2, true).unwrap();
        assert_eq!(pinched.constant_boundary_value().unwrap().coords(), &[0.5, 0.5]);
    }

    fn close(a: P2, b: P2) -> bool {
        (a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9
    }

    fn same_set(a: &[P2], b: &[P2]) -> bool {
        a.iter().all(|p| b.iter().any(|q| close(*p, *q))) && b.iter().all(|p| a.iter().any(|q| close(*p, *q)))
    }

    #[test]
    fn paths_run_over_the_complementary_arcs() {
        let c = CirclePath::default();
        assert!(close(c.path(1, 0.0), c.mark(3)));
        assert!(close(c.path(1, 0.5), c.mark(1)));
        assert!(close(c.path(1, 1.0), c.mark(2)));
        for i in 1..=3 {
            assert!(close(c.path(i, 0.5), c.mark(i)));
        }
    }

    #[test]
    fn g_p_values() {
        let c = CirclePath::default();
        let p = |t: f64| c.path(1, t);
        assert!(same_set(&g_p(p, [0.0, 0.0]), &[p(0.0)]));
        assert!(same_set(&g_p(p, [0.25, 0.0]), &[p(0.0), p(0.5)]));
        assert!(same_set(&g_p(p, [-0.25, 0.0]), &[p(0.0), p(0.5), p(0.25)]));
        assert!(same_set(&g_p(p, [1.0, 0.0]), &[[0.0, 0.0]]));
    }

    #[test]
    fn square_disk_roundtrip() {
        for &u in &[[0.1, 0.9], [0.5, 0.5], [0.0, 0.3], [0.77, 0.21]] {
            let back = disk_to_square(square_to_disk(&u));
            assert!((back[0] - u[0]).abs() < 1e-12 && (back[1] - u[1]).abs() < 1e-12);
        }
        assert!((norm(square_to_disk(&[1.0, 0.3])) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn petals_meet_only_at_the_origin() {
        let l = WedgeLayout::default();
        for k in 0..720 {
            let deg = k as f64 * 0.5;
            let inside = (1..=3).filter(|&i| l.petal_radius(i, deg).map_or(false, |r| r > 1e-9)).count();
            assert!(inside <= 1, "direction {deg}");
        }
        for i in 1..=3 {
            let (t, a) = l.to_model(i, [0.0, 0.0]);
            assert!((t - 0.5).abs() < 1e-9 && (a - 0.5).abs() < 1e-9);
            let z = l.from_model(i, 0.3, 0.7);
            let (t, a) = l.to_model(i, z);
            assert!((t - 0.3).abs() < 1e-9 && (a - 0.7).abs() < 1e-9);
        }
    }

    #[test]
    fn h_c_special_values() {
        let w = Wedge::default();
        let c = &w.circle;
        assert!(same_set(&w.h_c([0.0, 0.0]), &[c.mark(1), c.mark(2), c.mark(3)]));
        assert!(same_set(&w.h_c([0.0, 1.0]), &[[0.0, 0.0]]));
        assert!(same_set(&w.h_c(polar(1.0, 17.0)), &[[0.0, 0.0]]));
        let center = w.layout.center(1);
        assert!(same_set(&w.h_c(center), &[c.path(1, 0.0)]));
        // near the wedge point the value approaches {A1, A2, A3} from every side
        for k in 0..12 {
            let v = w.h_c(polar(1e-7, 30.0 * k as f64));
            assert!(v.iter().all(|p| (1..=3).any(|i| norm([p[0] - c.mark(i)[0], p[1] - c.mark(i)[1]]) < 1e-4)));
        }
    }

    #[test]
    fn f2_matches_the_arc_conditions() {
        let w = Wedge::default();
        for i in 1..=3 {
            assert!(close(w.f2(w.circle.mark(i)), w.tip(i)));
            let end = w.circle.marks[i - 1] + 60.0;
            assert!(norm(w.f2_on_circle(end)) < 1e-9);
        }
        let tip_value = w.f1(w.tip(1));
        assert!(same_set(&tip_value, &[w.circle.mark(2), w.circle.mark(3)]));
        assert!(same_set(&w.f1([0.0, 0.0]), &[w.circle.mark(1), w.circle.mark(2), w.circle.mark(3)]));
    }

    #[test]
    fn f1_takes_values_on_the_circle() {
        let w = Wedge::default();
        for k in 0..200 {
            let z = polar(0.995 * (k as f64 / 200.0).sqrt(), 7.3 * k as f64);
            for p in w.f1(z) {
                assert!((norm(p) - 0.5).abs() < 1e-9);
            }
        }
    }
}
