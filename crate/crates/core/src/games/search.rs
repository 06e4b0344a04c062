use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::{own_costs, select_argmin, ArgminMode, Game, Lattice};
use crate::error::{Error, Result};
use crate::metric::sup_dist;

/// A grid profile whose regrets are all within `tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCertificate {
    pub point: Vec<f64>,
    /// `ρ_i = r_i(a*) − min over the grid of r_i(·, a*_{−i})`.
    pub regrets: Vec<f64>,
    pub tolerance: f64,
    pub resolution: usize,
}

impl EquilibriumCertificate {
    pub fn max_regret(&self) -> f64 {
        self.regrets.iter().copied().fold(0.0, f64::max)
    }

    /// Recomputes every regret by a full scan of each player's own grid.
    pub fn audit(&self, game: &Game) -> Result<bool> {
        let fresh = regrets(game, self.resolution, &self.point)?;
        Ok(fresh.iter().all(|&r| r <= self.tolerance)
            && fresh.iter().zip(&self.regrets).all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs())))
    }
}

/// `min over the own grid of r_i(·, a_{−i})`.
pub fn column_min(game: &Game, i: usize, resolution: usize, profile: &[f64]) -> Result<f64> {
    Ok(own_costs(game, i, profile, resolution)?.into_iter().fold(f64::INFINITY, f64::min))
}

/// Exact grid regrets of every player at `profile`.
pub fn regrets(game: &Game, resolution: usize, profile: &[f64]) -> Result<Vec<f64>> {
    (0..game.players())
        .map(|i| Ok((game.cost(i, profile)? - column_min(game, i, resolution, profile)?).max(0.0)))
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    /// Exhaustive for small grids, branch and bound when a Lipschitz
    /// constant is declared and the grid is large.
    #[default]
    Auto,
    Exhaustive,
    BranchAndBound,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub game: String,
    pub resolution: usize,
    pub tolerance: f64,
    pub method: SearchMethod,
    pub certificates: Vec<EquilibriumCertificate>,
    /// Exact maximal regret at `best_profile`.
    pub min_max_regret: f64,
    /// Every grid profile has maximal regret at least this large.
    pub min_max_regret_lower: f64,
    pub best_profile: Vec<f64>,
    pub evaluations: u64,
}

const EXHAUSTIVE_LIMIT: usize = 4_000_000;

pub fn nash_search(game: &Game, resolution: usize, tol: f64) -> Result<SearchReport> {
    nash_search_with(game, resolution, tol, SearchMethod::Auto)
}

pub fn nash_search_with(game: &Game, resolution: usize, tol: f64, method: SearchMethod) -> Result<SearchReport> {
    if !(tol > 0.0) {
        return Err(Error::NonPositiveEpsilon(tol));
    }
    if resolution == 0 {
        return Err(Error::InvalidGrid("resolution must be positive".into()));
    }
    let lat = Lattice::new(game.total_dim(), resolution);
    let method = match method {
        SearchMethod::Auto => {
            let work = lat.len().saturating_mul(game.players());
            if game.lipschitz().is_some() && work > EXHAUSTIVE_LIMIT {
                SearchMethod::BranchAndBound
            } else {
                SearchMethod::Exhaustive
            }
        }
        SearchMethod::BranchAndBound if game.lipschitz().is_none() => {
            return Err(Error::Precondition("branch and bound needs a Lipschitz constant".into()))
        }
        m => m,
    };
    let (candidates, best, lower, evaluations) = match method {
        SearchMethod::BranchAndBound => branch_and_bound(game, lat, tol)?,
        _ => exhaustive(game, lat, tol)?,
    };
    let best_profile = lat.coords(best);
    let min_max_regret = regrets(game, resolution, &best_profile)?.into_iter().fold(0.0, f64::max);
    let mut certs = Vec::new();
    for idx in candidates {
        let point = lat.coords(idx);
        let r = regrets(game, resolution, &point)?;
        if r.iter().all(|&x| x <= tol) {
            certs.push(EquilibriumCertificate { point, regrets: r, tolerance: tol, resolution });
        }
    }
    Ok(SearchReport {
        game: game.name().to_string(),
        resolution,
        tolerance: tol,
        method,
        certificates: cluster_certificates(certs, 2.0 / resolution as f64),
        min_max_regret,
        min_max_regret_lower: lower.min(min_max_regret),
        best_profile,
        evaluations,
    })
}

/// Keeps the lowest-regret certificate of every ball of radius `radius`,
/// processing certificates in order of increasing maximal regret.
pub fn cluster_certificates(mut certs: Vec<EquilibriumCertificate>, radius: f64) -> Vec<EquilibriumCertificate> {
    certs.sort_by(|a, b| {
        a.max_regret().total_cmp(&b.max_regret()).then_with(|| {
            a.point.iter().zip(&b.point).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
        })
    });
    let mut kept: Vec<EquilibriumCertificate> = Vec::new();
    for c in certs {
        if kept.iter().all(|k| sup_dist(&k.point, &c.point) > radius + 1e-12) {
            kept.push(c);
        }
    }
    kept
}

/// Column minima of player `i` over the whole opponent grid.
fn column_table(game: &Game, i: usize, resolution: usize) -> Result<Vec<f64>> {
    let comp = Lattice::new(game.complement_dim(i), resolution);
    let own_zero = vec![0.0; game.dims()[i]];
    (0..comp.len())
        .into_par_iter()
        .map(|v| fast_column_min(game, i, resolution, &game.assemble(i, &comp.coords(v), &own_zero)))
        .collect()
}

/// The game's column-minimum oracle if it has one, else a full scan.
fn fast_column_min(game: &Game, i: usize, resolution: usize, profile: &[f64]) -> Result<f64> {
    match game.oracle_column_min(i, profile, resolution) {
        Some(m) => Ok(m),
        None => column_min(game, i, resolution, profile),
    }
}

/// Index into the opponent grid of player `i` for a profile node.
fn complement_index(game: &Game, lat: &Lattice, i: usize, node: &[usize]) -> usize {
    let b = game.block(i);
    node[..b.start].iter().chain(&node[b.end..]).fold(0, |acc, &x| acc * lat.side() + x)
}

type Found = (Vec<usize>, usize, f64, u64);

fn exhaustive(game: &Game, lat: Lattice, tol: f64) -> Result<Found> {
    let tables =
        (0..game.players()).map(|i| column_table(game, i, lat.resolution)).collect::<Result<Vec<_>>>()?;
    let scores = (0..lat.len())
        .into_par_iter()
        .map(|idx| {
            let node = lat.node(idx);
            let p = lat.coords(idx);
            let mut worst = 0.0f64;
            for i in 0..game.players() {
                let r = game.cost(i, &p)? - tables[i][complement_index(game, &lat, i, &node)];
                worst = worst.max(r);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (idx, &s) in scores.iter().enumerate() {
        if s < scores[best] {
            best = idx;
        }
    }
    let candidates = (0..scores.len()).filter(|&i| scores[i] <= tol).collect();
    let evaluations = (2 * lat.len() * game.players()) as u64;
    Ok((candidates, best, scores[best], evaluations))
}

#[derive(Clone, Debug)]
struct Cell {
    lo: Vec<usize>,
    hi: Vec<usize>,
}

impl Cell {
    fn center(&self) -> Vec<usize> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (a + b) / 2).collect()
    }

    /// Sup distance in grid steps from the center to the farthest node.
    fn radius(&self) -> usize {
        let c = self.center();
        (0..c.len()).map(|a| (c[a] - self.lo[a]).max(self.hi[a] - c[a])).max().unwrap_or(0)
    }

    fn split(&self) -> Option<(Cell, Cell)> {
        let axis = (0..self.lo.len()).max_by_key(|&a| (self.hi[a] - self.lo[a], usize::MAX - a))?;
        if self.hi[axis] == self.lo[axis] {
            return None;
        }
        let mid = (self.lo[axis] + self.hi[axis]) / 2;
        let mut left = self.clone();
        left.hi[axis] = mid;
        let mut right = self.clone();
        right.lo[axis] = mid + 1;
        Some((left, right))
    }
}

struct Bounder<'a> {
    game: &'a Game,
    lat: Lattice,
    lip: f64,
    memo: FxHashMap<usize, f64>,
    evaluations: u64,
}

impl Bounder<'_> {
    /// Maximal regret at a node.
    fn score(&mut self, node: &[usize]) -> Result<f64> {
        let idx = self.lat.index(node);
        if let Some(&s) = self.memo.get(&idx) {
            return Ok(s);
        }
        let p = self.lat.coords(idx);
        let mut worst = 0.0f64;
        for i in 0..self.game.players() {
            let c = self.game.cost(i, &p)?;
            let m = fast_column_min(self.game, i, self.lat.resolution, &p)?;
            self.evaluations += 2;
            worst = worst.max(c - m);
        }
        self.memo.insert(idx, worst);
        Ok(worst)
    }

    fn lower(&mut self, cell: &Cell) -> Result<(f64, f64)> {
        let s = self.score(&cell.center())?;
        Ok((s, s - 2.0 * self.lip * cell.radius() as f64 * self.lat.step()))
    }
}

struct Queued {
    key: f64,
    seq: usize,
    cell: Cell,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.total_cmp(&self.key).then(other.seq.cmp(&self.seq))
    }
}

fn branch_and_bound(game: &Game, lat: Lattice, tol: f64) -> Result<Found> {
    let lip = game.lipschitz().expect("checked by caller");
    let mut b = Bounder { game, lat, lip, memo: FxHashMap::default(), evaluations: 0 };
    let root = Cell { lo: vec![0; lat.axes], hi: vec![lat.resolution; lat.axes] };

    // best-first descent for the smallest score
    let (s0, l0) = b.lower(&root)?;
    let mut best = (s0, lat.index(&root.center()));
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    heap.push(Queued { key: l0, seq, cell: root.clone() });
    while let Some(Queued { key, cell, .. }) = heap.pop() {
        if key >= best.0 {
            break;
        }
        if let Some((x, y)) = cell.split() {
            for child in [x, y] {
                let (s, l) = b.lower(&child)?;
                let idx = lat.index(&child.center());
                if s < best.0 || (s == best.0 && idx < best.1) {
                    best = (s, idx);
                }
                if l < best.0 && child.radius() > 0 {
                    seq += 1;
                    heap.push(Queued { key: l, seq, cell: child });
                }
            }
        }
    }

    // every node that might be within tolerance
    let mut candidates = Vec::new();
    let mut stack = vec![root];
    while let Some(cell) = stack.pop() {
        let (s, l) = b.lower(&cell)?;
        if s <= tol {
            candidates.push(lat.index(&cell.center()));
        }
        if l > tol {
            continue;
        }
        if let Some((x, y)) = cell.split() {
            stack.push(y);
            stack.push(x);
        }
    }
    candidates.sort_unstable();
    candidates.dedup();
    Ok((candidates, best.1, best.0, b.evaluations))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineOptions {
    /// Tolerance defining the grid argmin sets whose graphs are fattened.
    pub argmin_tol: f64,
    pub mode: ArgminMode,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions { argmin_tol: 1e-9, mode: ArgminMode::Global }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RefineRung {
    pub eps: f64,
    pub resolution: usize,
    pub witness_count: usize,
    /// One witness per cluster of radius two grid steps, lowest regret first.
    pub representatives: Vec<Vec<f64>>,
    pub tracked: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RefineReport {
    pub rungs: Vec<RefineRung>,
    /// The tracked witness at the last rung when no rung emptied.
    pub limit: Option<Vec<f64>>,
    /// Sup distances between tracked witnesses of consecutive rungs.
    pub cauchy_modulus: Vec<f64>,
    /// Index of the first rung whose fattened graphs do not meet.
    pub emptied_at: Option<usize>,
}

/// Intersects the `eps`-fattened grid graphs of all best responses on a
/// ladder of (eps, resolution) rungs and follows one witness across rungs.
pub fn refine_intersection(game: &Game, ladder: &[(f64, usize)], opts: &RefineOptions) -> Result<RefineReport> {
    if ladder.windows(2).any(|w| w[1].0 > w[0].0 || w[1].1 < w[0].1) {
        return Err(Error::Precondition("ladder must have decreasing eps and increasing resolution".into()));
    }
    let mut rungs = Vec::new();
    let mut cauchy = Vec::new();
    let mut emptied_at = None;
    let mut prev: Option<Vec<f64>> = None;
    for (k, &(eps, resolution)) in ladder.iter().enumerate() {
        if !(eps > 0.0) {
            return Err(Error::NonPositiveEpsilon(eps));
        }
        let lat = Lattice::new(game.total_dim(), resolution);
        if lat.len() > 1 << 26 {
            return Err(Error::InvalidGrid(format!("{} profiles is too many to fatten", lat.len())));
        }
        let (witness, scores) = fattened_intersection(game, lat, eps, opts)?;
        let mut order: Vec<usize> = (0..lat.len()).filter(|&i| witness[i]).collect();
        let witness_count = order.len();
        order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
        let radius = 2.0 * lat.step() + 1e-12;
        let mut reps: Vec<Vec<f64>> = Vec::new();
        for idx in order {
            let p = lat.coords(idx);
            if reps.iter().all(|q| sup_dist(q, &p) > radius) {
                reps.push(p);
            }
        }
        let tracked = match &prev {
            None => reps.first().cloned(),
            Some(q) => reps.iter().min_by(|a, b| sup_dist(a, q).total_cmp(&sup_dist(b, q))).cloned(),
        };
        if let (Some(q), Some(t)) = (&prev, &tracked) {
            cauchy.push(sup_dist(q, t));
        }
        let empty = reps.is_empty();
        rungs.push(RefineRung { eps, resolution, witness_count, representatives: reps, tracked: tracked.clone() });
        if empty {
            emptied_at = Some(k);
            break;
        }
        prev = tracked;
    }
    let limit = if emptied_at.is_none() { prev } else { None };
    Ok(RefineReport { rungs, limit, cauchy_modulus: cauchy, emptied_at })
}

/// Membership of every profile in all fattened graphs, and its maximal regret.
fn fattened_intersection(game: &Game, lat: Lattice, eps: f64, opts: &RefineOptions) -> Result<(Vec<bool>, Vec<f64>)> {
    let e = (eps / lat.step() + 1e-9).floor() as usize;
    let mut inside = vec![true; lat.len()];
    let mut scores = vec![0.0f64; lat.len()];
    for i in 0..game.players() {
        let comp = Lattice::new(game.complement_dim(i), lat.resolution);
        let own = Lattice::new(game.dims()[i], lat.resolution);
        let own_zero = vec![0.0; game.dims()[i]];
        let columns = (0..comp.len())
            .into_par_iter()
            .map(|v| {
                let costs = own_costs(game, i, &game.assemble(i, &comp.coords(v), &own_zero), lat.resolution)?;
                let chosen = select_argmin(&own, &costs, opts.argmin_tol, opts.mode);
                Ok((costs, chosen))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut near = vec![false; lat.len()];
        let b = game.block(i);
        for (v, (_, chosen)) in columns.iter().enumerate() {
            let rest = comp.node(v);
            for (k, _) in chosen.iter().enumerate().filter(|(_, &c)| c) {
                let mut center = rest[..b.start].to_vec();
                center.extend(own.node(k));
                center.extend_from_slice(&rest[b.start..]);
                mark_box(&lat, &center, e, &mut near);
            }
        }
        for idx in 0..lat.len() {
            inside[idx] &= near[idx];
            if inside[idx] {
                let node = lat.node(idx);
                let (costs, _) = &columns[complement_index(game, &lat, i, &node)];
                let own_idx = own.index(&node[b.clone()]);
                let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
                scores[idx] = scores[idx].max(costs[own_idx] - min);
            }
        }
    }
    Ok((inside, scores))
}

fn mark_box(lat: &Lattice, center: &[usize], e: usize, out: &mut [bool]) {
    let lo: Vec<usize> = center.iter().map(|&c| c.saturating_sub(e)).collect();
    let hi: Vec<usize> = center.iter().map(|&c| (c + e).min(lat.resolution)).collect();
    let mut cur = lo.clone();
    loop {
        out[lat.index(&cur)] = true;
        let mut a = lat.axes;
        loop {
            if a == 0 {
                return;
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
