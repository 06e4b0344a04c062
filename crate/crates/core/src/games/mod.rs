//! N-player games on cube strategy spaces `A_i = [0,1]^{n_i}`, best
//! responses on grids, equilibrium search and the exact 2×2 solver.
//!
//! A profile is the concatenation of all players' strategies. Grids have
//! `resolution` intervals per axis with the first axis varying slowest.

mod bimatrix;
mod search;

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{FiniteSubset, Point};
use crate::multifunction::{build_strand_system, lift_to_configuration, GridMultifunction, LiftOutcome};

pub use bimatrix::{bimatrix_solve, BimatrixEquilibrium, BimatrixSolution, Matrix2};
pub use search::{
    cluster_certificates, column_min, nash_search, nash_search_with, refine_intersection, regrets, EquilibriumCertificate,
    RefineOptions, RefineReport, RefineRung, SearchMethod, SearchReport,
};

pub type CostFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// `(i, profile, resolution) ↦ min over player i's grid of r_i(·, a_{−i})`,
/// computed faster than a full scan. Certificates are always re-audited by
/// full scans.
pub type ColumnMinFn = Arc<dyn Fn(usize, &[f64], usize) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct Game {
    name: String,
    dims: Vec<usize>,
    offsets: Vec<usize>,
    costs: Vec<CostFn>,
    lipschitz: Option<f64>,
    column_min: Option<ColumnMinFn>,
}

impl fmt::Debug for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Game").field("name", &self.name).field("dims", &self.dims).finish()
    }
}

impl Game {
    pub fn new(name: impl Into<String>, dims: Vec<usize>, costs: Vec<CostFn>) -> Result<Game> {
        if dims.is_empty() || dims.len() != costs.len() || dims.iter().any(|&n| n == 0) {
            return Err(Error::InvalidConfiguration("dims and costs must be nonempty and of equal length".into()));
        }
        let mut offsets = vec![0];
        for &n in &dims {
            offsets.push(offsets.last().unwrap() + n);
        }
        Ok(Game { name: name.into(), dims, offsets, costs, lipschitz: None, column_min: None })
    }

    /// Declares a sup-metric Lipschitz constant shared by all costs.
    pub fn with_lipschitz(mut self, l: f64) -> Game {
        self.lipschitz = Some(l);
        self
    }

    pub fn with_column_min(mut self, oracle: ColumnMinFn) -> Game {
        self.column_min = Some(oracle);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn players(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// `d_0 = Σ n_i`.
    pub fn total_dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// `d_i = d_0 − n_i`.
    pub fn complement_dim(&self, i: usize) -> usize {
        self.total_dim() - self.dims[i]
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub(crate) fn oracle_column_min(&self, i: usize, profile: &[f64], resolution: usize) -> Option<f64> {
        self.column_min.as_ref().map(|f| f(i, profile, resolution))
    }

    pub fn block(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// `r_i(a)`; rejects non-finite values.
    pub fn cost(&self, i: usize, profile: &[f64]) -> Result<f64> {
        if profile.len() != self.total_dim() {
            return Err(Error::DimensionMismatch { expected: self.total_dim(), got: profile.len() });
        }
        let c = (self.costs[i])(profile);
        if c.is_finite() {
            Ok(c)
        } else {
            Err(Error::NonFiniteCost(profile.to_vec()))
        }
    }

    /// The coordinates of `profile` outside player `i`'s block.
    pub fn complement(&self, i: usize, profile: &[f64]) -> Vec<f64> {
        let b = self.block(i);
        profile[..b.start].iter().chain(&profile[b.end..]).copied().collect()
    }

    /// Profile with complement `rest` and player `i` playing `own`.
    pub fn assemble(&self, i: usize, rest: &[f64], own: &[f64]) -> Vec<f64> {
        let b = self.block(i);
        let mut p = Vec::with_capacity(self.total_dim());
        p.extend_from_slice(&rest[..b.start]);
        p.extend_from_slice(own);
        p.extend_from_slice(&rest[b.start..]);
        p
    }

    /// Two players with one mixing probability each; `r_i = e(x_1)ᵀ M_i e(x_2)`
    /// where `e(x) = (x, 1 − x)`.
    pub fn bilinear(m1: Matrix2, m2: Matrix2) -> Game {
        let cost = |m: Matrix2| -> CostFn {
            Arc::new(move |a: &[f64]| {
                let (x, y) = (a[0], a[1]);
                x * y * m[0][0] + x * (1.0 - y) * m[0][1] + (1.0 - x) * y * m[1][0] + (1.0 - x) * (1.0 - y) * m[1][1]
            })
        };
        let slope_bound = |m: Matrix2| {
            let d1 = (m[0][0] - m[1][0]).abs().max((m[0][1] - m[1][1]).abs());
            let d2 = (m[0][0] - m[0][1]).abs().max((m[1][0] - m[1][1]).abs());
            d1 + d2
        };
        let l = slope_bound(m1).max(slope_bound(m2));
        Game::new("bimatrix", vec![1, 1], vec![cost(m1), cost(m2)]).unwrap().with_lipschitz(l)
    }

    pub fn matching_pennies() -> Game {
        let m1 = [[1.0, -1.0], [-1.0, 1.0]];
        let m2 = [[-1.0, 1.0], [1.0, -1.0]];
        let mut g = Game::bilinear(m1, m2);
        g.name = "matching_pennies".into();
        g
    }

    /// Builds a game from its JSON description.
    pub fn from_spec(spec: &GameSpec) -> Result<Game> {
        let game = match &spec.cost {
            CostSpec::Bilinear { matrices } => {
                if matrices.len() != 2 {
                    return Err(Error::Schema { path: "cost.matrices".into(), msg: "expected two 2x2 matrices".into() });
                }
                Game::bilinear(matrices[0], matrices[1])
            }
            CostSpec::Table { resolution, tables } => table_game(spec, *resolution, tables)?,
            CostSpec::Builtin { name, m1, m2 } => builtin(name, *m1, *m2)?,
        };
        if game.players() != spec.players || game.dims() != spec.dims.as_slice() {
            return Err(Error::Schema {
                path: "dims".into(),
                msg: format!("game has dims {:?}, description says {:?}", game.dims(), spec.dims),
            });
        }
        Ok(game)
    }

    /// Parses a builtin name such as `matching_pennies` or
    /// `bimatrix([[1,0],[0,1]],[[0,1],[1,0]])`, or else JSON text.
    pub fn parse(text: &str) -> Result<Game> {
        let t = text.trim();
        if t.starts_with('{') {
            let spec: GameSpec = serde_json::from_str(t)?;
            return Game::from_spec(&spec);
        }
        builtin(t, None, None)
    }
}

fn builtin(name: &str, m1: Option<Matrix2>, m2: Option<Matrix2>) -> Result<Game> {
    let bad = |msg: &str| Error::Schema { path: "cost.name".into(), msg: msg.into() };
    match name {
        "matching_pennies" => Ok(Game::matching_pennies()),
        "no_equilibrium" | "counterexample_5_2" => crate::constructions::counterexample_game(),
        "bimatrix" => match (m1, m2) {
            (Some(a), Some(b)) => Ok(Game::bilinear(a, b)),
            _ => Err(bad("bimatrix needs m1 and m2")),
        },
        _ if name.starts_with("bimatrix(") && name.ends_with(')') => {
            let inner = &name["bimatrix(".len()..name.len() - 1];
            let (a, b): (Matrix2, Matrix2) =
                serde_json::from_str(&format!("[{inner}]")).map_err(|e| bad(&format!("bad matrices: {e}")))?;
            Ok(Game::bilinear(a, b))
        }
        _ => Err(bad(&format!("unknown builtin game '{name}'"))),
    }
}

fn table_game(spec: &GameSpec, resolution: usize, tables: &[Vec<f64>]) -> Result<Game> {
    let d0: usize = spec.dims.iter().sum();
    let lat = Lattice::new(d0, resolution);
    if resolution == 0 || tables.len() != spec.players {
        return Err(Error::Schema { path: "cost.tables".into(), msg: "one table per player expected".into() });
    }
    for (i, t) in tables.iter().enumerate() {
        if t.len() != lat.len() {
            return Err(Error::Schema {
                path: format!("cost.tables[{i}]"),
                msg: format!("expected {} entries, found {}", lat.len(), t.len()),
            });
        }
        if let Some(j) = t.iter().position(|x| !x.is_finite()) {
            return Err(Error::Schema { path: format!("cost.tables[{i}][{j}]"), msg: "non-finite cost".into() });
        }
    }
    let costs = tables
        .iter()
        .map(|t| {
            let t = Arc::new(t.clone());
            Arc::new(move |a: &[f64]| lat.interpolate(&t, a)) as CostFn
        })
        .collect();
    Game::new("table", spec.dims.clone(), costs)
}

/// JSON description of a game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    pub players: usize,
    pub dims: Vec<usize>,
    pub cost: CostSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostSpec {
    Bilinear {
        matrices: Vec<Matrix2>,
    },
    /// Costs at the nodes of a profile grid, interpolated multilinearly.
    Table {
        resolution: usize,
        tables: Vec<Vec<f64>>,
    },
    Builtin {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m1: Option<Matrix2>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m2: Option<Matrix2>,
    },
}

/// Regular grid on `[0,1]^axes` with `resolution` intervals per axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub axes: usize,
    pub resolution: usize,
}

impl Lattice {
    pub fn new(axes: usize, resolution: usize) -> Self {
        Lattice { axes, resolution }
    }

    pub fn side(&self) -> usize {
        self.resolution + 1
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.axes as u32)
    }

    pub fn step(&self) -> f64 {
        1.0 / self.resolution as f64
    }

    pub fn node(&self, mut idx: usize) -> Vec<usize> {
        let mut j = vec![0; self.axes];
        for a in (0..self.axes).rev() {
            j[a] = idx % self.side();
            idx /= self.side();
        }
        j
    }

    pub fn index(&self, j: &[usize]) -> usize {
        j.iter().fold(0, |acc, &x| acc * self.side() + x)
    }

    pub fn coords(&self, idx: usize) -> Vec<f64> {
        self.node(idx).into_iter().map(|x| x as f64 / self.resolution as f64).collect()
    }

    /// Multilinear interpolation of node values at `x`.
    pub fn interpolate(&self, values: &[f64], x: &[f64]) -> f64 {
        let r = self.resolution as f64;
        let mut base = Vec::with_capacity(self.axes);
        let mut frac = Vec::with_capacity(self.axes);
        for &v in x {
            let s = v.clamp(0.0, 1.0) * r;
            let b = (s.floor() as usize).min(self.resolution.saturating_sub(1));
            base.push(b);
            frac.push(s - b as f64);
        }
        let mut total = 0.0;
        for corner in 0..(1usize << self.axes) {
            let mut w = 1.0;
            let mut idx = 0;
            for a in 0..self.axes {
                let up = (corner >> (self.axes - 1 - a)) & 1;
                w *= if up == 1 { frac[a] } else { 1.0 - frac[a] };
                idx = idx * self.side() + base[a] + up;
            }
            if w != 0.0 {
                total += w * values[idx];
            }
        }
        total
    }

    /// Indices of the axis neighbours of node `idx`.
    pub fn neighbours(&self, idx: usize) -> Vec<usize> {
        let j = self.node(idx);
        let mut out = Vec::with_capacity(2 * self.axes);
        let mut stride = 1;
        for a in (0..self.axes).rev() {
            if j[a] > 0 {
                out.push(idx - stride);
            }
            if j[a] < self.resolution {
                out.push(idx + stride);
            }
            stride *= self.side();
        }
        out
    }
}

/// Which minimizers count as best responses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgminMode {
    /// Grid points within the tolerance of the global minimum.
    #[default]
    Global,
    /// Discrete local minima: no axis neighbour is strictly cheaper.
    Local,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResponseOptions {
    pub resolution: usize,
    pub tol: f64,
    pub mode: ArgminMode,
    /// Cardinality bound `k` for the represented response.
    pub bound: usize,
}

impl ResponseOptions {
    pub fn new(resolution: usize, tol: f64) -> Self {
        ResponseOptions { resolution, tol, mode: ArgminMode::Global, bound: 3 }
    }
}

/// Clustered argmin set of one player at one opponent profile.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BestResponse {
    /// One representative per component, cheapest first.
    pub representatives: Vec<Vec<f64>>,
    pub costs: Vec<f64>,
    /// Every selected grid point, in grid order.
    pub selected: Vec<Vec<f64>>,
    pub min_cost: f64,
    /// Some component contains several grid points of equal minimal cost.
    pub plateau: bool,
    /// More components than the cardinality bound.
    pub exceeds_bound: bool,
}

impl BestResponse {
    pub fn components(&self) -> usize {
        self.representatives.len()
    }

    /// The (at most `bound`) cheapest representatives as a finite subset.
    pub fn to_subset(&self, bound: usize) -> Result<FiniteSubset> {
        let pts = self
            .representatives
            .iter()
            .take(bound.max(1))
            .map(|p| Point::new(p.clone()))
            .collect::<Result<Vec<_>>>()?;
        FiniteSubset::from_points(pts)
    }
}

/// Own-grid costs of player `i` against the complement of `profile`.
pub(crate) fn own_costs(game: &Game, i: usize, profile: &[f64], resolution: usize) -> Result<Vec<f64>> {
    let own = Lattice::new(game.dims()[i], resolution);
    let rest = game.complement(i, profile);
    (0..own.len()).map(|k| game.cost(i, &game.assemble(i, &rest, &own.coords(k)))).collect()
}

pub(crate) fn select_argmin(own: &Lattice, costs: &[f64], tol: f64, mode: ArgminMode) -> Vec<bool> {
    let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
    match mode {
        ArgminMode::Global => costs.iter().map(|&c| c <= min + tol).collect(),
        ArgminMode::Local => {
            (0..costs.len()).map(|k| own.neighbours(k).iter().all(|&nb| costs[k] <= costs[nb])).collect()
        }
    }
}

/// `R_i(a_{−i})` on the own grid of player `i`.
pub fn best_response(game: &Game, i: usize, profile: &[f64], opts: &ResponseOptions) -> Result<BestResponse> {
    if !(opts.tol > 0.0) {
        return Err(Error::NonPositiveEpsilon(opts.tol));
    }
    let own = Lattice::new(game.dims()[i], opts.resolution);
    let costs = own_costs(game, i, profile, opts.resolution)?;
    let selected = select_argmin(&own, &costs, opts.tol, opts.mode);
    let min_cost = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let mut seen = vec![false; costs.len()];
    let mut reps: Vec<(f64, usize)> = Vec::new();
    let mut plateau = false;
    for start in 0..costs.len() {
        if !selected[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut members = Vec::new();
        while let Some(k) = queue.pop_front() {
            members.push(k);
            for nb in own.neighbours(k) {
                if selected[nb] && !seen[nb] {
                    seen[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
        let best = *members.iter().min_by(|&&a, &&b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b))).unwrap();
        let flat = 1e-12 * (1.0 + costs[best].abs());
        if members.iter().filter(|&&k| costs[k] - costs[best] <= flat).count() > 1 {
            plateau = true;
        }
        reps.push((costs[best], best));
    }
    reps.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(BestResponse {
        exceeds_bound: reps.len() > opts.bound,
        representatives: reps.iter().map(|&(_, k)| own.coords(k)).collect(),
        costs: reps.iter().map(|&(c, _)| c).collect(),
        selected: (0..costs.len()).filter(|&k| selected[k]).map(|k| own.coords(k)).collect(),
        min_cost,
        plateau,
    })
}

/// Best responses of one player at every node of the opponents' grid.
#[derive(Clone, Debug, Serialize)]
pub struct BestResponseField {
    pub player: usize,
    pub field: GridMultifunction,
    pub tol: f64,
    pub mode: ArgminMode,
    /// Number of argmin components at each node (before truncation to `k`).
    pub clusters: Vec<usize>,
    pub plateau_nodes: Vec<usize>,
    pub truncated_nodes: Vec<usize>,
}

pub fn response_field(game: &Game, i: usize, opts: &ResponseOptions) -> Result<BestResponseField> {
    let d = game.complement_dim(i);
    if d == 0 {
        return Err(Error::Precondition("a one-player game has no opponent grid".into()));
    }
    let lat = Lattice::new(d, opts.resolution);
    let own_zero = vec![0.0; game.dims()[i]];
    let responses = (0..lat.len())
        .into_par_iter()
        .map(|v| best_response(game, i, &game.assemble(i, &lat.coords(v), &own_zero), opts))
        .collect::<Result<Vec<_>>>()?;
    let values = responses.iter().map(|r| r.to_subset(opts.bound)).collect::<Result<Vec<_>>>()?;
    let field = GridMultifunction::new(d, game.dims()[i], opts.resolution, opts.bound, values)?;
    Ok(BestResponseField {
        player: i,
        field,
        tol: opts.tol,
        mode: opts.mode,
        clusters: responses.iter().map(|r| r.components()).collect(),
        plateau_nodes: (0..responses.len()).filter(|&v| responses[v].plateau).collect(),
        truncated_nodes: (0..responses.len()).filter(|&v| responses[v].exceeds_bound).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PolynomialVerdict {
    /// A continuous weighted lift of total weight `weight` exists on the
    /// grid; `exact` is false when some strands had to carry weight zero.
    Liftable { weight: u64, exact: bool },
    Obstructed,
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolynomialReport {
    pub verdict: PolynomialVerdict,
    pub strand_tol: f64,
    pub strands: usize,
    pub merges: usize,
    pub outcome: LiftOutcome,
}

/// Grid-scale check that a response field lifts to weighted configurations
/// of total weight `weight`. `strand_tol` defaults to the larger of the
/// field's modulus and its grid step.
pub fn polynomial_like_check(field: &GridMultifunction, weight: u64, strand_tol: Option<f64>) -> Result<PolynomialReport> {
    let tol = strand_tol.unwrap_or_else(|| field.modulus().max(field.step()) * (1.0 + 1e-9));
    let strands = build_strand_system(field, tol)?;
    let outcome = lift_to_configuration(field, &strands, weight)?;
    let verdict = match &outcome {
        LiftOutcome::Lifted(_) => PolynomialVerdict::Liftable { weight, exact: true },
        LiftOutcome::SubLift(_) => PolynomialVerdict::Liftable { weight, exact: false },
        LiftOutcome::Obstructed(_) => PolynomialVerdict::Obstructed,
        LiftOutcome::Undecided { .. } => PolynomialVerdict::Undecided,
    };
    Ok(PolynomialReport { verdict, strand_tol: tol, strands: strands.component_count, merges: strands.merges.len(), outcome })
}
