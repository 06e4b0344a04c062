use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rustc_hash::{FxHashMap, FxHashSet};
use serde::Serialize;

use super::{GridMultifunction, StrandSystem};
use crate::error::{Error, Result};
use crate::metric::Configuration;

type Q = BigRational;

/// Integer strand weights realizing a configuration-valued lift.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigurationLift {
    pub total_weight: u64,
    /// Weight of each strand component.
    pub weights: Vec<u64>,
    /// Components forced to weight zero by the merge constraints.
    pub forced_zero: Vec<usize>,
}

impl ConfigurationLift {
    pub fn zero_components(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&c| self.weights[c] == 0).collect()
    }

    /// Weighted points at a node; zero-weight points are dropped.
    pub fn configuration_at(&self, f: &GridMultifunction, s: &StrandSystem, node: usize) -> Result<Configuration> {
        let pairs = f
            .value(node)
            .points()
            .iter()
            .enumerate()
            .map(|(j, p)| (p.clone(), self.weights[s.component_of(node, j)] as usize))
            .filter(|e| e.1 > 0)
            .collect();
        Configuration::from_pairs(pairs)
    }

    /// Node sums equal the total weight, merges are additive, and matched
    /// neighbors carry equal weights.
    pub fn verify(&self, f: &GridMultifunction, s: &StrandSystem) -> bool {
        let w = |node: usize, j: usize| self.weights[s.component_of(node, j)];
        let sums = (0..f.node_count()).all(|v| (0..f.value(v).len()).map(|j| w(v, j)).sum::<u64>() == self.total_weight);
        let merges = s.merges.iter().all(|r| {
            let l: u64 = r.left.iter().map(|&j| w(r.nodes.0, j)).sum();
            let rt: u64 = r.right.iter().map(|&j| w(r.nodes.1, j)).sum();
            l == rt
        });
        let edges = s.edges.iter().all(|e| w(e.from.0, e.from.1) == w(e.to.0, e.to.1));
        sums && merges && edges
    }
}

/// Why no lift with the requested total weight exists.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftCertificate {
    /// Components whose weight the merge constraints force to zero.
    pub forced_zero: Vec<usize>,
    pub all_forced_zero: bool,
    /// A node all of whose points lie on forced-zero components; its
    /// weights cannot add up to a positive total.
    pub empty_node: Option<usize>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LiftOutcome {
    /// Every strand carries positive weight.
    Lifted(ConfigurationLift),
    /// Weights exist only after dropping some strands (weight zero); the
    /// lift is of a sub-multifunction.
    SubLift(ConfigurationLift),
    Obstructed(LiftCertificate),
    /// The search budget ran out before a decision.
    Undecided { reason: String },
}

impl LiftOutcome {
    pub fn is_lifted(&self) -> bool {
        matches!(self, LiftOutcome::Lifted(_))
    }

    pub fn is_obstructed(&self) -> bool {
        matches!(self, LiftOutcome::Obstructed(_))
    }
}

struct Row {
    terms: BTreeMap<usize, Q>,
    rhs: Q,
}

enum Added {
    Redundant,
    Inconsistent,
    Pivot,
}

/// Reduced row echelon form over the rationals, maintained incrementally.
struct System {
    vars: usize,
    rows: Vec<Row>,
    pivot: FxHashMap<usize, usize>,
    occ: Vec<FxHashSet<usize>>,
}

impl System {
    fn new(vars: usize) -> Self {
        System { vars, rows: Vec::new(), pivot: FxHashMap::default(), occ: vec![FxHashSet::default(); vars] }
    }

    fn add(&mut self, terms: &FxHashMap<usize, i64>, rhs: i64) -> Added {
        let mut row: BTreeMap<usize, Q> = BTreeMap::new();
        for (&v, &c) in terms {
            if c != 0 {
                row.insert(v, Q::from_integer(BigInt::from(c)));
            }
        }
        let mut rhs = Q::from_integer(BigInt::from(rhs));
        let hits: Vec<(usize, usize)> = row.keys().filter_map(|v| self.pivot.get(v).map(|&r| (*v, r))).collect();
        for (v, r) in hits {
            let c = match row.get(&v) {
                Some(c) => c.clone(),
                None => continue,
            };
            let p = &self.rows[r];
            for (u, a) in &p.terms {
                let e = row.entry(*u).or_insert_with(Q::zero);
                *e -= &c * a;
                if e.is_zero() {
                    row.remove(u);
                }
            }
            rhs -= &c * &p.rhs;
        }
        if row.is_empty() {
            return if rhs.is_zero() { Added::Redundant } else { Added::Inconsistent };
        }
        let pv = *row.keys().min_by_key(|v| (self.occ[**v].len(), **v)).unwrap();
        let inv = row[&pv].recip();
        for a in row.values_mut() {
            *a *= &inv;
        }
        rhs *= &inv;
        let idx = self.rows.len();
        for &u in row.keys() {
            self.occ[u].insert(idx);
        }
        self.rows.push(Row { terms: row, rhs });
        self.pivot.insert(pv, idx);
        // clear pv from every other row
        let others: Vec<usize> = self.occ[pv].iter().copied().filter(|&r| r != idx).collect();
        for r in others {
            let c = self.rows[r].terms[&pv].clone();
            let (src_terms, src_rhs): (Vec<(usize, Q)>, Q) = {
                let p = &self.rows[idx];
                (p.terms.iter().map(|(u, a)| (*u, a.clone())).collect(), p.rhs.clone())
            };
            let tgt = &mut self.rows[r];
            for (u, a) in src_terms {
                let e = tgt.terms.entry(u).or_insert_with(Q::zero);
                *e -= &c * &a;
                if e.is_zero() {
                    tgt.terms.remove(&u);
                    self.occ[u].remove(&r);
                } else {
                    self.occ[u].insert(r);
                }
            }
            tgt.rhs -= &c * &src_rhs;
        }
        Added::Pivot
    }

    /// Variables whose pivot row reads `x = 0`.
    fn zero_vars(&self) -> Vec<usize> {
        let mut z: Vec<usize> = self
            .pivot
            .iter()
            .filter(|(_, &r)| self.rows[r].terms.len() == 1 && self.rows[r].rhs.is_zero())
            .map(|(&v, _)| v)
            .collect();
        z.sort_unstable();
        z
    }

    /// Applies nonnegativity: a row whose coefficients share a sign forces
    /// its variables to zero when the right side is zero, and is infeasible
    /// when the right side has the opposite sign. Returns false on
    /// infeasibility.
    fn propagate_sign(&mut self) -> bool {
        loop {
            let mut force: Vec<usize> = Vec::new();
            for row in &self.rows {
                if row.terms.len() < 2 && !(row.terms.len() == 1 && !row.rhs.is_zero()) {
                    continue;
                }
                let pos = row.terms.values().all(|a| a.is_positive());
                let neg = row.terms.values().all(|a| a.is_negative());
                if !(pos || neg) {
                    continue;
                }
                if row.rhs.is_zero() {
                    force.extend(row.terms.keys().copied());
                } else if (pos && row.rhs.is_negative()) || (neg && row.rhs.is_positive()) {
                    return false;
                }
            }
            let zeros: FxHashSet<usize> = self.zero_vars().into_iter().collect();
            force.retain(|v| !zeros.contains(v));
            force.sort_unstable();
            force.dedup();
            if force.is_empty() {
                return true;
            }
            for v in force {
                let mut t = FxHashMap::default();
                t.insert(v, 1);
                if let Added::Inconsistent = self.add(&t, 0) {
                    return false;
                }
            }
        }
    }
}

const SEARCH_BUDGET: u64 = 2_000_000;

/// Depth-first search for integer weights in `[lb, total]` satisfying the
/// reduced system; `Err(())` when the budget runs out.
fn search(sys: &System, total: u64, lb: u64, zero: &FxHashSet<usize>) -> std::result::Result<Option<Vec<u64>>, ()> {
    let free: Vec<usize> = (0..sys.vars).filter(|v| !sys.pivot.contains_key(v)).collect();
    let pos: FxHashMap<usize, usize> = free.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // pivot rows grouped by the deepest free variable they mention
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); free.len() + 1];
    for (&pv, &r) in &sys.pivot {
        let depth = sys.rows[r].terms.keys().filter(|&&u| u != pv).map(|u| pos[u] + 1).max().unwrap_or(0);
        ready[depth].push(pv);
    }
    let lower = |v: usize| if zero.contains(&v) { 0 } else { lb };
    let mut values = vec![0u64; sys.vars];
    let mut budget = SEARCH_BUDGET;

    let check = |values: &mut Vec<u64>, depth: usize| -> bool {
        for &pv in &ready[depth] {
            let row = &sys.rows[sys.pivot[&pv]];
            let mut x = row.rhs.clone();
            for (u, a) in &row.terms {
                if *u != pv {
                    x -= a * Q::from_integer(BigInt::from(values[*u]));
                }
            }
            if !x.is_integer() {
                return false;
            }
            let xi = x.to_integer();
            if xi.is_negative() || xi > BigInt::from(total) {
                return false;
            }
            let xi = xi.to_u64().unwrap();
            if xi < lower(pv) {
                return false;
            }
            values[pv] = xi;
        }
        true
    };

    if !check(&mut values, 0) {
        return Ok(None);
    }
    fn go(
        i: usize,
        free: &[usize],
        values: &mut Vec<u64>,
        budget: &mut u64,
        total: u64,
        lower: &dyn Fn(usize) -> u64,
        check: &dyn Fn(&mut Vec<u64>, usize) -> bool,
    ) -> std::result::Result<bool, ()> {
        if i == free.len() {
            return Ok(true);
        }
        let v = free[i];
        for x in lower(v)..=total {
            if *budget == 0 {
                return Err(());
            }
            *budget -= 1;
            values[v] = x;
            if check(values, i + 1) && go(i + 1, free, values, budget, total, lower, check)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
    match go(0, &free, &mut values, &mut budget, total, &lower, &check) {
        Ok(true) => Ok(Some(values)),
        Ok(false) => Ok(None),
        Err(()) => Err(()),
    }
}

/// Looks for integer weights, constant on strand components, additive at
/// merges and summing to `total` at every node.
pub fn lift_to_configuration(f: &GridMultifunction, s: &StrandSystem, total: u64) -> Result<LiftOutcome> {
    if total == 0 {
        return Err(Error::Precondition("total weight must be positive".into()));
    }
    if s.offsets.len() != f.node_count() + 1 {
        return Err(Error::Precondition("strand system was built for a different grid".into()));
    }
    let n = s.component_count;
    let mut sys = System::new(n);
    for r in &s.merges {
        let mut t: FxHashMap<usize, i64> = FxHashMap::default();
        for &j in &r.left {
            *t.entry(s.component_of(r.nodes.0, j)).or_insert(0) += 1;
        }
        for &j in &r.right {
            *t.entry(s.component_of(r.nodes.1, j)).or_insert(0) -= 1;
        }
        sys.add(&t, 0);
    }
    sys.propagate_sign();
    let forced = sys.zero_vars();
    let forced_set: FxHashSet<usize> = forced.iter().copied().collect();
    let empty_node = (0..f.node_count())
        .find(|&v| s.node_points(v).all(|id| forced_set.contains(&s.component[id])));
    let certificate = |reason: &str| LiftCertificate {
        forced_zero: forced.clone(),
        all_forced_zero: forced.len() == n,
        empty_node,
        reason: reason.to_string(),
    };
    if empty_node.is_some() {
        return Ok(LiftOutcome::Obstructed(certificate("a node carries only forced-zero strands")));
    }

    let t = i64::try_from(total).map_err(|_| Error::Precondition("total weight too large".into()))?;
    let mut seen: FxHashSet<Vec<(usize, i64)>> = FxHashSet::default();
    for v in 0..f.node_count() {
        let mut terms: FxHashMap<usize, i64> = FxHashMap::default();
        for id in s.node_points(v) {
            *terms.entry(s.component[id]).or_insert(0) += 1;
        }
        let mut key: Vec<(usize, i64)> = terms.iter().map(|(a, b)| (*a, *b)).collect();
        key.sort_unstable();
        if !seen.insert(key) {
            continue;
        }
        if let Added::Inconsistent = sys.add(&terms, t) {
            return Ok(LiftOutcome::Obstructed(certificate("node totals contradict the merge constraints")));
        }
    }
    if !sys.propagate_sign() {
        return Ok(LiftOutcome::Obstructed(certificate("no nonnegative solution of the node totals")));
    }
    let zeros: FxHashSet<usize> = sys.zero_vars().into_iter().collect();
    let outcome = |w: Vec<u64>| ConfigurationLift { total_weight: total, weights: w, forced_zero: forced.clone() };
    match search(&sys, total, 1, &zeros) {
        Ok(Some(w)) => {
            return Ok(if w.iter().all(|&x| x > 0) {
                LiftOutcome::Lifted(outcome(w))
            } else {
                LiftOutcome::SubLift(outcome(w))
            })
        }
        Ok(None) => {}
        Err(()) => return Ok(LiftOutcome::Undecided { reason: "search budget exhausted".into() }),
    }
    match search(&sys, total, 0, &zeros) {
        Ok(Some(w)) => Ok(LiftOutcome::SubLift(outcome(w))),
        Ok(None) => Ok(LiftOutcome::Obstructed(certificate("no nonnegative integer weights exist"))),
        Err(()) => Ok(LiftOutcome::Undecided { reason: "search budget exhausted".into() }),
    }
}
