//! Homology-preserving elimination of cell pairs joined by a unit
//! boundary coefficient.
//!
//! Removing a pair `(σ, τ)` with `<∂σ, τ> = u = ±1` replaces every other
//! boundary `∂ρ` containing `τ` by `∂ρ - <∂ρ,τ> u ∂σ`. Chains are carried
//! forward through the projection onto the surviving cells, cochains through
//! the lift back into the original complex, so that cycle classes and
//! functionals on homology survive the reduction unchanged.

use rustc_hash::FxHashMap;

use super::complex::{ChainComplex, SparseMatrix};

type Col = FxHashMap<usize, i64>;

/// A chain complex under elimination. Boundaries and coboundaries are kept
/// in hash maps so that pairs can be removed in any order.
pub struct Reducer {
    alive: Vec<Vec<bool>>,
    bd: Vec<Vec<Col>>,
    cobd: Vec<Vec<Col>>,
    chains: Vec<(usize, Col)>,
    cochains: Vec<(usize, Col)>,
}

/// Entries are kept below this magnitude; pairs that could exceed it are skipped.
const ENTRY_LIMIT: i64 = 1 << 40;

/// Output of [`Reducer::finish`].
pub struct Reduced {
    pub complex: ChainComplex,
    /// Original index of each surviving cell, per degree.
    pub original: Vec<Vec<usize>>,
    /// Tracked chains rewritten in the surviving basis.
    pub chains: Vec<(usize, Vec<(usize, i64)>)>,
    /// Tracked cochains restricted to the surviving basis.
    pub cochains: Vec<(usize, Vec<(usize, i64)>)>,
}

impl Reducer {
    pub fn new(c: &ChainComplex) -> Self {
        let top = c.top_degree();
        let alive = c.counts().iter().map(|&n| vec![true; n]).collect();
        let mut bd: Vec<Vec<Col>> = c.counts().iter().map(|&n| vec![Col::default(); n]).collect();
        let mut cobd: Vec<Vec<Col>> = c.counts().iter().map(|&n| vec![Col::default(); n]).collect();
        for q in 1..=top {
            let b = c.boundary_ref(q).unwrap();
            for (j, col) in b.columns().iter().enumerate() {
                for &(i, v) in col {
                    bd[q][j].insert(i, v);
                    cobd[q - 1][i].insert(j, v);
                }
            }
        }
        Reducer { alive, bd, cobd, chains: Vec::new(), cochains: Vec::new() }
    }

    /// Tracks a chain of degree `q`; returns its handle.
    pub fn track_chain(&mut self, q: usize, v: &[(usize, i64)]) -> usize {
        self.chains.push((q, v.iter().copied().filter(|e| e.1 != 0).collect()));
        self.chains.len() - 1
    }

    /// Tracks a cochain (functional) on degree `q`; returns its handle.
    pub fn track_cochain(&mut self, q: usize, v: &[(usize, i64)]) -> usize {
        self.cochains.push((q, v.iter().copied().filter(|e| e.1 != 0).collect()));
        self.cochains.len() - 1
    }

    fn eliminate(&mut self, q: usize, sigma: usize, tau: usize) {
        let u = self.bd[q][sigma][&tau];
        debug_assert!(u == 1 || u == -1);
        let bsigma: Vec<(usize, i64)> = self.bd[q][sigma].iter().map(|(&k, &v)| (k, v)).collect();
        let others: Vec<(usize, i64)> =
            self.cobd[q - 1][tau].iter().filter(|(&r, _)| r != sigma).map(|(&r, &v)| (r, v)).collect();

        for (gen, col) in self.cochains.iter_mut() {
            if *gen == q {
                if let Some(&fs) = col.get(&sigma) {
                    for &(rho, c) in &others {
                        let e = col.entry(rho).or_insert(0);
                        *e -= c * u * fs;
                        if *e == 0 {
                            col.remove(&rho);
                        }
                    }
                }
                col.remove(&sigma);
            } else if *gen == q - 1 {
                col.remove(&tau);
            }
        }
        for (gen, ch) in self.chains.iter_mut() {
            if *gen == q - 1 {
                if let Some(zt) = ch.get(&tau).copied() {
                    for &(k, v) in &bsigma {
                        let e = ch.entry(k).or_insert(0);
                        *e -= zt * u * v;
                        if *e == 0 {
                            ch.remove(&k);
                        }
                    }
                }
                debug_assert!(!ch.contains_key(&tau));
            } else if *gen == q {
                ch.remove(&sigma);
            }
        }

        for &(rho, c) in &others {
            let f = c * u;
            for &(k, v) in &bsigma {
                let e = self.bd[q][rho].entry(k).or_insert(0);
                *e -= f * v;
                let nv = *e;
                if nv == 0 {
                    self.bd[q][rho].remove(&k);
                    self.cobd[q - 1][k].remove(&rho);
                } else {
                    self.cobd[q - 1][k].insert(rho, nv);
                }
            }
        }
        // drop sigma
        for &(k, _) in &bsigma {
            self.cobd[q - 1][k].remove(&sigma);
        }
        let cof: Vec<usize> = self.cobd[q][sigma].keys().copied().collect();
        for r in cof {
            self.bd[q + 1][r].remove(&sigma);
        }
        self.bd[q][sigma].clear();
        self.cobd[q][sigma].clear();
        self.alive[q][sigma] = false;
        // drop tau (its cofaces no longer see it)
        let tface: Vec<usize> = self.bd[q - 1][tau].keys().copied().collect();
        for k in tface {
            self.cobd[q - 2][k].remove(&tau);
        }
        debug_assert!(self.cobd[q - 1][tau].is_empty());
        self.bd[q - 1][tau].clear();
        self.cobd[q - 1][tau].clear();
        self.alive[q - 1][tau] = false;
    }

    /// Greedy elimination with increasing fill-in budget.
    pub fn run(&mut self) {
        let top = self.alive.len() - 1;
        for budget in [0usize, 1, 2, 4, 8, 16, 64, 256, usize::MAX] {
            loop {
                let mut progress = false;
                for q in (1..=top).rev() {
                    for sigma in 0..self.alive[q].len() {
                        if !self.alive[q][sigma] {
                            continue;
                        }
                        let bs = self.bd[q][sigma].len();
                        let mut best: Option<(usize, usize)> = None;
                        for (&tau, &v) in &self.bd[q][sigma] {
                            if v == 1 || v == -1 {
                                let cost = (self.cobd[q - 1][tau].len() - 1) * (bs - 1);
                                if best.map_or(true, |(_, c)| cost < c) {
                                    best = Some((tau, cost));
                                }
                            }
                        }
                        if let Some((tau, cost)) = best {
                            if cost <= budget && self.safe(q, sigma, tau) {
                                self.eliminate(q, sigma, tau);
                                progress = true;
                            }
                        }
                    }
                }
                if !progress {
                    break;
                }
            }
        }
    }

    pub fn finish(self) -> Reduced {
        let original: Vec<Vec<usize>> =
            self.alive.iter().map(|a| (0..a.len()).filter(|&i| a[i]).collect()).collect();
        let mut pos: Vec<FxHashMap<usize, usize>> = Vec::new();
        for ids in &original {
            pos.push(ids.iter().enumerate().map(|(k, &i)| (i, k)).collect());
        }
        let mut bs = Vec::new();
        for q in 1..original.len() {
            let cols = original[q]
                .iter()
                .map(|&c| self.bd[q][c].iter().map(|(r, &v)| (pos[q - 1][r], v)).collect())
                .collect();
            bs.push(SparseMatrix::from_columns(original[q - 1].len(), cols));
        }
        let counts = original.iter().map(|v| v.len()).collect();
        let complex = ChainComplex::new(counts, bs).expect("elimination preserves the complex axioms");
        let remap = |list: Vec<(usize, Col)>| -> Vec<(usize, Vec<(usize, i64)>)> {
            list.into_iter()
                .map(|(q, col)| {
                    let mut v: Vec<(usize, i64)> =
                        col.into_iter().filter_map(|(i, x)| pos[q].get(&i).map(|&k| (k, x))).collect();
                    v.sort();
                    (q, v)
                })
                .collect()
        };
        Reduced { complex, original, chains: remap(self.chains), cochains: remap(self.cochains) }
    }

    fn safe(&self, q: usize, sigma: usize, tau: usize) -> bool {
        let max_s = self.bd[q][sigma].values().map(|v| v.abs()).max().unwrap_or(0);
        let max_c = self.cobd[q - 1][tau].values().map(|v| v.abs()).max().unwrap_or(0);
        let bound = max_s.saturating_mul(max_c);
        if bound >= ENTRY_LIMIT {
            return false;
        }
        self.cobd[q - 1][tau].keys().all(|&rho| {
            self.bd[q][rho].values().all(|v| v.abs() < ENTRY_LIMIT - bound)
        })
    }
}

/// Reduces `c` with no tracked data.
pub fn reduce(c: &ChainComplex) -> ChainComplex {
    let mut r = Reducer::new(c);
    r.run();
    r.finish().complex
}
