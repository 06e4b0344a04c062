//! Randomized property suites run by `homsel selftest`. Each suite checks
//! library results against a direct, slow computation.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::games::{bimatrix_solve, nash_search_with, Game, SearchMethod};
use crate::homology::{homology, smith_normal_form, snf, ChainComplex, HomologyGroup, SparseMatrix};
use crate::metric::{config_distance, forget_weights, hausdorff_distance, sup_metric, Configuration, FiniteSubset, Point};

#[derive(Debug, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub instances: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

fn suite(name: &'static str, instances: usize, mut check: impl FnMut(usize) -> Option<String>) -> SuiteResult {
    let mut failures = 0;
    let mut first_failure = None;
    for t in 0..instances {
        if let Some(why) = check(t) {
            failures += 1;
            first_failure.get_or_insert(format!("instance {t}: {why}"));
        }
    }
    SuiteResult { name, instances, failures, first_failure }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn det(m: &[Vec<i64>]) -> i64 {
    if m.is_empty() {
        return 1;
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..].iter().map(|r| [&r[..j], &r[j + 1..]].concat()).collect();
            if j % 2 == 0 {
                m[0][j] * det(&minor)
            } else {
                -m[0][j] * det(&minor)
            }
        })
        .sum()
}

fn choose(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n).filter(|s| s.count_ones() as usize == k).map(|s| (0..n).filter(|&i| s >> i & 1 == 1).collect()).collect()
}

/// Invariant factors as quotients of successive gcds of minors.
fn factors_by_minors(m: &[Vec<i64>]) -> Vec<BigInt> {
    let (rows, cols) = (m.len(), m[0].len());
    let mut out = Vec::new();
    let mut prev = 1;
    for k in 1..=rows.min(cols) {
        let mut d = 0;
        for rs in choose(rows, k) {
            for cs in choose(cols, k) {
                let sub: Vec<Vec<i64>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c]).collect()).collect();
                d = gcd(d, det(&sub));
            }
        }
        if d == 0 {
            break;
        }
        out.push(BigInt::from(d / prev));
        prev = d;
    }
    out
}

fn snf_suite(rng: &mut ChaCha8Rng, cases: usize) -> SuiteResult {
    suite("smith_normal_form", cases, |_| {
        let (rows, cols) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let m: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-5..=5)).collect()).collect();
        let s = smith_normal_form(&snf::from_i64(&m), rows, cols);
        if s.invariant_factors() != factors_by_minors(&m) {
            return Some(format!("{m:?}: invariant factors differ from minors"));
        }
        let umv = snf::mul(&snf::mul(&s.u, &snf::from_i64(&m), cols), &s.v, cols);
        (umv != s.s).then(|| format!("{m:?}: U·M·V ≠ S"))
    })
}

/// Simplicial chain complex of the closure of `facets`.
fn simplicial(facets: &[Vec<u32>]) -> ChainComplex {
    let top = facets.iter().map(|f| f.len()).max().unwrap_or(1);
    let mut cells: Vec<Vec<Vec<u32>>> = vec![Vec::new(); top];
    for f in facets {
        for mask in 1u32..1 << f.len() {
            let s: Vec<u32> = (0..f.len()).filter(|&i| mask >> i & 1 == 1).map(|i| f[i]).collect();
            cells[s.len() - 1].push(s);
        }
    }
    for c in cells.iter_mut() {
        c.sort();
        c.dedup();
    }
    let boundaries = (1..top)
        .map(|q| {
            let cols = cells[q]
                .iter()
                .map(|s| {
                    let mut col: Vec<(usize, i64)> = (0..s.len())
                        .map(|i| {
                            let face = [&s[..i], &s[i + 1..]].concat();
                            (cells[q - 1].binary_search(&face).unwrap(), if i % 2 == 0 { 1 } else { -1 })
                        })
                        .collect();
                    col.sort();
                    col
                })
                .collect();
            SparseMatrix::from_columns(cells[q - 1].len(), cols)
        })
        .collect();
    ChainComplex::new(cells.iter().map(|c| c.len()).collect(), boundaries).expect("simplicial boundary squares to zero")
}

fn standard_spaces_suite() -> SuiteResult {
    let z = |b: usize| HomologyGroup::free(b);
    let facets = |fs: &[&[u32]]| -> Vec<Vec<u32>> {
        fs.iter()
            .map(|f| {
                let mut f = f.to_vec();
                f.sort();
                f
            })
            .collect()
    };
    let torus: Vec<[u32; 3]> = (0..7).flat_map(|i| [[i, (i + 1) % 7, (i + 3) % 7], [i, (i + 2) % 7, (i + 3) % 7]]).collect();
    let torus: Vec<&[u32]> = torus.iter().map(|f| f.as_slice()).collect();
    let rp2: [&[u32]; 10] =
        [&[0, 1, 2], &[0, 2, 3], &[0, 3, 4], &[0, 4, 5], &[0, 1, 5], &[1, 2, 4], &[2, 3, 5], &[1, 3, 4], &[2, 4, 5], &[1, 3, 5]];
    let cases: Vec<(&str, ChainComplex, Vec<HomologyGroup>)> = vec![
        ("circle", simplicial(&facets(&[&[0, 1], &[1, 2], &[0, 2]])), vec![z(1), z(1)]),
        ("sphere", simplicial(&facets(&[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]])), vec![z(1), z(0), z(1)]),
        ("torus", simplicial(&facets(&torus)), vec![z(1), z(2), z(1)]),
        ("projective plane", simplicial(&facets(&rp2)), vec![z(1), HomologyGroup { betti: 0, torsion: vec![2] }, z(0)]),
    ];
    suite("standard_spaces", cases.len(), |t| {
        let (name, c, want) = &cases[t];
        (0..want.len())
            .find(|&q| homology(c, q).ok().as_ref() != Some(&want[q]))
            .map(|q| format!("{name}: H_{q} differs from {}", want[q]))
    })
}

fn point(rng: &mut ChaCha8Rng, dim: usize) -> Point {
    Point::new((0..dim).map(|_| rng.gen_range(0..=8) as f64 / 8.0).collect()).expect("coordinates in [0,1]")
}

fn raw_sup(a: &Point, b: &Point) -> f64 {
    a.coords().iter().zip(b.coords()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    permutations(n - 1)
        .into_iter()
        .flat_map(|p| {
            (0..=p.len()).map(move |i| {
                let mut q = p.clone();
                q.insert(i, n - 1);
                q
            })
        })
        .collect()
}

fn metric_suite(rng: &mut ChaCha8Rng, cases: usize) -> SuiteResult {
    suite("metric_axioms", cases, |_| {
        let dim = rng.gen_range(1..=3);
        let (x, y, z) = (point(rng, dim), point(rng, dim), point(rng, dim));
        let d = |a: &Point, b: &Point| sup_metric(a, b).unwrap();
        if d(&x, &y) != raw_sup(&x, &y) || d(&x, &y) != d(&y, &x) || d(&x, &z) > d(&x, &y) + d(&y, &z) + 1e-12 {
            return Some("sup metric".into());
        }
        let (na, nb) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let mut set = |n: usize| FiniteSubset::from_points((0..n).map(|_| point(rng, dim)).collect()).unwrap();
        let (a, b) = (set(na), set(nb));
        let dir = |p: &FiniteSubset, q: &FiniteSubset| {
            p.points().iter().map(|u| q.points().iter().map(|v| raw_sup(u, v)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
        };
        if (hausdorff_distance(&a, &b).unwrap() - dir(&a, &b).max(dir(&b, &a))).abs() > 1e-12 {
            return Some("Hausdorff distance".into());
        }
        let k = rng.gen_range(1..=5);
        let mut conf = || Configuration::from_pairs((0..k).map(|_| (point(rng, dim), 1)).collect()).unwrap();
        let (u, v) = (conf(), conf());
        let (xs, ys) = (u.expanded(), v.expanded());
        let brute = permutations(k)
            .iter()
            .map(|p| p.iter().enumerate().map(|(i, &j)| raw_sup(xs[j], ys[i])).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        let dk = config_distance(&u, &v).unwrap();
        if (dk - brute).abs() > 1e-12 {
            return Some("configuration distance".into());
        }
        (hausdorff_distance(&forget_weights(&u), &forget_weights(&v)).unwrap() > dk + 1e-12)
            .then(|| "forgetting weights is not 1-Lipschitz".into())
    })
}

fn bimatrix_suite(rng: &mut ChaCha8Rng, cases: usize) -> SuiteResult {
    suite("bimatrix_vs_grid", cases, |_| {
        let mut m = || [[0.0; 2]; 2].map(|r: [f64; 2]| r.map(|_| rng.gen_range(-1.0..1.0)));
        let (m1, m2) = (m(), m());
        let g = Game::bilinear(m1, m2);
        let grid = match nash_search_with(&g, 256, 1e-2, SearchMethod::Exhaustive) {
            Ok(r) => r,
            Err(e) => return Some(e.to_string()),
        };
        if grid.certificates.iter().any(|c| !c.audit(&g).unwrap_or(false)) {
            return Some("certificate fails its audit".into());
        }
        bimatrix_solve(m1, m2)
            .equilibria
            .iter()
            .find(|e| {
                !grid.certificates.iter().any(|c| c.point.iter().zip(&e.x).all(|(a, b)| (a - b).abs() <= 1.0 / 128.0 + 1e-12))
            })
            .map(|e| format!("equilibrium {:?} of {m1:?}, {m2:?} not found on the grid", e.x))
    })
}

pub fn run(seed: u64, cases: usize) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let suites = vec![
        snf_suite(&mut rng, cases),
        standard_spaces_suite(),
        metric_suite(&mut rng, cases),
        bimatrix_suite(&mut rng, (cases / 10).max(1)),
    ];
    let passed = suites.iter().all(|s| s.failures == 0);
    SelftestReport { seed, suites, passed }
}
