#![allow(dead_code)]

use std::collections::BTreeSet;

use homsel::homology::{ChainComplex, SparseMatrix};
use homsel::metric::{Configuration, FiniteSubset, Point};

/// A simplicial complex given by its facets, with simplices stored as sorted
/// vertex lists in each degree.
pub struct Simplicial {
    pub simplices: Vec<Vec<Vec<u32>>>,
}

impl Simplicial {
    pub fn from_facets(facets: &[Vec<u32>]) -> Simplicial {
        let top = facets.iter().map(|f| f.len() - 1).max().unwrap();
        let mut sets: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new(); top + 1];
        for f in facets {
            let mut f = f.clone();
            f.sort();
            let n = f.len();
            for mask in 1u32..(1 << n) {
                let s: Vec<u32> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                sets[s.len() - 1].insert(s);
            }
        }
        Simplicial { simplices: sets.into_iter().map(|s| s.into_iter().collect()).collect() }
    }

    pub fn index(&self, s: &[u32]) -> Option<usize> {
        self.simplices.get(s.len() - 1)?.binary_search(&s.to_vec()).ok()
    }

    pub fn chain_complex(&self) -> ChainComplex {
        let counts: Vec<usize> = self.simplices.iter().map(|s| s.len()).collect();
        let mut boundaries = Vec::new();
        for q in 1..counts.len() {
            let columns = self.simplices[q]
                .iter()
                .map(|s| {
                    let mut col: Vec<(usize, i64)> = (0..s.len())
                        .map(|i| {
                            let mut face = s.clone();
                            face.remove(i);
                            (self.index(&face).unwrap(), if i % 2 == 0 { 1 } else { -1 })
                        })
                        .collect();
                    col.sort();
                    col
                })
                .collect();
            boundaries.push(SparseMatrix::from_columns(counts[q - 1], columns));
        }
        ChainComplex::new(counts, boundaries).unwrap()
    }

    /// Indices of the simplices all of whose vertices satisfy `keep`.
    pub fn sub_where(&self, keep: impl Fn(&[u32]) -> bool) -> Vec<Vec<usize>> {
        self.simplices.iter().map(|d| (0..d.len()).filter(|&i| keep(&d[i])).collect()).collect()
    }
}

pub fn boundary_of_simplex(n: u32) -> Vec<Vec<u32>> {
    (0..=n).map(|skip| (0..=n).filter(|&v| v != skip).collect()).collect()
}

pub fn circle() -> Simplicial {
    Simplicial::from_facets(&boundary_of_simplex(2))
}

pub fn sphere() -> Simplicial {
    Simplicial::from_facets(&boundary_of_simplex(3))
}

/// The seven-vertex torus.
pub fn torus() -> Simplicial {
    let facets: Vec<Vec<u32>> = (0..7u32)
        .flat_map(|i| [vec![i, (i + 1) % 7, (i + 3) % 7], vec![i, (i + 2) % 7, (i + 3) % 7]])
        .collect();
    Simplicial::from_facets(&facets)
}

/// The six-vertex projective plane.
pub fn projective_plane() -> Simplicial {
    let facets = [
        [0, 1, 2],
        [0, 2, 3],
        [0, 3, 4],
        [0, 4, 5],
        [0, 5, 1],
        [1, 2, 4],
        [2, 3, 5],
        [3, 4, 1],
        [4, 5, 2],
        [5, 1, 3],
    ];
    Simplicial::from_facets(&facets.iter().map(|f| f.to_vec()).collect::<Vec<_>>())
}

/// The `m`-simplex, a model of `D^m`.
pub fn simplex(m: u32) -> Simplicial {
    Simplicial::from_facets(&[(0..=m).collect()])
}

/// Subsets of `0..n` of size `k`, in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Determinant by cofactor expansion.
pub fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..].iter().map(|r| (0..n).filter(|&c| c != j).map(|c| r[c]).collect()).collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Invariant factors from determinantal divisors: `d_k = gcd of k×k minors`
/// and `s_k = d_k / d_{k−1}`.
pub fn invariant_factors_by_minors(m: &[Vec<i64>]) -> Vec<i64> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut prev = 1;
    for k in 1..=rows.min(cols) {
        let mut d = 0;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let sub: Vec<Vec<i64>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c]).collect()).collect();
                d = gcd(d, det(&sub));
            }
        }
        if d == 0 {
            break;
        }
        out.push(d / prev);
        prev = d;
    }
    out
}

/// Rank over the rationals by Gaussian elimination.
pub fn rational_rank(m: &[Vec<num_bigint::BigInt>]) -> usize {
    use num_rational::BigRational;
    use num_traits::Zero;
    let mut a: Vec<Vec<BigRational>> =
        m.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(rank, p);
        for i in 0..a.len() {
            if i != rank && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[rank][c];
                for j in c..cols {
                    let d = &f * &a[rank][j];
                    a[i][j] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Random simplicial complex on `n` vertices with `facets` random facets of
/// dimension at most `top`.
pub fn random_simplicial(rng: &mut impl rand::Rng, n: u32, facets: usize, top: usize) -> Simplicial {
    let fs: Vec<Vec<u32>> = (0..facets)
        .map(|_| {
            let size = rng.gen_range(1..=(top + 1).min(n as usize));
            let mut vs: Vec<u32> = (0..n).collect();
            for i in 0..size {
                let j = rng.gen_range(i..vs.len());
                vs.swap(i, j);
            }
            vs.truncate(size);
            vs
        })
        .collect();
    Simplicial::from_facets(&fs)
}

pub fn sup(a: &Point, b: &Point) -> f64 {
    a.coords().iter().zip(b.coords()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn hausdorff_oracle(a: &FiniteSubset, b: &FiniteSubset) -> f64 {
    let dir = |a: &FiniteSubset, b: &FiniteSubset| {
        a.points().iter().map(|p| b.points().iter().map(|q| sup(p, q)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    dir(a, b).max(dir(b, a))
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn config_oracle(u: &Configuration, v: &Configuration) -> f64 {
    let (x, y) = (u.expanded(), v.expanded());
    permutations(x.len())
        .iter()
        .map(|p| p.iter().enumerate().map(|(i, &j)| sup(x[j], y[i])).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}
