//! Integer homology of finite chain complexes.

mod complex;
pub mod reduce;
pub mod snf;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use complex::{ChainComplex, ChainMap, ComplexJson, SparseMatrix, Subcomplex};
pub use snf::{smith_normal_form, IntMatrix, Snf};

use crate::error::{Error, Result};

/// `Z^betti ⊕ Z/t_1 ⊕ ... ⊕ Z/t_k` with `t_1 | t_2 | ... | t_k`, all `t_i ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub betti: usize,
    pub torsion: Vec<u64>,
}

impl HomologyGroup {
    pub fn zero() -> Self {
        HomologyGroup { betti: 0, torsion: vec![] }
    }

    pub fn free(betti: usize) -> Self {
        HomologyGroup { betti, torsion: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.betti {
            0 => {}
            1 => parts.push("Z".into()),
            b => parts.push(format!("Z^{b}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

fn dense(m: &SparseMatrix) -> IntMatrix {
    let mut d = snf::zeros(m.rows(), m.cols());
    for (j, col) in m.columns().iter().enumerate() {
        for &(i, v) in col {
            d[i][j] = BigInt::from(v);
        }
    }
    d
}

fn to_u64(x: &BigInt) -> u64 {
    x.to_u64().expect("torsion coefficient exceeds u64")
}

/// A presentation of `H_q` with explicit generating cycles.
///
/// Generators are the columns of `K U'^{-1}`, where the columns of `K` form a
/// basis of `ker D_q` (taken from the Smith form of `D_q`) and `U'` reduces
/// the image of `D_{q+1}` in that basis. Trivial factors are dropped.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub degree: usize,
    pub group: HomologyGroup,
    /// Generating cycles, torsion generators first, in the cell basis of `C_q`.
    pub generators: Vec<Vec<BigInt>>,
    /// Order of each generator; `None` for free generators.
    pub orders: Vec<Option<BigInt>>,
    boundary: SparseMatrix,
    /// rows `r..n` of `V^{-1}`: coordinates of a cycle in the kernel basis
    kernel_coords: IntMatrix,
    u2: IntMatrix,
    /// index of each kept generator among the columns of `K U'^{-1}`
    kept: Vec<usize>,
}

impl HomologyBasis {
    pub fn compute(c: &ChainComplex, q: usize) -> Result<Self> {
        c.check_degree(q)?;
        let n = c.count(q);
        let dq = c.boundary(q);
        let snf1 = smith_normal_form(&dense(&dq), dq.rows(), n);
        let r = snf1.rank();
        let k = n - r;
        let kernel: IntMatrix = (0..n).map(|i| snf1.v[i][r..].to_vec()).collect();
        let kernel_coords: IntMatrix = snf1.v_inv[r..].to_vec();
        let dq1 = c.boundary(q + 1);
        let m = dq1.cols();
        let b = snf::mul(&kernel_coords, &dense(&dq1), m);
        let snf2 = smith_normal_form(&b, k, m);
        let factors = snf2.invariant_factors();
        // generators: columns of kernel * u2_inv
        let g = snf::mul(&kernel, &snf2.u_inv, k);
        let mut generators = Vec::new();
        let mut orders = Vec::new();
        let mut kept = Vec::new();
        let mut torsion = Vec::new();
        for j in 0..k {
            let order = factors.get(j).cloned();
            if order.as_ref().map_or(false, |o| o.is_one()) {
                continue;
            }
            if let Some(o) = &order {
                torsion.push(to_u64(o));
            }
            generators.push((0..n).map(|i| g[i][j].clone()).collect());
            orders.push(order);
            kept.push(j);
        }
        let betti = k - factors.len();
        Ok(HomologyBasis {
            degree: q,
            group: HomologyGroup { betti, torsion },
            generators,
            orders,
            boundary: dq,
            kernel_coords,
            u2: snf2.u,
            kept,
        })
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Coordinates of the class of cycle `z` on the generators; torsion
    /// coordinates are reduced into `0..order`.
    pub fn coordinates(&self, z: &[BigInt]) -> Result<Vec<BigInt>> {
        if z.len() != self.boundary.cols() {
            return Err(Error::DimensionMismatch { expected: self.boundary.cols(), got: z.len() });
        }
        let mut image = vec![BigInt::zero(); self.boundary.rows()];
        for (j, x) in z.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for &(i, v) in self.boundary.column(j) {
                image[i] += x * v;
            }
        }
        if image.iter().any(|x| !x.is_zero()) {
            return Err(Error::NotACycle);
        }
        let c = snf::mul_vec(&self.kernel_coords, z);
        let d = snf::mul_vec(&self.u2, &c);
        Ok(self
            .kept
            .iter()
            .zip(&self.orders)
            .map(|(&j, o)| match o {
                Some(o) => d[j].mod_floor(o),
                None => d[j].clone(),
            })
            .collect())
    }

    /// Whether a cycle is a boundary.
    pub fn is_boundary(&self, z: &[BigInt]) -> Result<bool> {
        Ok(self.coordinates(z)?.iter().all(|x| x.is_zero()))
    }
}

/// `H_q(C)`. Large complexes are first shrunk by unit-pivot elimination.
pub fn homology(c: &ChainComplex, q: usize) -> Result<HomologyGroup> {
    c.check_degree(q)?;
    let small = if c.counts().iter().sum::<usize>() > 64 { reduce::reduce(c) } else { c.clone() };
    Ok(HomologyBasis::compute(&small, q)?.group)
}

/// All homology groups `H_0 .. H_D`.
pub fn homology_all(c: &ChainComplex) -> Vec<HomologyGroup> {
    let small = if c.counts().iter().sum::<usize>() > 64 { reduce::reduce(c) } else { c.clone() };
    (0..=c.top_degree()).map(|q| HomologyBasis::compute(&small, q).unwrap().group).collect()
}

/// `H_q(C, A)`, the homology of the quotient complex `C / A`.
pub fn relative_homology(a: &Subcomplex<'_>, q: usize) -> Result<HomologyGroup> {
    a.parent().check_degree(q)?;
    let (quot, _) = a.quotient();
    homology(&quot, q)
}

/// Matrix of `F_*` on `H_q`: column `j` holds the coordinates of the image of
/// source generator `j` on the target generators (torsion rows reduced).
pub fn induced_map(
    f: &ChainMap,
    source: &ChainComplex,
    target: &ChainComplex,
    q: usize,
) -> Result<(HomologyBasis, HomologyBasis, IntMatrix)> {
    let hs = HomologyBasis::compute(source, q)?;
    let ht = HomologyBasis::compute(target, q)?;
    let fq = f.degree_map(q);
    let mut m = snf::zeros(ht.len(), hs.len());
    for (j, g) in hs.generators.iter().enumerate() {
        let mut img = vec![BigInt::zero(); fq.rows()];
        for (k, x) in g.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for &(i, v) in fq.column(k) {
                img[i] += x * v;
            }
        }
        let coords = ht.coordinates(&img)?;
        for (i, c) in coords.into_iter().enumerate() {
            m[i][j] = c;
        }
    }
    Ok((hs, ht, m))
}

/// Order of a homology class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassOrder {
    Finite(u64),
    Infinite,
}

impl ClassOrder {
    pub fn divides(&self, r: u64) -> bool {
        matches!(self, ClassOrder::Finite(o) if r % o == 0)
    }
}

/// Smallest `r > 0` with `r [z] = 0` in `H_q(C)`.
pub fn class_order(c: &ChainComplex, q: usize, z: &[i64]) -> Result<ClassOrder> {
    if z.len() != c.count(q) {
        return Err(Error::DimensionMismatch { expected: c.count(q), got: z.len() });
    }
    let h = HomologyBasis::compute(c, q)?;
    let zb: Vec<BigInt> = z.iter().map(|&x| BigInt::from(x)).collect();
    order_from_coordinates(&h, &h.coordinates(&zb)?)
}

pub(crate) fn order_from_coordinates(h: &HomologyBasis, coords: &[BigInt]) -> Result<ClassOrder> {
    let mut order = BigInt::one();
    for (x, o) in coords.iter().zip(&h.orders) {
        match o {
            None if !x.is_zero() => return Ok(ClassOrder::Infinite),
            None => {}
            Some(o) => {
                let part = o / x.gcd(o);
                order = order.lcm(&part);
            }
        }
    }
    Ok(ClassOrder::Finite(to_u64(&order.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> ChainComplex {
        ChainComplex::new(vec![1, 1], vec![SparseMatrix::zero(1, 1)]).unwrap()
    }

    fn rp2() -> ChainComplex {
        ChainComplex::new(
            vec![1, 1, 1],
            vec![SparseMatrix::zero(1, 1), SparseMatrix::from_dense(&[vec![2]], 1, 1)],
        )
        .unwrap()
    }

    #[test]
    fn circle_homology() {
        let c = circle();
        assert_eq!(homology(&c, 0).unwrap(), HomologyGroup::free(1));
        assert_eq!(homology(&c, 1).unwrap(), HomologyGroup::free(1));
        assert!(matches!(homology(&c, 2), Err(Error::DegreeOutOfRange { .. })));
    }

    #[test]
    fn projective_plane() {
        let c = rp2();
        assert_eq!(homology(&c, 1).unwrap(), HomologyGroup { betti: 0, torsion: vec![2] });
        assert!(homology(&c, 2).unwrap().is_zero());
        assert_eq!(class_order(&c, 1, &[1]).unwrap(), ClassOrder::Finite(2));
        assert_eq!(class_order(&c, 1, &[0]).unwrap(), ClassOrder::Finite(1));
        assert_eq!(class_order(&c, 1, &[2]).unwrap(), ClassOrder::Finite(1));
    }

    #[test]
    fn class_order_rejects_non_cycle() {
        let seg = ChainComplex::new(vec![2, 1], vec![SparseMatrix::from_dense(&[vec![-1], vec![1]], 2, 1)]).unwrap();
        assert!(matches!(class_order(&seg, 1, &[1]), Err(Error::NotACycle)));
    }

    #[test]
    fn circle_free_class() {
        assert_eq!(class_order(&circle(), 1, &[3]).unwrap(), ClassOrder::Infinite);
    }

    #[test]
    fn identity_and_doubling() {
        let c = circle();
        let (_, _, m) = induced_map(&ChainMap::identity(&c), &c, &c, 1).unwrap();
        assert_eq!(m, snf::from_i64(&[vec![1]]));
        let double = ChainMap::new(
            &c,
            &c,
            vec![SparseMatrix::from_dense(&[vec![1]], 1, 1), SparseMatrix::from_dense(&[vec![2]], 1, 1)],
        )
        .unwrap();
        let (_, _, m) = induced_map(&double, &c, &c, 1).unwrap();
        assert_eq!(m[0][0].abs(), BigInt::from(2));
    }

    #[test]
    fn relative_of_self_is_zero() {
        let c = rp2();
        let a = Subcomplex::full(&c);
        for q in 0..=2 {
            assert!(relative_homology(&a, q).unwrap().is_zero());
        }
    }

    #[test]
    fn display() {
        assert_eq!(HomologyGroup { betti: 2, torsion: vec![2] }.to_string(), "Z^2 + Z/2");
        assert_eq!(HomologyGroup::zero().to_string(), "0");
    }
}
