//! Smith normal form over the integers.
//!
//! The reduction first runs on `i64` with checked arithmetic and is redone
//! with `BigInt` entries as soon as any operation would overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense integer matrix, row-major.
pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
    vec![vec![<BigInt as Zero>::zero(); cols]; rows]
}

pub fn identity(n: usize) -> IntMatrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = <BigInt as One>::one();
    }
    m
}

pub fn from_i64(m: &[Vec<i64>]) -> IntMatrix {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn ncols(m: &IntMatrix, default: usize) -> usize {
    m.first().map_or(default, |r| r.len())
}

/// Product of an `r x k` and a `k x c` matrix. `inner` and `cols` disambiguate
/// the shapes of empty operands.
pub fn mul(a: &IntMatrix, b: &IntMatrix, cols: usize) -> IntMatrix {
    let mut out = zeros(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for (k, x) in row.iter().enumerate() {
            if Zero::is_zero(x) {
                continue;
            }
            for (j, y) in b[k].iter().enumerate() {
                if !Zero::is_zero(y) {
                    out[i][j] += x * y;
                }
            }
        }
    }
    out
}

pub fn mul_vec(a: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(<BigInt as Zero>::zero(), |acc, (x, y)| acc + x * y))
        .collect()
}

/// Result of [`smith_normal_form`]: `u * m * v = s` with `u`, `v` unimodular.
#[derive(Clone, Debug)]
pub struct Snf {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub rows: usize,
    pub cols: usize,
}

impl Snf {
    /// Nonzero diagonal entries `d_1 | d_2 | ...`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols)).map(|i| self.s[i][i].clone()).take_while(|d| !Zero::is_zero(d)).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

trait Entry: Clone + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn abs_cmp_lt(&self, other: &Self) -> bool;
    fn is_negative(&self) -> bool;
    fn neg(&self) -> Self;
    fn add(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    /// Floor division quotient.
    fn div_floor(&self, o: &Self) -> Self;
    fn divides(&self, o: &Self) -> bool;
    fn to_big(&self) -> BigInt;
}

impl Entry for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn abs_cmp_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn neg(&self) -> Self {
        // i64::MIN never survives: every product and sum is checked and the
        // magnitude bound below keeps entries well inside range.
        -*self
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o).filter(|x| x.unsigned_abs() < (1u64 << 62))
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o).filter(|x| x.unsigned_abs() < (1u64 << 62))
    }
    fn div_floor(&self, o: &Self) -> Self {
        Integer::div_floor(self, o)
    }
    fn divides(&self, o: &Self) -> bool {
        o % self == 0
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Entry for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_cmp_lt(&self, other: &Self) -> bool {
        self.abs() < other.abs()
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div_floor(&self, o: &Self) -> Self {
        Integer::div_floor(self, o)
    }
    fn divides(&self, o: &Self) -> bool {
        Zero::is_zero(&(o % self))
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

struct Work<T> {
    m: Vec<Vec<T>>,
    u: Vec<Vec<T>>,
    u_inv: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
    v_inv: Vec<Vec<T>>,
}

fn ident<T: Entry>(n: usize) -> Vec<Vec<T>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect()
}

struct Overflow;

impl<T: Entry> Work<T> {
    fn new(m: Vec<Vec<T>>, rows: usize, cols: usize) -> Self {
        Work { m, u: ident(rows), u_inv: ident(rows), v: ident(cols), v_inv: ident(cols) }
    }

    fn rows(&self) -> usize {
        self.u.len()
    }

    fn cols(&self) -> usize {
        self.v.len()
    }

    /// row_i += c * row_j
    fn row_add(&mut self, i: usize, j: usize, c: &T) -> Result<(), Overflow> {
        for k in 0..self.cols() {
            let t = self.m[j][k].mul(c).ok_or(Overflow)?;
            self.m[i][k] = self.m[i][k].add(&t).ok_or(Overflow)?;
        }
        for k in 0..self.rows() {
            let t = self.u[j][k].mul(c).ok_or(Overflow)?;
            self.u[i][k] = self.u[i][k].add(&t).ok_or(Overflow)?;
            let t = self.u_inv[k][i].mul(c).ok_or(Overflow)?.neg();
            self.u_inv[k][j] = self.u_inv[k][j].add(&t).ok_or(Overflow)?;
        }
        Ok(())
    }

    /// col_j += c * col_i
    fn col_add(&mut self, j: usize, i: usize, c: &T) -> Result<(), Overflow> {
        for k in 0..self.rows() {
            let t = self.m[k][i].mul(c).ok_or(Overflow)?;
            self.m[k][j] = self.m[k][j].add(&t).ok_or(Overflow)?;
        }
        for k in 0..self.cols() {
            let t = self.v[k][i].mul(c).ok_or(Overflow)?;
            self.v[k][j] = self.v[k][j].add(&t).ok_or(Overflow)?;
            let t = self.v_inv[j][k].mul(c).ok_or(Overflow)?.neg();
            self.v_inv[i][k] = self.v_inv[i][k].add(&t).ok_or(Overflow)?;
        }
        Ok(())
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.m.swap(i, j);
        self.u.swap(i, j);
        for row in &mut self.u_inv {
            row.swap(i, j);
        }
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in &mut self.m {
            row.swap(i, j);
        }
        for row in &mut self.v {
            row.swap(i, j);
        }
        self.v_inv.swap(i, j);
    }

    fn row_neg(&mut self, i: usize) {
        for x in &mut self.m[i] {
            *x = x.neg();
        }
        for x in &mut self.u[i] {
            *x = x.neg();
        }
        for row in &mut self.u_inv {
            row[i] = row[i].neg();
        }
    }

    fn run(&mut self) -> Result<(), Overflow> {
        let (rows, cols) = (self.rows(), self.cols());
        for t in 0..rows.min(cols) {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = &self.m[i][j];
                    if !x.is_zero() && best.map_or(true, |(bi, bj)| x.abs_cmp_lt(&self.m[bi][bj])) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { return Ok(()) };
            self.row_swap(t, bi);
            self.col_swap(t, bj);
            loop {
                let mut dirty = false;
                for i in t + 1..rows {
                    if !self.m[i][t].is_zero() {
                        let q = self.m[i][t].div_floor(&self.m[t][t]);
                        self.row_add(i, t, &q.neg())?;
                        if !self.m[i][t].is_zero() {
                            dirty = true;
                        }
                    }
                }
                for j in t + 1..cols {
                    if !self.m[t][j].is_zero() {
                        let q = self.m[t][j].div_floor(&self.m[t][t]);
                        self.col_add(j, t, &q.neg())?;
                        if !self.m[t][j].is_zero() {
                            dirty = true;
                        }
                    }
                }
                if dirty {
                    self.repivot(t);
                    continue;
                }
                // divisibility of the trailing block by the pivot
                let mut bad = None;
                'outer: for i in t + 1..rows {
                    for j in t + 1..cols {
                        if !self.m[t][t].divides(&self.m[i][j]) {
                            bad = Some(i);
                            break 'outer;
                        }
                    }
                }
                match bad {
                    Some(i) => {
                        self.row_add(t, i, &T::one())?;
                        self.repivot(t);
                    }
                    None => break,
                }
            }
            if self.m[t][t].is_negative() {
                self.row_neg(t);
            }
        }
        Ok(())
    }

    /// Moves the smallest nonzero entry of row `t` / column `t` to `(t,t)`.
    fn repivot(&mut self, t: usize) {
        let (rows, cols) = (self.rows(), self.cols());
        let mut best = (t, t);
        for i in t..rows {
            let x = &self.m[i][t];
            let b = &self.m[best.0][best.1];
            if !x.is_zero() && (b.is_zero() || x.abs_cmp_lt(b)) {
                best = (i, t);
            }
        }
        for j in t..cols {
            let x = &self.m[t][j];
            let b = &self.m[best.0][best.1];
            if !x.is_zero() && (b.is_zero() || x.abs_cmp_lt(b)) {
                best = (t, j);
            }
        }
        self.row_swap(t, best.0);
        self.col_swap(t, best.1);
    }

    fn into_snf(self, rows: usize, cols: usize) -> Snf {
        let big = |m: Vec<Vec<T>>| -> IntMatrix { m.into_iter().map(|r| r.iter().map(T::to_big).collect()).collect() };
        Snf {
            s: big(self.m),
            u: big(self.u),
            u_inv: big(self.u_inv),
            v: big(self.v),
            v_inv: big(self.v_inv),
            rows,
            cols,
        }
    }
}

/// Smith normal form of an integer matrix with `rows` rows and `cols` columns.
pub fn smith_normal_form(m: &IntMatrix, rows: usize, cols: usize) -> Snf {
    let small: Option<Vec<Vec<i64>>> = m
        .iter()
        .map(|r| r.iter().map(|x| x.to_i64().filter(|v| v.unsigned_abs() < (1u64 << 62))).collect())
        .collect();
    if let Some(small) = small {
        let mut w = Work::new(small, rows, cols);
        if w.run().is_ok() {
            return w.into_snf(rows, cols);
        }
    }
    let mut w = Work::new(m.clone(), rows, cols);
    // BigInt arithmetic never reports overflow.
    let _ = w.run();
    w.into_snf(rows, cols)
}

pub fn smith_normal_form_i64(m: &[Vec<i64>]) -> Snf {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    smith_normal_form(&from_i64(m), rows, cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &[Vec<i64>]) -> Snf {
        let snf = smith_normal_form_i64(m);
        let big = from_i64(m);
        let rows = m.len();
        let cols = m.first().map_or(0, |r| r.len());
        let umv = mul(&mul(&snf.u, &big, cols), &snf.v, cols);
        assert_eq!(umv, snf.s);
        assert_eq!(mul(&snf.u, &snf.u_inv, rows), identity(rows));
        assert_eq!(mul(&snf.v, &snf.v_inv, cols), identity(cols));
        snf
    }

    #[test]
    fn identity_is_fixed() {
        let snf = check(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(snf.s, identity(3));
    }

    #[test]
    fn two_by_two() {
        let snf = check(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(snf.invariant_factors(), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn zero_matrix() {
        let snf = check(&[vec![0, 0, 0], vec![0, 0, 0]]);
        assert_eq!(snf.rank(), 0);
        assert_eq!(snf.s, zeros(2, 3));
    }

    #[test]
    fn divisibility_fixup() {
        // diag(2,3) is not in normal form: 1 | 6
        let snf = check(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(snf.invariant_factors(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn overflow_promotes_to_bigint() {
        let big = 1i64 << 61;
        let snf = check(&[vec![big, big - 1], vec![big - 3, big]]);
        assert_eq!(snf.rank(), 2);
    }

    #[test]
    fn empty_shapes() {
        let snf = smith_normal_form(&vec![], 0, 3);
        assert_eq!(snf.v.len(), 3);
        assert_eq!(snf.rank(), 0);
    }
}
