use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column-sparse integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, columns: vec![Vec::new(); cols] }
    }

    /// Builds from `(row, col, coeff)` triplets; repeated positions are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, i64)]) -> Result<Self> {
        let mut columns = vec![Vec::new(); cols];
        for &(r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::MalformedComplex(format!("entry ({r},{c}) outside {rows}x{cols}")));
            }
            columns[c].push((r, v));
        }
        let mut m = SparseMatrix { rows, columns };
        m.normalize();
        Ok(m)
    }

    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, i64)>>) -> Self {
        let mut m = SparseMatrix { rows, columns };
        m.normalize();
        m
    }

    pub fn from_dense(m: &[Vec<i64>], rows: usize, cols: usize) -> Self {
        let mut columns = vec![Vec::new(); cols];
        for (i, row) in m.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    columns[j].push((i, v));
                }
            }
        }
        SparseMatrix { rows, columns }
    }

    fn normalize(&mut self) {
        for col in &mut self.columns {
            col.sort_by_key(|e| e.0);
            let mut out: Vec<(usize, i64)> = Vec::with_capacity(col.len());
            for &(r, v) in col.iter() {
                match out.last_mut() {
                    Some(last) if last.0 == r => last.1 += v,
                    _ => out.push((r, v)),
                }
            }
            out.retain(|e| e.1 != 0);
            *col = out;
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, i64)] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<(usize, i64)>] {
        &self.columns
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.columns[j].iter().find(|e| e.0 == i).map_or(0, |e| e.1)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.cols()]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                d[i][j] = v;
            }
        }
        d
    }

    pub fn triplets(&self) -> Vec<(usize, usize, i64)> {
        let mut t = Vec::new();
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                t.push((i, j, v));
            }
        }
        t
    }

    /// `self * other`, with `self` of shape `rows x k` and `other` of shape `k x c`.
    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols() != other.rows {
            return Err(Error::MalformedComplex(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.cols(),
                other.rows,
                other.cols()
            )));
        }
        let mut cols = Vec::with_capacity(other.cols());
        for col in &other.columns {
            let mut acc: Vec<(usize, i64)> = Vec::new();
            for &(k, v) in col {
                for &(i, w) in &self.columns[k] {
                    acc.push((i, v.checked_mul(w).ok_or_else(overflow)?));
                }
            }
            cols.push(acc);
        }
        let mut m = SparseMatrix { rows: self.rows, columns: cols };
        m.normalize();
        Ok(m)
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    /// Applies the matrix to a sparse vector.
    pub fn apply(&self, v: &[(usize, i64)]) -> Vec<(usize, i64)> {
        let mut acc = Vec::new();
        for &(k, x) in v {
            for &(i, w) in &self.columns[k] {
                acc.push((i, x * w));
            }
        }
        let mut m = SparseMatrix { rows: self.rows, columns: vec![acc] };
        m.normalize();
        m.columns.pop().unwrap()
    }
}

fn overflow() -> Error {
    Error::MalformedComplex("integer overflow in sparse product".into())
}

/// A finite free chain complex `C_D -> ... -> C_0` over the integers.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainComplex {
    counts: Vec<usize>,
    /// `boundaries[q-1]` is `D_q : C_q -> C_{q-1}`.
    boundaries: Vec<SparseMatrix>,
    labels: Option<Vec<Vec<String>>>,
}

impl ChainComplex {
    /// Validates shapes and `D_{q-1} D_q = 0`.
    pub fn new(counts: Vec<usize>, boundaries: Vec<SparseMatrix>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::MalformedComplex("no degrees".into()));
        }
        if boundaries.len() != counts.len() - 1 {
            return Err(Error::MalformedComplex(format!(
                "{} degrees need {} boundary matrices, got {}",
                counts.len(),
                counts.len() - 1,
                boundaries.len()
            )));
        }
        for (i, b) in boundaries.iter().enumerate() {
            let q = i + 1;
            if b.rows() != counts[q - 1] || b.cols() != counts[q] {
                return Err(Error::MalformedComplex(format!(
                    "D_{q} has shape {}x{}, expected {}x{}",
                    b.rows(),
                    b.cols(),
                    counts[q - 1],
                    counts[q]
                )));
            }
        }
        for q in 2..counts.len() {
            if !boundaries[q - 2].mul(&boundaries[q - 1])?.is_zero() {
                return Err(Error::BoundarySquareNonzero(q));
            }
        }
        Ok(ChainComplex { counts, boundaries, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self> {
        if labels.len() != self.counts.len() || labels.iter().zip(&self.counts).any(|(l, &c)| l.len() != c) {
            return Err(Error::MalformedComplex("label counts do not match cell counts".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn top_degree(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn count(&self, q: usize) -> usize {
        self.counts.get(q).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn labels(&self) -> Option<&Vec<Vec<String>>> {
        self.labels.as_ref()
    }

    /// Index of the cell with the given label in degree `q`.
    pub fn cell(&self, q: usize, label: &str) -> Option<usize> {
        self.labels.as_ref()?.get(q)?.iter().position(|l| l == label)
    }

    /// `D_q`, as a zero map for `q = 0` or `q` above the top degree.
    pub fn boundary(&self, q: usize) -> SparseMatrix {
        if q == 0 {
            SparseMatrix::zero(0, self.count(0))
        } else if q <= self.top_degree() {
            self.boundaries[q - 1].clone()
        } else {
            SparseMatrix::zero(self.count(q - 1), 0)
        }
    }

    pub(crate) fn boundary_ref(&self, q: usize) -> Option<&SparseMatrix> {
        if q == 0 || q > self.top_degree() {
            None
        } else {
            Some(&self.boundaries[q - 1])
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts.iter().enumerate().map(|(q, &c)| if q % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
    }

    pub fn check_degree(&self, q: usize) -> Result<()> {
        if q > self.top_degree() {
            return Err(Error::DegreeOutOfRange { degree: q, max: self.top_degree() });
        }
        Ok(())
    }

    pub fn to_json(&self) -> ComplexJson {
        ComplexJson {
            degrees: self.top_degree(),
            cells: self.labels.clone().unwrap_or_else(|| {
                self.counts.iter().enumerate().map(|(q, &c)| (0..c).map(|i| format!("c{q}_{i}")).collect()).collect()
            }),
            boundaries: self.boundaries.iter().map(|b| b.triplets()).collect(),
        }
    }

    pub fn from_json(j: &ComplexJson) -> Result<Self> {
        if j.cells.len() != j.degrees + 1 {
            return Err(Error::Schema {
                path: "cells".into(),
                msg: format!("expected {} label lists, got {}", j.degrees + 1, j.cells.len()),
            });
        }
        if j.boundaries.len() != j.degrees {
            return Err(Error::Schema {
                path: "boundaries".into(),
                msg: format!("expected {} triplet lists, got {}", j.degrees, j.boundaries.len()),
            });
        }
        let counts: Vec<usize> = j.cells.iter().map(|c| c.len()).collect();
        let mut bs = Vec::new();
        for (i, t) in j.boundaries.iter().enumerate() {
            let m = SparseMatrix::from_triplets(counts[i], counts[i + 1], t).map_err(|e| Error::Schema {
                path: format!("boundaries[{i}]"),
                msg: e.to_string(),
            })?;
            bs.push(m);
        }
        ChainComplex::new(counts, bs)?.with_labels(j.cells.clone())
    }
}

/// On-disk complex format: labels per degree and sparse boundary triplets
/// `(row, col, coeff)` for `D_1 .. D_degrees`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ComplexJson {
    pub degrees: usize,
    pub cells: Vec<Vec<String>>,
    pub boundaries: Vec<Vec<(usize, usize, i64)>>,
}

/// A boundary-closed selection of cells of a parent complex.
#[derive(Clone, Debug)]
pub struct Subcomplex<'a> {
    parent: &'a ChainComplex,
    selected: Vec<Vec<bool>>,
}

impl<'a> Subcomplex<'a> {
    pub fn new(parent: &'a ChainComplex, cells: Vec<Vec<usize>>) -> Result<Self> {
        let mut selected: Vec<Vec<bool>> = parent.counts.iter().map(|&c| vec![false; c]).collect();
        if cells.len() > selected.len() {
            return Err(Error::MalformedComplex("subcomplex has more degrees than parent".into()));
        }
        for (q, cs) in cells.iter().enumerate() {
            for &c in cs {
                if c >= parent.count(q) {
                    return Err(Error::MalformedComplex(format!("cell {c} out of range in degree {q}")));
                }
                selected[q][c] = true;
            }
        }
        for q in 1..selected.len() {
            let b = parent.boundary_ref(q).unwrap();
            for (c, &sel) in selected[q].iter().enumerate() {
                if sel && b.column(c).iter().any(|&(r, _)| !selected[q - 1][r]) {
                    return Err(Error::NotClosed { degree: q, cell: c });
                }
            }
        }
        Ok(Subcomplex { parent, selected })
    }

    /// The whole parent as a subcomplex of itself.
    pub fn full(parent: &'a ChainComplex) -> Self {
        Subcomplex { parent, selected: parent.counts.iter().map(|&c| vec![true; c]).collect() }
    }

    pub fn parent(&self) -> &ChainComplex {
        self.parent
    }

    pub fn contains(&self, q: usize, c: usize) -> bool {
        self.selected.get(q).and_then(|s| s.get(c)).copied().unwrap_or(false)
    }

    /// Indices of selected (`keep = true`) or unselected cells per degree.
    fn indices(&self, keep: bool) -> Vec<Vec<usize>> {
        self.selected.iter().map(|s| (0..s.len()).filter(|&i| s[i] == keep).collect()).collect()
    }

    fn restricted(&self, keep: bool) -> (ChainComplex, Vec<Vec<usize>>) {
        let idx = self.indices(keep);
        let mut pos: Vec<Vec<Option<usize>>> = self.parent.counts.iter().map(|&c| vec![None; c]).collect();
        for (q, ids) in idx.iter().enumerate() {
            for (k, &i) in ids.iter().enumerate() {
                pos[q][i] = Some(k);
            }
        }
        let mut bs = Vec::new();
        for q in 1..idx.len() {
            let b = self.parent.boundary_ref(q).unwrap();
            let cols = idx[q]
                .iter()
                .map(|&c| b.column(c).iter().filter_map(|&(r, v)| pos[q - 1][r].map(|k| (k, v))).collect())
                .collect();
            bs.push(SparseMatrix::from_columns(idx[q - 1].len(), cols));
        }
        let counts = idx.iter().map(|v| v.len()).collect();
        let mut cx = ChainComplex::new(counts, bs).expect("restriction of a valid complex is valid");
        if let Some(labels) = &self.parent.labels {
            let l = idx.iter().enumerate().map(|(q, ids)| ids.iter().map(|&i| labels[q][i].clone()).collect()).collect();
            cx = cx.with_labels(l).unwrap();
        }
        (cx, idx)
    }

    /// The subcomplex as a chain complex, with the parent index of each cell.
    pub fn as_complex(&self) -> (ChainComplex, Vec<Vec<usize>>) {
        self.restricted(true)
    }

    /// The quotient `C / A`, with the parent index of each surviving cell.
    pub fn quotient(&self) -> (ChainComplex, Vec<Vec<usize>>) {
        self.restricted(false)
    }

    /// Inclusion `A -> C`.
    pub fn inclusion(&self) -> (ChainComplex, ChainMap) {
        let (sub, idx) = self.as_complex();
        let maps = idx
            .iter()
            .enumerate()
            .map(|(q, ids)| {
                SparseMatrix::from_columns(self.parent.count(q), ids.iter().map(|&i| vec![(i, 1)]).collect())
            })
            .collect();
        let f = ChainMap::new(&sub, self.parent, maps).expect("inclusion is a chain map");
        (sub, f)
    }

    /// Projection `C -> C / A`.
    pub fn projection(&self) -> (ChainComplex, ChainMap) {
        let (quot, idx) = self.quotient();
        let maps = idx
            .iter()
            .enumerate()
            .map(|(q, ids)| {
                let mut cols = vec![Vec::new(); self.parent.count(q)];
                for (k, &i) in ids.iter().enumerate() {
                    cols[i].push((k, 1));
                }
                SparseMatrix::from_columns(ids.len(), cols)
            })
            .collect();
        let f = ChainMap::new(self.parent, &quot, maps).expect("projection is a chain map");
        (quot, f)
    }
}

/// Degree-wise integer matrices `F_q : S_q -> T_q` commuting with boundaries.
#[derive(Clone, Debug)]
pub struct ChainMap {
    maps: Vec<SparseMatrix>,
}

impl ChainMap {
    pub fn new(source: &ChainComplex, target: &ChainComplex, maps: Vec<SparseMatrix>) -> Result<Self> {
        let top = source.top_degree().max(target.top_degree());
        let mut full = Vec::new();
        for q in 0..=top {
            let m = match maps.get(q) {
                Some(m) => m.clone(),
                None => SparseMatrix::zero(target.count(q), source.count(q)),
            };
            if m.rows() != target.count(q) || m.cols() != source.count(q) {
                return Err(Error::MalformedComplex(format!(
                    "F_{q} has shape {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    target.count(q),
                    source.count(q)
                )));
            }
            full.push(m);
        }
        for q in 1..=top {
            let lhs = target.boundary(q).mul(&full[q])?;
            let rhs = full[q - 1].mul(&source.boundary(q))?;
            if lhs != rhs {
                return Err(Error::NotAChainMap(q));
            }
        }
        Ok(ChainMap { maps: full })
    }

    pub fn identity(c: &ChainComplex) -> Self {
        let maps = c
            .counts()
            .iter()
            .map(|&n| SparseMatrix::from_columns(n, (0..n).map(|i| vec![(i, 1)]).collect()))
            .collect();
        ChainMap { maps }
    }

    pub fn degree_map(&self, q: usize) -> &SparseMatrix {
        &self.maps[q]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChainMap) -> Result<ChainMap> {
        let maps = self.maps.iter().zip(&other.maps).map(|(f, g)| g.mul(f)).collect::<Result<Vec<_>>>()?;
        Ok(ChainMap { maps })
    }
}
