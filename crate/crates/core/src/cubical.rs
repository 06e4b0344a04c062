//! Elementary cubes on a regular grid and a coreduction engine that shrinks
//! large cubical complexes (or pairs) to small chain-equivalent ones.
//!
//! A cube in `[0,1]^d` at resolution `r` is stored as `d` doubled
//! coordinates in `0..=2r`: an even coordinate `2j` is the degenerate
//! interval `[j/r, j/r]`, an odd one `2j+1` is `[j/r, (j+1)/r]`.

use std::collections::VecDeque;
use std::fmt;

use rustc_hash::{FxHashMap, FxHashSet};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::reduce::{Reduced, Reducer};
use crate::homology::{order_from_coordinates, ChainComplex, ChainMap, ClassOrder, HomologyBasis, HomologyGroup, SparseMatrix};

pub const MAX_AXES: usize = 6;
const BITS: u32 = 10;
const MASK: u64 = (1 << BITS) - 1;
/// Largest resolution representable with the packed encoding.
pub const MAX_RESOLUTION: usize = (MASK as usize - 1) / 2;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube(u64);

impl Cube {
    pub fn new(coords: &[u32]) -> Cube {
        debug_assert!(coords.len() <= MAX_AXES);
        let mut k = 0u64;
        for (a, &c) in coords.iter().enumerate() {
            debug_assert!((c as u64) < MASK);
            k |= (c as u64) << (BITS * a as u32);
        }
        Cube(k)
    }

    pub fn key(self) -> u64 {
        self.0
    }

    pub fn coord(self, axis: usize) -> u32 {
        ((self.0 >> (BITS * axis as u32)) & MASK) as u32
    }

    pub fn coords(self, dims: usize) -> Vec<u32> {
        (0..dims).map(|a| self.coord(a)).collect()
    }

    /// Number of nondegenerate axes.
    pub fn dim(self) -> usize {
        (0..MAX_AXES).filter(|&a| self.coord(a) & 1 == 1).count()
    }

    fn with(self, axis: usize, c: u32) -> Cube {
        let shift = BITS * axis as u32;
        Cube((self.0 & !(MASK << shift)) | ((c as u64) << shift))
    }

    /// Calls `f(face, coefficient)` for each codimension-one face.
    pub fn for_each_face(self, dims: usize, mut f: impl FnMut(Cube, i64)) {
        let mut sign = 1i64;
        for a in 0..dims {
            let c = self.coord(a);
            if c & 1 == 1 {
                f(self.with(a, c - 1), -sign);
                f(self.with(a, c + 1), sign);
                sign = -sign;
            }
        }
    }

    /// Calls `f(coface, coefficient of self in its boundary)` for each
    /// codimension-one coface inside `[0, 2r]^dims`.
    pub fn for_each_coface(self, dims: usize, resolution: usize, mut f: impl FnMut(Cube, i64)) {
        let top = 2 * resolution as u32;
        let mut sign = 1i64;
        for a in 0..dims {
            let c = self.coord(a);
            if c & 1 == 1 {
                sign = -sign;
                continue;
            }
            if c > 0 {
                f(self.with(a, c - 1), sign);
            }
            if c < top {
                f(self.with(a, c + 1), -sign);
            }
        }
    }

    pub fn faces(self, dims: usize) -> Vec<(Cube, i64)> {
        let mut v = Vec::with_capacity(2 * dims);
        self.for_each_face(dims, |c, s| v.push((c, s)));
        v
    }

    /// Center of the cube in `[0,1]^dims`.
    pub fn center(self, dims: usize, resolution: usize) -> Vec<f64> {
        (0..dims).map(|a| self.coord(a) as f64 / (2 * resolution) as f64).collect()
    }
}

impl fmt::Debug for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<u32> = (0..MAX_AXES).map(|a| self.coord(a)).collect();
        let last = c.iter().rposition(|&x| x != 0).map_or(1, |p| p + 1);
        write!(f, "Cube{:?}", &c[..last])
    }
}

/// A face-closed set of elementary cubes, grouped by dimension and sorted.
#[derive(Clone, Debug)]
pub struct CubicalComplex {
    dims: usize,
    resolution: usize,
    cells: Vec<Vec<Cube>>,
}

fn check_grid(dims: usize, resolution: usize) -> Result<()> {
    if dims == 0 || dims > MAX_AXES {
        return Err(Error::InvalidGrid(format!("ambient dimension {dims} outside 1..={MAX_AXES}")));
    }
    if resolution == 0 || resolution > MAX_RESOLUTION {
        return Err(Error::InvalidGrid(format!("resolution {resolution} outside 1..={MAX_RESOLUTION}")));
    }
    Ok(())
}

impl CubicalComplex {
    /// Face closure of `seeds`.
    pub fn closure(dims: usize, resolution: usize, seeds: impl IntoIterator<Item = Cube>) -> Result<Self> {
        check_grid(dims, resolution)?;
        let top = 2 * resolution as u32;
        let mut set: FxHashSet<Cube> = FxHashSet::default();
        let mut buckets: Vec<Vec<Cube>> = vec![Vec::new(); dims + 1];
        for c in seeds {
            if (0..dims).any(|a| c.coord(a) > top) || (dims..MAX_AXES).any(|a| c.coord(a) != 0) {
                return Err(Error::InvalidGrid(format!("{c:?} lies outside the grid")));
            }
            if set.insert(c) {
                buckets[c.dim()].push(c);
            }
        }
        for q in (1..=dims).rev() {
            let (lower, upper) = buckets.split_at_mut(q);
            for &c in &upper[0] {
                c.for_each_face(dims, |f, _| {
                    if set.insert(f) {
                        lower[q - 1].push(f);
                    }
                });
            }
        }
        for b in buckets.iter_mut() {
            b.sort_unstable();
        }
        Ok(CubicalComplex { dims, resolution, cells: buckets })
    }

    /// All cubes of `[0,1]^dims`.
    pub fn full(dims: usize, resolution: usize) -> Result<Self> {
        check_grid(dims, resolution)?;
        let tops = cartesian(&vec![(1, 2 * resolution as u32 - 1); dims], 2);
        Self::closure(dims, resolution, tops)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn cells(&self, q: usize) -> &[Cube] {
        self.cells.get(q).map_or(&[], |v| v.as_slice())
    }

    pub fn count(&self, q: usize) -> usize {
        self.cells(q).len()
    }

    pub fn len(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, c: Cube) -> bool {
        self.cells(c.dim()).binary_search(&c).is_ok()
    }

    pub fn index(&self, c: Cube) -> Option<usize> {
        self.cells(c.dim()).binary_search(&c).ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Cube> + '_ {
        self.cells.iter().flatten().copied()
    }

    /// Whether every cube of `self` belongs to `other`.
    pub fn is_subset(&self, other: &CubicalComplex) -> bool {
        self.iter().all(|c| other.contains(c))
    }

    /// Cubes satisfying `keep`, which must select a face-closed set.
    pub fn filter(&self, keep: impl Fn(Cube) -> bool) -> CubicalComplex {
        let cells = self.cells.iter().map(|v| v.iter().copied().filter(|&c| keep(c)).collect()).collect();
        CubicalComplex { dims: self.dims, resolution: self.resolution, cells }
    }

    /// Explicit chain complex; cell `j` of degree `q` is `self.cells(q)[j]`.
    pub fn to_chain_complex(&self) -> ChainComplex {
        let counts = self.cells.iter().map(Vec::len).collect();
        let bs = (1..=self.dims)
            .map(|q| {
                let cols = self.cells[q]
                    .iter()
                    .map(|&c| {
                        let mut col: Vec<(usize, i64)> =
                            c.faces(self.dims).into_iter().map(|(f, s)| (self.index(f).unwrap(), s)).collect();
                        col.sort();
                        col
                    })
                    .collect();
                SparseMatrix::from_columns(self.cells[q - 1].len(), cols)
            })
            .collect();
        ChainComplex::new(counts, bs).expect("cubical boundary squares to zero")
    }

    /// Chain map induced by a cube map sending each cube to a cube of
    /// `target` or to zero (when the image is degenerate).
    pub fn chain_map_to(&self, target: &CubicalComplex, f: impl Fn(Cube) -> Option<Cube>) -> Result<ChainMap> {
        let src = self.to_chain_complex();
        let tgt = target.to_chain_complex();
        let top = self.dims.min(target.dims);
        let maps = (0..=self.dims)
            .map(|q| {
                let cols = self.cells[q]
                    .iter()
                    .map(|&c| match f(c) {
                        Some(img) if q <= top && img.dim() == q => match target.index(img) {
                            Some(i) => vec![(i, 1)],
                            None => vec![],
                        },
                        _ => vec![],
                    })
                    .collect();
                SparseMatrix::from_columns(target.count(q), cols)
            })
            .collect();
        ChainMap::new(&src, &tgt, maps)
    }
}

/// All coordinate vectors with entry `a` in `lo_a..=hi_a` stepping by `step`.
pub(crate) fn cartesian(ranges: &[(u32, u32)], step: u32) -> Vec<Cube> {
    let mut out = Vec::new();
    if ranges.iter().any(|&(lo, hi)| lo > hi) {
        return out;
    }
    let mut cur: Vec<u32> = ranges.iter().map(|r| r.0).collect();
    loop {
        out.push(Cube::new(&cur));
        let mut a = 0;
        loop {
            if a == ranges.len() {
                return out;
            }
            if cur[a] + step <= ranges[a].1 {
                cur[a] += step;
                break;
            }
            cur[a] = ranges[a].0;
            a += 1;
        }
    }
}

/// A small complex chain-equivalent to a cubical complex (or pair), with
/// tracked chains and cochains carried through the equivalence.
#[derive(Clone, Debug)]
pub struct Coreduced {
    pub complex: ChainComplex,
    /// The surviving cube behind each basis element, per degree.
    pub cells: Vec<Vec<Cube>>,
    pub chains: Vec<(usize, Vec<(usize, i64)>)>,
    pub cochains: Vec<(usize, Vec<(usize, i64)>)>,
}

const DEAD: u8 = 0;
const ALIVE: u8 = 1;
const CRITICAL: u8 = 2;

type Sparse = FxHashMap<u32, i64>;

struct Engine {
    dims: usize,
    resolution: usize,
    keys: Vec<Cube>,
    index: FxHashMap<Cube, u32>,
    state: Vec<u8>,
    crit_bd: FxHashMap<u32, Vec<(u32, i64)>>,
    chains: Vec<(usize, Sparse)>,
    cochains: Vec<(usize, Sparse)>,
    queue: VecDeque<u32>,
}

fn add_into(v: &mut Vec<(u32, i64)>, k: u32, x: i64) {
    if let Some(p) = v.iter().position(|e| e.0 == k) {
        v[p].1 += x;
        if v[p].1 == 0 {
            v.swap_remove(p);
        }
    } else if x != 0 {
        v.push((k, x));
    }
}

fn add_sparse(m: &mut Sparse, k: u32, x: i64) {
    let e = m.entry(k).or_insert(0);
    *e += x;
    if *e == 0 {
        m.remove(&k);
    }
}

impl Engine {
    fn lookup(&self, c: Cube) -> Option<u32> {
        self.index.get(&c).copied()
    }

    fn alive(&self, c: Cube) -> Option<u32> {
        self.lookup(c).filter(|&i| self.state[i as usize] == ALIVE)
    }

    /// The single alive face of cell `i`, if it has exactly one.
    fn single_face(&self, i: u32) -> Option<(u32, i64)> {
        let mut found = None;
        let mut count = 0;
        self.keys[i as usize].for_each_face(self.dims, |f, s| {
            if count < 2 {
                if let Some(j) = self.alive(f) {
                    count += 1;
                    found = Some((j, s));
                }
            }
        });
        if count == 1 {
            found
        } else {
            None
        }
    }

    fn alive_cofaces(&self, i: u32) -> Vec<(u32, i64)> {
        let mut v = Vec::new();
        self.keys[i as usize].for_each_coface(self.dims, self.resolution, |c, s| {
            if let Some(j) = self.alive(c) {
                v.push((j, s));
            }
        });
        v
    }

    fn eliminate(&mut self, sigma: u32, tau: u32, u: i64) {
        let q = self.keys[sigma as usize].dim();
        let crit = self.crit_bd.remove(&sigma).unwrap_or_default();
        let others: Vec<(u32, i64)> = self.alive_cofaces(tau).into_iter().filter(|e| e.0 != sigma).collect();
        if !crit.is_empty() {
            for &(rho, c) in &others {
                let entry = self.crit_bd.entry(rho).or_default();
                for &(k, v) in &crit {
                    add_into(entry, k, -c * u * v);
                }
            }
        }
        for (deg, phi) in self.cochains.iter_mut() {
            if *deg == q {
                if let Some(fs) = phi.remove(&sigma) {
                    for &(rho, c) in &others {
                        add_sparse(phi, rho, -c * u * fs);
                    }
                }
            }
        }
        for (deg, z) in self.chains.iter_mut() {
            if *deg + 1 == q {
                if let Some(zt) = z.remove(&tau) {
                    for &(k, v) in &crit {
                        add_sparse(z, k, -zt * u * v);
                    }
                }
            }
        }
        self.state[sigma as usize] = DEAD;
        self.state[tau as usize] = DEAD;
        for (rho, _) in others {
            self.queue.push_back(rho);
        }
        let cof = self.alive_cofaces(sigma);
        self.queue.extend(cof.into_iter().map(|e| e.0));
    }

    fn make_critical(&mut self, i: u32) {
        self.state[i as usize] = CRITICAL;
        for (rho, s) in self.alive_cofaces(i) {
            self.crit_bd.entry(rho).or_default().push((i, s));
            self.queue.push_back(rho);
        }
    }

    fn run(&mut self) {
        let mut cursor = 0usize;
        loop {
            while let Some(s) = self.queue.pop_front() {
                if self.state[s as usize] != ALIVE {
                    continue;
                }
                if let Some((t, u)) = self.single_face(s) {
                    self.eliminate(s, t, u);
                }
            }
            while cursor < self.keys.len() && self.state[cursor] != ALIVE {
                cursor += 1;
            }
            if cursor == self.keys.len() {
                break;
            }
            self.make_critical(cursor as u32);
        }
    }
}

/// Shrinks the relative complex `(cx, excluded)` by coreductions.
///
/// `excluded` must select a face-closed subset; the result is chain
/// equivalent to the quotient by it. Tracked chains are pushed forward,
/// tracked cochains pulled back, so that pairing them with homology classes
/// of the result agrees with the pairing in the original complex.
pub fn coreduce(
    cx: &CubicalComplex,
    excluded: impl Fn(Cube) -> bool,
    chains: &[(usize, Vec<(Cube, i64)>)],
    cochains: &[(usize, Vec<(Cube, i64)>)],
) -> Result<Coreduced> {
    let keys: Vec<Cube> = cx.iter().filter(|&c| !excluded(c)).collect();
    let index: FxHashMap<Cube, u32> = keys.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect();
    let to_sparse = |q: usize, v: &[(Cube, i64)]| -> Result<(usize, Sparse)> {
        let mut m = Sparse::default();
        for &(c, x) in v {
            if c.dim() != q || !cx.contains(c) {
                return Err(Error::Precondition(format!("{c:?} is not a {q}-cube of the complex")));
            }
            if let Some(&i) = index.get(&c) {
                add_sparse(&mut m, i, x);
            }
        }
        Ok((q, m))
    };
    let chains = chains.iter().map(|(q, v)| to_sparse(*q, v)).collect::<Result<Vec<_>>>()?;
    let cochains = cochains.iter().map(|(q, v)| to_sparse(*q, v)).collect::<Result<Vec<_>>>()?;
    let n = keys.len();
    let mut e = Engine {
        dims: cx.dims,
        resolution: cx.resolution,
        keys,
        index,
        state: vec![ALIVE; n],
        crit_bd: FxHashMap::default(),
        chains,
        cochains,
        queue: VecDeque::new(),
    };
    e.queue.extend(0..n as u32);
    e.run();

    let mut pos: FxHashMap<u32, usize> = FxHashMap::default();
    let mut cells: Vec<Vec<Cube>> = vec![Vec::new(); cx.dims + 1];
    let mut ids: Vec<Vec<u32>> = vec![Vec::new(); cx.dims + 1];
    for (i, &c) in e.keys.iter().enumerate() {
        if e.state[i] == CRITICAL {
            let q = c.dim();
            pos.insert(i as u32, cells[q].len());
            cells[q].push(c);
            ids[q].push(i as u32);
        }
    }
    let mut bs = Vec::new();
    for q in 1..=cx.dims {
        let cols = ids[q]
            .iter()
            .map(|i| {
                let mut col: Vec<(usize, i64)> = e
                    .crit_bd
                    .get(i)
                    .map(|v| v.iter().map(|&(k, x)| (pos[&k], x)).collect())
                    .unwrap_or_default();
                col.sort();
                col
            })
            .collect();
        bs.push(SparseMatrix::from_columns(ids[q - 1].len(), cols));
    }
    let complex = ChainComplex::new(cells.iter().map(Vec::len).collect(), bs)
        .map_err(|err| Error::MalformedComplex(format!("coreduction produced an invalid complex: {err}")))?;
    let export = |list: Vec<(usize, Sparse)>| -> Vec<(usize, Vec<(usize, i64)>)> {
        list.into_iter()
            .map(|(q, m)| {
                let mut v: Vec<(usize, i64)> = m.into_iter().filter_map(|(i, x)| pos.get(&i).map(|&p| (p, x))).collect();
                v.sort();
                (q, v)
            })
            .collect()
    };
    let chains = export(std::mem::take(&mut e.chains));
    let cochains = export(std::mem::take(&mut e.cochains));
    Ok(Coreduced { complex, cells, chains, cochains })
}


/// Pushes a coreduced complex through the general unit-pivot reducer,
/// keeping the tracked data aligned.
fn shrink(cr: Coreduced) -> Reduced {
    let mut r = Reducer::new(&cr.complex);
    for (q, v) in &cr.chains {
        r.track_chain(*q, v);
    }
    for (q, v) in &cr.cochains {
        r.track_cochain(*q, v);
    }
    r.run();
    r.finish()
}

fn to_big(v: &[(usize, i64)], n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n];
    for &(i, x) in v {
        out[i] += x;
    }
    out
}

/// A cubical complex in `[0,1]^{m+n}` together with the subcomplex of cubes
/// lying over the boundary of the domain cube `[0,1]^m` (the first `m` axes).
#[derive(Clone, Debug)]
pub struct CubicalPair {
    pub total: CubicalComplex,
    domain_dim: usize,
}

/// The map induced on `H_m` by projecting a pair onto `(D^m, ∂D^m)`.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectionHomology {
    /// `H_m` of the pair.
    pub relative: HomologyGroup,
    /// Image of each generator of `H_m` of the pair in `H_m(D^m, ∂D^m) ≅ Z`.
    pub images: Vec<i64>,
    /// Order of each generator (`None` for free generators).
    pub orders: Vec<Option<u64>>,
    /// Number of cells left after coreduction.
    pub critical_cells: usize,
}

impl ProjectionHomology {
    pub fn is_nonzero(&self) -> bool {
        self.images.iter().any(|&x| x != 0)
    }
}

impl CubicalPair {
    pub fn new(total: CubicalComplex, domain_dim: usize) -> Result<Self> {
        if domain_dim == 0 || domain_dim > total.dims {
            return Err(Error::InvalidGrid(format!(
                "domain dimension {domain_dim} outside 1..={}",
                total.dims
            )));
        }
        Ok(CubicalPair { total, domain_dim })
    }

    /// The pair `(D^m, ∂D^m)` at the same resolution.
    pub fn domain(domain_dim: usize, resolution: usize) -> Result<Self> {
        CubicalPair::new(CubicalComplex::full(domain_dim, resolution)?, domain_dim)
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.total.dims - self.domain_dim
    }

    pub fn in_boundary_part(&self, c: Cube) -> bool {
        let top = 2 * self.total.resolution as u32;
        (0..self.domain_dim).any(|a| {
            let x = c.coord(a);
            x == 0 || x == top
        })
    }

    pub fn boundary_part(&self) -> CubicalComplex {
        self.total.filter(|c| self.in_boundary_part(c))
    }

    /// Domain cube under `c`, if `c` is degenerate along every codomain axis.
    pub fn project(&self, c: Cube) -> Option<Cube> {
        let n = self.total.dims;
        if (self.domain_dim..n).any(|a| c.coord(a) & 1 == 1) {
            return None;
        }
        Some(Cube::new(&c.coords(self.domain_dim)))
    }

    /// A fixed top-dimensional domain cube away from the boundary.
    pub fn reference_cube(&self) -> Cube {
        let r = self.total.resolution as u32;
        Cube::new(&vec![2 * (r / 2).min(r - 1) + 1; self.domain_dim])
    }

    /// Relative `m`-cubes projecting onto the reference cube.
    fn reference_cochain(&self) -> Vec<(Cube, i64)> {
        let q0 = self.reference_cube();
        let m = self.domain_dim;
        self.total.cells(m).iter().filter(|&&c| self.project(c) == Some(q0)).map(|&c| (c, 1)).collect()
    }

    /// `H_m` of the pair and the map it induces to `H_m(D^m, ∂D^m)`.
    ///
    /// A relative `m`-cycle of the domain pair has the same coefficient on
    /// every top cube, so the induced map is read off by evaluating the
    /// pulled-back dual of the reference cube on each generator.
    pub fn projection_homology(&self) -> Result<ProjectionHomology> {
        let m = self.domain_dim;
        let cr = coreduce(&self.total, |c| self.in_boundary_part(c), &[], &[(m, self.reference_cochain())])?;
        let critical_cells = cr.complex.counts().iter().sum();
        let red = shrink(cr);
        let basis = HomologyBasis::compute(&red.complex, m)?;
        let phi = to_big(&red.cochains[0].1, red.complex.count(m));
        let images = basis
            .generators
            .iter()
            .map(|g| {
                let v: BigInt = g.iter().zip(&phi).map(|(a, b)| a * b).sum();
                v.to_i64().expect("projection degree fits in i64")
            })
            .collect();
        let orders = basis.orders.iter().map(|o| o.as_ref().map(|x| x.to_u64().unwrap_or(u64::MAX))).collect();
        Ok(ProjectionHomology { relative: basis.group, images, orders, critical_cells })
    }

    /// Absolute homology of the total complex in degree `q`.
    pub fn absolute_homology(&self, q: usize) -> Result<HomologyGroup> {
        let cr = coreduce(&self.total, |_| false, &[], &[])?;
        crate::homology::homology(&cr.complex, q)
    }

    /// Order of the class of the cycle `z` in `H_q` of the total complex.
    pub fn class_order(&self, q: usize, z: &[(Cube, i64)]) -> Result<ClassOrder> {
        let cr = coreduce(&self.total, |_| false, &[(q, z.to_vec())], &[])?;
        let red = shrink(cr);
        let basis = HomologyBasis::compute(&red.complex, q)?;
        let zb = to_big(&red.chains[0].1, red.complex.count(q));
        order_from_coordinates(&basis, &basis.coordinates(&zb)?)
    }

    /// The cycle `∂D^m × {v}` for a codomain grid vertex `v` (even coordinates).
    pub fn boundary_cycle(&self, vertex: &[u32]) -> Result<Vec<(Cube, i64)>> {
        let m = self.domain_dim;
        if vertex.len() != self.codomain_dim() || vertex.iter().any(|&x| x & 1 == 1) {
            return Err(Error::Precondition("boundary cycle needs a codomain grid vertex".into()));
        }
        let dom = CubicalComplex::full(m, self.total.resolution)?;
        let mut acc: FxHashMap<Cube, i64> = FxHashMap::default();
        for &top in dom.cells(m) {
            top.for_each_face(m, |f, s| *acc.entry(f).or_insert(0) += s);
        }
        let mut z: Vec<(Cube, i64)> = acc
            .into_iter()
            .filter(|e| e.1 != 0)
            .map(|(f, s)| {
                let mut c = f.coords(m);
                c.extend_from_slice(vertex);
                (Cube::new(&c), s)
            })
            .collect();
        z.sort();
        if let Some((c, _)) = z.iter().find(|(c, _)| !self.total.contains(*c)) {
            return Err(Error::Precondition(format!("{c:?} is not in the complex")));
        }
        Ok(z)
    }

    /// Explicit chain-level data: the total complex, the boundary part as a
    /// subcomplex (cell indices per degree), and the projection onto the
    /// domain cube complex.
    pub fn explicit(&self) -> Result<(ChainComplex, Vec<Vec<usize>>, CubicalComplex, ChainMap)> {
        let c = self.total.to_chain_complex();
        let sub = (0..=self.total.dims)
            .map(|q| (0..self.total.count(q)).filter(|&i| self.in_boundary_part(self.total.cells(q)[i])).collect())
            .collect();
        let dom = CubicalComplex::full(self.domain_dim, self.total.resolution)?;
        let map = self.total.chain_map_to(&dom, |c| self.project(c))?;
        Ok((c, sub, dom, map))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::homology;

    #[test]
    fn encoding_roundtrip() {
        let c = Cube::new(&[3, 0, 128, 7]);
        assert_eq!(c.coords(4), vec![3, 0, 128, 7]);
        assert_eq!(c.dim(), 2);
    }

    #[test]
    fn faces_and_cofaces_agree() {
        let dims = 3;
        let cx = CubicalComplex::full(dims, 2).unwrap();
        for c in cx.iter() {
            c.for_each_coface(dims, 2, |d, s| {
                assert!(d.faces(dims).contains(&(c, s)), "{c:?} in {d:?}");
            });
            for (f, s) in c.faces(dims) {
                let mut found = false;
                f.for_each_coface(dims, 2, |d, t| found |= d == c && t == s);
                assert!(found);
            }
        }
    }

    #[test]
    fn full_cube_counts() {
        let cx = CubicalComplex::full(2, 3).unwrap();
        assert_eq!((cx.count(0), cx.count(1), cx.count(2)), (16, 24, 9));
        let h = homology(&cx.to_chain_complex(), 0).unwrap();
        assert_eq!(h, HomologyGroup::free(1));
    }

    #[test]
    fn coreduction_of_disk_pair() {
        let cx = CubicalComplex::full(2, 4).unwrap();
        let top = 8;
        let bd = |c: Cube| (0..2).any(|a| c.coord(a) == 0 || c.coord(a) == top);
        let r = coreduce(&cx, bd, &[], &[]).unwrap();
        assert_eq!(homology(&r.complex, 2).unwrap(), HomologyGroup::free(1));
        assert!(homology(&r.complex, 1).unwrap().is_zero());
        assert!(r.complex.counts().iter().sum::<usize>() <= 3);
    }

    #[test]
    fn coreduction_of_annulus() {
        let seeds: Vec<Cube> = cartesian(&[(1, 7), (1, 7)], 2)
            .into_iter()
            .filter(|c| !(c.coord(0) == 3 || c.coord(0) == 5) || !(c.coord(1) == 3 || c.coord(1) == 5))
            .collect();
        let cx = CubicalComplex::closure(2, 4, seeds).unwrap();
        let r = coreduce(&cx, |_| false, &[], &[]).unwrap();
        assert_eq!(homology(&r.complex, 0).unwrap(), HomologyGroup::free(1));
        assert_eq!(homology(&r.complex, 1).unwrap(), HomologyGroup::free(1));
        assert!(homology(&r.complex, 2).unwrap().is_zero());
    }
}
