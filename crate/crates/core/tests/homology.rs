mod common;

use homsel::cubical::{Cube, CubicalComplex, CubicalPair};
use homsel::homology::{
    homology, homology_all, induced_map, relative_homology, smith_normal_form, snf, ChainComplex, ChainMap,
    HomologyBasis, SparseMatrix, Subcomplex,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn matrix(rows: usize, cols: usize, lo: i64, hi: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(lo..=hi, cols), rows)
}

fn sized_matrix(max: usize, lo: i64, hi: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max, 1..=max).prop_flat_map(move |(r, c)| matrix(r, c, lo, hi))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn smith_form_matches_determinantal_divisors(m in sized_matrix(4, -5, 5)) {
        let (rows, cols) = (m.len(), m[0].len());
        let s = smith_normal_form(&snf::from_i64(&m), rows, cols);
        let expected: Vec<BigInt> = common::invariant_factors_by_minors(&m).into_iter().map(BigInt::from).collect();
        prop_assert_eq!(s.invariant_factors(), expected);
        prop_assert_eq!(snf::mul(&snf::mul(&s.u, &snf::from_i64(&m), cols), &s.v, cols), s.s.clone());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn smith_rank_is_the_rational_rank(m in sized_matrix(7, -9, 9)) {
        let (rows, cols) = (m.len(), m[0].len());
        let s = smith_normal_form(&snf::from_i64(&m), rows, cols);
        prop_assert_eq!(s.rank(), common::rational_rank(&snf::from_i64(&m)));
        let f = s.invariant_factors();
        for w in f.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
        prop_assert!(f.iter().all(|d| d.is_positive()));
    }

    #[test]
    fn large_entries_survive_overflow(m in sized_matrix(5, -1_000_000_000_000, 1_000_000_000_000)) {
        let (rows, cols) = (m.len(), m[0].len());
        let s = smith_normal_form(&snf::from_i64(&m), rows, cols);
        prop_assert_eq!(snf::mul(&snf::mul(&s.u, &snf::from_i64(&m), cols), &s.v, cols), s.s.clone());
        prop_assert_eq!(s.rank(), common::rational_rank(&snf::from_i64(&m)));
    }
}

fn euler_from_homology(c: &ChainComplex) -> i64 {
    homology_all(c).iter().enumerate().map(|(q, h)| if q % 2 == 0 { h.betti as i64 } else { -(h.betti as i64) }).sum()
}

#[test]
fn euler_characteristic_of_random_complexes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let n = rng.gen_range(3..=7);
        let k = rng.gen_range(1..=8);
        let x = common::random_simplicial(&mut rng, n, k, 3).chain_complex();
        assert_eq!(x.euler_characteristic(), euler_from_homology(&x));
    }
}

/// Rank over the rationals of an induced map, restricted to free generators.
fn free_rank(m: &[Vec<BigInt>], source: &HomologyBasis, target: &HomologyBasis) -> usize {
    let rows: Vec<usize> = (0..target.orders.len()).filter(|&i| target.orders[i].is_none()).collect();
    let cols: Vec<usize> = (0..source.orders.len()).filter(|&j| source.orders[j].is_none()).collect();
    let sub: Vec<Vec<BigInt>> = rows.iter().map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect()).collect();
    if sub.is_empty() || cols.is_empty() {
        return 0;
    }
    common::rational_rank(&sub)
}

#[test]
fn long_exact_sequence_of_a_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let n = rng.gen_range(4..=7);
        let facets = rng.gen_range(2..=8);
        let space = common::random_simplicial(&mut rng, n, facets, 3);
        let x = space.chain_complex();
        let cut = rng.gen_range(1..n);
        let a = Subcomplex::new(&x, space.sub_where(|s| s.iter().all(|&v| v < cut))).unwrap();
        let (ac, incl) = a.inclusion();
        let (quot, proj) = a.projection();
        // χ(X) = χ(A) + χ(X, A)
        assert_eq!(x.euler_characteristic(), ac.euler_characteristic() + quot.euler_characteristic());
        for q in 0..=x.top_degree() {
            // exactness at H_q(X) over Q: dim H_q(X) = rank i_* + rank j_*
            let (ha, hx, i_star) = induced_map(&incl, &ac, &x, q).unwrap();
            let (hx2, hq, j_star) = induced_map(&proj, &x, &quot, q).unwrap();
            assert_eq!(hx.group, hx2.group);
            let r_i = free_rank(&i_star, &ha, &hx);
            let r_j = free_rank(&j_star, &hx2, &hq);
            assert_eq!(hx.group.betti, r_i + r_j, "degree {q}");
            assert_eq!(relative_homology(&a, q).unwrap(), hq.group);
        }
    }
}

fn simplicial_map(
    src: &common::Simplicial,
    dst: &common::Simplicial,
    src_c: &ChainComplex,
    dst_c: &ChainComplex,
    f: impl Fn(u32) -> u32,
) -> ChainMap {
    let maps = src
        .simplices
        .iter()
        .enumerate()
        .map(|(q, cells)| {
            let cols = cells
                .iter()
                .map(|s| {
                    let img: Vec<u32> = s.iter().map(|&v| f(v)).collect();
                    let mut sorted = img.clone();
                    sorted.sort();
                    sorted.dedup();
                    if sorted.len() < img.len() {
                        return vec![];
                    }
                    // sign of the permutation sorting the image
                    let inversions = (0..img.len()).flat_map(|i| (i + 1..img.len()).map(move |j| (i, j)));
                    let sign = if inversions.filter(|&(i, j)| img[i] > img[j]).count() % 2 == 0 { 1 } else { -1 };
                    vec![(dst.index(&sorted).unwrap(), sign)]
                })
                .collect();
            SparseMatrix::from_columns(dst_c.count(q), cols)
        })
        .collect();
    ChainMap::new(src_c, dst_c, maps).unwrap()
}

fn to_i64(m: &[Vec<BigInt>]) -> Vec<Vec<i64>> {
    m.iter().map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect()).collect()
}

#[test]
fn induced_maps_are_functorial() {
    let circle = common::circle();
    let c = circle.chain_complex();
    // rotation has degree 1, the reflection fixing 0 has degree -1
    let rot = simplicial_map(&circle, &circle, &c, &c, |v| (v + 1) % 3);
    let refl = simplicial_map(&circle, &circle, &c, &c, |v| [0, 2, 1][v as usize]);
    let deg = |f: &ChainMap| to_i64(&induced_map(f, &c, &c, 1).unwrap().2)[0][0];
    assert_eq!(deg(&rot), 1);
    assert_eq!(deg(&refl), -1);
    assert_eq!(deg(&rot.then(&refl).unwrap()), deg(&rot) * deg(&refl));
    assert_eq!(deg(&refl.then(&refl).unwrap()), 1);
    assert_eq!(to_i64(&induced_map(&ChainMap::identity(&c), &c, &c, 1).unwrap().2), vec![vec![1]]);

    let torus = common::torus();
    let t = torus.chain_complex();
    let shift = simplicial_map(&torus, &torus, &t, &t, |v| (v + 1) % 7);
    let m = to_i64(&induced_map(&shift, &t, &t, 1).unwrap().2);
    let twice = to_i64(&induced_map(&shift.then(&shift).unwrap(), &t, &t, 1).unwrap().2);
    let square: Vec<Vec<i64>> =
        (0..2).map(|i| (0..2).map(|j| (0..2).map(|k| m[i][k] * m[k][j]).sum()).collect()).collect();
    assert_eq!(twice, square);
    assert_eq!(common::det(&m).abs(), 1);
}

#[test]
fn projective_plane_has_two_torsion() {
    let rp2 = common::projective_plane();
    let c = rp2.chain_complex();
    assert_eq!(homology(&c, 1).unwrap().torsion, vec![2]);
    assert!(homology(&c, 2).unwrap().is_zero());
}

fn random_cubical(rng: &mut ChaCha8Rng, dims: usize, resolution: usize, seeds: usize) -> CubicalComplex {
    let top = 2 * resolution as u32;
    let cubes: Vec<Cube> = (0..seeds)
        .map(|_| {
            let coords: Vec<u32> = (0..dims).map(|_| rng.gen_range(0..=top)).collect();
            Cube::new(&coords)
        })
        .collect();
    CubicalComplex::closure(dims, resolution, cubes).unwrap()
}

#[test]
fn coreduction_matches_the_explicit_complex() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for trial in 0..150 {
        let dims = rng.gen_range(2..=3);
        let seeds = rng.gen_range(5..=40);
        let total = random_cubical(&mut rng, dims, 3, seeds);
        let m = rng.gen_range(1..dims);
        let pair = CubicalPair::new(total.clone(), m).unwrap();
        let explicit = total.to_chain_complex();
        for q in 0..=dims {
            assert_eq!(pair.absolute_homology(q).unwrap(), homology(&explicit, q).unwrap(), "trial {trial} H_{q}");
        }
        let (c, sub, dom, map) = pair.explicit().unwrap();
        let a = Subcomplex::new(&c, sub).unwrap();
        let proj = pair.projection_homology().unwrap();
        assert_eq!(proj.relative, relative_homology(&a, m).unwrap(), "trial {trial}");

        // the induced map on H_m, computed on the full quotient complexes
        let domc = dom.to_chain_complex();
        let bd: Vec<Vec<usize>> = (0..=m)
            .map(|q| {
                (0..dom.count(q))
                    .filter(|&i| {
                        let cube = dom.cells(q)[i];
                        (0..m).any(|ax| cube.coord(ax) % 2 == 0 && (cube.coord(ax) == 0 || cube.coord(ax) == 6))
                    })
                    .collect()
            })
            .collect();
        let b = Subcomplex::new(&domc, bd).unwrap();
        let (sq, sidx) = a.quotient();
        let (tq, tidx) = b.quotient();
        let maps = (0..=c.top_degree())
            .map(|q| {
                let tpos: std::collections::HashMap<usize, usize> =
                    tidx.get(q).map_or(Default::default(), |v| v.iter().enumerate().map(|(k, &i)| (i, k)).collect());
                let rows = tidx.get(q).map_or(0, |v| v.len());
                let cols = sidx[q]
                    .iter()
                    .map(|&i| {
                        if q > m {
                            return vec![];
                        }
                        map.degree_map(q).column(i).iter().filter_map(|&(r, v)| tpos.get(&r).map(|&k| (k, v))).collect()
                    })
                    .collect();
                SparseMatrix::from_columns(rows, cols)
            })
            .collect();
        let tq_padded = pad(&tq, c.top_degree());
        let qmap = ChainMap::new(&sq, &tq_padded, maps).unwrap();
        let (_, _, ind) = induced_map(&qmap, &sq, &tq_padded, m).unwrap();
        let gcd_explicit = ind.iter().flatten().fold(BigInt::zero(), |g, x| g.gcd(x));
        let gcd_reduced = proj.images.iter().fold(BigInt::zero(), |g, &x| g.gcd(&BigInt::from(x)));
        assert_eq!(gcd_explicit, gcd_reduced, "trial {trial}");
    }
}

/// Extends a complex by empty degrees up to `top`.
fn pad(c: &ChainComplex, top: usize) -> ChainComplex {
    let mut counts = c.counts().to_vec();
    let mut bs: Vec<SparseMatrix> = (1..counts.len()).map(|q| c.boundary(q)).collect();
    while counts.len() <= top {
        bs.push(SparseMatrix::zero(*counts.last().unwrap(), 0));
        counts.push(0);
    }
    ChainComplex::new(counts, bs).unwrap()
}
