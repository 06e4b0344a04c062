//! Smith normal form of a small integer matrix, with the unimodular
//! transforms that produce it.

use homsel::homology::{smith_normal_form, snf};

fn main() {
    let m = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
    let s = smith_normal_form(&snf::from_i64(&m), 3, 3);
    println!("M = {m:?}");
    println!("invariant factors: {:?}", s.invariant_factors());
    println!("rank: {}", s.rank());
    let umv = snf::mul(&snf::mul(&s.u, &snf::from_i64(&m), 3), &s.v, 3);
    assert_eq!(umv, s.s);
    println!("U·M·V = S checked");
}
