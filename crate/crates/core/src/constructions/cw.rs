use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use crate::error::Result;
use crate::homology::{homology_all, ChainComplex, ComplexJson, HomologyBasis, HomologyGroup, SparseMatrix};

/// Builds a labelled complex from boundary formulas written with labels.
fn from_formulas(cells: &[&[&str]], formulas: &[&[(&str, &[(&str, i64)])]]) -> Result<ChainComplex> {
    let labels: Vec<Vec<String>> = cells.iter().map(|d| d.iter().map(|s| s.to_string()).collect()).collect();
    let find = |q: usize, l: &str| labels[q].iter().position(|x| x == l).expect("known cell label");
    let mut boundaries = Vec::new();
    for (q, rows) in formulas.iter().enumerate() {
        let q = q + 1;
        let mut cols = vec![Vec::new(); labels[q].len()];
        for (cell, terms) in rows.iter() {
            cols[find(q, cell)] = terms.iter().map(|(l, c)| (find(q - 1, l), *c)).collect();
        }
        boundaries.push(SparseMatrix::from_columns(labels[q - 1].len(), cols));
    }
    ChainComplex::new(labels.iter().map(Vec::len).collect(), boundaries)?.with_labels(labels)
}

/// Cell structure on the graph of `g_P`: vertices `v, w`, edges
/// `a1, a2` from `v` to `w`, the loop `α` at `v`, and three 2-cells.
/// `∂e1 = ∂e2 = α`, `∂e3 = α + a1 − a2`.
pub fn cw_gr_gp() -> Result<ChainComplex> {
    from_formulas(
        &[&["v", "w"], &["a1", "a2", "alpha"], &["e1", "e2", "e3"]],
        &[
            &[("a1", &[("w", 1), ("v", -1)]), ("a2", &[("w", 1), ("v", -1)]), ("alpha", &[])],
            &[
                ("e1", &[("alpha", 1)]),
                ("e2", &[("alpha", 1)]),
                ("e3", &[("alpha", 1), ("a1", 1), ("a2", -1)]),
            ],
        ],
    )
}

/// Cell structure on the graph of `h_C`: vertices `v_i, w_i`, edges
/// `a_j^i` from `v_i` to `w_i`, arcs `α_kl` from `v_k` to `v_l` forming the
/// boundary circle `α = α_12 + α_23 + α_31`, and 2-cells
/// `∂e1 = α + a_1^3 − a_2^3`, `∂e2 = α + a_1^1 − a_2^1`, `∂e3 = α + a_1^2 − a_2^2`.
pub fn cw_gr_hc() -> Result<ChainComplex> {
    let alpha: [(&str, i64); 3] = [("alpha12", 1), ("alpha23", 1), ("alpha31", 1)];
    let e = |i: &'static str, j: &'static str| -> Vec<(&'static str, i64)> {
        let mut v = alpha.to_vec();
        v.push((i, 1));
        v.push((j, -1));
        v
    };
    let (e1, e2, e3) = (e("a1^3", "a2^3"), e("a1^1", "a2^1"), e("a1^2", "a2^2"));
    from_formulas(
        &[
            &["v1", "v2", "v3", "w1", "w2", "w3"],
            &["a1^1", "a2^1", "a1^2", "a2^2", "a1^3", "a2^3", "alpha12", "alpha23", "alpha31"],
            &["e1", "e2", "e3"],
        ],
        &[
            &[
                ("a1^1", &[("w1", 1), ("v1", -1)]),
                ("a2^1", &[("w1", 1), ("v1", -1)]),
                ("a1^2", &[("w2", 1), ("v2", -1)]),
                ("a2^2", &[("w2", 1), ("v2", -1)]),
                ("a1^3", &[("w3", 1), ("v3", -1)]),
                ("a2^3", &[("w3", 1), ("v3", -1)]),
                ("alpha12", &[("v2", 1), ("v1", -1)]),
                ("alpha23", &[("v3", 1), ("v2", -1)]),
                ("alpha31", &[("v1", 1), ("v3", -1)]),
            ],
            &[("e1", &e1), ("e2", &e2), ("e3", &e3)],
        ],
    )
}

/// Homology of the `h_C` graph complex and the checks on `α`.
#[derive(Clone, Debug, Serialize)]
pub struct CwReport {
    pub complex: ComplexJson,
    pub homology: Vec<HomologyGroup>,
    /// `α` is a free generator of `H_1`.
    pub alpha_generates: bool,
    /// For each `i`, whether `α − (a_2^i − a_1^i)` is a boundary.
    pub loops_homologous: Vec<bool>,
}

fn chain(c: &ChainComplex, terms: &[(&str, i64)]) -> Vec<BigInt> {
    let mut z = vec![BigInt::from(0); c.count(1)];
    for (l, k) in terms {
        z[c.cell(1, l).expect("known cell label")] += *k;
    }
    z
}

pub fn gr_hc_report() -> Result<CwReport> {
    let c = cw_gr_hc()?;
    let homology = homology_all(&c);
    let basis = HomologyBasis::compute(&c, 1)?;
    let alpha = [("alpha12", 1), ("alpha23", 1), ("alpha31", 1)];
    let coords = basis.coordinates(&chain(&c, &alpha))?;
    let alpha_generates = homology[1] == HomologyGroup::free(1) && coords.len() == 1 && coords[0].abs() == 1.into();
    let mut loops = Vec::new();
    for i in 1..=3 {
        let (a1, a2) = (format!("a1^{i}"), format!("a2^{i}"));
        let mut terms = alpha.to_vec();
        terms.push((a2.as_str(), -1));
        terms.push((a1.as_str(), 1));
        loops.push(basis.is_boundary(&chain(&c, &terms))?);
    }
    Ok(CwReport { complex: c.to_json(), homology, alpha_generates, loops_homologous: loops })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gr_gp_homology() {
        let c = cw_gr_gp().unwrap();
        let h = homology_all(&c);
        assert_eq!(h, vec![HomologyGroup::free(1), HomologyGroup::zero(), HomologyGroup::free(1)]);
    }

    #[test]
    fn gr_hc_homology_and_alpha() {
        let r = gr_hc_report().unwrap();
        assert_eq!(r.homology[0], HomologyGroup::free(1));
        assert_eq!(r.homology[1], HomologyGroup::free(1));
        assert!(r.homology[2].is_zero());
        assert!(r.alpha_generates);
        assert_eq!(r.loops_homologous, vec![true, true, true]);
    }

    #[test]
    fn unsigned_reading_fails_the_square_check() {
        // both edges of a loop entering with the same sign
        let bad = from_formulas(
            &[&["v", "w"], &["a1", "a2", "alpha"], &["e3"]],
            &[
                &[("a1", &[("w", 1), ("v", -1)]), ("a2", &[("w", 1), ("v", -1)]), ("alpha", &[])],
                &[("e3", &[("alpha", 1), ("a1", 1), ("a2", 1)])],
            ],
        );
        assert!(bad.is_err());
    }
}
