//! Homology of the torus from its minimal cell structure: one vertex, two
//! edges `a`, `b`, and one face attached along `a b a⁻¹ b⁻¹`.

use homsel::homology::{homology_all, relative_homology, ChainComplex, SparseMatrix, Subcomplex};

fn main() -> homsel::Result<()> {
    let d1 = SparseMatrix::zero(1, 2);
    let d2 = SparseMatrix::zero(2, 1);
    let torus = ChainComplex::new(vec![1, 2, 1], vec![d1, d2])?;
    for (q, h) in homology_all(&torus).iter().enumerate() {
        println!("H_{q}(T²) = {h}");
    }

    // projective plane: face attached along a·a
    let rp2 = ChainComplex::new(
        vec![1, 1, 1],
        vec![SparseMatrix::zero(1, 1), SparseMatrix::from_triplets(1, 1, &[(0, 0, 2)])?],
    )?;
    for (q, h) in homology_all(&rp2).iter().enumerate() {
        println!("H_{q}(RP²) = {h}");
    }

    // the interval relative to its endpoints
    let interval = ChainComplex::new(vec![2, 1], vec![SparseMatrix::from_triplets(2, 1, &[(0, 0, -1), (1, 0, 1)])?])?;
    let ends = Subcomplex::new(&interval, vec![vec![0, 1]])?;
    println!("H_1(D¹, ∂D¹) = {}", relative_homology(&ends, 1)?);
    Ok(())
}
