//! Samples a two-valued map on the interval, builds the cubical
//! ε-neighborhood of its graph, and reads off how the graph covers the
//! domain relative to its endpoints.

use homsel::metric::{FiniteSubset, Point};
use homsel::multifunction::sample_multifunction;

fn main() -> homsel::Result<()> {
    // x ↦ {x, 1 − x}: two branches crossing at x = ½
    let f = sample_multifunction(1, 1, 16, 2, |x| {
        FiniteSubset::from_points(vec![Point::new(vec![x[0]])?, Point::new(vec![1.0 - x[0]])?])
    })?;
    println!("nodes {}, modulus {:.4}", f.node_count(), f.modulus());
    for steps in [1, 2, 3] {
        let eps = steps as f64 * f.step();
        let pair = f.epsilon_graph_pair(eps)?;
        let h = pair.projection_homology()?;
        println!(
            "eps = {steps} steps: {} cells, H_1(pair) = {}, images in H_1(D¹, ∂D¹): {:?}",
            pair.total.len(),
            h.relative,
            h.images
        );
    }
    Ok(())
}
