//! Distances between points, finite subsets and weighted configurations,
//! and the map forgetting multiplicities.

use homsel::metric::{config_distance, forget_weights, hausdorff_distance, sup_metric, Configuration, FiniteSubset, Point};

fn p(x: f64, y: f64) -> Point {
    Point::new(vec![x, y]).unwrap()
}

fn main() -> homsel::Result<()> {
    println!("d = {}", sup_metric(&p(0.1, 0.2), &p(0.4, 0.3))?);

    let a = FiniteSubset::from_points(vec![p(0.0, 0.0), p(1.0, 1.0)])?;
    let b = FiniteSubset::from_points(vec![p(0.1, 0.0), p(0.9, 0.8), p(0.5, 0.5)])?;
    println!("d_H = {}", hausdorff_distance(&a, &b)?);

    // {x², y} against {x, y²}: the same support, different weights
    let u = Configuration::from_pairs(vec![(p(0.2, 0.2), 2), (p(0.8, 0.8), 1)])?;
    let v = Configuration::from_pairs(vec![(p(0.2, 0.2), 1), (p(0.8, 0.8), 2)])?;
    println!("d_3 = {}", config_distance(&u, &v)?);
    println!("d_H after forgetting weights = {}", hausdorff_distance(&forget_weights(&u), &forget_weights(&v))?);
    Ok(())
}
