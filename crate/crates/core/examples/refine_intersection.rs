//! Shrinking fattened best-response graphs of matching pennies onto the
//! mixed equilibrium.

use homsel::games::{refine_intersection, Game, RefineOptions};

fn main() -> homsel::Result<()> {
    let ladder = [(0.2, 8), (0.1, 16), (0.05, 32), (0.025, 64)];
    let rep = refine_intersection(&Game::matching_pennies(), &ladder, &RefineOptions::default())?;
    for r in &rep.rungs {
        println!("eps {:.3} at r = {}: {} witnesses, tracked {:?}", r.eps, r.resolution, r.witness_count, r.tracked);
    }
    println!("limit {:?}, Cauchy moduli {:?}", rep.limit, rep.cauchy_modulus);
    Ok(())
}
