//! Boundary class order for liftable maps constant on the boundary circle:
//! the `r`-th root covers pinched to a point near the rim.

use homsel::constructions::root_cover;
use homsel::selection::boundary_class_order_check;

fn main() -> homsel::Result<()> {
    for r in 1..=3u32 {
        let f = root_cover(16, r, true)?;
        let rep = boundary_class_order_check(&f, r as u64, 2)?;
        println!("weight {r}: order {:?}, divides weight: {}", rep.order, rep.divides);
    }
    Ok(())
}
