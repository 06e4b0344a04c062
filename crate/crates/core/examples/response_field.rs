//! Best responses of a player whose cost is a quartic in their own
//! strategy: two minimizers move continuously with the opponent and merge
//! into a double one at y = 0, and the field lifts to weighted configurations.

use std::sync::Arc;

use homsel::games::{polynomial_like_check, response_field, Game, ResponseOptions};

fn main() -> homsel::Result<()> {
    let cost = |a: &[f64]| {
        let (x, y) = (a[0], a[1]);
        let s = 0.25 * y;
        ((x - 0.5).powi(2) - s * s).powi(2)
    };
    let game = Game::new("double_well", vec![1, 1], vec![Arc::new(cost), Arc::new(|_: &[f64]| 0.0)])?;
    let field = response_field(&game, 0, &ResponseOptions::new(32, 1e-9))?;
    let sizes: Vec<usize> = field.field.values().iter().map(|v| v.len()).collect();
    println!("response sizes along the opponent grid: {sizes:?}");
    let rep = polynomial_like_check(&field.field, 2, None)?;
    println!("lift of weight 2: {:?}", rep.verdict);
    Ok(())
}
