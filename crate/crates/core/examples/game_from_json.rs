//! Games described in JSON: a builtin, an explicit bimatrix, and a cost
//! table interpolated between grid nodes.

use homsel::games::{nash_search, Game};

fn main() -> homsel::Result<()> {
    let texts = [
        r#"{"players": 2, "dims": [1, 1], "cost": {"kind": "builtin", "name": "matching_pennies"}}"#,
        r#"{"players": 2, "dims": [1, 1], "cost": {"kind": "bilinear", "matrices": [[[2, 0], [0, 1]], [[1, 0], [0, 2]]]}}"#,
        r#"{"players": 2, "dims": [1, 1], "cost": {"kind": "table", "resolution": 1,
            "tables": [[0, 1, 1, 0], [1, 0, 0, 1]]}}"#,
    ];
    for t in texts {
        let g = Game::parse(t)?;
        let rep = nash_search(&g, 32, 1e-2)?;
        let points: Vec<&Vec<f64>> = rep.certificates.iter().map(|c| &c.point).collect();
        println!("{}: certificates {points:?}", g.name());
    }
    Ok(())
}
