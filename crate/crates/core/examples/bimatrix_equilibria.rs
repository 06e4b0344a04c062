//! Exact equilibria of a 2×2 cost game next to the grid certificates.

use homsel::games::{bimatrix_solve, nash_search, Game};

fn main() -> homsel::Result<()> {
    // a coordination game: three equilibria
    let m1 = [[0.0, 1.0], [1.0, 0.5]];
    let m2 = [[0.0, 1.0], [1.0, 0.5]];
    let exact = bimatrix_solve(m1, m2);
    for e in &exact.equilibria {
        println!("exact: x = {:?} ({} / {})", e.x, e.exact[0], e.exact[1]);
    }
    let grid = nash_search(&Game::bilinear(m1, m2), 64, 1e-2)?;
    for c in &grid.certificates {
        println!("grid: {:?} max regret {:.2e}, audit {}", c.point, c.max_regret(), c.audit(&Game::bilinear(m1, m2))?);
    }
    Ok(())
}
