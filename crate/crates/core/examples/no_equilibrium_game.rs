//! The two-player game on disks whose best responses never meet: the
//! smallest achievable maximal regret stays bounded away from zero as the
//! grid is refined.

use homsel::constructions::{counterexample_game, graph_separation, no_fixed_point_gap};
use homsel::games::{nash_search, nash_search_with, SearchMethod};

fn main() -> homsel::Result<()> {
    let game = counterexample_game()?;
    let mut gaps = Vec::new();
    for r in [16, 32, 64] {
        let rep = nash_search_with(&game, r, 2e-3, SearchMethod::BranchAndBound)?;
        println!(
            "r = {r}: min max regret {:.5} (lower bound {:.5}) at {:?}, {} evaluations",
            rep.min_max_regret, rep.min_max_regret_lower, rep.best_profile, rep.evaluations
        );
        gaps.push(rep.min_max_regret);
    }
    let delta = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let rep = nash_search(&game, 64, delta / 2.0)?;
    println!("certificates at tol {:.5}: {}", delta / 2.0, rep.certificates.len());
    println!("f1∘f2 stays {:.4} away from the identity on C", no_fixed_point_gap(64).gap);
    println!("graphs of the best responses are {:.4} apart", graph_separation(128).0);
    Ok(())
}
