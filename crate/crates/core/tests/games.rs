use homsel::constructions::counterexample_game;
use homsel::games::{bimatrix_solve, nash_search, nash_search_with, regrets, Game, SearchMethod};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng) -> [[f64; 2]; 2] {
    [[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)], [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]]
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Coarse grid profiles within `radius` of `p` whose regrets are all within `tol`.
fn coarse_certificates_near(game: &Game, resolution: usize, p: &[f64], radius: f64, tol: f64) -> usize {
    let h = 1.0 / resolution as f64;
    let axis = |x: f64| -> Vec<f64> {
        (0..=resolution).map(|j| j as f64 * h).filter(|y| (y - x).abs() <= radius + 1e-12).collect()
    };
    let (xs, ys) = (axis(p[0]), axis(p[1]));
    xs.iter()
        .flat_map(|&x| ys.iter().map(move |&y| [x, y]))
        .filter(|q| regrets(game, resolution, q).unwrap().iter().all(|&r| r <= tol))
        .count()
}

#[test]
fn certificates_persist_on_the_coarser_grid() {
    let games = [
        Game::matching_pennies(),
        Game::parse("bimatrix([[0,1],[1,0.5]],[[0,1],[1,0.5]])").unwrap(),
        Game::parse("bimatrix([[2,0],[3,1]],[[2,3],[0,1]])").unwrap(),
    ];
    for game in &games {
        for (fine, coarse) in [(32, 16), (64, 32), (128, 64)] {
            let rep = nash_search(game, fine, 1e-2).unwrap();
            assert!(!rep.certificates.is_empty());
            for c in &rep.certificates {
                let radius = 2.0 / coarse as f64;
                assert!(
                    coarse_certificates_near(game, coarse, &c.point, radius, 1e-2) > 0,
                    "{:?} at 1/{fine} has no certificate within {radius} at 1/{coarse}",
                    c.point
                );
            }
        }
    }
}

#[test]
fn a_steep_non_dyadic_equilibrium_has_no_coarse_certificate() {
    // the mixed equilibrium (2/3, 1/3) is a sixth of a step off the 1/64
    // grid and the regret slope is 3, so every nearby coarse node misses
    // the tolerance while the 1/128 grid still certifies it
    let game = Game::parse("bimatrix([[0,2],[2,1]],[[1,2],[2,0]])").unwrap();
    let fine = nash_search(&game, 128, 1e-2).unwrap();
    let c = fine.certificates.iter().find(|c| sup(&c.point, &[2.0 / 3.0, 1.0 / 3.0]) < 0.01).unwrap();
    assert_eq!(coarse_certificates_near(&game, 64, &c.point, 2.0 / 64.0, 1e-2), 0);
    assert!(coarse_certificates_near(&game, 64, &c.point, 2.0 / 64.0, 2e-2) > 0);
}

#[test]
fn every_certificate_passes_its_audit() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..30 {
        let game = Game::bilinear(random_matrix(&mut rng), random_matrix(&mut rng));
        for method in [SearchMethod::Exhaustive, SearchMethod::BranchAndBound] {
            let rep = nash_search_with(&game, 64, 2e-2, method).unwrap();
            assert!(!rep.certificates.is_empty());
            for c in &rep.certificates {
                assert!(c.audit(&game).unwrap());
            }
        }
    }
    // generous tolerance so that the game without equilibria yields certificates too
    let game = counterexample_game().unwrap();
    let rep = nash_search(&game, 16, 0.02).unwrap();
    assert!(!rep.certificates.is_empty());
    assert!(rep.certificates.iter().all(|c| c.audit(&game).unwrap()));
}

#[test]
fn exact_equilibria_are_grid_certificates() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..50 {
        let (m1, m2) = (random_matrix(&mut rng), random_matrix(&mut rng));
        let game = Game::bilinear(m1, m2);
        let rep = nash_search_with(&game, 256, 1e-2, SearchMethod::Exhaustive).unwrap();
        for e in bimatrix_solve(m1, m2).equilibria {
            assert!(rep.certificates.iter().any(|c| sup(&c.point, &e.x) <= 1.0 / 128.0));
        }
    }
}

#[test]
fn branch_and_bound_brackets_the_minimal_regret() {
    let game = counterexample_game().unwrap();
    let bb = nash_search_with(&game, 16, 1e-3, SearchMethod::BranchAndBound).unwrap();
    let ex = nash_search_with(&game, 16, 1e-3, SearchMethod::Exhaustive).unwrap();
    assert!((bb.min_max_regret - ex.min_max_regret).abs() < 1e-12);
    assert!(bb.min_max_regret_lower <= ex.min_max_regret + 1e-12);
    assert!(bb.evaluations < ex.evaluations);
}
