use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

/// Cost matrix indexed `[row strategy of player 1][column strategy of player 2]`.
pub type Matrix2 = [[f64; 2]; 2];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BimatrixEquilibrium {
    /// Probabilities of each player's first pure strategy.
    pub x: [f64; 2],
    /// The same probabilities as exact fractions.
    pub exact: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BimatrixSolution {
    pub equilibria: Vec<BimatrixEquilibrium>,
    /// Some player's cost does not depend on their own strategy, so the
    /// equilibria form a continuum; `equilibria` lists its corner points.
    pub continuum: bool,
    /// Indifference thresholds: the opponent probability at which each
    /// player's cost slope vanishes, if it lies in `[0, 1]`.
    pub thresholds: [Option<String>; 2],
}

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite matrix entry")
}

/// Slope of a player's cost in their own probability, as `a + b·y` in the
/// opponent probability `y`.
struct Slope {
    a: BigRational,
    b: BigRational,
}

impl Slope {
    fn at(&self, y: &BigRational) -> BigRational {
        &self.a + &self.b * y
    }

    fn degenerate(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn root(&self) -> Option<BigRational> {
        if self.b.is_zero() {
            return None;
        }
        let r = -&self.a / &self.b;
        (!r.is_negative() && r <= BigRational::one()).then_some(r)
    }

    /// `x ∈ argmin over [0,1] of slope(y)·x`.
    fn responds(&self, y: &BigRational, x: &BigRational) -> bool {
        let s = self.at(y);
        if s.is_positive() {
            x.is_zero()
        } else if s.is_negative() {
            x.is_one()
        } else {
            true
        }
    }
}

/// All equilibria of the mixed extension of a 2×2 cost bimatrix game,
/// computed from the piecewise-constant best-response paths in exact
/// rational arithmetic.
pub fn bimatrix_solve(m1: Matrix2, m2: Matrix2) -> BimatrixSolution {
    // r1 = x·s1(y) + const with s1(y) = (M01 − M11) + y·((M00 − M10) − (M01 − M11))
    let p = q(m1[0][1]) - q(m1[1][1]);
    let s1 = Slope { b: q(m1[0][0]) - q(m1[1][0]) - &p, a: p };
    let p = q(m2[1][0]) - q(m2[1][1]);
    let s2 = Slope { b: q(m2[0][0]) - q(m2[0][1]) - &p, a: p };

    let (t1, t2) = (s1.root(), s2.root());
    let mut xs = vec![BigRational::zero(), BigRational::one()];
    xs.extend(t2.clone());
    let mut ys = vec![BigRational::zero(), BigRational::one()];
    ys.extend(t1.clone());
    let mut found: Vec<(BigRational, BigRational)> = Vec::new();
    for x in &xs {
        for y in &ys {
            if s1.responds(y, x) && s2.responds(x, y) && !found.iter().any(|(a, b)| a == x && b == y) {
                found.push((x.clone(), y.clone()));
            }
        }
    }
    found.sort();
    let show = |r: &BigRational| {
        if r.denom() == &BigInt::one() {
            r.numer().to_string()
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    };
    BimatrixSolution {
        equilibria: found
            .iter()
            .map(|(x, y)| BimatrixEquilibrium {
                x: [x.to_f64().unwrap(), y.to_f64().unwrap()],
                exact: [show(x), show(y)],
            })
            .collect(),
        continuum: s1.degenerate() || s2.degenerate(),
        thresholds: [t1.as_ref().map(show), t2.as_ref().map(show)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_pennies() {
        let m1 = [[1.0, -1.0], [-1.0, 1.0]];
        let m2 = [[-1.0, 1.0], [1.0, -1.0]];
        let s = bimatrix_solve(m1, m2);
        assert_eq!(s.equilibria.len(), 1);
        assert_eq!(s.equilibria[0].exact, ["1/2".to_string(), "1/2".to_string()]);
        assert!(!s.continuum);
    }

    #[test]
    fn prisoners_dilemma_has_the_dominant_profile() {
        // strategy 0 = cooperate; costs are years in prison
        let m1 = [[1.0, 3.0], [0.0, 2.0]];
        let m2 = [[1.0, 0.0], [3.0, 2.0]];
        let s = bimatrix_solve(m1, m2);
        assert_eq!(s.equilibria.len(), 1);
        assert_eq!(s.equilibria[0].x, [0.0, 0.0]);
    }

    #[test]
    fn coordination_game_has_three_equilibria() {
        let m1 = [[0.0, 1.0], [1.0, 0.0]];
        let s = bimatrix_solve(m1, m1);
        let pts: Vec<[f64; 2]> = s.equilibria.iter().map(|e| e.x).collect();
        assert_eq!(pts, vec![[0.0, 0.0], [0.5, 0.5], [1.0, 1.0]]);
    }

    #[test]
    fn indifferent_player_is_flagged() {
        let s = bimatrix_solve([[1.0, 1.0], [1.0, 1.0]], [[0.0, 1.0], [0.0, 1.0]]);
        assert!(s.continuum);
        assert!(!s.equilibria.is_empty());
    }
}
