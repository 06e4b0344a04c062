mod common;

use homsel::metric::{
    bottleneck_assignment, config_distance, epsilon_neighborhood_indicator, forget_weights, hausdorff_distance,
    permutation_bottleneck, sup_metric, Configuration, FiniteSubset, Point,
};
use proptest::prelude::*;

fn point(dim: usize) -> impl Strategy<Value = Point> {
    // a coarse lattice makes coincident points common
    prop::collection::vec(0u8..=8, dim).prop_map(|c| Point::new(c.into_iter().map(|x| x as f64 / 8.0).collect()).unwrap())
}

fn subset(dim: usize) -> impl Strategy<Value = FiniteSubset> {
    prop::collection::vec(point(dim), 1..=4).prop_map(|p| FiniteSubset::from_points(p).unwrap())
}

fn configuration(dim: usize, k: usize) -> impl Strategy<Value = Configuration> {
    prop::collection::vec(point(dim), k).prop_map(|p| Configuration::from_pairs(p.into_iter().map(|x| (x, 1)).collect()).unwrap())
}

fn triple<T: std::fmt::Debug>(s: impl Fn() -> BoxedStrategy<T>) -> impl Strategy<Value = (T, T, T)> {
    (s(), s(), s())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn sup_metric_axioms((x, y, z) in (1usize..=3).prop_flat_map(|d| triple(move || point(d).boxed()))) {
        let d = |a: &Point, b: &Point| sup_metric(a, b).unwrap();
        prop_assert_eq!(d(&x, &x), 0.0);
        prop_assert!(close(d(&x, &y), common::sup(&x, &y)));
        prop_assert!(close(d(&x, &y), d(&y, &x)));
        prop_assert_eq!(d(&x, &y) == 0.0, x == y);
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-12);
    }

    #[test]
    fn hausdorff_axioms((a, b, c) in (1usize..=3).prop_flat_map(|d| triple(move || subset(d).boxed()))) {
        let h = |p: &FiniteSubset, q: &FiniteSubset| hausdorff_distance(p, q).unwrap();
        prop_assert!(close(h(&a, &b), common::hausdorff_oracle(&a, &b)));
        prop_assert_eq!(h(&a, &a), 0.0);
        prop_assert!(close(h(&a, &b), h(&b, &a)));
        prop_assert_eq!(h(&a, &b) == 0.0, a.points() == b.points());
        prop_assert!(h(&a, &c) <= h(&a, &b) + h(&b, &c) + 1e-12);
    }

    #[test]
    fn configuration_axioms((u, v, w) in (1usize..=3, 1usize..=6).prop_flat_map(|(d, k)| triple(move || configuration(d, k).boxed()))) {
        let dk = |p: &Configuration, q: &Configuration| config_distance(p, q).unwrap();
        prop_assert!(close(dk(&u, &v), common::config_oracle(&u, &v)));
        prop_assert_eq!(dk(&u, &u), 0.0);
        prop_assert!(close(dk(&u, &v), dk(&v, &u)));
        prop_assert_eq!(dk(&u, &v) == 0.0, u == v);
        prop_assert!(dk(&u, &w) <= dk(&u, &v) + dk(&v, &w) + 1e-12);
    }

    #[test]
    fn forgetting_weights_is_one_lipschitz((u, v) in (1usize..=3, 1usize..=6).prop_flat_map(|(d, k)| (configuration(d, k), configuration(d, k)))) {
        let (qu, qv) = (forget_weights(&u), forget_weights(&v));
        prop_assert!(hausdorff_distance(&qu, &qv).unwrap() <= config_distance(&u, &v).unwrap() + 1e-12);
        prop_assert_eq!(qu.points().len(), u.atoms().len());
    }

    #[test]
    fn bottleneck_solvers_agree(cost in (1usize..=6).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0u8..=20, n), n))) {
        let c: Vec<Vec<f64>> = cost.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
        prop_assert_eq!(bottleneck_assignment(&c), permutation_bottleneck(&c));
    }

    #[test]
    fn neighborhood_indicator_matches_the_distance(a in subset(2), x in point(2), eps in 0.01f64..0.6) {
        let near = a.points().iter().map(|p| common::sup(p, &x)).fold(f64::INFINITY, f64::min) <= eps;
        prop_assert_eq!(epsilon_neighborhood_indicator(&a, &x, eps).unwrap(), near);
    }
}

#[test]
fn heavy_configurations_use_the_assignment_solver() {
    let pts = |xs: &[f64]| {
        Configuration::from_pairs(xs.iter().map(|&x| (Point::new(vec![x]).unwrap(), 1)).collect()).unwrap()
    };
    let u = pts(&[0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]);
    let v = pts(&[0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95]);
    assert!((config_distance(&u, &v).unwrap() - 0.05).abs() < 1e-12);
}
