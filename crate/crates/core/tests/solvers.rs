//! Weighted Fréchet mean solvers: oracles, invariances and solver agreement.

mod common;

use common::*;
use hyperfrechet::manifold::convert as cv;
use hyperfrechet::solvers::{
    frechet_objective, frechet_variance, solve_frechet, solve_frechet_observed, solve_hyperboloid, solve_karcher,
    solve_poincare, solve_rgd, solve_with, stationarity_residual, InitStrategy, SolveConfig, SolverKind, Termination,
};
use hyperfrechet::{Error, Geometry, Model, WeightedPointCloud};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;

fn tight() -> SolveConfig {
    SolveConfig::with_tol(1e-14)
}

fn mean_of(cloud: &WeightedPointCloud) -> DVector<f64> {
    solve_frechet(cloud, &tight()).unwrap().mean.into_coords()
}

#[test]
fn points_on_a_diameter_average_their_arc_length() {
    // A geodesic through the origin is isometric to ℝ, so the mean sits at
    // the weighted average of the signed arc-length positions.
    let mut r = rng(20);
    for &k in &CURVATURES {
        let s = (-k).sqrt();
        let dir = DVector::from_vec(vec![0.6, -0.8, 0.0]);
        let pos: Vec<f64> = (0..7).map(|_| r.random_range(-2.0..2.0)).collect();
        let w: Vec<f64> = (0..7).map(|_| r.random_range(0.5..1.5)).collect();
        let pts = pos.iter().map(|p| &dir * ((s * p / 2.0).tanh() / s)).collect();
        let cloud = WeightedPointCloud::new(Geometry::poincare(k).unwrap(), pts, w.clone()).unwrap();
        let avg = pos.iter().zip(&w).map(|(p, w)| p * w).sum::<f64>() / w.iter().sum::<f64>();
        let want = &dir * ((s * avg / 2.0).tanh() / s);
        assert!(max_diff(&mean_of(&cloud), &want) < 1e-12, "k={k}");
        let h = cloud.convert(Model::Hyperboloid).unwrap();
        let hm = cv::hyperboloid_to_poincare(&mean_of(&h), k);
        assert!(max_diff(&hm, &want) < 1e-10, "k={k}");
    }
}

#[test]
fn two_point_mean_is_geodesic_midpoint() {
    let mut r = rng(21);
    for model in [Model::Poincare, Model::Hyperboloid] {
        for &k in &CURVATURES {
            let g = Geometry::new(model, k).unwrap();
            for _ in 0..10 {
                let a = random_point(&g, &mut r, 4, 0.9);
                let b = random_point(&g, &mut r, 4, 0.9);
                let mid = g.exp(&a, &(g.log(&a, &b).unwrap() * 0.5)).unwrap();
                let cloud = WeightedPointCloud::unit(g, vec![a, b]).unwrap();
                assert!(max_diff(&mean_of(&cloud), &mid) < 1e-10, "{model} k={k}");
            }
        }
    }
}

#[test]
fn euclidean_mean_and_variance() {
    let mut r = rng(22);
    let g = Geometry::euclidean();
    let pts: Vec<DVector<f64>> = (0..9).map(|_| DVector::from_fn(3, |_, _| r.random_range(-2.0..2.0))).collect();
    let w: Vec<f64> = (0..9).map(|_| r.random_range(0.5..1.5)).collect();
    let tw: f64 = w.iter().sum();
    let mut want = DVector::zeros(3);
    for (p, wi) in pts.iter().zip(&w) {
        want += p * (*wi / tw);
    }
    let mut var = 0.0;
    for (p, wi) in pts.iter().zip(&w) {
        var += wi / tw * (p - &want).norm_squared();
    }
    let cloud = WeightedPointCloud::new(g, pts, w).unwrap();
    assert!(max_diff(&mean_of(&cloud), &want) < 1e-12);
    assert!((frechet_variance(&cloud).unwrap() - var).abs() < 1e-12);
}

#[test]
fn single_point_and_identical_points() {
    let g = Geometry::poincare(-1.0).unwrap();
    let x = DVector::from_vec(vec![0.2, -0.3]);
    let cloud = WeightedPointCloud::unit(g, vec![x.clone(); 4]).unwrap();
    let rep = solve_frechet(&cloud, &SolveConfig::default()).unwrap();
    assert_eq!(rep.iterations, 0);
    assert!(rep.converged);
    assert_eq!(rep.mean.coords(), &x);
    assert_eq!(rep.objective_trace, vec![0.0]);
}

#[test]
fn all_solvers_agree() {
    for model in [Model::Poincare, Model::Hyperboloid] {
        for &k in &CURVATURES {
            let cloud = random_cloud(Geometry::new(model, k).unwrap(), 4, 8, 23, 0.5);
            let ours = mean_of(&cloud);
            let mut cfg = SolveConfig { max_iters: 100_000, step_tol: 1e-14, ..Default::default() };
            let karcher = solve_karcher(&cloud, &cfg).unwrap();
            assert!(karcher.converged, "{model} k={k}");
            assert!(max_diff(karcher.mean.coords(), &ours) < 1e-8);
            cfg.learning_rate = Some(0.05);
            let rgd = solve_rgd(&cloud, &cfg).unwrap();
            assert!(rgd.converged);
            assert!(max_diff(rgd.mean.coords(), &ours) < 1e-8);
        }
    }
}

#[test]
fn models_agree_through_conversion_and_are_stationary() {
    for &k in &CURVATURES {
        for seed in 0..5 {
            let p = random_cloud(Geometry::poincare(k).unwrap(), 5, 10, 100 + seed, 0.8);
            let h = p.convert(Model::Hyperboloid).unwrap();
            let kl = p.convert(Model::Klein).unwrap();
            let mp = mean_of(&p);
            let mh = mean_of(&h);
            let mk = mean_of(&kl);
            assert!(max_diff(&cv::hyperboloid_to_poincare(&mh, k), &mp) < 1e-8);
            assert!(max_diff(&cv::klein_to_poincare(&mk, k).unwrap(), &mp) < 1e-8);
            let tw = p.total_weight();
            assert!(stationarity_residual(&p, &mp).unwrap() <= 1e-8 * tw);
            assert!(stationarity_residual(&h, &mh).unwrap() <= 1e-8 * tw);
        }
    }
}

#[test]
fn rotation_equivariance_of_mean() {
    let mut r = rng(24);
    for model in [Model::Poincare, Model::Hyperboloid] {
        let g = Geometry::new(model, -1.0).unwrap();
        let cloud = random_cloud(g, 3, 6, 25, 0.7);
        let rot = random_rotation(&mut r, 3);
        let rotated = cloud.with_points(cloud.points().iter().map(|x| rotate(model, &rot, x)).collect()).unwrap();
        let want = rotate(model, &rot, &mean_of(&cloud));
        assert!(max_diff(&mean_of(&rotated), &want) < 1e-10);
    }
}

#[test]
fn bound_solvers_decrease_the_objective() {
    for model in [Model::Poincare, Model::Hyperboloid] {
        let cloud = random_cloud(Geometry::new(model, -1.0).unwrap(), 10, 16, 26, 0.95);
        let rep = solve_frechet(&cloud, &tight()).unwrap();
        assert!(rep.converged);
        assert_eq!(rep.objective_trace.len(), rep.iterations + 1);
        for w in rep.objective_trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "{model}: {} -> {}", w[0], w[1]);
        }
        let f = frechet_objective(&cloud, &rep.mean).unwrap();
        assert!((rep.objective_trace.last().unwrap() - f).abs() <= 1e-13 * f);
    }
}

#[test]
fn init_strategies_reach_the_same_mean() {
    let cloud = random_cloud(Geometry::poincare(-1.0).unwrap(), 4, 9, 27, 0.8);
    let base = mean_of(&cloud);
    for init in [InitStrategy::MaxWeightPoint, InitStrategy::OneKarcherStep] {
        let rep = solve_frechet(&cloud, &SolveConfig { init, ..tight() }).unwrap();
        assert!(max_diff(rep.mean.coords(), &base) < 1e-10);
    }
}

#[test]
fn observer_sees_every_iterate_and_can_stop() {
    let cloud = random_cloud(Geometry::hyperboloid(-1.0).unwrap(), 4, 9, 28, 0.8);
    let mut seen = Vec::new();
    let rep = solve_frechet_observed(&cloud, &tight(), &mut |k, _| {
        seen.push(k);
        false
    })
    .unwrap();
    assert_eq!(seen, (0..=rep.iterations).collect::<Vec<_>>());
    let rep = solve_frechet_observed(&cloud, &tight(), &mut |k, _| k == 2).unwrap();
    assert_eq!(rep.termination, Termination::Stopped);
    assert_eq!(rep.iterations, 2);
}

#[test]
fn max_iterations_is_reported() {
    let cloud = random_cloud(Geometry::poincare(-1.0).unwrap(), 4, 9, 29, 0.8);
    let rep = solve_poincare(&cloud, &SolveConfig { max_iters: 2, step_tol: 0.0, ..Default::default() }).unwrap();
    assert!(!rep.converged);
    assert_eq!(rep.termination, Termination::MaxIterations);
}

#[test]
fn rgd_requires_a_learning_rate() {
    let cloud = random_cloud(Geometry::poincare(-1.0).unwrap(), 2, 3, 30, 0.5);
    assert!(solve_rgd(&cloud, &SolveConfig::default()).is_err());
    assert!(solve_with(SolverKind::RgdGrid, &cloud, &SolveConfig::default(), &mut |_, _| false).is_err());
}

#[test]
fn model_specific_solvers_reject_other_models() {
    let p = random_cloud(Geometry::poincare(-1.0).unwrap(), 2, 3, 31, 0.5);
    let h = p.convert(Model::Hyperboloid).unwrap();
    assert!(matches!(solve_hyperboloid(&p, &SolveConfig::default()), Err(Error::ModelMismatch { .. })));
    assert!(matches!(solve_poincare(&h, &SolveConfig::default()), Err(Error::ModelMismatch { .. })));
}

#[test]
fn cloud_validation() {
    let g = Geometry::poincare(-1.0).unwrap();
    let x = DVector::from_vec(vec![0.1, 0.1]);
    assert!(WeightedPointCloud::unit(g, vec![]).is_err());
    assert!(WeightedPointCloud::new(g, vec![x.clone()], vec![-1.0]).is_err());
    assert!(WeightedPointCloud::new(g, vec![x.clone()], vec![0.0]).is_err());
    assert!(WeightedPointCloud::new(g, vec![x.clone(), x.clone()], vec![1.0]).is_err());
    assert!(WeightedPointCloud::unit(g, vec![x, DVector::zeros(3)]).is_err());
    assert!(WeightedPointCloud::unit(g, vec![DVector::from_vec(vec![2.0, 0.0])]).is_err());
}

#[test]
fn cloud_json_round_trip() {
    let cloud = random_cloud(Geometry::hyperboloid(-2.0).unwrap(), 3, 4, 32, 0.8);
    let back = WeightedPointCloud::from_json(&cloud.to_json().unwrap()).unwrap();
    assert_eq!(back.geometry(), cloud.geometry());
    assert_eq!(back.weights(), cloud.weights());
    for (a, b) in back.points().iter().zip(cloud.points()) {
        assert_eq!(a, b);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cloud.json");
    cloud.write_json(&path).unwrap();
    assert_eq!(WeightedPointCloud::read_json(&path).unwrap().len(), 4);
    let unit = r#"{"model":"poincare","curvature":-1.0,"points":[[0.1,0.2],[0.0,0.0]]}"#;
    assert_eq!(WeightedPointCloud::from_json(unit).unwrap().weights(), &[1.0, 1.0]);
}

#[test]
fn report_json_includes_trace_on_request() {
    let cloud = random_cloud(Geometry::poincare(-1.0).unwrap(), 2, 3, 33, 0.5);
    let rep = solve_frechet(&cloud, &SolveConfig::default()).unwrap();
    let with: serde_json::Value = serde_json::from_str(&rep.to_json(true).unwrap()).unwrap();
    let without: serde_json::Value = serde_json::from_str(&rep.to_json(false).unwrap()).unwrap();
    assert!(with["objective_trace"].is_array());
    assert!(without.get("objective_trace").is_none());
    assert_eq!(with["termination"], "converged");
}

fn cloud_strategy() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
    (2usize..7).prop_flat_map(|t| (prop::collection::vec(ball_strategy(3, 0.9), t), prop::collection::vec(0.1f64..2.0, t)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_permutation_and_scaling_invariance((pts, w) in cloud_strategy(), scale in 0.01f64..100.0, shift in 1usize..6) {
        let g = Geometry::poincare(-1.0).unwrap();
        let pts: Vec<DVector<f64>> = pts.into_iter().map(DVector::from_vec).collect();
        let cloud = WeightedPointCloud::new(g, pts.clone(), w.clone()).unwrap();
        let base = mean_of(&cloud);
        let t = pts.len();
        let perm: Vec<usize> = (0..t).map(|i| (i + shift) % t).collect();
        let permuted = WeightedPointCloud::new(g, perm.iter().map(|&i| pts[i].clone()).collect(), perm.iter().map(|&i| w[i]).collect()).unwrap();
        prop_assert!(max_diff(&mean_of(&permuted), &base) < 1e-12);
        let scaled = cloud.with_weights(w.iter().map(|x| x * scale).collect()).unwrap();
        prop_assert!(max_diff(&mean_of(&scaled), &base) < 1e-12);
    }

    #[test]
    fn prop_mean_is_stationary((pts, w) in cloud_strategy()) {
        let g = Geometry::poincare(-1.0).unwrap();
        let cloud = WeightedPointCloud::new(g, pts.into_iter().map(DVector::from_vec).collect(), w).unwrap();
        let rep = solve_frechet(&cloud, &tight()).unwrap();
        prop_assert!(rep.converged);
        prop_assert!(stationarity_residual(&cloud, rep.mean.coords()).unwrap() <= 1e-8 * cloud.total_weight());
    }
}
