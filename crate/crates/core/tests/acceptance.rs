//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances are pinned here and must not be loosened.

mod common;

use std::time::{Duration, Instant};

use common::*;
use hyperfrechet::batch_norm::{rbn_train_step, BatchNormState, ProductBatchNorm};
use hyperfrechet::bench::{bench_forward, grad_check, pseudo_compare, trial_rng, gen_points, BenchConfig, GradCheckConfig};
use hyperfrechet::manifold::{convert as cv, poincare as pb};
use hyperfrechet::pseudo::TangentBase;
use hyperfrechet::solvers::{
    frechet_variance, solve_frechet, solve_frechet_observed, solve_with, stationarity_residual,
    SolveConfig, SolverKind,
};
use hyperfrechet::{Geometry, ManifoldPoint, Model, WeightedPointCloud};
use nalgebra::DVector;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let e = start.elapsed();
    ensure(e < limit, || format!("took {:.2} s, limit {:.0} s", e.as_secs_f64(), limit.as_secs_f64()))
}

fn forward_convergence() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for model in [Model::Poincare, Model::Hyperboloid] {
        let cfg = BenchConfig {
            model,
            dim: 16,
            points: 10,
            curvature: -1.0,
            trials: 10,
            epsilon_target: 1e-12,
            rgd_lr: 0.01,
            solvers: vec![SolverKind::Ours, SolverKind::Karcher, SolverKind::Rgd],
            ..Default::default()
        };
        let r = bench_forward(&cfg).map_err(|e| e.to_string())?;
        for t in &r.trials {
            let it: Vec<Option<usize>> = t.solvers.iter().map(|s| s.iterations).collect();
            match (it[0], it[1], it[2]) {
                (Some(o), Some(k), Some(g)) => ensure(o < k && k < g, || format!("{model} trial {}: ordering {o}/{k}/{g}", t.trial))?,
                _ => return Err(format!("{model} trial {}: a solver did not converge {it:?}", t.trial)),
            }
        }
        let (o, k, g) = (r.rows[0].mean_iters, r.rows[1].mean_iters, r.rows[2].mean_iters);
        ensure(o <= 40.0, || format!("{model}: ours mean {o}"))?;
        ensure((30.0..=120.0).contains(&k), || format!("{model}: karcher mean {k}"))?;
        ensure((400.0..=1600.0).contains(&g), || format!("{model}: rgd mean {g}"))?;
        notes.push(format!("{model} ours {o:.1} karcher {k:.1} rgd {g:.1}"));
    }
    within(start, Duration::from_secs(5))?;
    notes.push(format!("{:.2} s", start.elapsed().as_secs_f64()));
    Ok(notes.join("; "))
}

fn scaling_sweep() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for dim in [10, 20, 50] {
        for points in [10, 100, 1000] {
            let cfg = BenchConfig {
                dim,
                points,
                trials: 3,
                solvers: vec![SolverKind::Ours, SolverKind::Karcher],
                ..Default::default()
            };
            let r = bench_forward(&cfg).map_err(|e| e.to_string())?;
            for t in &r.trials {
                let o = t.solvers[0].iterations.ok_or_else(|| format!("ours failed at dim {dim}, t {points}"))?;
                worst = worst.max(o as f64);
                ensure(o <= 25, || format!("ours took {o} iterations at dim {dim}, t {points}"))?;
            }
            if dim == 50 {
                ensure(r.rows[1].flagged, || format!("karcher not flagged at dim 50, t {points}"))?;
            }
        }
    }
    // The same dim-50 case run to the full cap without early aborts.
    let g = Geometry::poincare(-1.0).unwrap();
    let cloud = gen_points(g, 50, 10, BenchConfig::default().scale, &mut trial_rng(0, 0)).map_err(|e| e.to_string())?;
    let cap = SolveConfig { max_iters: 50_000, step_tol: 1e-12, abort_on_divergence: false, stall_window: None, ..Default::default() };
    let k = solve_with(SolverKind::Karcher, &cloud, &cap, &mut |_, _| false).map_err(|e| e.to_string())?;
    ensure(!k.converged, || format!("karcher converged at dim 50 after {} iterations", k.iterations))?;
    within(start, Duration::from_secs(120))?;
    Ok(format!(
        "ours worst {worst} iterations; karcher dim 50 {:?} after {} iterations; {:.2} s",
        k.termination,
        k.iterations,
        start.elapsed().as_secs_f64()
    ))
}

fn jacobians() -> Outcome {
    let start = Instant::now();
    let cfg = GradCheckConfig {
        models: vec![Model::Poincare, Model::Hyperboloid],
        curvatures: vec![-0.5, -1.0, -2.0],
        dims: vec![2, 8, 16],
        points: vec![2, 5, 10],
        h: 1e-6,
        ..Default::default()
    };
    let r = grad_check(&cfg).map_err(|e| e.to_string())?;
    let configs = r.cases.len() / 3;
    ensure(configs >= 20, || format!("only {configs} configurations"))?;
    for op in ["points", "weights", "curvature"] {
        for model in [Model::Poincare, Model::Hyperboloid] {
            ensure(r.cases.iter().any(|c| c.op == op && c.model == model), || format!("{model}/{op} not covered"))?;
        }
    }
    let worst = r.cases.iter().map(|c| c.rel_error).fold(0.0, f64::max);
    ensure(worst <= 1e-5, || format!("worst relative error {worst:e}"))?;
    within(start, Duration::from_secs(60))?;
    Ok(format!("{configs} configurations, worst relative error {worst:.1e}, {:.2} s", start.elapsed().as_secs_f64()))
}

fn monotone_descent() -> Outcome {
    let mut solves = 0;
    for model in [Model::Poincare, Model::Hyperboloid] {
        for &k in &CURVATURES {
            for (n, t) in [(2, 2), (5, 10), (16, 10), (8, 50)] {
                for seed in 0..5 {
                    for frac in [0.5, 0.95] {
                        let cloud = random_cloud(Geometry::new(model, k).unwrap(), n, t, seed * 31 + n as u64, frac);
                        let mut iterates = Vec::new();
                        let rep = solve_frechet_observed(&cloud, &SolveConfig::with_tol(1e-14), &mut |_, y| {
                            iterates.push(y.clone());
                            false
                        })
                        .map_err(|e| e.to_string())?;
                        let f = &rep.objective_trace;
                        for i in 1..f.len() {
                            let step = (&iterates[i] - &iterates[i - 1]).norm();
                            if step > 1e-6 {
                                ensure(f[i] < f[i - 1], || format!("{model} K={k}: f rose {} -> {} at step {i}", f[i - 1], f[i]))?;
                            } else {
                                ensure(f[i] <= f[i - 1] * (1.0 + 1e-12), || format!("{model} K={k}: f rose near the fixed point at step {i}"))?;
                            }
                        }
                        solves += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{solves} solves"))
}

fn stationarity() -> Outcome {
    let mut worst_res: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for &k in &CURVATURES {
        for (n, t) in [(2, 3), (8, 10), (16, 10), (4, 100)] {
            for seed in 0..5 {
                let p = random_cloud(Geometry::poincare(k).unwrap(), n, t, 1000 + seed, 0.9);
                let h = p.convert(Model::Hyperboloid).map_err(|e| e.to_string())?;
                let cfg = SolveConfig::with_tol(1e-14);
                let mp = solve_frechet(&p, &cfg).map_err(|e| e.to_string())?.mean.into_coords();
                let mh = solve_frechet(&h, &cfg).map_err(|e| e.to_string())?.mean.into_coords();
                let tw = p.total_weight();
                let res = stationarity_residual(&p, &mp).unwrap().max(stationarity_residual(&h, &mh).unwrap()) / tw;
                let gap = max_diff(&cv::hyperboloid_to_poincare(&mh, k), &mp);
                worst_res = worst_res.max(res);
                worst_gap = worst_gap.max(gap);
                ensure(res <= 1e-8, || format!("K={k} n={n} t={t}: residual {res:e}·Σw"))?;
                ensure(gap <= 1e-8, || format!("K={k} n={n} t={t}: model gap {gap:e}"))?;
            }
        }
    }
    Ok(format!("worst residual {worst_res:.1e}·Σw, worst model gap {worst_gap:.1e}"))
}

fn textbook_bn(batch: &[DVector<f64>], gamma: f64, beta: &[f64], eps: f64) -> Vec<DVector<f64>> {
    let m = batch.len() as f64;
    let n = batch[0].len();
    let mean: Vec<f64> = (0..n).map(|j| batch.iter().map(|x| x[j]).sum::<f64>() / m).collect();
    let var: Vec<f64> = (0..n).map(|j| batch.iter().map(|x| (x[j] - mean[j]).powi(2)).sum::<f64>() / m).collect();
    batch.iter().map(|x| DVector::from_fn(n, |j, _| gamma * (x[j] - mean[j]) / (var[j] + eps).sqrt() + beta[j])).collect()
}

fn euclidean_reductions() -> Outcome {
    let mut r = rng(2024);
    let g = Geometry::euclidean();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let t = r.random_range(2..30);
        let n = r.random_range(1..8);
        let pts: Vec<DVector<f64>> = (0..t).map(|_| DVector::from_fn(n, |_, _| r.random_range(-3.0..3.0))).collect();
        let w: Vec<f64> = (0..t).map(|_| r.random_range(0.1..2.0)).collect();
        let tw: f64 = w.iter().sum();
        let mean = pts.iter().zip(&w).fold(DVector::zeros(n), |acc, (p, wi)| acc + p * (*wi / tw));
        let var = pts.iter().zip(&w).map(|(p, wi)| wi / tw * (p - &mean).norm_squared()).sum::<f64>();
        let cloud = WeightedPointCloud::new(g, pts.clone(), w).unwrap();
        let got = solve_frechet(&cloud, &SolveConfig::default()).map_err(|e| e.to_string())?.mean.into_coords();
        let d = max_diff(&got, &mean);
        let dv = (frechet_variance(&cloud).map_err(|e| e.to_string())? - var).abs();
        ensure(d <= 1e-12, || format!("mean off by {d:e}"))?;
        ensure(dv <= 1e-12, || format!("variance off by {dv:e}"))?;

        let beta: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let gamma: f64 = r.random_range(0.2..2.0);
        let unit = WeightedPointCloud::unit(g, pts.clone()).unwrap();
        let mut bn = ProductBatchNorm::new(&beta, gamma * gamma, 0.9, 1e-5).map_err(|e| e.to_string())?;
        let out = bn.train_step(&unit).map_err(|e| e.to_string())?;
        let want = textbook_bn(&pts, gamma, &beta, 1e-5);
        let mut bn_err: f64 = 0.0;
        for (a, b) in out.points().iter().zip(&want) {
            bn_err = bn_err.max(max_diff(a, b));
        }
        // A single feature through the plain state.
        let line: Vec<DVector<f64>> = pts.iter().map(|x| DVector::from_element(1, x[0])).collect();
        let target = ManifoldPoint::from_slice(g, &[beta[0]]).unwrap();
        let mut state = BatchNormState::new(&target, gamma * gamma, 0.9).unwrap();
        let out1 = rbn_train_step(&mut state, &WeightedPointCloud::unit(g, line.clone()).unwrap()).map_err(|e| e.to_string())?;
        for (a, b) in out1.points().iter().zip(textbook_bn(&line, gamma, &beta[..1], state.epsilon)) {
            bn_err = bn_err.max(max_diff(a, &b));
        }
        ensure(bn_err <= 1e-12, || format!("batch norm off by {bn_err:e}"))?;
        worst = worst.max(d).max(dv).max(bn_err);
    }
    Ok(format!("worst deviation {worst:.1e}"))
}

fn pseudo_gap() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    for model in [Model::Poincare, Model::Hyperboloid] {
        let cfg = BenchConfig { model, dim: 16, points: 10, trials: 100, ..Default::default() };
        let r = pseudo_compare(&cfg, TangentBase::Origin).map_err(|e| e.to_string())?;
        ensure(r.trials.len() == 100, || "wrong trial count".into())?;
        for (i, rows) in r.trials.iter().enumerate() {
            for row in rows {
                match row.method.as_str() {
                    "ours" => ensure(row.excess == 0.0, || format!("{model} trial {i}: ours excess {}", row.excess))?,
                    _ => ensure(row.excess >= 0.0, || format!("{model} trial {i}: {} excess {}", row.method, row.excess))?,
                }
            }
        }
        let excess = |m: &str| r.rows.iter().find(|x| x.method == m).map(|x| x.mean_excess).unwrap();
        let (ta, em) = (excess("tangent_aggregation"), excess("einstein_midpoint"));
        ensure(ta > em, || format!("{model}: tangent {ta} not above einstein {em}"))?;
        notes.push(format!("{model} tangent {:.3}% einstein {:.3}%", 100.0 * ta, 100.0 * em));
    }
    within(start, Duration::from_secs(60))?;
    Ok(notes.join("; "))
}

fn manifold_invariants() -> Outcome {
    let mut r = rng(77);
    let mut checks = 0usize;
    for &k in &CURVATURES {
        for model in [Model::Poincare, Model::Hyperboloid] {
            let g = Geometry::new(model, k).unwrap();
            for i in 0..200 {
                let n = 2 + i % 6;
                let x = random_point(&g, &mut r, n, 0.6);
                let y = random_point(&g, &mut r, n, 0.9);
                let norm = 5.0 * r.random_range(0.0..1.0);
                let v = tangent_with_norm(&g, &x, &mut r, norm);
                let e = g.exp(&x, &v).map_err(|e| e.to_string())?;
                let back = g.log(&x, &e).map_err(|e| e.to_string())?;
                let inv = g.norm(&x, &(&back - &v)).unwrap();
                ensure(inv <= 1e-9 * norm.max(1.0), || format!("{model} K={k}: exp/log error {inv:e}"))?;
                let iso = (g.distance(&x, &e).unwrap() - norm).abs();
                ensure(iso <= 1e-9 * norm.max(1.0), || format!("{model} K={k}: isometry error {iso:e}"))?;
                let u = tangent_with_norm(&g, &x, &mut r, 1.0);
                let (pu, pv) = (g.transport(&x, &y, &u).unwrap(), g.transport(&x, &y, &v).unwrap());
                let pt = (g.metric_inner(&y, &pu, &pv).unwrap() - g.metric_inner(&x, &u, &v).unwrap()).abs();
                ensure(pt <= 1e-10 * norm.max(1.0), || format!("{model} K={k}: transport error {pt:e}"))?;
                checks += 3;
            }
        }
        for _ in 0..200 {
            let a = ball_point(&mut r, 4, k, 0.95);
            let b = ball_point(&mut r, 4, k, 0.95);
            let v = DVector::from_fn(4, |_, _| r.random_range(-2.0..2.0));
            let gy = pb::gyration(&a, &b, &v, k);
            ensure((gy.norm() - v.norm()).abs() <= 1e-12 * v.norm().max(1.0), || format!("K={k}: gyration norm"))?;
            let oracle = DVector::from_vec(gyration_oracle(a.as_slice(), b.as_slice(), v.as_slice(), k));
            ensure(max_diff(&gy, &oracle) <= 1e-8 * v.norm().max(1.0), || format!("K={k}: gyration vs composition"))?;
            let ab = pb::mobius_add(&a, &b, k).unwrap();
            ensure(max_diff(&ab, &DVector::from_vec(mobius_oracle(a.as_slice(), b.as_slice(), k))) <= 1e-12, || "mobius oracle".into())?;
            ensure(pb::mobius_add(&(-&a), &a, k).unwrap().amax() <= 1e-14, || "left inverse".into())?;
            ensure(max_diff(&pb::mobius_add(&(-&a), &ab, k).unwrap(), &b) <= 1e-9, || "left cancellation".into())?;
            let ba = pb::mobius_add(&b, &a, k).unwrap();
            ensure(max_diff(&ab, &pb::gyration(&a, &b, &ba, k)) <= 1e-10, || "gyrocommutativity".into())?;
            let d = pb::distance(&a, &b, k).unwrap();
            for to in [Model::Hyperboloid, Model::Klein] {
                let at = cv::convert_coords(&a, k, Model::Poincare, to).unwrap();
                let bt = cv::convert_coords(&b, k, Model::Poincare, to).unwrap();
                let rt = max_diff(&cv::convert_coords(&at, k, to, Model::Poincare).unwrap(), &a);
                ensure(rt <= 1e-10, || format!("K={k}: {to} round trip {rt:e}"))?;
                let dt = (Geometry::new(to, k).unwrap().distance(&at, &bt).unwrap() - d).abs();
                ensure(dt <= 1e-10 * d.max(1.0), || format!("K={k}: {to} distance {dt:e}"))?;
            }
            checks += 8;
        }
    }
    Ok(format!("{checks} checks"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("forward convergence", forward_convergence),
        ("scaling sweep", scaling_sweep),
        ("jacobians vs finite differences", jacobians),
        ("monotone descent", monotone_descent),
        ("stationarity and cross-model agreement", stationarity),
        ("euclidean reductions", euclidean_reductions),
        ("pseudo-mean variance gap", pseudo_gap),
        ("manifold invariants", manifold_invariants),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
