//! CSV and JSON rendering of bench reports.
//!
//! CSV column orders are fixed:
//! - `bench-forward`: `solver,mean_iters,std_iters,mean_time_s,std_time_s,converged_trials,trials,flagged`
//! - `pseudo-compare`: `method,mean_excess,std_excess,mean_distance,std_distance`
//! - `grad-check`: `model,curvature,dim,points,op,rel_error,hessian_condition`
//! - `gen-points`: `trial,index,weight,x0,x1,…`
//! - `rbn-demo`: `step,mean_offset,variance,target_variance`
//!
//! JSON output wraps each report as `{"schema_version": 1, "command": …, "report": …}`.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use super::{ForwardReport, GradCheckReport, PseudoReport, RbnDemoReport};
use crate::cloud::WeightedPointCloud;
use crate::error::{Error, Result};

/// Version of the JSON envelope.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidInput(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    report: &'a T,
}

/// Wraps a report in the versioned JSON envelope.
pub fn json<T: Serialize>(command: &str, report: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(&Envelope { schema_version: SCHEMA_VERSION, command, report })?)
}

pub fn forward_csv(r: &ForwardReport) -> String {
    let mut s = String::from("solver,mean_iters,std_iters,mean_time_s,std_time_s,converged_trials,trials,flagged\n");
    for row in &r.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            row.solver.name(),
            row.mean_iters,
            row.std_iters,
            row.mean_time_s,
            row.std_time_s,
            row.converged_trials,
            row.trials,
            row.flagged
        );
    }
    s
}

pub fn pseudo_csv(r: &PseudoReport) -> String {
    let mut s = String::from("method,mean_excess,std_excess,mean_distance,std_distance\n");
    for row in &r.rows {
        let _ = writeln!(s, "{},{},{},{},{}", row.method, row.mean_excess, row.std_excess, row.mean_distance, row.std_distance);
    }
    s
}

pub fn gradcheck_csv(r: &GradCheckReport) -> String {
    let mut s = String::from("model,curvature,dim,points,op,rel_error,hessian_condition\n");
    for c in &r.cases {
        let _ = writeln!(s, "{},{},{},{},{},{},{}", c.model, c.curvature, c.dim, c.points, c.op, c.rel_error, c.hessian_condition);
    }
    s
}

pub fn clouds_csv(clouds: &[WeightedPointCloud]) -> String {
    let mut s = String::new();
    let width = clouds.first().map_or(0, |c| c.ambient_dim());
    s.push_str("trial,index,weight");
    for j in 0..width {
        let _ = write!(s, ",x{j}");
    }
    s.push('\n');
    for (t, c) in clouds.iter().enumerate() {
        for (i, (p, w)) in c.points().iter().zip(c.weights()).enumerate() {
            let _ = write!(s, "{t},{i},{w}");
            for v in p.iter() {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
    }
    s
}

pub fn rbn_csv(r: &RbnDemoReport) -> String {
    let mut s = String::from("step,mean_offset,variance,target_variance\n");
    for (i, (o, v)) in r.hyperbolic_mean_offset.iter().zip(&r.hyperbolic_variance).enumerate() {
        let _ = writeln!(s, "{},{},{},{}", i + 1, o, v[0], v[1]);
    }
    s
}
