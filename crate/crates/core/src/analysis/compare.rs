use std::io::Write;

use crate::error::{argument, Result};
use crate::trajectory::Trajectory;

/// Error report between a truth trajectory and a decoded prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// Euclidean error norm at each step.
    pub per_step: Vec<f64>,
    pub rmse: f64,
    pub max_error: f64,
    /// Mean squared error of each state component over the horizon.
    pub component_mse: Vec<f64>,
}

impl Comparison {
    /// RMS of the Euclidean error restricted to the given components.
    pub fn rmse_over(&self, components: &[usize]) -> f64 {
        components.iter().map(|&c| self.component_mse[c]).sum::<f64>().sqrt()
    }
}

pub fn compare_trajectories(truth: &Trajectory, predicted: &Trajectory) -> Result<Comparison> {
    if truth.len() != predicted.len() {
        return Err(argument(format!(
            "trajectory lengths differ: {} vs {}",
            truth.len(),
            predicted.len()
        )));
    }
    if truth.kind() != predicted.kind() || truth.width() != predicted.width() {
        return Err(argument("trajectories differ in kind or state dimension"));
    }
    let n = truth.width();
    let steps = truth.len() as f64;
    let mut per_step = Vec::with_capacity(truth.len());
    let mut component_mse = vec![0.0; n];
    for (a, b) in truth.values().iter().zip(predicted.values()) {
        let mut sq = 0.0;
        for (c, (x, y)) in a.iter().zip(b).enumerate() {
            let e2 = (x - y) * (x - y);
            component_mse[c] += e2 / steps;
            sq += e2;
        }
        per_step.push(sq.sqrt());
    }
    let rmse = (per_step.iter().map(|e| e * e).sum::<f64>() / steps).sqrt();
    let max_error = per_step.iter().copied().fold(0.0, f64::max);
    Ok(Comparison {
        per_step,
        rmse,
        max_error,
        component_mse,
    })
}

/// One row per step: truth components, predicted components, error norm.
pub fn write_comparison_csv<W: Write>(
    truth: &Trajectory,
    predicted: &Trajectory,
    names: &[&str],
    writer: W,
) -> Result<()> {
    let cmp = compare_trajectories(truth, predicted)?;
    if names.len() != truth.width() {
        return Err(argument("one component name per state dimension is required"));
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["step".to_string()];
    header.extend(names.iter().map(|n| format!("true_{n}")));
    header.extend(names.iter().map(|n| format!("pred_{n}")));
    header.push("error".into());
    w.write_record(&header)?;
    for (t, ((a, b), e)) in truth
        .values()
        .iter()
        .zip(predicted.values())
        .zip(&cmp.per_step)
        .enumerate()
    {
        let mut row = vec![t.to_string()];
        row.extend(a.iter().chain(b).map(|v| v.to_string()));
        row.push(e.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per step: the step index then every component.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, names: &[&str], writer: W) -> Result<()> {
    if names.len() != traj.width() {
        return Err(argument("one component name per state dimension is required"));
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["step"];
    header.extend_from_slice(names);
    w.write_record(&header)?;
    for (t, v) in traj.values().iter().enumerate() {
        let mut row = vec![t.to_string()];
        row.extend(v.iter().map(|x| x.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Number of upward sign reversals (`v < 0` followed by `v > 0`, ignoring
/// exact zeros in between), e.g. rebounds in a vertical velocity profile.
pub fn count_rebounds(values: &[f64]) -> usize {
    let mut last_sign = 0.0;
    let mut count = 0;
    for v in values {
        if *v == 0.0 {
            continue;
        }
        let s = v.signum();
        if last_sign < 0.0 && s > 0.0 {
            count += 1;
        }
        last_sign = s;
    }
    count
}
