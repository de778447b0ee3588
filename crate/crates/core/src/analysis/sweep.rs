use std::io::Write;

use super::compare::compare_trajectories;
use super::predict::{predict, Decoder, PhaseDecoder};
use crate::dynamics::{simulate_truth, SystemMap};
use crate::encoding::direct_encode;
use crate::error::Result;
use crate::observables::{build_real_fourier, RealFourier};
use crate::quadrature::{build_rule, RuleSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub m: usize,
    pub rmse: f64,
    pub max_error: f64,
}

/// Encodes a real Fourier model of each size, predicts `steps` ahead from
/// `x0`, decodes by phase, and scores against the true trajectory.
///
/// Each size gets its own segmented rule with
/// [`RuleSpec::fourier_panel_count`] panels and the map's breakpoints.
pub fn rmse_sweep<S: SystemMap + ?Sized>(
    system: &S,
    sizes: &[usize],
    x0: &[f64],
    steps: usize,
    points_per_panel: usize,
) -> Result<Vec<SweepPoint>> {
    let truth = simulate_truth(system, x0, steps)?;
    sizes
        .iter()
        .map(|&m| {
            let n_max = RealFourier::n_max_for_size(m)?;
            let dict = build_real_fourier(n_max, system.domain())?;
            let spec = RuleSpec::Segmented {
                points_per_panel,
                panel_count: RuleSpec::fourier_panel_count(n_max),
                breakpoints: system.breakpoints(),
            };
            let rule = build_rule(system.domain(), &spec)?;
            let model = direct_encode(&dict, system, &rule, 0.0)?;
            let lifted = predict(&model.a, &dict, x0, steps)?;
            let decoded = PhaseDecoder.decode_trajectory(&lifted);
            let cmp = compare_trajectories(&truth, &decoded)?;
            Ok(SweepPoint {
                m,
                rmse: cmp.rmse,
                max_error: cmp.max_error,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["m", "rmse", "max_error"])?;
    for p in points {
        w.write_record([p.m.to_string(), p.rmse.to_string(), p.max_error.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
