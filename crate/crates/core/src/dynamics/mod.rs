//! Discrete-time self-maps `F: X → X`.

mod cable;
mod domain;
mod piecewise;
mod simple;

pub use cable::{CableParams, CableSystem, Region};
pub use domain::Domain;
pub use piecewise::{Branch, PiecewiseLinearMap};
pub use simple::{CircleRotation, IdentityMap};

use crate::error::{numerical, Result};
use crate::trajectory::{Provenance, Trajectory, TrajectoryKind};

/// A deterministic one-step map on a box domain.
///
/// Implementations must be pure: the same input always yields the same
/// output, so maps can be shared across threads during quadrature.
pub trait SystemMap: Send + Sync {
    fn domain(&self) -> &Domain;

    /// Writes the raw, unclamped image of `x` into `out`.
    fn advance(&self, x: &[f64], out: &mut [f64]);

    /// Interior points of a 1-D domain where `F` is discontinuous.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// `F(x)` projected back onto the domain. Returns whether clamping occurred.
    fn step_into(&self, x: &[f64], out: &mut [f64]) -> bool {
        self.advance(x, out);
        self.domain().clamp(out)
    }
}

/// Result of a single checked map evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct MapOutput {
    pub state: Vec<f64>,
    pub clamped: bool,
}

/// Evaluates `F(x)` with dimension and finiteness checks.
pub fn eval_map<S: SystemMap + ?Sized>(system: &S, x: &[f64]) -> Result<MapOutput> {
    system.domain().check_dim(x)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(numerical(format!("non-finite state {x:?}")));
    }
    let mut state = vec![0.0; x.len()];
    system.advance(x, &mut state);
    if state.iter().any(|v| !v.is_finite()) {
        return Err(numerical(format!("map produced non-finite image of {x:?}")));
    }
    let clamped = system.domain().clamp(&mut state);
    Ok(MapOutput { state, clamped })
}

/// Iterates the map `steps` times from `x0`; entry `t` is `Fᵗ(x0)`.
pub fn simulate_truth<S: SystemMap + ?Sized>(
    system: &S,
    x0: &[f64],
    steps: usize,
) -> Result<Trajectory> {
    system.domain().check_dim(x0)?;
    let mut traj = Trajectory::new(TrajectoryKind::StateSpace, Provenance::Truth, x0.to_vec());
    let mut x = x0.to_vec();
    for _ in 0..steps {
        x = eval_map(system, &x)?.state;
        traj.push(x.clone());
    }
    Ok(traj)
}

/// Fraction of the given points whose image had to be clamped.
pub fn clamp_rate<S: SystemMap + ?Sized>(system: &S, points: &[Vec<f64>]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut out = vec![0.0; system.domain().dim()];
    let hits = points
        .iter()
        .filter(|x| system.step_into(x, &mut out))
        .count();
    hits as f64 / points.len() as f64
}

/// Closed set of maps selectable from configuration.
#[derive(Debug, Clone)]
pub enum System {
    Identity(IdentityMap),
    Rotation(CircleRotation),
    Piecewise(PiecewiseLinearMap),
    Cable(CableSystem),
}

impl System {
    fn inner(&self) -> &dyn SystemMap {
        match self {
            System::Identity(s) => s,
            System::Rotation(s) => s,
            System::Piecewise(s) => s,
            System::Cable(s) => s,
        }
    }
}

impl SystemMap for System {
    fn domain(&self) -> &Domain {
        self.inner().domain()
    }

    fn advance(&self, x: &[f64], out: &mut [f64]) {
        self.inner().advance(x, out)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner().breakpoints()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_map_rejects_wrong_dimension() {
        let id = IdentityMap::new(Domain::unit_interval());
        assert!(matches!(
            eval_map(&id, &[0.1, 0.2]),
            Err(crate::Error::Argument(_))
        ));
    }

    #[test]
    fn zero_steps_is_initial_state() {
        let f = PiecewiseLinearMap::default();
        let t = simulate_truth(&f, &[0.3], 0).unwrap();
        assert_eq!(t.values(), &[vec![0.3]]);
    }

    #[test]
    fn identity_repeats_initial_state() {
        let id = IdentityMap::new(Domain::unit_interval());
        let t = simulate_truth(&id, &[0.42], 5).unwrap();
        assert_eq!(t.len(), 6);
        assert!(t.values().iter().all(|v| v == &vec![0.42]));
    }

    #[test]
    fn trajectories_are_bit_identical() {
        let f = CableSystem::default();
        let x0 = [0.3, -0.6, 0.0, 0.0];
        let a = simulate_truth(&f, &x0, 200).unwrap();
        let b = simulate_truth(&f, &x0, 200).unwrap();
        assert_eq!(a, b);
    }
}
