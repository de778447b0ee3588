use faer::Mat;
use num_complex::Complex64;

use crate::error::{argument, Error, Result};
use crate::observables::Dictionary;
use crate::scalar::Scalar;
use crate::trajectory::{Provenance, Trajectory, TrajectoryKind};

/// Lifted norms beyond this multiple of `‖χ₀‖` abort prediction.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

fn norm<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|x| x.abs_sq()).sum::<f64>().sqrt()
}

/// Iterates `χ_{t+1} = A·χ_t` from a given lifted state, with no re-lifting.
pub fn predict_lifted<T: Scalar>(a: &Mat<T>, chi0: Vec<T>, steps: usize) -> Result<Trajectory<T>> {
    let m = chi0.len();
    if a.nrows() != m || a.ncols() != m {
        return Err(argument(format!(
            "transition matrix is {}×{} but lifted state has length {m}",
            a.nrows(),
            a.ncols()
        )));
    }
    let limit = DIVERGENCE_FACTOR * norm(&chi0).max(f64::MIN_POSITIVE);
    let mut traj = Trajectory::new(TrajectoryKind::Lifted, Provenance::Predicted, chi0.clone());
    let mut chi = chi0;
    let mut next = vec![T::from_re(0.0); m];
    for step in 1..=steps {
        for (i, out) in next.iter_mut().enumerate() {
            let mut acc = T::from_re(0.0);
            for (j, c) in chi.iter().enumerate() {
                acc += a[(i, j)] * *c;
            }
            *out = acc;
        }
        std::mem::swap(&mut chi, &mut next);
        let n = norm(&chi);
        if !(n <= limit) {
            return Err(Error::Overflow { step, norm: n, limit });
        }
        traj.push(chi.clone());
    }
    Ok(traj)
}

/// Lifts `x0` through `dict` and predicts `steps` steps ahead.
pub fn predict<D: Dictionary>(
    a: &Mat<D::Elem>,
    dict: &D,
    x0: &[f64],
    steps: usize,
) -> Result<Trajectory<D::Elem>> {
    predict_lifted(a, dict.evaluate(x0)?, steps)
}

/// Maps a lifted vector back to a state.
pub trait Decoder<T: Clone> {
    fn decode(&self, chi: &[T]) -> Vec<f64>;

    fn decode_trajectory(&self, lifted: &Trajectory<T>) -> Trajectory {
        lifted.map_values(TrajectoryKind::StateSpace, |chi| self.decode(chi))
    }
}

/// Reads the state of the unit circle from the first harmonic:
/// `x = atan2(sin 2πx, cos 2πx) / 2π mod 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseDecoder;

fn phase_to_unit(angle: f64) -> f64 {
    let x = (angle / std::f64::consts::TAU).rem_euclid(1.0);
    // rem_euclid can return exactly 1.0 for tiny negative inputs.
    if x >= 1.0 {
        0.0
    } else {
        x
    }
}

impl Decoder<f64> for PhaseDecoder {
    fn decode(&self, chi: &[f64]) -> Vec<f64> {
        vec![phase_to_unit(chi[2].atan2(chi[1]))]
    }
}

impl Decoder<Complex64> for PhaseDecoder {
    fn decode(&self, chi: &[Complex64]) -> Vec<f64> {
        vec![phase_to_unit(chi[1].arg())]
    }
}
