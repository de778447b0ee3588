//! Linear lifted models of nonlinear and hybrid discrete-time maps.
//!
//! A dictionary of observables `g₁ … g_m` is lifted through a map `F` by
//! computing Gram and composition matrices over a quadrature rule and solving
//! `A·R = Q`. The resulting `A` advances the lifted state linearly:
//!
//! ```
//! use koopman_lift::dynamics::{CircleRotation, SystemMap};
//! use koopman_lift::encoding::direct_encode;
//! use koopman_lift::observables::build_real_fourier;
//! use koopman_lift::quadrature::{build_rule, RuleSpec};
//!
//! let rotation = CircleRotation::new(0.1).unwrap();
//! let dict = build_real_fourier(4, rotation.domain()).unwrap();
//! let rule = build_rule(rotation.domain(), &RuleSpec::segmented(64, rotation.breakpoints())).unwrap();
//! let model = direct_encode(&dict, &rotation, &rule, 0.0).unwrap();
//! assert!((model.a[(1, 1)] - (0.2 * std::f64::consts::PI).cos()).abs() < 1e-10);
//! ```

pub mod analysis;
pub mod dynamics;
pub mod encoding;
mod error;
pub mod matrix_csv;
pub mod observables;
pub mod quadrature;
mod scalar;
mod trajectory;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use trajectory::{Provenance, Trajectory, TrajectoryKind};
