//! Direct encoding `A = Q R⁻¹` from Gram and composition matrices.

mod assembly;
mod kernel;
mod model;
mod residual;
mod routes;

pub use assembly::{assemble, composition_matrix, gram_matrix, Assembly};
pub use kernel::{kernel_transform, TruncatedKernel};
pub use model::{direct_encode, solve_transition, LiftedModel, QuadratureInfo, Regularization};
pub use residual::galerkin_residual;
pub use routes::{abar_matrix, conversion_route, encode_via_conversion, IMAG_TOLERANCE};

use crate::observables::DictionaryKind;

/// Default relative Tikhonov parameter per dictionary kind.
pub fn default_lambda(kind: DictionaryKind) -> f64 {
    match kind {
        DictionaryKind::ExpTrig | DictionaryKind::RealFourier => 0.0,
        DictionaryKind::GaussianRbf => 1e-10,
    }
}
