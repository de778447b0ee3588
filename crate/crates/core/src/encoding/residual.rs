use faer::Mat;

use super::assembly::check_compatible;
use crate::dynamics::SystemMap;
use crate::error::{argument, Result};
use crate::observables::Dictionary;
use crate::quadrature::QuadratureRule;
use crate::scalar::Scalar;

/// Weighted one-step lifting error `Σₙ wₙ‖χ(F(ξₙ)) − A·χ(ξₙ)‖²`.
///
/// `A = QR⁻¹` is the minimizer of this quantity over all square matrices.
pub fn galerkin_residual<D: Dictionary, S: SystemMap + ?Sized>(
    a: &Mat<D::Elem>,
    dict: &D,
    system: &S,
    rule: &QuadratureRule,
) -> Result<f64> {
    check_compatible(dict, rule)?;
    let m = dict.len();
    if a.nrows() != m || a.ncols() != m {
        return Err(argument("transition matrix does not match dictionary size"));
    }
    let zero = D::Elem::from_re(0.0);
    let mut chi = vec![zero; m];
    let mut chi_f = vec![zero; m];
    let mut y = vec![0.0; rule.dim()];
    let mut total = 0.0;
    for (x, w) in rule.nodes().zip(rule.weights()) {
        system.step_into(x, &mut y);
        dict.evaluate_into(x, &mut chi);
        dict.evaluate_into(&y, &mut chi_f);
        let mut node = 0.0;
        for i in 0..m {
            let mut pred = zero;
            for j in 0..m {
                pred += a[(i, j)] * chi[j];
            }
            node += (chi_f[i] - pred).abs_sq();
        }
        total += w * node;
    }
    Ok(total)
}
