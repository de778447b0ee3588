use faer::Mat;
use num_complex::Complex64;

use super::assembly::assemble;
use crate::dynamics::SystemMap;
use crate::error::{argument, Error, Result};
use crate::observables::{build_conversion, Dictionary, ExpTrig, RealFourier};
use crate::quadrature::QuadratureRule;

/// Largest imaginary part tolerated when coercing a converted matrix to real.
pub const IMAG_TOLERANCE: f64 = 1e-8;

/// `Ā[i][j] = ⟨φᵢ∘F, φⱼ⟩` for the orthonormal exponential basis.
pub fn abar_matrix<S: SystemMap + ?Sized>(
    dict: &ExpTrig,
    system: &S,
    rule: &QuadratureRule,
) -> Result<Mat<Complex64>> {
    Ok(assemble(dict, system, rule)?.q)
}

/// `C·Ā·C⁻¹`, checked to be real and returned as such.
pub fn conversion_route(abar: &Mat<Complex64>) -> Result<Mat<f64>> {
    let m = abar.nrows();
    if m.is_multiple_of(2) || abar.ncols() != m {
        return Err(argument(format!(
            "Ā must be square with odd size 2·n_max + 1, got {}×{}",
            m,
            abar.ncols()
        )));
    }
    let conv = build_conversion(m / 2);
    let full = &conv.c * abar * &conv.c_inv;
    let mut worst = 0.0f64;
    let real = Mat::from_fn(m, m, |i, j| {
        worst = worst.max(full[(i, j)].im.abs());
        full[(i, j)].re
    });
    if worst > IMAG_TOLERANCE {
        return Err(Error::Consistency(format!(
            "converted transition matrix has imaginary residue {worst:e} (> {IMAG_TOLERANCE:e})"
        )));
    }
    Ok(real)
}

/// Real Fourier transition matrix obtained through the exponential basis.
pub fn encode_via_conversion<S: SystemMap + ?Sized>(
    exp_trig: &ExpTrig,
    real_fourier: &RealFourier,
    system: &S,
    rule: &QuadratureRule,
) -> Result<Mat<f64>> {
    if exp_trig.len() != real_fourier.len() {
        return Err(argument(format!(
            "dictionary sizes differ: {} exponential vs {} real",
            exp_trig.len(),
            real_fourier.len()
        )));
    }
    conversion_route(&abar_matrix(exp_trig, system, rule)?)
}
