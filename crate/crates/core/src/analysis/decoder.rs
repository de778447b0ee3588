use faer::linalg::solvers::Solve;
use faer::{Mat, Side};

use super::predict::Decoder;
use crate::encoding::gram_matrix;
use crate::error::{Error, Result};
use crate::observables::Dictionary;
use crate::quadrature::QuadratureRule;

/// Linear map `x ≈ D·χ(x)` fit by weighted least squares on quadrature nodes.
#[derive(Debug, Clone)]
pub struct LinearDecoder {
    d: Mat<f64>,
    residual: f64,
}

impl LinearDecoder {
    pub fn matrix(&self) -> &Mat<f64> {
        &self.d
    }

    /// Weighted RMS of `‖ξ − D·χ(ξ)‖` over the fitting nodes.
    pub fn residual(&self) -> f64 {
        self.residual
    }
}

impl Decoder<f64> for LinearDecoder {
    fn decode(&self, chi: &[f64]) -> Vec<f64> {
        (0..self.d.nrows())
            .map(|r| (0..self.d.ncols()).map(|c| self.d[(r, c)] * chi[c]).sum())
            .collect()
    }
}

/// Solves `D·(R + shift·I) = P`, `P = Σ w ξ χᵀ`, with `shift = λ·trace(R)/m`.
pub fn fit_decoder<D: Dictionary<Elem = f64>>(
    dict: &D,
    rule: &QuadratureRule,
    lambda: f64,
) -> Result<LinearDecoder> {
    let m = dict.len();
    let n = rule.dim();
    let mut r = gram_matrix(dict, rule)?;
    let mut p = Mat::<f64>::zeros(n, m);
    let mut chi = vec![0.0; m];
    for (x, w) in rule.nodes().zip(rule.weights()) {
        dict.evaluate_into(x, &mut chi);
        for (j, c) in chi.iter().enumerate() {
            for d in 0..n {
                p[(d, j)] += w * c * x[d];
            }
        }
    }
    let trace: f64 = (0..m).map(|j| r[(j, j)]).sum();
    let shift = lambda * trace / m as f64;
    for j in 0..m {
        r[(j, j)] += shift;
    }
    let llt = r.llt(Side::Lower).map_err(|_| Error::Conditioning {
        min_eigenvalue: r
            .self_adjoint_eigenvalues(Side::Lower)
            .ok()
            .and_then(|e| e.first().copied())
            .unwrap_or(f64::NAN),
        shift,
    })?;
    let mut d = p;
    llt.rsolve_in_place(d.as_mut());
    let mut decoder = LinearDecoder { d, residual: 0.0 };
    let mut sq = 0.0;
    for (x, w) in rule.nodes().zip(rule.weights()) {
        dict.evaluate_into(x, &mut chi);
        let y = decoder.decode(&chi);
        sq += w * x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    }
    decoder.residual = (sq / rule.total_weight()).sqrt();
    Ok(decoder)
}
