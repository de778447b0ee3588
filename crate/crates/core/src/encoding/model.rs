use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use super::assembly::assemble;
use crate::dynamics::SystemMap;
use crate::error::{Error, Result};
use crate::observables::{Dictionary, DictionaryKind};
use crate::quadrature::{QuadratureKind, QuadratureRule};
use crate::scalar::Scalar;

/// Where the quadrature behind a model came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureInfo {
    pub kind: QuadratureKind,
    pub node_count: usize,
    pub seed: Option<u64>,
}

impl QuadratureInfo {
    pub fn of(rule: &QuadratureRule) -> Self {
        Self {
            kind: rule.kind(),
            node_count: rule.len(),
            seed: rule.seed(),
        }
    }
}

/// How `R` was conditioned before the solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regularization {
    /// Relative Tikhonov parameter.
    pub lambda: f64,
    /// Absolute diagonal shift `λ·trace(R)/m`.
    pub shift: f64,
    /// Smallest eigenvalue of `R + shift·I`.
    pub min_eigenvalue: f64,
    /// `λ_max / λ_min` of `R + shift·I`.
    pub condition_estimate: f64,
}

/// `A = Q R⁻¹` together with the matrices and metadata that produced it.
#[derive(Debug, Clone)]
pub struct LiftedModel<T> {
    pub a: Mat<T>,
    pub r: Mat<T>,
    pub q: Mat<T>,
    pub dictionary: DictionaryKind,
    pub quadrature: QuadratureInfo,
    pub regularization: Regularization,
    /// Fraction of quadrature nodes whose image was clamped into the domain.
    pub clamp_rate: f64,
}

impl<T: Scalar> LiftedModel<T> {
    pub fn size(&self) -> usize {
        self.a.nrows()
    }
}

/// Solves `A·(R + shift·I) = Q` through a Cholesky factorization.
pub fn solve_transition<T: Scalar>(r: &Mat<T>, q: &Mat<T>, lambda: f64) -> Result<(Mat<T>, Regularization)> {
    let m = r.nrows();
    if r.ncols() != m || q.nrows() != m || q.ncols() != m {
        return Err(crate::error::argument("R and Q must be square and of equal size"));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(crate::error::argument("regularization lambda must be nonnegative"));
    }
    let trace: f64 = (0..m).map(|i| r[(i, i)].re()).sum();
    let shift = lambda * trace / m as f64;
    let mut shifted = r.clone();
    for i in 0..m {
        shifted[(i, i)] += T::from_re(shift);
    }
    let eig = shifted
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| crate::error::numerical(format!("Gram eigenvalues: {e:?}")))?;
    let min_eigenvalue = eig.first().copied().unwrap_or(0.0);
    let max_eigenvalue = eig.last().copied().unwrap_or(0.0);
    let llt = shifted.llt(Side::Lower).map_err(|_| Error::Conditioning {
        min_eigenvalue,
        shift,
    })?;
    if !(min_eigenvalue > 0.0) {
        return Err(Error::Conditioning {
            min_eigenvalue,
            shift,
        });
    }
    let mut a = q.clone();
    llt.rsolve_in_place(a.as_mut());
    let reg = Regularization {
        lambda,
        shift,
        min_eigenvalue,
        condition_estimate: max_eigenvalue / min_eigenvalue,
    };
    Ok((a, reg))
}

/// Assembles `R`, `Q` on `rule` and solves for `A`.
pub fn direct_encode<D: Dictionary, S: SystemMap + ?Sized>(
    dict: &D,
    system: &S,
    rule: &QuadratureRule,
    lambda: f64,
) -> Result<LiftedModel<D::Elem>> {
    let asm = assemble(dict, system, rule)?;
    let (a, regularization) = solve_transition(&asm.r, &asm.q, lambda)?;
    Ok(LiftedModel {
        a,
        r: asm.r,
        q: asm.q,
        dictionary: dict.kind(),
        quadrature: QuadratureInfo::of(rule),
        regularization,
        clamp_rate: asm.clamped_nodes as f64 / rule.len() as f64,
    })
}
