//! Observable dictionaries `χ(x) = [g₁(x) … g_m(x)]ᵀ`.

mod centers;
mod conversion;
mod fourier;
mod rbf;

pub use centers::{distinct_count, kmeanspp_centers, kmeanspp_centers_in, sample_trajectories, SampleRecipe};
pub use conversion::{build_conversion, ConversionMatrices};
pub use fourier::{build_exp_trig, build_real_fourier, ExpTrig, RealFourier};
pub use rbf::{build_rbf, read_centers_csv, write_centers_csv, GaussianRbf};

use serde::{Deserialize, Serialize};

use crate::dynamics::Domain;
use crate::error::{numerical, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DictionaryKind {
    ExpTrig,
    RealFourier,
    GaussianRbf,
}

impl DictionaryKind {
    pub fn name(self) -> &'static str {
        match self {
            DictionaryKind::ExpTrig => "exp_trig",
            DictionaryKind::RealFourier => "real_fourier",
            DictionaryKind::GaussianRbf => "gaussian_rbf",
        }
    }
}

/// An ordered, immutable set of scalar observables on a box domain.
pub trait Dictionary: Send + Sync {
    type Elem: Scalar;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn kind(&self) -> DictionaryKind;

    fn domain(&self) -> &Domain;

    /// Writes `χ(x)` into `out` without checks; `out.len()` must equal `len()`.
    fn evaluate_into(&self, x: &[f64], out: &mut [Self::Elem]);

    /// Checked evaluation of `χ(x)`.
    fn evaluate(&self, x: &[f64]) -> Result<Vec<Self::Elem>> {
        self.domain().check_dim(x)?;
        let mut out = vec![Self::Elem::from_re(0.0); self.len()];
        self.evaluate_into(x, &mut out);
        if let Some(k) = out.iter().position(|v| !v.finite()) {
            return Err(numerical(format!("observable {k} is non-finite at {x:?}")));
        }
        Ok(out)
    }
}
