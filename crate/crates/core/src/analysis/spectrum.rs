use std::io::Write;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{argument, numerical, Result};
use crate::scalar::Scalar;

/// Default band around the unit circle treated as "on" it.
pub const STABILITY_EPS: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    MarginallyStable,
    Unstable,
}

impl Stability {
    pub fn name(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::MarginallyStable => "marginally_stable",
            Stability::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Sorted by decreasing modulus, then by argument.
    pub eigenvalues: Vec<Complex64>,
    pub max_modulus: f64,
    pub classification: Stability,
    pub eps: f64,
}

impl Spectrum {
    /// Eigenvalues with `||λ| − 1| < eps`.
    pub fn near_unit_circle(&self) -> usize {
        self.eigenvalues
            .iter()
            .filter(|z| (z.norm() - 1.0).abs() < self.eps)
            .count()
    }
}

pub fn classify(max_modulus: f64, eps: f64) -> Stability {
    if max_modulus > 1.0 + eps {
        Stability::Unstable
    } else if max_modulus >= 1.0 - eps {
        Stability::MarginallyStable
    } else {
        Stability::Stable
    }
}

pub fn spectrum<T: Scalar>(a: &Mat<T>, eps: f64) -> Result<Spectrum> {
    if a.nrows() != a.ncols() {
        return Err(argument("spectrum needs a square matrix"));
    }
    if !(eps >= 0.0) {
        return Err(argument("stability tolerance must be nonnegative"));
    }
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if !a[(i, j)].finite() {
                return Err(numerical(format!("A[{i}][{j}] is non-finite")));
            }
        }
    }
    let mut eigenvalues: Vec<Complex64> = a
        .eigenvalues()
        .map_err(|e| numerical(format!("eigenvalue solver failed: {e:?}")))?
        .into_iter()
        .map(|z| Complex64::new(z.re, z.im))
        .collect();
    eigenvalues.sort_by(|x, y| y.norm().total_cmp(&x.norm()).then(x.arg().total_cmp(&y.arg())));
    let max_modulus = eigenvalues.first().map_or(0.0, |z| z.norm());
    Ok(Spectrum {
        eigenvalues,
        max_modulus,
        classification: classify(max_modulus, eps),
        eps,
    })
}

pub fn write_spectrum_csv<W: Write>(spec: &Spectrum, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["re", "im", "abs"])?;
    for z in &spec.eigenvalues {
        w.write_record([z.re.to_string(), z.im.to_string(), z.norm().to_string()])?;
    }
    w.flush()?;
    Ok(())
}
