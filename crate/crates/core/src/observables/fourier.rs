use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{Dictionary, DictionaryKind};
use crate::dynamics::Domain;
use crate::error::{argument, Result};

fn require_unit(domain: &Domain) -> Result<()> {
    if domain.is_unit_interval() {
        Ok(())
    } else {
        Err(argument(
            "Fourier dictionaries are orthogonal only on the unit interval [0, 1]",
        ))
    }
}

/// Complex exponentials `φ_k(x) = exp(2πikx)`, `|k| ≤ n_max`, ordered
/// `φ₀, φ₁, φ₋₁, φ₂, φ₋₂, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpTrig {
    n_max: usize,
    domain: Domain,
}

pub fn build_exp_trig(n_max: usize, domain: &Domain) -> Result<ExpTrig> {
    require_unit(domain)?;
    Ok(ExpTrig {
        n_max,
        domain: domain.clone(),
    })
}

impl ExpTrig {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Harmonic `k` carried by entry `index`.
    pub fn harmonic(index: usize) -> i64 {
        if index == 0 {
            0
        } else if index % 2 == 1 {
            index.div_ceil(2) as i64
        } else {
            -((index / 2) as i64)
        }
    }

    /// Position of harmonic `k` in the interleaved order.
    pub fn index_of(k: i64) -> usize {
        match k {
            0 => 0,
            k if k > 0 => 2 * k as usize - 1,
            k => 2 * k.unsigned_abs() as usize,
        }
    }

    pub fn phi(k: i64, x: f64) -> Complex64 {
        // Reduce the phase first so large k·x keeps full precision.
        let phase = (k as f64 * x).rem_euclid(1.0);
        Complex64::from_polar(1.0, TAU * phase)
    }
}

impl Dictionary for ExpTrig {
    type Elem = Complex64;

    fn len(&self) -> usize {
        2 * self.n_max + 1
    }

    fn kind(&self) -> DictionaryKind {
        DictionaryKind::ExpTrig
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn evaluate_into(&self, x: &[f64], out: &mut [Complex64]) {
        out[0] = Complex64::new(1.0, 0.0);
        for n in 1..=self.n_max {
            let z = Self::phi(n as i64, x[0]);
            out[2 * n - 1] = z;
            out[2 * n] = z.conj();
        }
    }
}

/// Real basis `1, cos 2πx, sin 2πx, cos 4πx, sin 4πx, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealFourier {
    n_max: usize,
    domain: Domain,
}

pub fn build_real_fourier(n_max: usize, domain: &Domain) -> Result<RealFourier> {
    require_unit(domain)?;
    Ok(RealFourier {
        n_max,
        domain: domain.clone(),
    })
}

impl RealFourier {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Dictionary size `m` to harmonic cutoff; `m` must be odd.
    pub fn n_max_for_size(m: usize) -> Result<usize> {
        if m % 2 == 1 {
            Ok(m / 2)
        } else {
            Err(argument(format!(
                "Fourier dictionary size must be odd (2·n_max + 1), got {m}"
            )))
        }
    }
}

impl Dictionary for RealFourier {
    type Elem = f64;

    fn len(&self) -> usize {
        2 * self.n_max + 1
    }

    fn kind(&self) -> DictionaryKind {
        DictionaryKind::RealFourier
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn evaluate_into(&self, x: &[f64], out: &mut [f64]) {
        out[0] = 1.0;
        for n in 1..=self.n_max {
            let z = ExpTrig::phi(n as i64, x[0]);
            out[2 * n - 1] = z.re;
            out[2 * n] = z.im;
        }
    }
}
