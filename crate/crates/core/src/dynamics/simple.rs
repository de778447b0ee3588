use super::{Domain, SystemMap};
use crate::error::{argument, Result};

/// `F(x) = x` on an arbitrary box.
#[derive(Debug, Clone)]
pub struct IdentityMap {
    domain: Domain,
}

impl IdentityMap {
    pub fn new(domain: Domain) -> Self {
        Self { domain }
    }
}

impl SystemMap for IdentityMap {
    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn advance(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }
}

/// Circle rotation `F(x) = (x + s) mod 1` on `[0, 1]`.
///
/// Every Fourier mode is an exact eigenfunction, which makes this the
/// analytic reference case for the encoders.
#[derive(Debug, Clone)]
pub struct CircleRotation {
    shift: f64,
    domain: Domain,
}

impl CircleRotation {
    pub fn new(shift: f64) -> Result<Self> {
        if !shift.is_finite() {
            return Err(argument("rotation shift must be finite"));
        }
        Ok(Self {
            shift: shift.rem_euclid(1.0),
            domain: Domain::unit_interval(),
        })
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }
}

impl SystemMap for CircleRotation {
    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn advance(&self, x: &[f64], out: &mut [f64]) {
        out[0] = (x[0] + self.shift).rem_euclid(1.0);
    }

    fn breakpoints(&self) -> Vec<f64> {
        if self.shift > 0.0 {
            vec![1.0 - self.shift]
        } else {
            Vec::new()
        }
    }
}
