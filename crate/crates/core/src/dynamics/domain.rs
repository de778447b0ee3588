use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};

/// Axis-aligned box `X ⊂ ℝⁿ` on which a system and its observables live.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(argument("domain must have at least one axis"));
        }
        if lower.len() != upper.len() {
            return Err(argument(format!(
                "domain bounds have lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(argument(format!(
                    "domain axis {i}: lower {lo} must be finite and below upper {hi}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The unit interval `[0, 1]`.
    pub fn unit_interval() -> Self {
        Self {
            lower: vec![0.0],
            upper: vec![1.0],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn extents(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .collect()
    }

    pub fn volume(&self) -> f64 {
        self.extents().iter().product()
    }

    /// Euclidean length of the box diagonal.
    pub fn diagonal(&self) -> f64 {
        self.extents().iter().map(|e| e * e).sum::<f64>().sqrt()
    }

    pub fn is_unit_interval(&self) -> bool {
        self.dim() == 1 && self.lower[0] == 0.0 && self.upper[0] == 1.0
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    /// Projects `x` onto the box in place; returns whether any axis moved.
    pub fn clamp(&self, x: &mut [f64]) -> bool {
        let mut moved = false;
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            if *v < *lo {
                *v = *lo;
                moved = true;
            } else if *v > *hi {
                *v = *hi;
                moved = true;
            }
        }
        moved
    }

    pub(crate) fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(argument(format!(
                "state has dimension {}, domain has dimension {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inverted_bounds() {
        assert!(Domain::new(vec![1.0], vec![0.0]).is_err());
        assert!(Domain::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(Domain::new(vec![], vec![]).is_err());
    }

    #[test]
    fn volume_and_diagonal() {
        let d = Domain::new(vec![0.0, -1.0], vec![3.0, 3.0]).unwrap();
        assert_eq!(d.volume(), 12.0);
        assert_eq!(d.diagonal(), 5.0);
    }

    #[test]
    fn clamp_reports_motion() {
        let d = Domain::unit_interval();
        let mut x = [0.5];
        assert!(!d.clamp(&mut x));
        let mut y = [1.25];
        assert!(d.clamp(&mut y));
        assert_eq!(y[0], 1.0);
    }
}
