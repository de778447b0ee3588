use super::{Domain, SystemMap};
use crate::error::{argument, Result};

/// Which linear branch of the piecewise map governs a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `0 ≤ x ≤ x*`: `F(x) = c·x − c·x*`
    Left,
    /// `x* < x ≤ 1`: `F(x) = b·x + a − b·x*`
    Right,
}

/// Univariate hybrid map on `[0, 1]` made of two linear pieces with a jump
/// of size `a` at `x*`.
#[derive(Debug, Clone)]
pub struct PiecewiseLinearMap {
    a: f64,
    b: f64,
    c: f64,
    x_star: f64,
    domain: Domain,
}

const SELF_MAP_GRID: usize = 10_000;

impl PiecewiseLinearMap {
    pub fn new(a: f64, b: f64, c: f64, x_star: f64) -> Result<Self> {
        if ![a, b, c, x_star].iter().all(|v| v.is_finite()) {
            return Err(argument("piecewise map parameters must be finite"));
        }
        if !(x_star > 0.0 && x_star < 1.0) {
            return Err(argument(format!("x_star = {x_star} must lie in (0, 1)")));
        }
        if a == 0.0 {
            return Err(argument("a = 0 removes the discontinuity at x_star"));
        }
        let map = Self {
            a,
            b,
            c,
            x_star,
            domain: Domain::unit_interval(),
        };
        // Both branches are affine, so checking a dense grid plus the branch
        // endpoints (including the right limit at x*) is exhaustive.
        let probes = (0..=SELF_MAP_GRID)
            .map(|i| i as f64 / SELF_MAP_GRID as f64)
            .chain([x_star]);
        for x in probes {
            let y = map.apply(x);
            if !(0.0..=1.0).contains(&y) {
                return Err(argument(format!(
                    "not a self-map of [0, 1]: F({x}) = {y}"
                )));
            }
        }
        let right_limit = b * x_star + a - b * x_star;
        if !(0.0..=1.0).contains(&right_limit) {
            return Err(argument(format!(
                "not a self-map of [0, 1]: right limit at x_star is {right_limit}"
            )));
        }
        Ok(map)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn x_star(&self) -> f64 {
        self.x_star
    }

    pub fn branch(&self, x: f64) -> Branch {
        if x <= self.x_star {
            Branch::Left
        } else {
            Branch::Right
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        match self.branch(x) {
            Branch::Left => self.c * x - self.c * self.x_star,
            Branch::Right => self.b * x + self.a - self.b * self.x_star,
        }
    }

    /// Affine pieces `(lo, hi, slope, intercept)` covering `[0, 1]`.
    pub fn pieces(&self) -> [(f64, f64, f64, f64); 2] {
        [
            (0.0, self.x_star, self.c, -self.c * self.x_star),
            (self.x_star, 1.0, self.b, self.a - self.b * self.x_star),
        ]
    }
}

impl Default for PiecewiseLinearMap {
    /// Parameters picked by simulation: the orbit settles onto an attracting
    /// period-6 cycle that crosses `x*` on every lap.
    fn default() -> Self {
        Self::new(0.4, 0.2, -1.1, 0.5).expect("default parameters form a self-map")
    }
}

impl SystemMap for PiecewiseLinearMap {
    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn advance(&self, x: &[f64], out: &mut [f64]) {
        out[0] = self.apply(x[0]);
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.x_star]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{clamp_rate, eval_map, simulate_truth};

    #[test]
    fn x_star_maps_to_zero() {
        let f = PiecewiseLinearMap::default();
        assert_eq!(eval_map(&f, &[f.x_star()]).unwrap().state[0], 0.0);
    }

    #[test]
    fn right_endpoint_matches_second_branch() {
        let f = PiecewiseLinearMap::default();
        let (a, b, x_star) = (f.a(), f.b(), f.x_star());
        let expected = b + a - b * x_star;
        assert!((f.apply(1.0) - expected).abs() < 1e-15);
    }

    #[test]
    fn jump_has_magnitude_a() {
        let f = PiecewiseLinearMap::default();
        let left = f.apply(f.x_star());
        let right = f.b() * f.x_star() + f.a() - f.b() * f.x_star();
        assert!(((right - left).abs() - f.a().abs()).abs() < 1e-15);
        assert!(f.a().abs() >= 0.1);
    }

    #[test]
    fn rejects_non_self_maps() {
        assert!(PiecewiseLinearMap::new(0.4, 0.2, 1.0, 0.5).is_err());
        assert!(PiecewiseLinearMap::new(0.9, 0.5, -1.0, 0.5).is_err());
        assert!(PiecewiseLinearMap::new(0.0, 0.2, -1.1, 0.5).is_err());
        assert!(PiecewiseLinearMap::new(0.4, 0.2, -1.1, 1.0).is_err());
    }

    #[test]
    fn default_map_never_clamps() {
        let f = PiecewiseLinearMap::default();
        let grid: Vec<Vec<f64>> = (0..10_000).map(|i| vec![i as f64 / 9_999.0]).collect();
        assert_eq!(clamp_rate(&f, &grid), 0.0);
    }

    #[test]
    fn orbit_switches_branches() {
        let f = PiecewiseLinearMap::default();
        let traj = simulate_truth(&f, &[0.3], 100).unwrap();
        let branches: Vec<Branch> = traj.values().iter().map(|v| f.branch(v[0])).collect();
        let switches = branches.windows(2).filter(|w| w[0] != w[1]).count();
        assert!(switches >= 10, "only {switches} switches");
        // The two branches really are visited, and jumps land on both sides.
        assert!(branches.contains(&Branch::Left) && branches.contains(&Branch::Right));
    }
}
