//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;

use faer::Mat;
use num_complex::Complex64;

use koopman_lift::dynamics::{Domain, PiecewiseLinearMap};
use koopman_lift::quadrature::{build_rule, QuadratureRule, RuleSpec};

/// Harmonics in interleaved order 0, 1, −1, 2, −2, …
pub fn harmonics(n_max: usize) -> Vec<i64> {
    let mut k = vec![0];
    for n in 1..=n_max as i64 {
        k.push(n);
        k.push(-n);
    }
    k
}

/// Closed-form `∫ exp(2πi(k·F(x) − l·x)) dx` summed over the affine pieces
/// of the map: on a piece with `F = αx + β` the integrand is a pure
/// exponential with frequency `kα − l`.
pub fn analytic_abar(map: &PiecewiseLinearMap, n_max: usize) -> Mat<Complex64> {
    let ks = harmonics(n_max);
    let m = ks.len();
    Mat::from_fn(m, m, |i, j| {
        let (k, l) = (ks[i] as f64, ks[j] as f64);
        map.pieces()
            .iter()
            .map(|&(p, q, alpha, beta)| {
                let w = TAU * (k * alpha - l);
                let phase = Complex64::new(0.0, TAU * k * beta).exp();
                let integral = if w.abs() < 1e-14 {
                    Complex64::new(q - p, 0.0)
                } else {
                    let i = Complex64::new(0.0, 1.0);
                    ((i * w * q).exp() - (i * w * p).exp()) / (i * w)
                };
                phase * integral
            })
            .sum()
    })
}

/// Midpoint Riemann sum of `f` on `[0, 1]` with `n` cells.
pub fn riemann<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    (0..n).map(|i| f((i as f64 + 0.5) * h)).sum::<f64>() * h
}

pub fn unit_rule(panels: usize, breakpoints: Vec<f64>) -> QuadratureRule {
    build_rule(&Domain::unit_interval(), &RuleSpec::segmented(panels, breakpoints)).unwrap()
}

pub fn max_abs_diff<T: koopman_lift::Scalar>(a: &Mat<T>, b: &Mat<T>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).modulus());
        }
    }
    worst
}

pub fn frobenius<T: koopman_lift::Scalar>(a: &Mat<T>) -> f64 {
    let mut s = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            s += a[(i, j)].abs_sq();
        }
    }
    s.sqrt()
}

pub fn identity_error<T: koopman_lift::Scalar>(a: &Mat<T>) -> f64 {
    let eye = Mat::from_fn(a.nrows(), a.ncols(), |i, j| T::from_re(if i == j { 1.0 } else { 0.0 }));
    max_abs_diff(a, &eye)
}

/// Distance on the circle `ℝ / ℤ`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}
