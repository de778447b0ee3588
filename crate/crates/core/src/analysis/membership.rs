use std::io::Write;

use num_complex::Complex64;

use crate::dynamics::SystemMap;
use crate::error::{argument, numerical, Result};
use crate::observables::{Dictionary, ExpTrig};
use crate::quadrature::QuadratureRule;

/// Partial Bessel sum and reconstruction error after `n` basis functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipRow {
    pub n: usize,
    /// `J_N = Σ_{k≤N} |⟨φᵢ∘F, φₖ⟩|²`.
    pub j_n: f64,
    /// `‖φᵢ∘F‖²` under the same quadrature.
    pub norm_sq: f64,
    /// RMS over the evaluation grid of `I_N − φᵢ∘F`.
    pub i_n_error: f64,
}

/// Residuals for `φᵢ∘F` with `φᵢ = exp(2πi·i·x)`, expanded in the first `N`
/// entries of `dict` for each requested `N`. The reconstruction error is the
/// RMS over `grid_points` cell midpoints of `[0, 1]`.
pub fn membership_residuals<S: SystemMap + ?Sized>(
    dict: &ExpTrig,
    system: &S,
    rule: &QuadratureRule,
    harmonic: i64,
    ns: &[usize],
    grid_points: usize,
) -> Result<Vec<MembershipRow>> {
    let m = dict.len();
    if let Some(bad) = ns.iter().find(|&&n| n == 0 || n > m) {
        return Err(argument(format!("N = {bad} outside 1..={m}")));
    }
    if grid_points == 0 {
        return Err(argument("membership grid needs at least one point"));
    }
    let n_max = ns.iter().copied().max().unwrap_or(0);

    // ⟨φᵢ∘F, φₖ⟩ for the first n_max entries, and ‖φᵢ∘F‖².
    let mut coef = vec![Complex64::new(0.0, 0.0); n_max];
    let mut norm_sq = 0.0;
    let mut y = vec![0.0; 1];
    let mut phi = vec![Complex64::new(0.0, 0.0); m];
    for (node, (x, w)) in rule.nodes().zip(rule.weights()).enumerate() {
        system.step_into(x, &mut y);
        let f = ExpTrig::phi(harmonic, y[0]);
        if !(f.re.is_finite() && f.im.is_finite()) {
            return Err(numerical(format!("composition non-finite at node {node}")));
        }
        norm_sq += w * f.norm_sqr();
        dict.evaluate_into(x, &mut phi);
        for (c, p) in coef.iter_mut().zip(&phi) {
            *c += f * p.conj() * *w;
        }
    }

    let grid: Vec<f64> = (0..grid_points)
        .map(|g| (g as f64 + 0.5) / grid_points as f64)
        .collect();
    let target: Vec<Complex64> = grid
        .iter()
        .map(|x| {
            system.step_into(&[*x], &mut y);
            ExpTrig::phi(harmonic, y[0])
        })
        .collect();
    let mut partial = vec![Complex64::new(0.0, 0.0); grid_points];
    let mut sorted: Vec<usize> = ns.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut rows = Vec::with_capacity(sorted.len());
    let mut j_n = 0.0;
    let mut next = 0;
    for (idx, c) in coef.iter().enumerate() {
        j_n += c.norm_sqr();
        let k = ExpTrig::harmonic(idx);
        for (p, x) in partial.iter_mut().zip(&grid) {
            *p += c * ExpTrig::phi(k, *x);
        }
        if next < sorted.len() && sorted[next] == idx + 1 {
            let err = partial
                .iter()
                .zip(&target)
                .map(|(p, t)| (p - t).norm_sqr())
                .sum::<f64>()
                / grid_points as f64;
            rows.push(MembershipRow {
                n: idx + 1,
                j_n,
                norm_sq,
                i_n_error: err.sqrt(),
            });
            next += 1;
        }
    }
    Ok(rows)
}

pub fn write_membership_csv<W: Write>(rows: &[MembershipRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["N", "J_N", "norm_sq", "I_N_error"])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.j_n.to_string(),
            r.norm_sq.to_string(),
            r.i_n_error.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
