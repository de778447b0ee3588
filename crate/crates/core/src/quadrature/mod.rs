//! Quadrature rules approximating `⟨f, g⟩ = ∫_X f·ḡ dx` on box domains.

mod gauss;

pub use gauss::gauss_legendre;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sobol::params::JoeKuoD6;
use sobol::Sobol;

use crate::dynamics::Domain;
use crate::error::{argument, numerical, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureKind {
    Segmented1D,
    LowDiscrepancyND,
}

/// How to build a rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RuleSpec {
    /// Composite Gauss–Legendre on a 1-D domain. Every breakpoint becomes a
    /// panel edge, so no panel straddles a discontinuity of the integrand.
    Segmented {
        points_per_panel: usize,
        panel_count: usize,
        #[serde(default)]
        breakpoints: Vec<f64>,
    },
    /// Equal-weight Sobol points with a seeded random shift.
    LowDiscrepancy { sample_count: usize, seed: u64 },
}

impl RuleSpec {
    pub const DEFAULT_POINTS_PER_PANEL: usize = 8;
    pub const DEFAULT_PANEL_COUNT: usize = 256;
    pub const DEFAULT_SAMPLE_COUNT: usize = 200_000;

    /// Panel count resolving harmonics up to `n_max`: at least the default,
    /// and at least four panels per harmonic.
    pub fn fourier_panel_count(n_max: usize) -> usize {
        Self::DEFAULT_PANEL_COUNT.max(4 * n_max)
    }

    pub fn segmented(panel_count: usize, breakpoints: Vec<f64>) -> Self {
        RuleSpec::Segmented {
            points_per_panel: Self::DEFAULT_POINTS_PER_PANEL,
            panel_count,
            breakpoints,
        }
    }
}

/// Nodes `ξᵢ` and positive weights `wᵢ` over a box.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: QuadratureKind,
    breakpoints: Vec<f64>,
    seed: Option<u64>,
}

/// Splits `total` panels across segments proportionally to their lengths,
/// giving every segment at least one panel.
fn allocate_panels(lengths: &[f64], total: usize) -> Vec<usize> {
    let span: f64 = lengths.iter().sum();
    let total = total.max(lengths.len());
    let spare = total - lengths.len();
    let ideal: Vec<f64> = lengths.iter().map(|l| spare as f64 * l / span).collect();
    let mut counts: Vec<usize> = ideal.iter().map(|v| v.floor() as usize).collect();
    let mut left = spare - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by(|&i, &j| {
        let fi = ideal[i] - ideal[i].floor();
        let fj = ideal[j] - ideal[j].floor();
        fj.total_cmp(&fi).then(i.cmp(&j))
    });
    for i in order {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    counts.iter().map(|c| c + 1).collect()
}

pub fn build_rule(domain: &Domain, spec: &RuleSpec) -> Result<QuadratureRule> {
    match spec {
        RuleSpec::Segmented {
            points_per_panel,
            panel_count,
            breakpoints,
        } => build_segmented(domain, *points_per_panel, *panel_count, breakpoints),
        RuleSpec::LowDiscrepancy { sample_count, seed } => {
            build_low_discrepancy(domain, *sample_count, *seed)
        }
    }
}

fn build_segmented(
    domain: &Domain,
    points_per_panel: usize,
    panel_count: usize,
    breakpoints: &[f64],
) -> Result<QuadratureRule> {
    if domain.dim() != 1 {
        return Err(argument(format!(
            "segmented Gauss-Legendre rules are 1-D; domain has dimension {}",
            domain.dim()
        )));
    }
    if points_per_panel == 0 || panel_count == 0 {
        return Err(argument("quadrature needs at least one panel and one point per panel"));
    }
    let (lo, hi) = (domain.lower()[0], domain.upper()[0]);
    let mut cuts: Vec<f64> = breakpoints.to_vec();
    if let Some(bad) = cuts.iter().find(|b| !(**b > lo && **b < hi)) {
        return Err(argument(format!(
            "breakpoint {bad} is not interior to [{lo}, {hi}]"
        )));
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let edges: Vec<f64> = std::iter::once(lo)
        .chain(cuts.iter().copied())
        .chain(std::iter::once(hi))
        .collect();
    let lengths: Vec<f64> = edges.windows(2).map(|w| w[1] - w[0]).collect();
    let counts = allocate_panels(&lengths, panel_count);

    let (ref_x, ref_w) = gauss_legendre(points_per_panel);
    let total: usize = counts.iter().sum::<usize>() * points_per_panel;
    let mut nodes = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    for (seg, &n) in counts.iter().enumerate() {
        let (a, b) = (edges[seg], edges[seg + 1]);
        for p in 0..n {
            let p0 = a + (b - a) * p as f64 / n as f64;
            let p1 = if p + 1 == n { b } else { a + (b - a) * (p + 1) as f64 / n as f64 };
            let (mid, half) = (0.5 * (p0 + p1), 0.5 * (p1 - p0));
            for (x, w) in ref_x.iter().zip(&ref_w) {
                nodes.push(mid + half * x);
                weights.push(half * w);
            }
        }
    }
    Ok(QuadratureRule {
        dim: 1,
        nodes,
        weights,
        kind: QuadratureKind::Segmented1D,
        breakpoints: cuts,
        seed: None,
    })
}

fn build_low_discrepancy(domain: &Domain, sample_count: usize, seed: u64) -> Result<QuadratureRule> {
    if sample_count == 0 {
        return Err(argument("low-discrepancy rule needs at least one sample"));
    }
    let dim = domain.dim();
    let params = JoeKuoD6::minimal();
    if dim > 100 {
        return Err(argument("low-discrepancy rules support at most 100 dimensions"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    let (lower, ext) = (domain.lower(), domain.extents());
    let mut nodes = Vec::with_capacity(sample_count * dim);
    for point in Sobol::<f64>::new(dim, &params).take(sample_count) {
        for d in 0..dim {
            let u = (point[d] + shift[d]).fract();
            nodes.push(lower[d] + ext[d] * u);
        }
    }
    let w = domain.volume() / sample_count as f64;
    Ok(QuadratureRule {
        dim,
        nodes,
        weights: vec![w; sample_count],
        kind: QuadratureKind::LowDiscrepancyND,
        breakpoints: Vec::new(),
        seed: Some(seed),
    })
}

impl QuadratureRule {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn kind(&self) -> QuadratureKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.nodes.chunks_exact(self.dim)
    }

    /// Flat row-major node storage, `len() × dim()`.
    pub fn node_data(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ wᵢ f(ξᵢ)`.
    pub fn integrate<T, F>(&self, f: F) -> Result<T>
    where
        T: Scalar,
        F: Fn(&[f64]) -> T,
    {
        let mut acc = T::from_re(0.0);
        for (i, (x, w)) in self.nodes().zip(&self.weights).enumerate() {
            let v = f(x);
            if !v.finite() {
                return Err(numerical(format!("integrand non-finite at node {i} ({x:?})")));
            }
            acc += v * *w;
        }
        Ok(acc)
    }
}

/// `⟨f, g⟩ ≈ Σᵢ wᵢ f(ξᵢ) conj(g(ξᵢ))`.
pub fn inner_product<T, F, G>(f: F, g: G, rule: &QuadratureRule) -> Result<T>
where
    T: Scalar,
    F: Fn(&[f64]) -> T,
    G: Fn(&[f64]) -> T,
{
    let mut acc = T::from_re(0.0);
    for (i, (x, w)) in rule.nodes().zip(rule.weights()).enumerate() {
        let (fv, gv) = (f(x), g(x));
        if !(fv.finite() && gv.finite()) {
            return Err(numerical(format!(
                "inner product integrand non-finite at node {i} ({x:?})"
            )));
        }
        acc += fv * gv.conjugate() * *w;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn unit_rule(panels: usize, breaks: Vec<f64>) -> QuadratureRule {
        build_rule(&Domain::unit_interval(), &RuleSpec::segmented(panels, breaks)).unwrap()
    }

    #[test]
    fn two_point_panel_integrates_cubic() {
        let spec = RuleSpec::Segmented {
            points_per_panel: 2,
            panel_count: 1,
            breakpoints: vec![],
        };
        let rule = build_rule(&Domain::unit_interval(), &spec).unwrap();
        let v: f64 = rule.integrate(|x| x[0].powi(3)).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn breakpoint_is_a_panel_edge() {
        let rule = unit_rule(16, vec![0.37]);
        assert!(rule.nodes().all(|x| x[0] != 0.37));
        // Mass on each side of the breakpoint equals the segment length.
        let left: f64 = rule
            .nodes()
            .zip(rule.weights())
            .filter(|(x, _)| x[0] < 0.37)
            .map(|(_, w)| w)
            .sum();
        assert!((left - 0.37).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_volume() {
        let rule = unit_rule(256, vec![0.5]);
        assert!((rule.total_weight() - 1.0).abs() < 1e-12);
        let cube = Domain::new(vec![0.0; 4], vec![1.0; 4]).unwrap();
        let qmc = build_rule(
            &cube,
            &RuleSpec::LowDiscrepancy {
                sample_count: 4096,
                seed: 3,
            },
        )
        .unwrap();
        assert!((qmc.total_weight() - 1.0).abs() < 1e-12);
        let boxed = Domain::new(vec![-1.0, 0.0], vec![1.0, 3.0]).unwrap();
        let qmc = build_rule(
            &boxed,
            &RuleSpec::LowDiscrepancy {
                sample_count: 1000,
                seed: 0,
            },
        )
        .unwrap();
        assert!((qmc.total_weight() - 6.0).abs() < 1e-12);
        assert!(qmc.nodes().all(|x| boxed.contains(x)));
    }

    #[test]
    fn low_discrepancy_is_deterministic() {
        let cube = Domain::new(vec![0.0; 3], vec![1.0; 3]).unwrap();
        let spec = RuleSpec::LowDiscrepancy {
            sample_count: 500,
            seed: 42,
        };
        let a = build_rule(&cube, &spec).unwrap();
        let b = build_rule(&cube, &spec).unwrap();
        assert_eq!(a.node_data(), b.node_data());
        let c = build_rule(
            &cube,
            &RuleSpec::LowDiscrepancy {
                sample_count: 500,
                seed: 43,
            },
        )
        .unwrap();
        assert_ne!(a.node_data(), c.node_data());
    }

    #[test]
    fn qmc_integrates_smooth_function() {
        let cube = Domain::new(vec![0.0; 4], vec![1.0; 4]).unwrap();
        let rule = build_rule(
            &cube,
            &RuleSpec::LowDiscrepancy {
                sample_count: 1 << 14,
                seed: 1,
            },
        )
        .unwrap();
        let v: f64 = rule.integrate(|x| x.iter().map(|t| t * t).sum()).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn rejects_degenerate_specs() {
        let d = Domain::unit_interval();
        assert!(build_rule(&d, &RuleSpec::segmented(0, vec![])).is_err());
        assert!(build_rule(&d, &RuleSpec::segmented(4, vec![1.0])).is_err());
        assert!(build_rule(
            &d,
            &RuleSpec::LowDiscrepancy {
                sample_count: 0,
                seed: 0
            }
        )
        .is_err());
    }

    #[test]
    fn unit_and_cosine_norms() {
        let rule = unit_rule(256, vec![]);
        let one: f64 = inner_product(|_| 1.0, |_| 1.0, &rule).unwrap();
        assert!((one - 1.0).abs() < 1e-14);
        let c = |x: &[f64]| (2.0 * PI * x[0]).cos();
        let v: f64 = inner_product(c, c, &rule).unwrap();
        assert!((v - 0.5).abs() < 1e-10);
        let e = |x: &[f64]| Complex64::from_polar(1.0, 2.0 * PI * x[0]);
        let z: Complex64 = inner_product(e, e, &rule).unwrap();
        assert!((z - 1.0).norm() < 1e-14);
    }

    #[test]
    fn non_finite_node_is_reported() {
        let rule = unit_rule(4, vec![]);
        let err = inner_product(|x: &[f64]| 1.0 / (x[0] - rule.node(5)[0]), |_| 1.0, &rule);
        match err {
            Err(crate::Error::Numerical(msg)) => assert!(msg.contains("node 5"), "{msg}"),
            other => panic!("expected numerical error, got {other:?}"),
        }
    }

    #[test]
    fn panel_allocation_is_proportional() {
        assert_eq!(allocate_panels(&[0.5, 0.5], 256), vec![128, 128]);
        let c = allocate_panels(&[0.9, 0.1], 10);
        assert_eq!(c.iter().sum::<usize>(), 10);
        assert_eq!(allocate_panels(&[0.999, 0.001], 1), vec![1, 1]);
    }
}
