//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

mod common;

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use koopman_lift::analysis::*;
use koopman_lift::dynamics::*;
use koopman_lift::encoding::*;
use koopman_lift::observables::*;
use koopman_lift::quadrature::{build_rule, QuadratureRule, RuleSpec};
use koopman_lift::Result;

/// Frozen univariate scenario.
const X0: f64 = 0.3;
const STEPS: usize = 100;
const LADDER: [usize; 4] = [17, 33, 257, 1025];

/// Rotation oracle.
const SHIFT: f64 = 0.137;

/// Width scale for the identity-law RBF grid. At the library default of 1.0
/// the Gaussians overlap so strongly that the Tikhonov shift alone moves
/// `A` away from `I` by about 1e-4.
const RBF_IDENTITY_WIDTH_SCALE: f64 = 0.5;

/// Desk-scale cable scenario.
const CABLE_CENTERS: usize = 300;
const CABLE_SAMPLES: usize = 200_000;
const CABLE_WIDTH_SCALE: f64 = 4.0;
const CABLE_LAMBDA: f64 = 1e-10;
const CABLE_RELEASE: [f64; 4] = [0.3, -0.6, 0.0, 0.0];
const CABLE_HORIZON: usize = 500;
/// Half-width (m) of the band around each cable's slack/taut switching circle.
const SWITCH_BAND: f64 = 0.05;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn unit() -> Domain {
    Domain::unit_interval()
}

fn fourier_rule<S: SystemMap>(system: &S, n_max: usize) -> QuadratureRule {
    build_rule(
        system.domain(),
        &RuleSpec::segmented(RuleSpec::fourier_panel_count(n_max), system.breakpoints()),
    )
    .unwrap()
}

fn inf_norm_from_identity<T: koopman_lift::Scalar>(a: &Mat<T>) -> f64 {
    (0..a.nrows())
        .map(|i| {
            (0..a.ncols())
                .map(|j| (a[(i, j)] - T::from_re(if i == j { 1.0 } else { 0.0 })).modulus())
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Greedy multiset matching; returns the worst pairing distance.
fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut left: Vec<Complex64> = b.to_vec();
    let mut worst = 0.0f64;
    for z in a {
        let (k, d) = left
            .iter()
            .enumerate()
            .map(|(k, w)| (k, (z - w).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        worst = worst.max(d);
        left.swap_remove(k);
    }
    worst
}

fn identity_law() -> Result<Outcome> {
    let id = IdentityMap::new(unit());
    let rule = fourier_rule(&id, 16);
    let e = direct_encode(&build_exp_trig(16, &unit())?, &id, &rule, 0.0)?;
    let r = direct_encode(&build_real_fourier(16, &unit())?, &id, &rule, 0.0)?;

    let square = Domain::new(vec![0.0, 0.0], vec![1.0, 1.0])?;
    let centers: Vec<Vec<f64>> = (0..100)
        .map(|i| vec![0.05 + 0.1 * (i % 10) as f64, 0.05 + 0.1 * (i / 10) as f64])
        .collect();
    let rbf = build_rbf(&centers, RBF_IDENTITY_WIDTH_SCALE, &square)?;
    let qmc = build_rule(&square, &RuleSpec::LowDiscrepancy { sample_count: 1 << 14, seed: 0 })?;
    let b = direct_encode(&rbf, &IdentityMap::new(square), &qmc, default_lambda(DictionaryKind::GaussianRbf))?;

    let (de, dr, db) = (
        inf_norm_from_identity(&e.a),
        inf_norm_from_identity(&r.a),
        inf_norm_from_identity(&b.a),
    );
    outcome(
        de < 1e-8 && dr < 1e-8 && db < 1e-6,
        format!("|A-I|_inf exp_trig {de:.1e}, real_fourier {dr:.1e}, rbf {db:.1e}"),
    )
}

fn rotation_oracle() -> Result<Outcome> {
    let rot = CircleRotation::new(SHIFT)?;
    let n_max = 16;
    let rule = fourier_rule(&rot, n_max);
    let e = build_exp_trig(n_max, &unit())?;
    let r = build_real_fourier(n_max, &unit())?;

    let abar = abar_matrix(&e, &rot, &rule)?;
    let abar_err = max_abs_diff(
        &abar,
        &Mat::from_fn(e.len(), e.len(), |i, j| {
            if i == j {
                Complex64::from_polar(1.0, TAU * ExpTrig::harmonic(i) as f64 * SHIFT)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }),
    );

    let model = direct_encode(&r, &rot, &rule, 0.0)?;
    let mut blocks = Mat::<f64>::zeros(r.len(), r.len());
    blocks[(0, 0)] = 1.0;
    for n in 1..=n_max {
        let th = TAU * n as f64 * SHIFT;
        let (p, q) = (2 * n - 1, 2 * n);
        blocks[(p, p)] = th.cos();
        blocks[(p, q)] = -th.sin();
        blocks[(q, p)] = th.sin();
        blocks[(q, q)] = th.cos();
    }
    let block_err = max_abs_diff(&model.a, &blocks);

    let x0 = 0.42;
    let decoded = PhaseDecoder.decode_trajectory(&predict(&model.a, &r, &[x0], 50)?);
    let track_err = decoded
        .values()
        .iter()
        .enumerate()
        .map(|(t, x)| circular_distance(x[0], x0 + SHIFT * t as f64))
        .fold(0.0, f64::max);
    outcome(
        abar_err < 1e-8 && block_err < 1e-8 && track_err < 1e-6,
        format!("Abar {abar_err:.1e}, block rotation {block_err:.1e}, 50-step tracking {track_err:.1e}"),
    )
}

fn route_equivalence() -> Result<Outcome> {
    let f = PiecewiseLinearMap::default();
    let rule = fourier_rule(&f, 16);
    let e = build_exp_trig(16, &unit())?;
    let r = build_real_fourier(16, &unit())?;
    let abar = abar_matrix(&e, &f, &rule)?;
    let via = conversion_route(&abar)?;
    let direct = direct_encode(&r, &f, &rule, 0.0)?;
    let mut diff = direct.a.clone();
    for i in 0..diff.nrows() {
        for j in 0..diff.ncols() {
            diff[(i, j)] -= via[(i, j)];
        }
    }
    let rel = frobenius(&diff) / frobenius(&direct.a);
    let s_abar = spectrum(&abar, STABILITY_EPS)?;
    let s_conv = spectrum(&via, STABILITY_EPS)?;
    let spec_gap = multiset_distance(&s_abar.eigenvalues, &s_conv.eigenvalues);
    outcome(
        rel < 1e-6 && spec_gap < 1e-8,
        format!("relative Frobenius {rel:.1e}, spectral gap {spec_gap:.1e}"),
    )
}

fn kernel_reproduction() -> Result<Outcome> {
    let f = PiecewiseLinearMap::default();
    let xs: Vec<Vec<f64>> = (0..200)
        .map(|i| i as f64 / 199.0)
        .filter(|x| (x - f.x_star()).abs() > 0.02)
        .map(|x| vec![x])
        .collect();
    let tests: [(&str, fn(f64) -> f64); 4] = [
        ("x", |x| x),
        ("x^2", |x| x * x),
        ("x^3", |x| x * x * x),
        ("cos2pix", |x| (TAU * x).cos()),
    ];
    // Errors below this are roundoff; a function already in the span of the
    // smallest dictionary cannot improve further.
    const FLOOR: f64 = 1e-12;
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, g) in tests {
        let mut errs = Vec::new();
        for m in [17, 33, 257] {
            let n_max = m / 2;
            let kernel = TruncatedKernel::new(build_exp_trig(n_max, &unit())?, &f);
            let vals = kernel.transform_many(|p: &[f64]| g(p[0]), &fourier_rule(&f, n_max), &xs)?;
            let mse = xs
                .iter()
                .zip(&vals)
                .map(|(x, v)| (v.re - g(f.apply(x[0]))).powi(2))
                .sum::<f64>()
                / xs.len() as f64;
            errs.push(mse.sqrt());
        }
        let trend = strictly_decreasing(&errs) || errs.iter().all(|e| *e < FLOOR);
        pass &= errs[2] < 1e-2 && trend;
        parts.push(format!("{name} [{:.1e} {:.1e} {:.1e}]", errs[0], errs[1], errs[2]));
    }
    outcome(pass, format!("RMS at m=17/33/257: {}", parts.join(", ")))
}

fn prediction_ladder() -> Result<Outcome> {
    let f = PiecewiseLinearMap::default();
    let sweep = rmse_sweep(&f, &LADDER, &[X0], STEPS, RuleSpec::DEFAULT_POINTS_PER_PANEL)?;
    let rmse: Vec<f64> = sweep.iter().map(|p| p.rmse).collect();
    outcome(
        strictly_decreasing(&rmse) && rmse[3] < 0.1 * rmse[0],
        format!(
            "RMSE m=17 {:.3e}, 33 {:.3e}, 257 {:.3e}, 1025 {:.3e}",
            rmse[0], rmse[1], rmse[2], rmse[3]
        ),
    )
}

fn pole_plot() -> Result<Outcome> {
    let f = PiecewiseLinearMap::default();
    let dict = build_real_fourier(128, &unit())?;
    let model = direct_encode(&dict, &f, &fourier_rule(&f, 128), 0.0)?;
    let s = spectrum(&model.a, STABILITY_EPS)?;
    let near = s.near_unit_circle();
    outcome(
        s.max_modulus <= 1.02 && near >= 5 && s.classification == Stability::MarginallyStable,
        format!(
            "max |lambda| {:.4}, {near} within 0.01 of the unit circle, {}",
            s.max_modulus,
            s.classification.name()
        ),
    )
}

fn membership() -> Result<Outcome> {
    let f = PiecewiseLinearMap::default();
    let dict = build_exp_trig(256, &unit())?;
    let rule = fourier_rule(&f, 1024);
    let ns = [1, 3, 9, 17, 33, 65, 129, 257, 513];
    let mut pass = true;
    let mut parts = Vec::new();
    for i in [1, 2, 5] {
        let rows = membership_residuals(&dict, &f, &rule, i, &ns, 4096)?;
        let j: Vec<f64> = rows.iter().map(|r| r.j_n).collect();
        let errs: Vec<f64> = rows.iter().map(|r| r.i_n_error).collect();
        let bound = rows[0].norm_sq;
        let monotone = j.windows(2).all(|w| w[1] >= w[0]);
        let bounded = j.iter().all(|v| *v <= bound + 1e-6);
        let reach = j[j.len() - 1] / bound;
        pass &= monotone && bounded && reach >= 0.95 && strictly_decreasing(&errs);
        parts.push(format!(
            "i={i}: J_513/|phi_i o F|^2 {reach:.4}, I_N {:.2e} -> {:.2e}",
            errs[0],
            errs[errs.len() - 1]
        ));
    }
    outcome(pass, parts.join("; "))
}

fn cable_centers(sys: &CableSystem) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let samples: Vec<Vec<f64>> = sample_trajectories(sys, &SampleRecipe::default())?
        .iter()
        .flat_map(|t| t.values().to_vec())
        .collect();
    let centers = kmeanspp_centers_in(&samples, CABLE_CENTERS, 0, sys.domain())?;
    Ok((samples, centers))
}

fn cable_tracking() -> Result<Outcome> {
    let sys = CableSystem::default();
    let domain = sys.domain().clone();
    let (_, centers) = cable_centers(&sys)?;
    let rbf = build_rbf(&centers, CABLE_WIDTH_SCALE, &domain)?;
    let rule = build_rule(&domain, &RuleSpec::LowDiscrepancy { sample_count: CABLE_SAMPLES, seed: 0 })?;
    let model = direct_encode(&rbf, &sys, &rule, CABLE_LAMBDA)?;
    let decoder = fit_decoder(&rbf, &rule, CABLE_LAMBDA)?;

    let truth = simulate_truth(&sys, &CABLE_RELEASE, CABLE_HORIZON)?;
    let bounces = count_rebounds(&truth.component(3));
    let decoded = decoder.decode_trajectory(&predict(&model.a, &rbf, &CABLE_RELEASE, CABLE_HORIZON)?);
    let cmp = compare_trajectories(&truth, &decoded)?;
    let ratio = cmp.rmse_over(&[0, 1]) / domain.diagonal();
    outcome(
        bounces >= 3 && ratio < 0.05,
        format!(
            "{bounces} rebounds, position RMSE {:.4} = {:.2}% of diagonal, decoder residual {:.3}, clamp rate {:.3}",
            cmp.rmse_over(&[0, 1]),
            100.0 * ratio,
            decoder.residual(),
            model.clamp_rate
        ),
    )
}

fn in_switching_band(sys: &CableSystem, x: &[f64]) -> bool {
    let [la, lb] = sys.cable_lengths([x[0], x[1]]);
    let p = sys.params();
    (la - p.length_a).abs() < SWITCH_BAND || (lb - p.length_b).abs() < SWITCH_BAND
}

fn center_density() -> Result<Outcome> {
    let sys = CableSystem::default();
    let (_, centers) = cable_centers(&sys)?;
    let frac_centers =
        centers.iter().filter(|c| in_switching_band(&sys, c)).count() as f64 / centers.len() as f64;
    let d = sys.domain();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let draws = 100_000;
    let hits = (0..draws)
        .filter(|_| {
            let x: Vec<f64> = (0..4).map(|k| rng.gen_range(d.lower()[k]..d.upper()[k])).collect();
            in_switching_band(&sys, &x)
        })
        .count();
    let frac_uniform = hits as f64 / draws as f64;
    let ratio = frac_centers / frac_uniform;
    outcome(
        ratio > 2.0,
        format!(
            "{:.1}% of centers vs {:.1}% of uniform points in the band, ratio {ratio:.2}",
            100.0 * frac_centers,
            100.0 * frac_uniform
        ),
    )
}

fn galerkin_optimality() -> Result<Outcome> {
    let f = PiecewiseLinearMap::default();
    let dict = build_real_fourier(16, &unit())?;
    let rule = fourier_rule(&f, 16);
    let model = direct_encode(&dict, &f, &rule, 0.0)?;
    let base = galerkin_residual(&model.a, &dict, &f, &rule)?;
    let scale = 1e-3 * frobenius(&model.a);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let m = dict.len();
    let mut worst_gain = f64::INFINITY;
    for _ in 0..20 {
        let delta = Mat::from_fn(m, m, |_, _| rng.gen::<f64>() - 0.5);
        let k = scale / frobenius(&delta);
        let perturbed = Mat::from_fn(m, m, |i, j| model.a[(i, j)] + k * delta[(i, j)]);
        worst_gain = worst_gain.min(galerkin_residual(&perturbed, &dict, &f, &rule)? - base);
    }
    outcome(
        worst_gain > 0.0,
        format!("base residual {base:.4e}, smallest increase over 20 perturbations {worst_gain:.3e}"),
    )
}

type Criterion = (u32, &'static str, Duration, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "identity law", Duration::from_secs(5), identity_law),
        (2, "rotation oracle", Duration::from_secs(5), rotation_oracle),
        (3, "route equivalence", Duration::from_secs(10), route_equivalence),
        (4, "kernel reproduction", Duration::from_secs(30), kernel_reproduction),
        (5, "prediction ladder", Duration::from_secs(300), prediction_ladder),
        (6, "pole plot", Duration::from_secs(60), pole_plot),
        (7, "membership residuals", Duration::from_secs(120), membership),
        (8, "cable tracking", Duration::from_secs(1200), cable_tracking),
        (9, "center density", Duration::from_secs(60), center_density),
        (10, "galerkin optimality", Duration::from_secs(60), galerkin_optimality),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (id, name, budget, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || *f == id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} [{id:>2}] {name}: {detail} ({:.1}s of {}s)",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
