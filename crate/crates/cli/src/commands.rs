//! One function per subcommand. Each returns the short summary printed to
//! stdout; every data product goes through [`RunOutput`].

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use koopman_lift::analysis::{
    compare_trajectories, count_rebounds, fit_decoder, membership_residuals, predict, rmse_sweep, spectrum,
    write_comparison_csv, write_membership_csv, write_spectrum_csv, write_sweep_csv, write_trajectory_csv, Decoder,
    PhaseDecoder,
};
use koopman_lift::dynamics::{eval_map, simulate_truth, System, SystemMap};
use koopman_lift::encoding::{default_lambda, direct_encode, LiftedModel, TruncatedKernel};
use koopman_lift::matrix_csv::{write_matrix, Metadata};
use koopman_lift::observables::{
    build_exp_trig, build_rbf, build_real_fourier, kmeanspp_centers_in, read_centers_csv, sample_trajectories,
    write_centers_csv, Dictionary, ExpTrig, GaussianRbf, RealFourier,
};
use koopman_lift::quadrature::{build_rule, QuadratureRule, RuleSpec};
use koopman_lift::{Scalar, Trajectory};

use crate::config::{DictionaryConfig, ExperimentConfig, SystemConfig};

/// Output directory plus the list of files written to it, in write order.
pub struct RunOutput {
    dir: PathBuf,
    files: Vec<String>,
}

impl RunOutput {
    pub fn new(dir: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir, files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    /// Writes `rows` as `quantity,value` pairs.
    fn write_table(&mut self, name: &str, rows: &[(&str, String)]) -> Result<()> {
        let mut w = self.create(name)?;
        writeln!(w, "quantity,value")?;
        for (k, v) in rows {
            writeln!(w, "{k},{v}")?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Everything a subcommand needs besides the output sink.
pub struct Run<'a> {
    pub config: &'a ExperimentConfig,
    /// Directory that relative paths in the configuration are resolved against.
    pub base_dir: &'a Path,
}

enum Lift {
    ExpTrig(ExpTrig),
    RealFourier(RealFourier),
    Rbf(GaussianRbf),
}

impl Lift {
    fn n_max(&self) -> Option<usize> {
        match self {
            Lift::ExpTrig(d) => Some(d.n_max()),
            Lift::RealFourier(d) => Some(d.n_max()),
            Lift::Rbf(_) => None,
        }
    }
}

impl Run<'_> {
    fn system(&self) -> Result<System> {
        self.config.system.build()
    }

    fn lambda(&self, dict: &impl Dictionary) -> f64 {
        self.config.encoding.lambda.unwrap_or_else(|| default_lambda(dict.kind()))
    }

    fn x0(&self, system: &System) -> Result<Vec<f64>> {
        let x0 = if self.config.scenario.x0.is_empty() {
            self.config.system.default_x0(system.domain())
        } else {
            self.config.scenario.x0.clone()
        };
        ensure!(
            x0.len() == system.domain().dim(),
            "scenario.x0 has {} entries, the system has dimension {}",
            x0.len(),
            system.domain().dim()
        );
        ensure!(system.domain().contains(&x0), "scenario.x0 {x0:?} lies outside the system domain");
        Ok(x0)
    }

    fn names(&self, system: &System) -> Vec<String> {
        self.config.system.component_names(system.domain().dim())
    }

    fn rule(&self, system: &System, n_max: Option<usize>) -> Result<QuadratureRule> {
        let q = &self.config.quadrature;
        let domain = system.domain();
        let spec = if domain.dim() == 1 {
            let panel_count = match (q.panel_count, n_max) {
                (0, Some(n)) => RuleSpec::fourier_panel_count(n),
                (0, None) => RuleSpec::DEFAULT_PANEL_COUNT,
                (p, _) => p,
            };
            RuleSpec::Segmented {
                points_per_panel: q.points_per_panel,
                panel_count,
                breakpoints: system.breakpoints(),
            }
        } else {
            RuleSpec::LowDiscrepancy {
                sample_count: q.sample_count,
                seed: self.config.seed,
            }
        };
        build_rule(domain, &spec).context("building the quadrature rule from [quadrature]")
    }

    fn dictionary(&self, system: &System) -> Result<Lift> {
        let domain = system.domain();
        Ok(match &self.config.dictionary {
            DictionaryConfig::ExpTrig { n_max } => {
                Lift::ExpTrig(build_exp_trig(*n_max, domain).context("dictionary.n_max")?)
            }
            DictionaryConfig::RealFourier { n_max } => {
                Lift::RealFourier(build_real_fourier(*n_max, domain).context("dictionary.n_max")?)
            }
            DictionaryConfig::GaussianRbf {
                centers_file: Some(file),
                ..
            } => {
                let path = self.base_dir.join(file);
                let f = File::open(&path).with_context(|| format!("dictionary.centers_file: {}", path.display()))?;
                Lift::Rbf(read_centers_csv(f, domain).with_context(|| format!("reading {}", path.display()))?)
            }
            DictionaryConfig::GaussianRbf { centers, width_scale, .. } => {
                let points = self.sampled_centers(system, *centers)?.1;
                Lift::Rbf(build_rbf(&points, *width_scale, domain).context("dictionary.width_scale")?)
            }
        })
    }

    /// Sample-trajectory points and the k-means++ centers placed on them.
    fn sampled_centers(&self, system: &System, count: usize) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        let System::Cable(cable) = system else {
            bail!("dictionary.centers_file is required for RBF dictionaries unless system.kind = \"cable\"");
        };
        let DictionaryConfig::GaussianRbf { samples, .. } = &self.config.dictionary else {
            bail!("dictionary.kind must be \"gaussian_rbf\" to place centers");
        };
        let recipe = samples.recipe(self.config.seed);
        let samples: Vec<Vec<f64>> = sample_trajectories(cable, &recipe)
            .context("dictionary.samples")?
            .iter()
            .flat_map(|t| t.values().to_vec())
            .collect();
        let centers =
            kmeanspp_centers_in(&samples, count, self.config.seed, system.domain()).context("dictionary.centers")?;
        Ok((samples, centers))
    }

    fn metadata<T: Scalar>(&self, model: &LiftedModel<T>) -> Metadata {
        let mut meta = Metadata::new();
        meta.insert("dictionary".into(), model.dictionary.name().into());
        meta.insert("m".into(), model.size().to_string());
        meta.insert("lambda".into(), model.regularization.lambda.to_string());
        meta.insert("quadrature".into(), format!("{:?}", model.quadrature.kind));
        meta.insert("nodes".into(), model.quadrature.node_count.to_string());
        if let Some(seed) = model.quadrature.seed {
            meta.insert("seed".into(), seed.to_string());
        }
        meta
    }

    fn write_model<T: Scalar>(&self, model: &LiftedModel<T>, out: &mut RunOutput) -> Result<()> {
        let meta = self.metadata(model);
        for (name, mat) in [("R.csv", &model.r), ("Q.csv", &model.q), ("A.csv", &model.a)] {
            let mut w = out.create(name)?;
            write_matrix(mat, &meta, &mut w)?;
            w.flush()?;
        }
        let reg = &model.regularization;
        out.write_table(
            "conditioning.csv",
            &[
                ("m", model.size().to_string()),
                ("lambda", reg.lambda.to_string()),
                ("shift", reg.shift.to_string()),
                ("min_eigenvalue", reg.min_eigenvalue.to_string()),
                ("condition_estimate", reg.condition_estimate.to_string()),
                ("nodes", model.quadrature.node_count.to_string()),
                ("clamp_rate", model.clamp_rate.to_string()),
            ],
        )
    }

    pub fn encode(&self, out: &mut RunOutput) -> Result<String> {
        let system = self.system()?;
        let lift = self.dictionary(&system)?;
        let rule = self.rule(&system, lift.n_max())?;
        macro_rules! go {
            ($d:expr) => {{
                let model = direct_encode($d, &system, &rule, self.lambda($d))?;
                self.write_model(&model, out)?;
                encode_summary(&model)
            }};
        }
        Ok(match &lift {
            Lift::ExpTrig(d) => go!(d),
            Lift::RealFourier(d) => go!(d),
            Lift::Rbf(d) => {
                let mut w = out.create("centers.csv")?;
                write_centers_csv(d, &mut w)?;
                w.flush()?;
                go!(d)
            }
        })
    }

    pub fn predict(&self, out: &mut RunOutput) -> Result<String> {
        let system = self.system()?;
        let x0 = self.x0(&system)?;
        let steps = self.config.scenario.steps;
        let lift = self.dictionary(&system)?;
        let rule = self.rule(&system, lift.n_max())?;
        let truth = simulate_truth(&system, &x0, steps)?;
        let decoded: Trajectory = match &lift {
            Lift::ExpTrig(d) => {
                let model = direct_encode(d, &system, &rule, self.lambda(d))?;
                PhaseDecoder.decode_trajectory(&predict(&model.a, d, &x0, steps)?)
            }
            Lift::RealFourier(d) => {
                let model = direct_encode(d, &system, &rule, self.lambda(d))?;
                PhaseDecoder.decode_trajectory(&predict(&model.a, d, &x0, steps)?)
            }
            Lift::Rbf(d) => {
                let lambda = self.lambda(d);
                let model = direct_encode(d, &system, &rule, lambda)?;
                let decoder = fit_decoder(d, &rule, lambda)?;
                decoder.decode_trajectory(&predict(&model.a, d, &x0, steps)?)
            }
        };
        let names = self.names(&system);
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut w = out.create("prediction.csv")?;
        write_comparison_csv(&truth, &decoded, &names, &mut w)?;
        w.flush()?;

        let cmp = compare_trajectories(&truth, &decoded)?;
        let mut rows = vec![
            ("steps", steps.to_string()),
            ("rmse", cmp.rmse.to_string()),
            ("max_error", cmp.max_error.to_string()),
        ];
        let mut summary = format!("rmse {:.4e}, max error {:.4e}", cmp.rmse, cmp.max_error);
        if let System::Cable(_) = system {
            let pos = cmp.rmse_over(&[0, 1]);
            let ratio = pos / system.domain().diagonal();
            let rebounds = count_rebounds(&truth.component(3));
            rows.push(("position_rmse", pos.to_string()));
            rows.push(("position_rmse_over_diagonal", ratio.to_string()));
            rows.push(("rebounds", rebounds.to_string()));
            summary += &format!(", position rmse {:.2}% of diagonal, {rebounds} rebounds", 100.0 * ratio);
        }
        out.write_table("prediction_summary.csv", &rows)?;
        Ok(summary)
    }

    pub fn spectrum(&self, out: &mut RunOutput) -> Result<String> {
        let system = self.system()?;
        let lift = self.dictionary(&system)?;
        let rule = self.rule(&system, lift.n_max())?;
        let eps = self.config.analysis.stability_eps;
        let spec = match &lift {
            Lift::ExpTrig(d) => spectrum(&direct_encode(d, &system, &rule, self.lambda(d))?.a, eps)?,
            Lift::RealFourier(d) => spectrum(&direct_encode(d, &system, &rule, self.lambda(d))?.a, eps)?,
            Lift::Rbf(d) => spectrum(&direct_encode(d, &system, &rule, self.lambda(d))?.a, eps)?,
        };
        let mut w = out.create("eigenvalues.csv")?;
        write_spectrum_csv(&spec, &mut w)?;
        w.flush()?;
        let near = spec.near_unit_circle();
        out.write_table(
            "spectrum_summary.csv",
            &[
                ("max_modulus", spec.max_modulus.to_string()),
                ("near_unit_circle", near.to_string()),
                ("eps", eps.to_string()),
                ("classification", spec.classification.name().to_string()),
            ],
        )?;
        Ok(format!(
            "max |lambda| {:.4}, {near} eigenvalues near the unit circle, {}",
            spec.max_modulus,
            spec.classification.name()
        ))
    }

    pub fn sweep(&self, out: &mut RunOutput) -> Result<String> {
        let system = self.system()?;
        ensure!(
            system.domain().is_unit_interval(),
            "sweep needs a system on [0, 1] (system.kind = \"piecewise\", \"rotation\" or \"identity\")"
        );
        let x0 = self.x0(&system)?;
        let sizes = &self.config.analysis.sweep_sizes;
        ensure!(!sizes.is_empty(), "analysis.sweep_sizes is empty");
        let points = rmse_sweep(
            &system,
            sizes,
            &x0,
            self.config.scenario.steps,
            self.config.quadrature.points_per_panel,
        )?;
        let mut w = out.create("sweep.csv")?;
        write_sweep_csv(&points, &mut w)?;
        w.flush()?;
        let parts: Vec<String> = points.iter().map(|p| format!("m={} {:.3e}", p.m, p.rmse)).collect();
        Ok(format!("rmse {}", parts.join(", ")))
    }

    pub fn kernel_check(&self, out: &mut RunOutput) -> Result<String> {
        let system = self.system()?;
        ensure!(system.domain().is_unit_interval(), "kernel-check needs a system on [0, 1]");
        let a = &self.config.analysis;
        ensure!(a.kernel_grid >= 2, "analysis.kernel_grid must be at least 2");
        ensure!(!a.kernel_sizes.is_empty(), "analysis.kernel_sizes is empty");
        let breaks = system.breakpoints();
        let xs: Vec<Vec<f64>> = (0..a.kernel_grid)
            .map(|i| i as f64 / (a.kernel_grid - 1) as f64)
            .filter(|x| breaks.iter().all(|b| (x - b).abs() > a.kernel_exclusion))
            .map(|x| vec![x])
            .collect();
        ensure!(!xs.is_empty(), "analysis.kernel_exclusion removes every grid point");
        let images = xs
            .iter()
            .map(|x| Ok(eval_map(&system, x)?.state[0]))
            .collect::<Result<Vec<f64>>>()?;
        let tests: [(&str, fn(f64) -> f64); 4] = [
            ("x", |x| x),
            ("x2", |x| x * x),
            ("x3", |x| x * x * x),
            ("cos2pix", |x| (TAU * x).cos()),
        ];

        let kernels = a
            .kernel_sizes
            .iter()
            .map(|&m| {
                let n_max = m / 2;
                let dict = build_exp_trig(n_max, system.domain()).context("analysis.kernel_sizes")?;
                Ok((m, dict, self.rule(&system, Some(n_max))?))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut summary = vec!["observable,m,rms_error".to_string()];
        let mut parts = Vec::new();
        for (name, g) in tests {
            let target: Vec<f64> = images.iter().map(|y| g(*y)).collect();
            let mut columns = Vec::new();
            for (m, dict, rule) in &kernels {
                let kernel = TruncatedKernel::new(dict.clone(), &system);
                let vals = kernel.transform_many(|p: &[f64]| g(p[0]), rule, &xs)?;
                let re: Vec<f64> = vals.iter().map(|v| v.re).collect();
                let rms = (re.iter().zip(&target).map(|(v, t)| (v - t).powi(2)).sum::<f64>() / re.len() as f64).sqrt();
                summary.push(format!("{name},{m},{rms}"));
                parts.push(format!("{name}@{m} {rms:.1e}"));
                columns.push(re);
            }
            let mut w = out.create(&format!("kernel_{name}.csv"))?;
            let header: Vec<String> = kernels.iter().map(|(m, ..)| format!("m{m}")).collect();
            writeln!(w, "x,fx,target,{}", header.join(","))?;
            for (i, x) in xs.iter().enumerate() {
                let row: Vec<String> = columns.iter().map(|c| c[i].to_string()).collect();
                writeln!(w, "{},{},{},{}", x[0], images[i], target[i], row.join(","))?;
            }
            w.flush()?;
        }
        let mut w = out.create("kernel_summary.csv")?;
        for line in &summary {
            writeln!(w, "{line}")?;
        }
        w.flush()?;
        Ok(format!("rms error {}", parts.join(", ")))
    }

    pub fn residuals(&self, out: &mut RunOutput) -> Result<String> {
        let system = self.system()?;
        ensure!(system.domain().is_unit_interval(), "residuals needs a system on [0, 1]");
        let a = &self.config.analysis;
        let largest = a.residual_sizes.iter().copied().max().context("analysis.residual_sizes is empty")?;
        let n_max = largest / 2;
        let dict = build_exp_trig(n_max, system.domain())?;
        // Fine panels so that `φᵢ∘F` is resolved well beyond the largest N.
        let rule = self.rule(&system, Some(4 * n_max.max(1)))?;
        let mut parts = Vec::new();
        for &h in &a.residual_harmonics {
            let rows = membership_residuals(&dict, &system, &rule, h, &a.residual_sizes, a.residual_grid)
                .with_context(|| format!("analysis.residual_harmonics entry {h}"))?;
            let mut w = out.create(&format!("residuals_k{h}.csv"))?;
            write_membership_csv(&rows, &mut w)?;
            w.flush()?;
            let (first, last) = (&rows[0], &rows[rows.len() - 1]);
            parts.push(format!(
                "k={h}: J ratio {:.4}, I_N {:.2e} -> {:.2e}",
                last.j_n / first.norm_sq,
                first.i_n_error,
                last.i_n_error
            ));
        }
        Ok(parts.join("; "))
    }

    pub fn centers(&self, out: &mut RunOutput) -> Result<String> {
        let system = self.system()?;
        let DictionaryConfig::GaussianRbf { centers, width_scale, .. } = &self.config.dictionary else {
            bail!("centers needs dictionary.kind = \"gaussian_rbf\"");
        };
        ensure!(
            matches!(self.config.system, SystemConfig::Cable { .. }),
            "centers needs system.kind = \"cable\""
        );
        let (samples, points) = self.sampled_centers(&system, *centers)?;
        let rbf = build_rbf(&points, *width_scale, system.domain()).context("dictionary.width_scale")?;
        let names = self.names(&system);
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let samples_traj = Trajectory::from_values(
            koopman_lift::TrajectoryKind::StateSpace,
            koopman_lift::Provenance::Truth,
            samples,
        )?;
        let mut w = out.create("samples.csv")?;
        write_trajectory_csv(&samples_traj, &names, &mut w)?;
        w.flush()?;
        let mut w = out.create("centers.csv")?;
        write_centers_csv(&rbf, &mut w)?;
        w.flush()?;
        Ok(format!("{} centers from {} sample points", rbf.len(), samples_traj.len()))
    }
}

fn encode_summary<T: Scalar>(model: &LiftedModel<T>) -> String {
    let reg = &model.regularization;
    format!(
        "m = {}, lambda {:e}, condition estimate {:.3e}, clamp rate {:.3}",
        model.size(),
        reg.lambda,
        reg.condition_estimate,
        model.clamp_rate
    )
}
