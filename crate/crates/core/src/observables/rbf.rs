use std::io::{Read, Write};

use super::{Dictionary, DictionaryKind};
use crate::dynamics::Domain;
use crate::error::{argument, Error, Result};

/// Gaussian radial basis functions `exp(−‖z − c_k‖² / (2σ_k²))`.
///
/// Distances are measured in box-normalized coordinates
/// `z = (x − lower) / extent`, so position and velocity axes of very
/// different physical scale contribute comparably.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianRbf {
    domain: Domain,
    centers: Vec<Vec<f64>>,
    normalized: Vec<f64>,
    widths: Vec<f64>,
    inv_two_var: Vec<f64>,
}

/// Builds one RBF per center with `σ_k = width_scale × (distance from c_k to
/// its nearest neighbor)`, all in normalized coordinates. A lone center gets
/// `σ = width_scale × diagonal of the normalized box`.
pub fn build_rbf(centers: &[Vec<f64>], width_scale: f64, domain: &Domain) -> Result<GaussianRbf> {
    if !(width_scale > 0.0 && width_scale.is_finite()) {
        return Err(argument("RBF width scale must be positive"));
    }
    check_centers(centers, domain)?;
    let z: Vec<Vec<f64>> = centers.iter().map(|c| normalize(domain, c)).collect();
    let widths = if z.len() == 1 {
        vec![width_scale * (domain.dim() as f64).sqrt()]
    } else {
        let mut widths = Vec::with_capacity(z.len());
        for (k, zk) in z.iter().enumerate() {
            let nearest = z
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, zj)| dist_sq(zk, zj))
                .fold(f64::INFINITY, f64::min)
                .sqrt();
            if nearest == 0.0 {
                return Err(argument(format!("RBF center {k} duplicates another center")));
            }
            widths.push(width_scale * nearest);
        }
        widths
    };
    GaussianRbf::with_widths(centers.to_vec(), widths, domain)
}

fn check_centers(centers: &[Vec<f64>], domain: &Domain) -> Result<()> {
    if centers.is_empty() {
        return Err(argument("RBF dictionary needs at least one center"));
    }
    for (k, c) in centers.iter().enumerate() {
        domain.check_dim(c)?;
        if !domain.contains(c) {
            return Err(argument(format!("RBF center {k} ({c:?}) lies outside the domain")));
        }
    }
    Ok(())
}

fn normalize(domain: &Domain, x: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(domain.lower())
        .zip(domain.upper())
        .map(|((v, lo), hi)| (v - lo) / (hi - lo))
        .collect()
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl GaussianRbf {
    /// Dictionary with explicit widths (normalized units), e.g. reloaded from CSV.
    pub fn with_widths(centers: Vec<Vec<f64>>, widths: Vec<f64>, domain: &Domain) -> Result<Self> {
        check_centers(&centers, domain)?;
        if widths.len() != centers.len() {
            return Err(argument(format!(
                "{} widths given for {} centers",
                widths.len(),
                centers.len()
            )));
        }
        if let Some(k) = widths.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(argument(format!("RBF width {k} must be positive")));
        }
        let normalized = centers.iter().flat_map(|c| normalize(domain, c)).collect();
        let inv_two_var = widths.iter().map(|s| 1.0 / (2.0 * s * s)).collect();
        Ok(Self {
            domain: domain.clone(),
            centers,
            normalized,
            widths,
            inv_two_var,
        })
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }
}

impl Dictionary for GaussianRbf {
    type Elem = f64;

    fn len(&self) -> usize {
        self.centers.len()
    }

    fn kind(&self) -> DictionaryKind {
        DictionaryKind::GaussianRbf
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn evaluate_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.domain.dim();
        let (lower, upper) = (self.domain.lower(), self.domain.upper());
        for (k, o) in out.iter_mut().enumerate() {
            let c = &self.normalized[k * n..(k + 1) * n];
            let mut d2 = 0.0;
            for d in 0..n {
                let z = (x[d] - lower[d]) / (upper[d] - lower[d]) - c[d];
                d2 += z * z;
            }
            *o = (-d2 * self.inv_two_var[k]).exp();
        }
    }
}

/// Writes one row per center: coordinates then width.
pub fn write_centers_csv<W: Write>(rbf: &GaussianRbf, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let n = rbf.domain.dim();
    let mut header: Vec<String> = (0..n).map(|d| format!("c{d}")).collect();
    header.push("width".into());
    w.write_record(&header)?;
    for (c, s) in rbf.centers.iter().zip(&rbf.widths) {
        let row: Vec<String> = c.iter().chain(std::iter::once(s)).map(|v| format!("{v:e}")).collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads centers and widths written by [`write_centers_csv`].
pub fn read_centers_csv<R: Read>(reader: R, domain: &Domain) -> Result<GaussianRbf> {
    let mut r = csv::Reader::from_reader(reader);
    let n = domain.dim();
    let mut centers = Vec::new();
    let mut widths = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != n + 1 {
            return Err(Error::Parse(format!(
                "center row {} has {} fields, expected {}",
                line + 1,
                rec.len(),
                n + 1
            )));
        }
        let vals = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Parse(format!("center row {}: {e}", line + 1)))?;
        widths.push(vals[n]);
        centers.push(vals[..n].to_vec());
    }
    GaussianRbf::with_widths(centers, widths, domain)
}
