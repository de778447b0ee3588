use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, Par};
use rayon::prelude::*;

use crate::dynamics::SystemMap;
use crate::error::{argument, numerical, Result};
use crate::observables::Dictionary;
use crate::quadrature::QuadratureRule;
use crate::scalar::Scalar;

/// Nodes per evaluation table block; bounds memory for large dictionaries.
const CHUNK: usize = 4096;

pub(crate) fn check_compatible<D: Dictionary + ?Sized>(dict: &D, rule: &QuadratureRule) -> Result<()> {
    if dict.domain().dim() != rule.dim() {
        return Err(argument(format!(
            "dictionary is {}-D but quadrature rule is {}-D",
            dict.domain().dim(),
            rule.dim()
        )));
    }
    Ok(())
}

/// Gram and composition matrices assembled from shared node tables.
#[derive(Debug, Clone)]
pub struct Assembly<T> {
    pub r: Mat<T>,
    pub q: Mat<T>,
    /// Nodes whose image left the domain and was clamped.
    pub clamped_nodes: usize,
}

fn zeros<T: Scalar>(rows: usize, cols: usize) -> Mat<T> {
    Mat::from_fn(rows, cols, |_, _| T::from_re(0.0))
}

/// Fills `weighted` (m × c) with `wₙ·gᵢ(ξₙ)` and `conj` (c × m) with
/// `conj(gⱼ(ξₙ))` for the nodes in `range`.
fn fill_tables<D: Dictionary>(
    dict: &D,
    rule: &QuadratureRule,
    points: &[Vec<f64>],
    start: usize,
    weighted: &mut Mat<D::Elem>,
    conj: Option<&mut Mat<D::Elem>>,
) -> Result<()> {
    let m = dict.len();
    let mut buf = vec![D::Elem::from_re(0.0); m];
    let mut conj = conj;
    for (c, x) in points.iter().enumerate() {
        let node = start + c;
        dict.evaluate_into(x, &mut buf);
        let w = rule.weights()[node];
        for (i, v) in buf.iter().enumerate() {
            if !v.finite() {
                return Err(numerical(format!(
                    "observable {i} non-finite at quadrature node {node} ({x:?})"
                )));
            }
            weighted[(i, c)] = *v * w;
            if let Some(t) = conj.as_deref_mut() {
                t[(c, i)] = v.conjugate();
            }
        }
    }
    Ok(())
}

fn mirror_upper<T: Scalar>(r: &mut Mat<T>) {
    let m = r.nrows();
    for i in 0..m {
        r[(i, i)] = T::from_re(r[(i, i)].re());
        for j in 0..i {
            r[(i, j)] = r[(j, i)].conjugate();
        }
    }
}

fn check_finite<T: Scalar>(mat: &Mat<T>, name: &str) -> Result<()> {
    for j in 0..mat.ncols() {
        for i in 0..mat.nrows() {
            if !mat[(i, j)].finite() {
                return Err(numerical(format!("{name}[{i}][{j}] is non-finite")));
            }
        }
    }
    Ok(())
}

fn accumulate<T: Scalar>(dst: &mut Mat<T>, lhs: &Mat<T>, rhs: &Mat<T>) {
    matmul(dst.as_mut(), Accum::Add, lhs.as_ref(), rhs.as_ref(), T::from_re(1.0), Par::Seq);
}

/// Partial `R` (and `Q` when a system is given) over nodes `start..end`.
fn chunk_partial<D: Dictionary, S: SystemMap + ?Sized>(
    dict: &D,
    system: Option<&S>,
    rule: &QuadratureRule,
    start: usize,
    end: usize,
) -> Result<(Mat<D::Elem>, Option<Mat<D::Elem>>, usize)> {
    let m = dict.len();
    let pts: Vec<Vec<f64>> = (start..end).map(|i| rule.node(i).to_vec()).collect();
    let mut weighted = zeros(m, pts.len());
    let mut conj = zeros(pts.len(), m);
    fill_tables(dict, rule, &pts, start, &mut weighted, Some(&mut conj))?;
    let mut r = zeros(m, m);
    accumulate(&mut r, &weighted, &conj);
    let Some(system) = system else {
        return Ok((r, None, 0));
    };
    let mut clamped = 0;
    let mut images = Vec::with_capacity(pts.len());
    for (c, x) in pts.iter().enumerate() {
        let mut y = vec![0.0; x.len()];
        if system.step_into(x, &mut y) {
            clamped += 1;
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(numerical(format!(
                "map image non-finite at quadrature node {} ({x:?})",
                start + c
            )));
        }
        images.push(y);
    }
    fill_tables(dict, rule, &images, start, &mut weighted, None)?;
    let mut q = zeros(m, m);
    accumulate(&mut q, &weighted, &conj);
    Ok((r, Some(q), clamped))
}

/// Evaluates node blocks in parallel and sums the partial matrices in block
/// order, so the result does not depend on the thread count.
fn assemble_blocks<D: Dictionary, S: SystemMap + ?Sized>(
    dict: &D,
    system: Option<&S>,
    rule: &QuadratureRule,
) -> Result<Assembly<D::Elem>> {
    let m = dict.len();
    let starts: Vec<usize> = (0..rule.len()).step_by(CHUNK).collect();
    let mut r = zeros(m, m);
    let mut q = zeros(m, m);
    let mut clamped_nodes = 0;
    // Bound the number of live partial matrices for large dictionaries.
    let batch = rayon::current_num_threads().max(1);
    for group in starts.chunks(batch) {
        let partials: Vec<_> = group
            .par_iter()
            .map(|&s| chunk_partial(dict, system, rule, s, (s + CHUNK).min(rule.len())))
            .collect::<Result<_>>()?;
        for (pr, pq, c) in partials {
            add_into(&mut r, &pr);
            if let Some(pq) = pq {
                add_into(&mut q, &pq);
            }
            clamped_nodes += c;
        }
    }
    mirror_upper(&mut r);
    check_finite(&r, "R")?;
    check_finite(&q, "Q")?;
    Ok(Assembly { r, q, clamped_nodes })
}

fn add_into<T: Scalar>(dst: &mut Mat<T>, src: &Mat<T>) {
    for j in 0..dst.ncols() {
        for i in 0..dst.nrows() {
            dst[(i, j)] += src[(i, j)];
        }
    }
}

/// `R[i][j] = ⟨gᵢ, gⱼ⟩`.
pub fn gram_matrix<D: Dictionary>(dict: &D, rule: &QuadratureRule) -> Result<Mat<D::Elem>> {
    check_compatible(dict, rule)?;
    Ok(assemble_blocks::<D, crate::dynamics::IdentityMap>(dict, None, rule)?.r)
}

/// `Q[i][j] = ⟨gᵢ∘F, gⱼ⟩`.
pub fn composition_matrix<D: Dictionary, S: SystemMap + ?Sized>(
    dict: &D,
    system: &S,
    rule: &QuadratureRule,
) -> Result<Mat<D::Elem>> {
    Ok(assemble(dict, system, rule)?.q)
}

/// Builds `R` and `Q` together: each node contributes one evaluation of
/// `χ(ξ)` and one of `χ(F(ξ))`, and both matrices come from the same tables.
pub fn assemble<D: Dictionary, S: SystemMap + ?Sized>(
    dict: &D,
    system: &S,
    rule: &QuadratureRule,
) -> Result<Assembly<D::Elem>> {
    check_compatible(dict, rule)?;
    if system.domain() != dict.domain() {
        return Err(argument("system and dictionary are defined on different domains"));
    }
    assemble_blocks(dict, Some(system), rule)
}
