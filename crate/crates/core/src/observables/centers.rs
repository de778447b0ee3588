use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{simulate_truth, CableSystem, Domain, Region, SystemMap};
use crate::error::{argument, Result};
use crate::trajectory::Trajectory;

const LLOYD_MAX_ITERS: usize = 300;

/// Ground-truth trajectories used to place RBF centers: releases from rest at
/// random slack-region positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRecipe {
    pub trajectories: usize,
    pub steps: usize,
    pub seed: u64,
}

impl Default for SampleRecipe {
    fn default() -> Self {
        Self {
            trajectories: 20,
            steps: 500,
            seed: 0,
        }
    }
}

pub fn sample_trajectories(system: &CableSystem, recipe: &SampleRecipe) -> Result<Vec<Trajectory>> {
    let domain = system.domain();
    let (lo, hi) = (domain.lower(), domain.upper());
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    let mut out = Vec::with_capacity(recipe.trajectories);
    let mut attempts = 0usize;
    while out.len() < recipe.trajectories {
        attempts += 1;
        if attempts > 1000 * (recipe.trajectories + 1) {
            return Err(argument("no slack-region release point found inside the domain"));
        }
        let pos = [rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1])];
        if system.classify_region(pos) != Region::D1 {
            continue;
        }
        let x0 = [pos[0], pos[1], 0.0, 0.0];
        if !domain.contains(&x0) {
            continue;
        }
        out.push(simulate_truth(system, &x0, recipe.steps)?);
    }
    Ok(out)
}

/// Number of bitwise-distinct points.
pub fn distinct_count(samples: &[Vec<f64>]) -> usize {
    let mut keys: Vec<Vec<u64>> = samples
        .iter()
        .map(|s| s.iter().map(|v| v.to_bits()).collect())
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means with k-means++ seeding, deterministic for a given seed.
pub fn kmeanspp_centers(samples: &[Vec<f64>], k: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if samples.is_empty() {
        return Err(argument("k-means needs at least one sample"));
    }
    if k == 0 {
        return Err(argument("k-means needs at least one cluster"));
    }
    let dim = samples[0].len();
    if samples.iter().any(|s| s.len() != dim) {
        return Err(argument("samples have inconsistent dimensions"));
    }
    let distinct = distinct_count(samples);
    if k > distinct {
        return Err(argument(format!(
            "requested {k} centers but only {distinct} distinct samples"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(samples[rng.gen_range(0..samples.len())].clone());
    let mut nearest: Vec<f64> = samples.iter().map(|s| dist_sq(s, &centers[0])).collect();
    while centers.len() < k {
        let pick = WeightedIndex::new(&nearest)
            .map(|w| w.sample(&mut rng))
            .map_err(|e| argument(format!("k-means++ seeding failed: {e}")))?;
        let c = samples[pick].clone();
        for (d, s) in nearest.iter_mut().zip(samples) {
            *d = d.min(dist_sq(s, &c));
        }
        centers.push(c);
    }

    let mut assignment = vec![usize::MAX; samples.len()];
    for _ in 0..LLOYD_MAX_ITERS {
        let mut changed = false;
        for (a, s) in assignment.iter_mut().zip(samples) {
            let best = centers
                .iter()
                .enumerate()
                .map(|(j, c)| (j, dist_sq(s, c)))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .map(|(j, _)| j)
                .expect("k > 0");
            if *a != best {
                *a = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (a, s) in assignment.iter().zip(samples) {
            counts[*a] += 1;
            for (acc, v) in sums[*a].iter_mut().zip(s) {
                *acc += v;
            }
        }
        for ((c, sum), n) in centers.iter_mut().zip(sums).zip(counts) {
            // An emptied cluster keeps its previous center.
            if n > 0 {
                *c = sum.into_iter().map(|v| v / n as f64).collect();
            }
        }
    }
    Ok(centers)
}

/// [`kmeanspp_centers`] run in the box-normalized coordinates of `domain`,
/// with the centers mapped back to state coordinates.
pub fn kmeanspp_centers_in(
    samples: &[Vec<f64>],
    k: usize,
    seed: u64,
    domain: &Domain,
) -> Result<Vec<Vec<f64>>> {
    for s in samples {
        domain.check_dim(s)?;
    }
    let (lo, ext) = (domain.lower(), domain.extents());
    let scaled: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| s.iter().enumerate().map(|(d, v)| (v - lo[d]) / ext[d]).collect())
        .collect();
    let centers = kmeanspp_centers(&scaled, k, seed)?;
    Ok(centers
        .into_iter()
        .map(|c| {
            let mut x: Vec<f64> = c.iter().enumerate().map(|(d, z)| lo[d] + ext[d] * z).collect();
            domain.clamp(&mut x);
            x
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_samples() -> Vec<Vec<f64>> {
        (0..40)
            .map(|i| vec![(i % 8) as f64 * 0.1, (i / 8) as f64 * 0.3 + 0.05 * (i % 3) as f64])
            .collect()
    }

    #[test]
    fn single_cluster_is_the_mean() {
        let s = grid_samples();
        let c = kmeanspp_centers(&s, 1, 7).unwrap();
        for d in 0..2 {
            let mean = s.iter().map(|p| p[d]).sum::<f64>() / s.len() as f64;
            assert!((c[0][d] - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn every_sample_its_own_cluster() {
        let mut s = grid_samples();
        s.push(s[3].clone());
        let k = distinct_count(&s);
        assert_eq!(k, 40);
        let mut c = kmeanspp_centers(&s, k, 1).unwrap();
        let mut want = s.clone();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        want.dedup();
        c.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(c, want);
    }

    #[test]
    fn too_many_clusters() {
        let s = vec![vec![0.0], vec![0.0], vec![1.0]];
        assert!(kmeanspp_centers(&s, 3, 0).is_err());
        assert!(kmeanspp_centers(&s, 2, 0).is_ok());
    }

    #[test]
    fn seeded_determinism() {
        let s = grid_samples();
        assert_eq!(kmeanspp_centers(&s, 5, 11).unwrap(), kmeanspp_centers(&s, 5, 11).unwrap());
    }

    #[test]
    fn normalized_centers_stay_in_domain() {
        let d = Domain::new(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        let c = kmeanspp_centers_in(&grid_samples(), 6, 3, &d).unwrap();
        assert_eq!(c.len(), 6);
        assert!(c.iter().all(|x| d.contains(x)));
    }

    #[test]
    fn releases_start_slack_and_at_rest() {
        let sys = CableSystem::default();
        let recipe = SampleRecipe {
            trajectories: 4,
            steps: 10,
            seed: 5,
        };
        let t = sample_trajectories(&sys, &recipe).unwrap();
        assert_eq!(t.len(), 4);
        for tr in &t {
            let x0 = &tr.values()[0];
            assert_eq!(sys.classify_region([x0[0], x0[1]]), Region::D1);
            assert_eq!(&x0[2..], &[0.0, 0.0]);
            assert_eq!(tr.len(), 11);
        }
    }
}
