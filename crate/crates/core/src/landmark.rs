//! Landmark selection: uniform in-sample sampling and K-means centroids.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{NystromError, Result};
use crate::kernel::DataMatrix;

/// Seed for every randomized routine. Equal seeds give identical output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Seed offset by `k`, used for per-trial streams.
    pub fn offset(self, k: u64) -> Self {
        RngSeed(self.0.wrapping_add(k))
    }
}

/// Landmarks either drawn from the data (by index) or given as explicit points.
#[derive(Debug, Clone, PartialEq)]
pub enum LandmarkSet {
    InSample(Vec<usize>),
    OutOfSample(DataMatrix),
}

impl LandmarkSet {
    pub fn len(&self) -> usize {
        match self {
            LandmarkSet::InSample(idx) => idx.len(),
            LandmarkSet::OutOfSample(z) => z.n(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_in_sample(&self) -> bool {
        matches!(self, LandmarkSet::InSample(_))
    }
}

fn check_count(n: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(NystromError::InvalidParameter(
            "at least one landmark is required".into(),
        ));
    }
    if m > n {
        return Err(NystromError::TooMany {
            requested: m,
            available: n,
        });
    }
    Ok(())
}

/// `m` distinct indices from `0..n`, uniformly without replacement, in draw order.
pub fn uniform_sample(n: usize, m: usize, seed: RngSeed) -> Result<LandmarkSet> {
    check_count(n, m)?;
    let mut rng = seed.rng();
    Ok(LandmarkSet::InSample(
        index::sample(&mut rng, n, m).into_vec(),
    ))
}

/// Output of Lloyd's algorithm.
#[derive(Debug, Clone)]
pub struct KMeansFit {
    /// `m x p` dense centroids.
    pub centroids: DataMatrix,
    pub assignments: Vec<usize>,
    /// Within-cluster sum of squares after seeding and after each iteration.
    pub inertia_history: Vec<f64>,
    pub iterations: usize,
}

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn nearest(x: &DataMatrix, i: usize, centers: &[Vec<f64>], norms: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, (z, &zn)) in centers.iter().zip(norms).enumerate() {
        let d = x.squared_distance_to(i, z, zn);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// k-means++ seeding: first center uniform, then proportional to squared distance.
fn seed_centers(x: &DataMatrix, m: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = x.n();
    let first = rng.random_range(0..n);
    let mut centers = vec![x.dense_row(first)];
    let mut d2: Vec<f64> = {
        let z = &centers[0];
        let zn = sq_norm(z);
        (0..n).map(|i| x.squared_distance_to(i, z, zn)).collect()
    };
    while centers.len() < m {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if d > 0.0 && acc >= target {
                    chosen = Some(i);
                    break;
                }
            }
            // roundoff can leave target just above the running sum
            chosen.unwrap_or_else(|| d2.iter().rposition(|&d| d > 0.0).unwrap())
        } else {
            rng.random_range(0..n)
        };
        let z = x.dense_row(pick);
        let zn = sq_norm(&z);
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(x.squared_distance_to(i, &z, zn));
        }
        centers.push(z);
    }
    centers
}

fn add_point(acc: &mut [f64], x: &DataMatrix, i: usize) {
    match x.point(i) {
        crate::kernel::Point::Dense(v) => acc.iter_mut().zip(v).for_each(|(a, b)| *a += b),
        crate::kernel::Point::Sparse { indices, values } => {
            for (&k, &v) in indices.iter().zip(values) {
                acc[k as usize] += v;
            }
        }
    }
}

fn inertia(x: &DataMatrix, centers: &[Vec<f64>], assignments: &[usize]) -> f64 {
    let norms: Vec<f64> = centers.iter().map(|c| sq_norm(c)).collect();
    assignments
        .iter()
        .enumerate()
        .map(|(i, &a)| x.squared_distance_to(i, &centers[a], norms[a]))
        .sum()
}

/// Lloyd's algorithm with k-means++ seeding.
///
/// Stops after `max_iter` iterations or when assignments stop changing. An empty
/// cluster receives the point farthest from its current centroid.
pub fn kmeans(x: &DataMatrix, m: usize, seed: RngSeed, max_iter: usize) -> Result<KMeansFit> {
    let n = x.n();
    check_count(n, m)?;
    let p = x.dim();
    let mut rng = seed.rng();
    let mut centers = seed_centers(x, m, &mut rng);
    let mut norms: Vec<f64> = centers.iter().map(|c| sq_norm(c)).collect();
    let mut assignments: Vec<usize> = (0..n).map(|i| nearest(x, i, &centers, &norms).0).collect();
    let mut history = vec![inertia(x, &centers, &assignments)];
    let mut iterations = 0;

    for iter in 0..max_iter {
        if iter > 0 {
            let next: Vec<usize> = (0..n).map(|i| nearest(x, i, &centers, &norms).0).collect();
            if next == assignments {
                break;
            }
            assignments = next;
        }

        loop {
            let mut counts = vec![0usize; m];
            for &a in &assignments {
                counts[a] += 1;
            }
            let Some(empty) = counts.iter().position(|&c| c == 0) else {
                break;
            };
            // farthest point from its own centroid, taken only from clusters that can spare one
            let far = (0..n)
                .filter(|&i| counts[assignments[i]] > 1)
                .map(|i| {
                    let a = assignments[i];
                    (i, x.squared_distance_to(i, &centers[a], norms[a]))
                })
                .fold((usize::MAX, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            assignments[far.0] = empty;
            centers[empty] = x.dense_row(far.0);
            norms[empty] = sq_norm(&centers[empty]);
        }

        let mut sums = vec![vec![0.0; p]; m];
        let mut counts = vec![0usize; m];
        for (i, &a) in assignments.iter().enumerate() {
            add_point(&mut sums[a], x, i);
            counts[a] += 1;
        }
        for (c, (sum, &count)) in sums.into_iter().zip(&counts).enumerate() {
            let inv = 1.0 / count as f64;
            centers[c] = sum.into_iter().map(|s| s * inv).collect();
            norms[c] = sq_norm(&centers[c]);
        }
        history.push(inertia(x, &centers, &assignments));
        iterations = iter + 1;
    }

    let centroids = DataMatrix::from_dense(m, p, centers.concat())?;
    Ok(KMeansFit {
        centroids,
        assignments,
        inertia_history: history,
        iterations,
    })
}

/// Default iteration cap for K-means landmark selection.
pub const KMEANS_MAX_ITER: usize = 10;

/// Out-of-sample landmarks: K-means centroids of `x`.
pub fn kmeans_landmarks(
    x: &DataMatrix,
    m: usize,
    seed: RngSeed,
    max_iter: usize,
) -> Result<LandmarkSet> {
    Ok(LandmarkSet::OutOfSample(kmeans(x, m, seed, max_iter)?.centroids))
}
