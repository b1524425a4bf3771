//! Random instances for property sweeps and stand-in corpora.

use faer::Mat;
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{NystromError, Result};
use crate::kernel::DataMatrix;
use crate::landmark::RngSeed;
use crate::linalg::{gram, Matrix};

/// `K = X^T X` with `X` a `rank_hint x n` standard Gaussian matrix.
pub fn random_spsd(n: usize, rank_hint: usize, seed: RngSeed) -> Result<Matrix> {
    if rank_hint == 0 || rank_hint > n {
        return Err(NystromError::RankOutOfRange {
            rank: rank_hint,
            max: n,
        });
    }
    let mut rng = seed.rng();
    let x: Matrix = Mat::from_fn(rank_hint, n, |_, _| rng.sample(StandardNormal));
    Ok(gram(&x))
}

/// Sorted indices of a uniform subsample of size `n_sub` from `0..n`.
pub fn subsample_indices(n: usize, n_sub: usize, seed: RngSeed) -> Result<Vec<usize>> {
    if n_sub == 0 || n_sub > n {
        return Err(NystromError::TooMany {
            requested: n_sub,
            available: n,
        });
    }
    let mut idx = index::sample(&mut seed.rng(), n, n_sub).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

/// Uniform subsample without replacement; kept points stay in file order.
pub fn subsample(x: &DataMatrix, n_sub: usize, seed: RngSeed) -> Result<DataMatrix> {
    if n_sub == x.n() {
        return Ok(x.clone());
    }
    x.select(&subsample_indices(x.n(), n_sub, seed)?)
}

/// `n` dense points with i.i.d. standard normal coordinates.
pub fn gaussian_points(n: usize, p: usize, seed: RngSeed) -> Result<DataMatrix> {
    let mut rng = seed.rng();
    let values = (0..n * p).map(|_| rng.sample(StandardNormal)).collect();
    DataMatrix::from_dense(n, p, values)
}

/// Sparse 0/1 features, each present independently with probability `density`.
pub fn synthetic_sparse_binary(
    n: usize,
    p: usize,
    density: f64,
    seed: RngSeed,
) -> Result<DataMatrix> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(NystromError::InvalidParameter(format!(
            "density must lie in (0,1], got {density}"
        )));
    }
    let p32 = u32::try_from(p)
        .map_err(|_| NystromError::InvalidParameter(format!("dimension {p} too large")))?;
    let mut rng = seed.rng();
    let rows: Vec<Vec<(u32, f64)>> = (0..n)
        .map(|_| {
            (0..p32)
                .filter(|_| rng.random::<f64>() < density)
                .map(|k| (k, 1.0))
                .collect()
        })
        .collect();
    DataMatrix::from_sparse_rows(p, &rows)
}
