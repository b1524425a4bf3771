//! Data storage, the Gaussian kernel, and kernel / cross-kernel block builders.

use faer::Mat;

use crate::error::{NystromError, Result};
use crate::landmark::LandmarkSet;
use crate::linalg::Matrix;

/// Default cap on the number of rows of any materialized `n x n` matrix.
pub const DEFAULT_DENSE_CAP: usize = 8000;

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    /// Row-major `n x p` values.
    Dense(Vec<f64>),
    /// CSR layout: row `i` owns `indices[offsets[i]..offsets[i + 1]]`.
    Sparse {
        offsets: Vec<usize>,
        indices: Vec<u32>,
        values: Vec<f64>,
    },
}

/// Borrowed view of one data point.
#[derive(Debug, Clone, Copy)]
pub enum Point<'a> {
    Dense(&'a [f64]),
    Sparse { indices: &'a [u32], values: &'a [f64] },
}

/// `n` points in `p` dimensions, stored densely or sparsely.
///
/// Squared norms are cached per point; sparse distances use
/// `‖x‖² + ‖z‖² − 2 x·z` clamped at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n: usize,
    p: usize,
    storage: Storage,
    sq_norms: Vec<f64>,
}

fn sum_squares(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum()
}

fn sparse_dot(ai: &[u32], av: &[f64], bi: &[u32], bv: &[f64]) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < ai.len() && j < bi.len() {
        match ai[i].cmp(&bi[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += av[i] * bv[j];
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

fn sparse_dense_dot(idx: &[u32], vals: &[f64], dense: &[f64]) -> f64 {
    idx.iter().zip(vals).map(|(&k, v)| v * dense[k as usize]).sum()
}

impl DataMatrix {
    /// Builds a dense matrix from row-major values.
    pub fn from_dense(n: usize, p: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * p {
            return Err(NystromError::Dimension(format!(
                "expected {} values for {n}x{p} data, got {}",
                n * p,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(NystromError::NonFinite);
        }
        let sq_norms = if p == 0 {
            vec![0.0; n]
        } else {
            values.chunks(p).map(sum_squares).collect()
        };
        Ok(Self {
            n,
            p,
            storage: Storage::Dense(values),
            sq_norms,
        })
    }

    /// Builds a dense matrix from a list of equally sized rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(NystromError::Dimension("rows have unequal length".into()));
        }
        Self::from_dense(rows.len(), p, rows.concat())
    }

    /// Builds a sparse matrix from per-point `(index, value)` lists with 0-based indices.
    ///
    /// Indices must be strictly increasing within a point and smaller than `p`.
    /// Explicit zeros are kept as given.
    pub fn from_sparse_rows(p: usize, rows: &[Vec<(u32, f64)>]) -> Result<Self> {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let nnz = rows.iter().map(Vec::len).sum();
        let mut indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        offsets.push(0);
        for (row_no, row) in rows.iter().enumerate() {
            let mut prev: Option<u32> = None;
            for &(k, v) in row {
                if (k as usize) >= p {
                    return Err(NystromError::Dimension(format!(
                        "point {row_no}: index {k} >= dimension {p}"
                    )));
                }
                if prev.is_some_and(|q| q >= k) {
                    return Err(NystromError::Dimension(format!(
                        "point {row_no}: indices not strictly increasing at {k}"
                    )));
                }
                if !v.is_finite() {
                    return Err(NystromError::NonFinite);
                }
                prev = Some(k);
                indices.push(k);
                values.push(v);
            }
            offsets.push(indices.len());
        }
        let sq_norms = offsets
            .windows(2)
            .map(|w| sum_squares(&values[w[0]..w[1]]))
            .collect();
        Ok(Self {
            n: rows.len(),
            p,
            storage: Storage::Sparse {
                offsets,
                indices,
                values,
            },
            sq_norms,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse { .. })
    }

    /// Number of stored coordinates (all of them for dense data).
    pub fn stored_entries(&self) -> usize {
        match &self.storage {
            Storage::Dense(v) => v.len(),
            Storage::Sparse { values, .. } => values.len(),
        }
    }

    pub fn point(&self, i: usize) -> Point<'_> {
        match &self.storage {
            Storage::Dense(v) => Point::Dense(&v[i * self.p..(i + 1) * self.p]),
            Storage::Sparse {
                offsets,
                indices,
                values,
            } => {
                let (a, b) = (offsets[i], offsets[i + 1]);
                Point::Sparse {
                    indices: &indices[a..b],
                    values: &values[a..b],
                }
            }
        }
    }

    pub fn squared_norm(&self, i: usize) -> f64 {
        self.sq_norms[i]
    }

    /// Point `i` expanded to a dense vector.
    pub fn dense_row(&self, i: usize) -> Vec<f64> {
        match self.point(i) {
            Point::Dense(v) => v.to_vec(),
            Point::Sparse { indices, values } => {
                let mut out = vec![0.0; self.p];
                for (&k, &v) in indices.iter().zip(values) {
                    out[k as usize] = v;
                }
                out
            }
        }
    }

    /// Coordinate-wise sample mean.
    pub fn mean(&self) -> Vec<f64> {
        let mut mu = vec![0.0; self.p];
        for i in 0..self.n {
            match self.point(i) {
                Point::Dense(v) => mu.iter_mut().zip(v).for_each(|(m, x)| *m += x),
                Point::Sparse { indices, values } => {
                    for (&k, &v) in indices.iter().zip(values) {
                        mu[k as usize] += v;
                    }
                }
            }
        }
        let inv = 1.0 / self.n as f64;
        mu.iter_mut().for_each(|m| *m *= inv);
        mu
    }

    /// Rows at `indices`, in that order, keeping the storage kind.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n) {
            return Err(NystromError::IndexOutOfRange {
                index: bad,
                n: self.n,
            });
        }
        match self.storage {
            Storage::Dense(_) => {
                let mut values = Vec::with_capacity(indices.len() * self.p);
                for &i in indices {
                    if let Point::Dense(v) = self.point(i) {
                        values.extend_from_slice(v);
                    }
                }
                Self::from_dense(indices.len(), self.p, values)
            }
            Storage::Sparse { .. } => {
                let rows: Vec<Vec<(u32, f64)>> = indices
                    .iter()
                    .map(|&i| match self.point(i) {
                        Point::Sparse { indices, values } => {
                            indices.iter().copied().zip(values.iter().copied()).collect()
                        }
                        Point::Dense(_) => unreachable!(),
                    })
                    .collect();
                Self::from_sparse_rows(self.p, &rows)
            }
        }
    }

    /// Squared Euclidean distance between point `i` of `self` and point `j` of `other`.
    ///
    /// Symmetric bit-for-bit under swapping the two arguments.
    pub fn squared_distance(&self, i: usize, other: &DataMatrix, j: usize) -> f64 {
        match (self.point(i), other.point(j)) {
            (Point::Dense(a), Point::Dense(b)) => {
                a.iter().zip(b).map(|(x, z)| (x - z) * (x - z)).sum()
            }
            (Point::Sparse { indices: ai, values: av }, Point::Sparse { indices: bi, values: bv }) => {
                let dot = sparse_dot(ai, av, bi, bv);
                (self.sq_norms[i] + other.sq_norms[j] - 2.0 * dot).max(0.0)
            }
            (Point::Sparse { indices, values }, Point::Dense(d))
            | (Point::Dense(d), Point::Sparse { indices, values }) => {
                let dot = sparse_dense_dot(indices, values, d);
                (self.sq_norms[i] + other.sq_norms[j] - 2.0 * dot).max(0.0)
            }
        }
    }

    /// Squared distance from point `i` to a dense vector `z` with known squared norm.
    pub fn squared_distance_to(&self, i: usize, z: &[f64], z_sq_norm: f64) -> f64 {
        match self.point(i) {
            Point::Dense(a) => a.iter().zip(z).map(|(x, c)| (x - c) * (x - c)).sum(),
            Point::Sparse { indices, values } => {
                let dot = sparse_dense_dot(indices, values, z);
                (self.sq_norms[i] + z_sq_norm - 2.0 * dot).max(0.0)
            }
        }
    }
}

/// Supported kernel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    /// `κ(x, z) = exp(−‖x − z‖² / c)`
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    pub family: KernelFamily,
    pub bandwidth_c: f64,
}

impl KernelConfig {
    pub fn gaussian(bandwidth_c: f64) -> Result<Self> {
        if !(bandwidth_c > 0.0 && bandwidth_c.is_finite()) {
            return Err(NystromError::InvalidParameter(format!(
                "bandwidth must be positive and finite, got {bandwidth_c}"
            )));
        }
        Ok(Self {
            family: KernelFamily::Gaussian,
            bandwidth_c,
        })
    }

    /// Kernel value as a function of squared distance.
    #[inline]
    pub fn eval_sq_dist(&self, sq_dist: f64) -> f64 {
        match self.family {
            KernelFamily::Gaussian => (-sq_dist / self.bandwidth_c).exp(),
        }
    }
}

/// The C and W blocks: `C[i][j] = κ(x_i, z_j)`, `W[i][j] = κ(z_i, z_j)`.
#[derive(Debug, Clone)]
pub struct NystromPair {
    pub c_block: Matrix,
    pub w_block: Matrix,
}

impl NystromPair {
    pub fn new(c_block: Matrix, w_block: Matrix) -> Result<Self> {
        if w_block.nrows() != w_block.ncols() || c_block.ncols() != w_block.nrows() {
            return Err(NystromError::Dimension(format!(
                "C is {}x{}, W is {}x{}",
                c_block.nrows(),
                c_block.ncols(),
                w_block.nrows(),
                w_block.ncols()
            )));
        }
        Ok(Self { c_block, w_block })
    }

    /// Column and principal-submatrix extraction `C = K P`, `W = P^T K P`.
    pub fn from_kernel_columns(k: &Matrix, indices: &[usize]) -> Result<Self> {
        let n = k.nrows();
        validate_indices(indices, n)?;
        let m = indices.len();
        let c_block = Mat::from_fn(n, m, |i, j| k[(i, indices[j])]);
        let w_block = Mat::from_fn(m, m, |i, j| k[(indices[i], indices[j])]);
        Ok(Self { c_block, w_block })
    }

    pub fn n(&self) -> usize {
        self.c_block.nrows()
    }

    pub fn m(&self) -> usize {
        self.c_block.ncols()
    }
}

pub(crate) fn validate_indices(indices: &[usize], n: usize) -> Result<()> {
    if indices.is_empty() {
        return Err(NystromError::InvalidParameter(
            "at least one landmark is required".into(),
        ));
    }
    let mut seen = vec![false; n];
    for &i in indices {
        if i >= n {
            return Err(NystromError::IndexOutOfRange { index: i, n });
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(NystromError::DuplicateIndex(i));
        }
    }
    Ok(())
}

/// `exp(−‖x − z‖² / c)` for two dense vectors.
pub fn gaussian_kernel(x: &[f64], z: &[f64], c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(NystromError::InvalidParameter(format!(
            "bandwidth must be positive, got {c}"
        )));
    }
    if x.len() != z.len() {
        return Err(NystromError::Dimension(format!(
            "vectors of length {} and {}",
            x.len(),
            z.len()
        )));
    }
    let d2: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((-d2 / c).exp())
}

/// Mean squared distance of the points to their sample mean, `(1/n) Σ ‖x_i − μ‖²`.
pub fn bandwidth_heuristic(x: &DataMatrix) -> Result<f64> {
    if x.n() < 2 {
        return Err(NystromError::DegenerateData(
            "bandwidth heuristic needs at least two points".into(),
        ));
    }
    let mu = x.mean();
    let mu_sq: f64 = sum_squares(&mu);
    let total: f64 = (0..x.n()).map(|i| x.squared_distance_to(i, &mu, mu_sq)).sum();
    let c = total / x.n() as f64;
    if !(c > 0.0) {
        return Err(NystromError::DegenerateData(
            "all points are identical".into(),
        ));
    }
    Ok(c)
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(NystromError::DenseCapExceeded { n, cap });
    }
    Ok(())
}

/// Full `n x n` kernel matrix. Refuses inputs with more than `cap` points.
pub fn build_kernel_matrix(x: &DataMatrix, cfg: &KernelConfig, cap: usize) -> Result<Matrix> {
    let n = x.n();
    check_cap(n, cap)?;
    let mut k = Mat::<f64>::zeros(n, n);
    for j in 0..n {
        k[(j, j)] = cfg.eval_sq_dist(x.squared_distance(j, x, j));
        for i in 0..j {
            let v = cfg.eval_sq_dist(x.squared_distance(i, x, j));
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}

/// `C[i][j] = κ(x_i, z_j)` for two point sets.
pub fn cross_kernel(x: &DataMatrix, z: &DataMatrix, cfg: &KernelConfig) -> Result<Matrix> {
    if x.dim() != z.dim() {
        return Err(NystromError::Dimension(format!(
            "data dimension {} vs landmark dimension {}",
            x.dim(),
            z.dim()
        )));
    }
    Ok(Mat::from_fn(x.n(), z.n(), |i, j| {
        cfg.eval_sq_dist(x.squared_distance(i, z, j))
    }))
}

/// Builds the C and W blocks for a landmark set.
///
/// In-sample landmarks evaluate exactly the same expressions as
/// [`build_kernel_matrix`], so the blocks equal slices of the full kernel matrix.
pub fn build_nystrom_pair(
    x: &DataMatrix,
    landmarks: &LandmarkSet,
    cfg: &KernelConfig,
) -> Result<NystromPair> {
    match landmarks {
        LandmarkSet::InSample(indices) => {
            validate_indices(indices, x.n())?;
            let m = indices.len();
            let c_block = Mat::from_fn(x.n(), m, |i, j| {
                cfg.eval_sq_dist(x.squared_distance(i, x, indices[j]))
            });
            let w_block = Mat::from_fn(m, m, |i, j| c_block[(indices[i], j)]);
            NystromPair::new(c_block, w_block)
        }
        LandmarkSet::OutOfSample(z) => {
            if z.n() == 0 {
                return Err(NystromError::InvalidParameter(
                    "at least one landmark is required".into(),
                ));
            }
            let c_block = cross_kernel(x, z, cfg)?;
            let m = z.n();
            let mut w_block = Mat::<f64>::zeros(m, m);
            for j in 0..m {
                w_block[(j, j)] = cfg.eval_sq_dist(z.squared_distance(j, z, j));
                for i in 0..j {
                    let v = cfg.eval_sq_dist(z.squared_distance(i, z, j));
                    w_block[(i, j)] = v;
                    w_block[(j, i)] = v;
                }
            }
            NystromPair::new(c_block, w_block)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, sym_eigenvalues};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(n: usize, p: usize, seed: u64) -> DataMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..n * p).map(|_| rng.random_range(-1.0..1.0)).collect();
        DataMatrix::from_dense(n, p, v).unwrap()
    }

    #[test]
    fn gaussian_kernel_values() {
        assert_eq!(gaussian_kernel(&[1.0, 2.0], &[1.0, 2.0], 3.0).unwrap(), 1.0);
        let v = gaussian_kernel(&[0.0], &[2.0], 4.0).unwrap();
        assert!((v - (-1f64).exp()).abs() < 1e-15);
        let v = gaussian_kernel(&[0.0, 0.0], &[3.0, 4.0], 5.0).unwrap();
        assert!((v - 0.006_737_946_999_085_467).abs() < 1e-15);
        assert!(gaussian_kernel(&[0.0], &[1.0], 0.0).is_err());
        assert!(gaussian_kernel(&[0.0], &[1.0], -2.0).is_err());
    }

    #[test]
    fn gaussian_kernel_monotone_in_distance() {
        let mut prev = 1.0;
        for k in 1..50 {
            let v = gaussian_kernel(&[0.0], &[k as f64 * 0.1], 0.7).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn bandwidth_examples() {
        let x = DataMatrix::from_rows(&[vec![0.0], vec![2.0]]).unwrap();
        assert_eq!(bandwidth_heuristic(&x).unwrap(), 1.0);
        let x = DataMatrix::from_rows(&[vec![0.0], vec![0.0], vec![3.0]]).unwrap();
        assert!((bandwidth_heuristic(&x).unwrap() - 2.0).abs() < 1e-15);
        let x = DataMatrix::from_rows(&vec![vec![1.0, 1.0]; 4]).unwrap();
        assert!(matches!(
            bandwidth_heuristic(&x),
            Err(NystromError::DegenerateData(_))
        ));
    }

    #[test]
    fn bandwidth_agrees_between_storage_kinds() {
        let x = DataMatrix::from_rows(&[vec![1.0, 0.0, 2.0], vec![0.0, 0.0, -1.0], vec![3.0, 1.0, 0.0]])
            .unwrap();
        let s = DataMatrix::from_sparse_rows(
            3,
            &[vec![(0, 1.0), (2, 2.0)], vec![(2, -1.0)], vec![(0, 3.0), (1, 1.0)]],
        )
        .unwrap();
        let (a, b) = (bandwidth_heuristic(&x).unwrap(), bandwidth_heuristic(&s).unwrap());
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn kernel_of_single_point() {
        let x = DataMatrix::from_rows(&[vec![0.3, -4.0]]).unwrap();
        let cfg = KernelConfig::gaussian(1.0).unwrap();
        let k = build_kernel_matrix(&x, &cfg, DEFAULT_DENSE_CAP).unwrap();
        assert_eq!((k.nrows(), k[(0, 0)]), (1, 1.0));
    }

    #[test]
    fn kernel_two_points_unit_exponent() {
        let x = DataMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let cfg = KernelConfig::gaussian(2.0).unwrap();
        let k = build_kernel_matrix(&x, &cfg, DEFAULT_DENSE_CAP).unwrap();
        assert!((k[(0, 1)] - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(k[(0, 1)], k[(1, 0)]);
    }

    #[test]
    fn kernel_matrix_is_spsd_with_unit_diagonal() {
        let x = random_points(50, 3, 1);
        let cfg = KernelConfig::gaussian(bandwidth_heuristic(&x).unwrap()).unwrap();
        let k = build_kernel_matrix(&x, &cfg, DEFAULT_DENSE_CAP).unwrap();
        for i in 0..50 {
            assert_eq!(k[(i, i)], 1.0);
            for j in 0..50 {
                assert_eq!(k[(i, j)], k[(j, i)]);
                assert!(k[(i, j)] > 0.0 && k[(i, j)] <= 1.0);
            }
        }
        let ev = sym_eigenvalues(&k).unwrap();
        assert!(*ev.last().unwrap() >= -1e-10);
    }

    #[test]
    fn kernel_cap_refuses_large_input() {
        let x = random_points(10, 2, 3);
        let cfg = KernelConfig::gaussian(1.0).unwrap();
        assert!(matches!(
            build_kernel_matrix(&x, &cfg, 9),
            Err(NystromError::DenseCapExceeded { n: 10, cap: 9 })
        ));
    }

    #[test]
    fn sparse_kernel_has_exact_unit_diagonal() {
        let s = DataMatrix::from_sparse_rows(
            5,
            &[vec![(0, 0.1), (3, 0.7)], vec![(1, 0.3)], vec![(0, 0.2), (4, 1.9)]],
        )
        .unwrap();
        let cfg = KernelConfig::gaussian(0.8).unwrap();
        let k = build_kernel_matrix(&s, &cfg, DEFAULT_DENSE_CAP).unwrap();
        let dense = DataMatrix::from_rows(&(0..3).map(|i| s.dense_row(i)).collect::<Vec<_>>()).unwrap();
        let kd = build_kernel_matrix(&dense, &cfg, DEFAULT_DENSE_CAP).unwrap();
        for i in 0..3 {
            assert_eq!(k[(i, i)], 1.0);
        }
        assert!(max_abs_diff(&k, &kd) < 1e-14);
    }

    #[test]
    fn in_sample_pair_is_a_slice_of_the_kernel() {
        let x = random_points(30, 4, 5);
        let cfg = KernelConfig::gaussian(bandwidth_heuristic(&x).unwrap()).unwrap();
        let k = build_kernel_matrix(&x, &cfg, DEFAULT_DENSE_CAP).unwrap();
        let idx = vec![7, 2, 19, 0];
        let pair = build_nystrom_pair(&x, &LandmarkSet::InSample(idx.clone()), &cfg).unwrap();
        let sliced = NystromPair::from_kernel_columns(&k, &idx).unwrap();
        assert_eq!(max_abs_diff(&pair.c_block, &sliced.c_block), 0.0);
        assert_eq!(max_abs_diff(&pair.w_block, &sliced.w_block), 0.0);
        for (j, &row) in idx.iter().enumerate() {
            for l in 0..idx.len() {
                assert_eq!(pair.c_block[(row, l)], pair.w_block[(j, l)]);
            }
        }
    }

    #[test]
    fn full_in_sample_selection_reproduces_k() {
        let x = random_points(8, 2, 9);
        let cfg = KernelConfig::gaussian(0.5).unwrap();
        let k = build_kernel_matrix(&x, &cfg, DEFAULT_DENSE_CAP).unwrap();
        let pair = build_nystrom_pair(&x, &LandmarkSet::InSample((0..8).collect()), &cfg).unwrap();
        assert_eq!(max_abs_diff(&pair.c_block, &k), 0.0);
        assert_eq!(max_abs_diff(&pair.w_block, &k), 0.0);
    }

    #[test]
    fn out_of_sample_landmark_at_a_data_point() {
        let x = random_points(12, 3, 2);
        let cfg = KernelConfig::gaussian(1.3).unwrap();
        let k = build_kernel_matrix(&x, &cfg, DEFAULT_DENSE_CAP).unwrap();
        let z = x.select(&[5]).unwrap();
        let pair = build_nystrom_pair(&x, &LandmarkSet::OutOfSample(z), &cfg).unwrap();
        for i in 0..12 {
            assert!((pair.c_block[(i, 0)] - k[(i, 5)]).abs() < 1e-15);
        }
        assert_eq!(pair.w_block[(0, 0)], 1.0);
    }

    #[test]
    fn pair_rejects_bad_indices() {
        let x = random_points(5, 2, 4);
        let cfg = KernelConfig::gaussian(1.0).unwrap();
        assert!(matches!(
            build_nystrom_pair(&x, &LandmarkSet::InSample(vec![1, 1]), &cfg),
            Err(NystromError::DuplicateIndex(1))
        ));
        assert!(matches!(
            build_nystrom_pair(&x, &LandmarkSet::InSample(vec![0, 5]), &cfg),
            Err(NystromError::IndexOutOfRange { index: 5, n: 5 })
        ));
        assert!(build_nystrom_pair(&x, &LandmarkSet::InSample(vec![]), &cfg).is_err());
    }

    #[test]
    fn sparse_rows_validated() {
        assert!(DataMatrix::from_sparse_rows(3, &[vec![(2, 1.0), (1, 1.0)]]).is_err());
        assert!(DataMatrix::from_sparse_rows(3, &[vec![(3, 1.0)]]).is_err());
        assert!(DataMatrix::from_sparse_rows(3, &[vec![(0, f64::INFINITY)]]).is_err());
        assert!(DataMatrix::from_dense(1, 2, vec![0.0, f64::NAN]).is_err());
    }
}
