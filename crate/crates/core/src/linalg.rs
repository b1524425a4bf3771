//! Dense factorizations and norms shared by the approximation pipelines.
//!
//! Everything here operates on small-to-moderate dense matrices: the `m x m`
//! landmark blocks, `n x m` cross-kernel blocks, and (at desk scale) full
//! `n x n` kernel matrices. Eigenvalues are always reported in non-increasing
//! order and every symmetric input is symmetrized as `(A + A^T) / 2` before it
//! reaches the eigensolver.

use faer::{Mat, Side};

use crate::error::{NystromError, Result};
use crate::nystrom::FixedRankFactors;

/// Column-major dense `f64` matrix used throughout the crate.
pub type Matrix = Mat<f64>;

/// Relative eigenvalue cutoff used when pseudo-inverting SPSD matrices.
pub const DEFAULT_PINV_TOL: f64 = 1e-12;

/// Thin QR factorization `A = Q R` with `Q` of size `n x m` and `R` of size `m x m`.
///
/// The diagonal of `R` is normalized to be nonnegative.
#[derive(Debug, Clone)]
pub struct ThinQr {
    pub q: Matrix,
    pub r: Matrix,
}

/// Symmetric eigendecomposition with eigenvalues sorted non-increasing.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub vectors: Matrix,
    pub values: Vec<f64>,
}

impl SymEigen {
    /// Reassembles `V diag(values) V^T`.
    pub fn reconstruct(&self) -> Matrix {
        low_rank_product(&self.vectors, &self.values)
    }
}

/// Frobenius, trace (nuclear) and spectral norms of a matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub frobenius: f64,
    pub trace: f64,
    pub spectral: f64,
}

pub(crate) fn ensure_finite(a: &Matrix) -> Result<()> {
    for j in 0..a.ncols() {
        if a.col_as_slice(j).iter().any(|v| !v.is_finite()) {
            return Err(NystromError::NonFinite);
        }
    }
    Ok(())
}

fn ensure_square(a: &Matrix, what: &str) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(NystromError::Dimension(format!(
            "{what} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

/// Returns `(A + A^T) / 2`.
pub fn symmetrize(a: &Matrix) -> Matrix {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
}

/// Largest absolute entry.
pub fn max_abs(a: &Matrix) -> f64 {
    (0..a.ncols())
        .flat_map(|j| a.col_as_slice(j).iter())
        .fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Largest absolute entrywise difference.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    (0..a.ncols())
        .flat_map(|j| a.col_as_slice(j).iter().zip(b.col_as_slice(j)))
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

/// Frobenius norm, accumulated with scaling to avoid overflow.
pub fn frobenius(a: &Matrix) -> f64 {
    a.norm_l2()
}

/// `‖a - b‖_F / ‖b‖_F`, or the absolute difference when `b` is zero.
pub fn relative_frobenius_diff(a: &Matrix, b: &Matrix) -> f64 {
    let diff = a - b;
    let scale = frobenius(b);
    if scale == 0.0 {
        frobenius(&diff)
    } else {
        frobenius(&diff) / scale
    }
}

/// Scales column `j` of `a` by `scales[j]`.
pub fn scale_columns(a: &Matrix, scales: &[f64]) -> Matrix {
    assert_eq!(a.ncols(), scales.len());
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * scales[j])
}

/// Keeps the first `k` columns of `a`.
pub fn leading_columns(a: &Matrix, k: usize) -> Matrix {
    a.subcols(0, k).to_owned()
}

/// `U diag(values) U^T`, symmetrized.
pub fn low_rank_product(u: &Matrix, values: &[f64]) -> Matrix {
    let scaled = scale_columns(u, values);
    let out = &scaled * u.transpose();
    symmetrize(&out)
}

/// Thin QR decomposition of an `n x m` matrix with `n >= m`.
pub fn thin_qr(a: &Matrix) -> Result<ThinQr> {
    let (n, m) = (a.nrows(), a.ncols());
    if n < m {
        return Err(NystromError::Dimension(format!(
            "thin QR needs rows >= cols, got {n}x{m}"
        )));
    }
    ensure_finite(a)?;
    let qr = a.qr();
    let mut q = qr.compute_thin_Q();
    let thin_r = qr.thin_R();
    let mut r = Mat::from_fn(m, m, |i, j| if i <= j { thin_r[(i, j)] } else { 0.0 });
    for k in 0..m {
        if r[(k, k)] < 0.0 {
            for j in k..m {
                r[(k, j)] = -r[(k, j)];
            }
            for i in 0..n {
                q[(i, k)] = -q[(i, k)];
            }
        }
    }
    Ok(ThinQr { q, r })
}

/// Full symmetric eigendecomposition; the input is symmetrized first.
pub fn sym_evd(a: &Matrix) -> Result<SymEigen> {
    ensure_square(a, "eigendecomposition input")?;
    ensure_finite(a)?;
    let d = a.nrows();
    if d == 0 {
        return Ok(SymEigen {
            vectors: Mat::zeros(0, 0),
            values: Vec::new(),
        });
    }
    let sym = symmetrize(a);
    let evd = sym
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| NystromError::EigenFailure)?;
    let u = evd.U();
    let s = evd.S().column_vector();
    // faer returns ascending order
    let values: Vec<f64> = (0..d).rev().map(|i| s[i]).collect();
    let vectors = Mat::from_fn(d, d, |i, j| u[(i, d - 1 - j)]);
    Ok(SymEigen { vectors, values })
}

/// Eigenvalues only, non-increasing. Cheaper than [`sym_evd`] for large inputs.
pub fn sym_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    ensure_square(a, "eigenvalue input")?;
    ensure_finite(a)?;
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let sym = symmetrize(a);
    let mut values = sym
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| NystromError::EigenFailure)?;
    values.reverse();
    Ok(values)
}

fn clamped_spectrum(a: &Matrix) -> Result<SymEigen> {
    let mut evd = sym_evd(a)?;
    for v in evd.values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(evd)
}

/// Moore-Penrose pseudo-inverse of an SPSD matrix by eigenvalue thresholding.
///
/// Eigenvalues are clamped at zero, then every eigenvalue `<= rel_tol * λ_max`
/// maps to zero.
pub fn spsd_pinv(w: &Matrix, rel_tol: f64) -> Result<Matrix> {
    ensure_square(w, "pseudo-inverse input")?;
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(NystromError::InvalidParameter(format!(
            "pseudo-inverse tolerance must lie in (0,1), got {rel_tol}"
        )));
    }
    let evd = clamped_spectrum(w)?;
    let lmax = evd.values.first().copied().unwrap_or(0.0);
    let cutoff = rel_tol * lmax;
    let inv: Vec<f64> = evd
        .values
        .iter()
        .map(|&l| if lmax > 0.0 && l > cutoff { 1.0 / l } else { 0.0 })
        .collect();
    Ok(low_rank_product(&evd.vectors, &inv))
}

/// Inverse square root `W^{-1/2}` of a positive definite matrix.
pub fn spsd_inv_sqrt(w: &Matrix, rel_tol: f64) -> Result<Matrix> {
    ensure_square(w, "inverse square root input")?;
    let evd = clamped_spectrum(w)?;
    let dim = evd.values.len();
    let lmax = evd.values.first().copied().unwrap_or(0.0);
    let rank = evd
        .values
        .iter()
        .filter(|&&l| lmax > 0.0 && l > rel_tol * lmax)
        .count();
    if rank < dim {
        return Err(NystromError::NotPositiveDefinite { rank, dim });
    }
    let inv_sqrt: Vec<f64> = evd.values.iter().map(|l| 1.0 / l.sqrt()).collect();
    Ok(low_rank_product(&evd.vectors, &inv_sqrt))
}

fn is_symmetric(a: &Matrix) -> bool {
    if a.nrows() != a.ncols() {
        return false;
    }
    let scale = max_abs(a).max(f64::MIN_POSITIVE);
    let n = a.nrows();
    (0..n).all(|j| (0..j).all(|i| (a[(i, j)] - a[(j, i)]).abs() <= 1e-13 * scale))
}

/// Frobenius, trace and spectral norms.
///
/// The trace and spectral norms come from the symmetric eigenvalues when the
/// input is symmetric and from the singular values otherwise.
pub fn norms(a: &Matrix) -> Result<Norms> {
    ensure_finite(a)?;
    let frobenius = frobenius(a);
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Norms {
            frobenius,
            trace: 0.0,
            spectral: 0.0,
        });
    }
    let magnitudes: Vec<f64> = if is_symmetric(a) {
        sym_eigenvalues(a)?.into_iter().map(f64::abs).collect()
    } else {
        a.singular_values().map_err(|_| NystromError::EigenFailure)?
    };
    Ok(Norms {
        frobenius,
        trace: magnitudes.iter().sum(),
        spectral: magnitudes.iter().copied().fold(0.0, f64::max),
    })
}

/// Best rank-`r` approximation of an SPSD matrix from its top-`r` eigenpairs.
///
/// When `λ_r = λ_{r+1}` the truncation keeps whichever pair the eigensolver
/// ordered first.
pub fn best_rank_r(k: &Matrix, r: usize) -> Result<FixedRankFactors> {
    ensure_square(k, "kernel matrix")?;
    let d = k.nrows();
    if r == 0 || r > d {
        return Err(NystromError::RankOutOfRange { rank: r, max: d });
    }
    let evd = clamped_spectrum(k)?;
    Ok(FixedRankFactors::new_unchecked(
        leading_columns(&evd.vectors, r),
        evd.values[..r].to_vec(),
    ))
}

/// `A^T A`, symmetrized.
pub fn gram(a: &Matrix) -> Matrix {
    let g = a.transpose() * a;
    symmetrize(&g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Mat::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    fn random_spsd(d: usize, seed: u64) -> Matrix {
        let x = random_matrix(d, d, seed);
        gram(&x)
    }

    fn from_rows(rows: &[&[f64]]) -> Matrix {
        Mat::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    fn orthonormality_defect(q: &Matrix) -> f64 {
        let qtq = q.transpose() * q;
        max_abs_diff(&qtq, &Mat::identity(q.ncols(), q.ncols()))
    }

    #[test]
    fn qr_of_identity_is_identity() {
        let a = Mat::<f64>::identity(3, 3);
        let f = thin_qr(&a).unwrap();
        assert!(max_abs_diff(&f.q, &a) < 1e-15);
        assert!(max_abs_diff(&f.r, &a) < 1e-15);
    }

    #[test]
    fn qr_matches_worked_example() {
        let c = from_rows(&[&[1.0, 0.0], &[0.0, 1.01], &[10.0, 0.0]]);
        let f = thin_qr(&c).unwrap();
        let s = 101f64.sqrt();
        let q = from_rows(&[&[1.0 / s, 0.0], &[0.0, 1.0], &[10.0 / s, 0.0]]);
        let r = from_rows(&[&[s, 0.0], &[0.0, 1.01]]);
        assert!(max_abs_diff(&f.q, &q) < 1e-14);
        assert!(max_abs_diff(&f.r, &r) < 1e-13);
    }

    #[test]
    fn qr_reconstructs_random_input() {
        let a = random_matrix(20, 5, 7);
        let f = thin_qr(&a).unwrap();
        let back = &f.q * &f.r;
        assert!(relative_frobenius_diff(&back, &a) < 1e-10);
        assert!(orthonormality_defect(&f.q) < 1e-10);
        for i in 0..5 {
            assert!(f.r[(i, i)] >= 0.0);
            for j in 0..i {
                assert_eq!(f.r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn qr_rejects_wide_input() {
        let a = random_matrix(2, 3, 1);
        assert!(matches!(thin_qr(&a), Err(NystromError::Dimension(_))));
    }

    #[test]
    fn evd_of_diagonal() {
        let a = from_rows(&[&[1.01, 0.0], &[0.0, 101.0]]);
        let e = sym_evd(&a).unwrap();
        assert!((e.values[0] - 101.0).abs() < 1e-12);
        assert!((e.values[1] - 1.01).abs() < 1e-12);
        assert!((e.vectors[(1, 0)].abs() - 1.0).abs() < 1e-14);
        assert!((e.vectors[(0, 1)].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn evd_of_zero_matrix() {
        let e = sym_evd(&Mat::zeros(4, 4)).unwrap();
        assert!(e.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn evd_reconstructs_random_symmetric() {
        let a = symmetrize(&random_matrix(10, 10, 3));
        let e = sym_evd(&a).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        assert!(relative_frobenius_diff(&e.reconstruct(), &a) < 1e-8);
        assert!(orthonormality_defect(&e.vectors) < 1e-10);
    }

    #[test]
    fn evd_rejects_nan() {
        let mut a = Mat::<f64>::identity(3, 3);
        a[(1, 2)] = f64::NAN;
        assert!(matches!(sym_evd(&a), Err(NystromError::NonFinite)));
    }

    #[test]
    fn pinv_of_worked_example_inner_matrix() {
        let w = from_rows(&[&[1.0, 0.0], &[0.0, 1.01]]);
        let p = spsd_pinv(&w, DEFAULT_PINV_TOL).unwrap();
        let expected = from_rows(&[&[1.0, 0.0], &[0.0, 1.0 / 1.01]]);
        assert!(max_abs_diff(&p, &expected) < 1e-14);
    }

    #[test]
    fn pinv_of_zero_is_zero() {
        let p = spsd_pinv(&Mat::zeros(3, 3), DEFAULT_PINV_TOL).unwrap();
        assert_eq!(max_abs(&p), 0.0);
    }

    #[test]
    fn pinv_of_rank_one() {
        // v v^T with |v| = 2 has eigenvalue 4 along v/2, so its pinv is v v^T / 16.
        let v = [1.0, -1.0, 1.0, 1.0];
        let w = Mat::from_fn(4, 4, |i, j| v[i] * v[j]);
        let p = spsd_pinv(&w, DEFAULT_PINV_TOL).unwrap();
        let expected = Mat::from_fn(4, 4, |i, j| v[i] * v[j] / 16.0);
        assert!(max_abs_diff(&p, &expected) < 1e-14);
    }

    #[test]
    fn pinv_satisfies_penrose_identities() {
        let w = random_spsd(7, 11);
        let p = spsd_pinv(&w, DEFAULT_PINV_TOL).unwrap();
        let wpw = &(&w * &p) * &w;
        let pwp = &(&p * &w) * &p;
        let wp = &w * &p;
        let pw = &p * &w;
        assert!(relative_frobenius_diff(&wpw, &w) < 1e-8);
        assert!(relative_frobenius_diff(&pwp, &p) < 1e-8);
        assert!(max_abs_diff(&wp, &wp.transpose().to_owned()) < 1e-8 * max_abs(&wp));
        assert!(max_abs_diff(&pw, &pw.transpose().to_owned()) < 1e-8 * max_abs(&pw));
    }

    #[test]
    fn pinv_rejects_bad_tolerance() {
        let w = Mat::<f64>::identity(2, 2);
        assert!(spsd_pinv(&w, 0.0).is_err());
        assert!(spsd_pinv(&w, 1.5).is_err());
    }

    #[test]
    fn inv_sqrt_cases() {
        let eye = Mat::<f64>::identity(3, 3);
        let m = spsd_inv_sqrt(&eye, DEFAULT_PINV_TOL).unwrap();
        assert!(max_abs_diff(&m, &eye) < 1e-15);

        let d = from_rows(&[&[4.0, 0.0], &[0.0, 9.0]]);
        let m = spsd_inv_sqrt(&d, DEFAULT_PINV_TOL).unwrap();
        let expected = from_rows(&[&[0.5, 0.0], &[0.0, 1.0 / 3.0]]);
        assert!(max_abs_diff(&m, &expected) < 1e-15);

        let w = &random_spsd(6, 5) + &Mat::<f64>::identity(6, 6);
        let m = spsd_inv_sqrt(&w, DEFAULT_PINV_TOL).unwrap();
        let mwm = &(&m * &w) * &m;
        assert!(max_abs_diff(&mwm, &Mat::identity(6, 6)) < 1e-8);
    }

    #[test]
    fn inv_sqrt_rejects_singular() {
        let v = [1.0, 2.0, 3.0];
        let w = Mat::from_fn(3, 3, |i, j| v[i] * v[j]);
        assert!(matches!(
            spsd_inv_sqrt(&w, DEFAULT_PINV_TOL),
            Err(NystromError::NotPositiveDefinite { rank: 1, dim: 3 })
        ));
    }

    #[test]
    fn norms_of_identity() {
        let n = norms(&Mat::identity(3, 3)).unwrap();
        assert!((n.frobenius - 3f64.sqrt()).abs() < 1e-15);
        assert!((n.trace - 3.0).abs() < 1e-14);
        assert!((n.spectral - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trace_norm_of_spsd_equals_trace() {
        let k = from_rows(&[&[1.0, 0.0, 10.0], &[0.0, 1.01, 0.0], &[10.0, 0.0, 100.0]]);
        let n = norms(&k).unwrap();
        assert!((n.trace - 102.01).abs() < 1e-10);
    }

    #[test]
    fn norm_ordering_on_random_inputs() {
        for seed in 0..20 {
            let a = random_matrix(8, 8, 100 + seed);
            let n = norms(&a).unwrap();
            assert!(n.spectral <= n.frobenius + 1e-10);
            assert!(n.frobenius <= n.trace + 1e-10);
            let s = norms(&symmetrize(&a)).unwrap();
            assert!(s.spectral <= s.frobenius + 1e-10);
            assert!(s.frobenius <= s.trace + 1e-10);
        }
    }

    #[test]
    fn best_rank_one_of_worked_example() {
        let k = from_rows(&[&[1.0, 0.0, 10.0], &[0.0, 1.01, 0.0], &[10.0, 0.0, 100.0]]);
        let g = best_rank_r(&k, 1).unwrap().reconstruct_unchecked();
        let expected = from_rows(&[&[1.0, 0.0, 10.0], &[0.0, 0.0, 0.0], &[10.0, 0.0, 100.0]]);
        assert!(max_abs_diff(&g, &expected) < 1e-12);
    }

    #[test]
    fn best_full_rank_is_exact() {
        let k = from_rows(&[&[3.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 5.0]]);
        let g = best_rank_r(&k, 3).unwrap().reconstruct_unchecked();
        assert!(max_abs_diff(&g, &k) < 1e-14);
    }

    #[test]
    fn best_rank_r_rejects_bad_rank() {
        let k = Mat::<f64>::identity(3, 3);
        assert!(best_rank_r(&k, 0).is_err());
        assert!(best_rank_r(&k, 4).is_err());
    }

    #[test]
    fn best_rank_r_beats_random_candidates() {
        let k = random_spsd(12, 42);
        let best = best_rank_r(&k, 3).unwrap().reconstruct_unchecked();
        let best_err = norms(&(&k - &best)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let b = Mat::from_fn(12, 3, |_, _| rng.random_range(-1.0..1.0));
            // least-squares fit of k onto the random subspace, plus a random rank-3 guess
            let qb = thin_qr(&b).unwrap().q;
            let proj = &(&qb * (qb.transpose() * &k * &qb)) * qb.transpose();
            let guess = &(&b * b.transpose()) * rng.random_range(0.1..3.0);
            for cand in [proj, guess] {
                let err = norms(&(&k - &cand)).unwrap();
                assert!(best_err.frobenius <= err.frobenius + 1e-10);
                assert!(best_err.trace <= err.trace + 1e-10);
            }
        }
    }
}
