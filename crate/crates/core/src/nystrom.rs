//! Fixed-rank Nyström pipelines.
//!
//! [`standard_nystrom`] truncates `W` to rank `r` before forming the
//! approximation, giving `C ⟦W⟧_r^† C^T`. [`modified_nystrom`] first projects
//! onto the range of `C` through a thin QR factorization and truncates
//! afterwards, giving `⟦C W^† C^T⟧_r`. Both return eigenpair estimates of the
//! form `Û Λ̂ Û^T` without materializing any `n x n` matrix.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{NystromError, Result};
use crate::kernel::NystromPair;
use crate::linalg::{
    best_rank_r, leading_columns, low_rank_product, max_abs_diff, scale_columns, spsd_pinv,
    sym_evd, symmetrize, thin_qr, Matrix,
};

// Fixed so that rank-deficient outputs are reproducible.
const COMPLETION_SEED: u64 = 0x6e79_7374_726f_6d;

/// Eigenvector block `Û` (`n x r`, orthonormal columns) and eigenvalues `Λ̂`
/// (non-increasing, nonnegative) of a rank-`r` approximation `Û Λ̂ Û^T`.
#[derive(Debug, Clone)]
pub struct FixedRankFactors {
    u_hat: Matrix,
    lambda_hat: Vec<f64>,
}

impl FixedRankFactors {
    /// Validates orthonormality (1e-8 per entry) and the eigenvalue ordering.
    pub fn new(u_hat: Matrix, lambda_hat: Vec<f64>) -> Result<Self> {
        let f = Self::new_unchecked(u_hat, lambda_hat);
        f.check_invariants(1e-8)?;
        Ok(f)
    }

    pub(crate) fn new_unchecked(u_hat: Matrix, lambda_hat: Vec<f64>) -> Self {
        debug_assert_eq!(u_hat.ncols(), lambda_hat.len());
        Self { u_hat, lambda_hat }
    }

    pub fn u_hat(&self) -> &Matrix {
        &self.u_hat
    }

    pub fn lambda_hat(&self) -> &[f64] {
        &self.lambda_hat
    }

    pub fn rank(&self) -> usize {
        self.lambda_hat.len()
    }

    pub fn n(&self) -> usize {
        self.u_hat.nrows()
    }

    /// Sum of the eigenvalues, i.e. the trace of the approximation.
    pub fn trace(&self) -> f64 {
        self.lambda_hat.iter().sum()
    }

    /// `L = Û Λ̂^{1/2}`, so that the approximation is `L L^T`.
    pub fn factor(&self) -> Matrix {
        let s: Vec<f64> = self.lambda_hat.iter().map(|l| l.sqrt()).collect();
        scale_columns(&self.u_hat, &s)
    }

    /// Checks orthonormal columns within `tol` and non-increasing, nonnegative eigenvalues.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        if self.u_hat.ncols() != self.lambda_hat.len() {
            return Err(NystromError::Dimension(format!(
                "{} eigenvector columns for {} eigenvalues",
                self.u_hat.ncols(),
                self.lambda_hat.len()
            )));
        }
        let r = self.rank();
        let gram = self.u_hat.transpose() * &self.u_hat;
        let defect = max_abs_diff(&gram, &Mat::identity(r, r));
        if !(defect <= tol) {
            return Err(NystromError::InvalidParameter(format!(
                "eigenvector block is not orthonormal (defect {defect:e})"
            )));
        }
        if self.lambda_hat.iter().any(|&l| !(l >= 0.0)) {
            return Err(NystromError::InvalidParameter(
                "eigenvalues must be nonnegative".into(),
            ));
        }
        if self.lambda_hat.windows(2).any(|w| w[1] > w[0]) {
            return Err(NystromError::InvalidParameter(
                "eigenvalues must be non-increasing".into(),
            ));
        }
        Ok(())
    }

    /// `Û diag(Λ̂) Û^T` with no size check.
    pub fn reconstruct_unchecked(&self) -> Matrix {
        low_rank_product(&self.u_hat, &self.lambda_hat)
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(NystromError::DenseCapExceeded { n, cap });
    }
    Ok(())
}

fn check_rank(pair: &NystromPair, r: usize) -> Result<()> {
    let max = pair.m().min(pair.n());
    if r == 0 || r > max {
        return Err(NystromError::RankOutOfRange { rank: r, max });
    }
    Ok(())
}

/// Materializes `Û diag(Λ̂) Û^T`, refusing when `n` exceeds `cap`.
pub fn reconstruct(f: &FixedRankFactors, cap: usize) -> Result<Matrix> {
    check_cap(f.n(), cap)?;
    Ok(f.reconstruct_unchecked())
}

/// The rank-`m` approximation `C W^† C^T`, materialized.
pub fn rank_m_nystrom(pair: &NystromPair, rel_tol: f64, cap: usize) -> Result<Matrix> {
    check_cap(pair.n(), cap)?;
    let w_pinv = spsd_pinv(&pair.w_block, rel_tol)?;
    let g = &pair.c_block * (&w_pinv * pair.c_block.transpose());
    Ok(symmetrize(&g))
}

/// Best rank-`r` approximation of the full kernel matrix.
pub fn evd_baseline(k: &Matrix, r: usize, cap: usize) -> Result<FixedRankFactors> {
    check_cap(k.nrows(), cap)?;
    best_rank_r(k, r)
}

fn numerical_rank(values: &[f64], rel_tol: f64) -> usize {
    let lmax = values.first().copied().unwrap_or(0.0);
    if !(lmax > 0.0) {
        return 0;
    }
    values.iter().take_while(|&&l| l > rel_tol * lmax).count()
}

/// Extends `u` (orthonormal columns) to `r` orthonormal columns.
fn complete_orthonormal(u: &Matrix, r: usize) -> Result<Matrix> {
    let (n, k) = (u.nrows(), u.ncols());
    if k >= r {
        return Ok(u.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(COMPLETION_SEED);
    let mut block: Matrix = Mat::from_fn(n, r - k, |_, _| rng.sample(StandardNormal));
    // two passes of projection + QR keep the new block orthogonal to u at roundoff level
    for _ in 0..2 {
        if k > 0 {
            let proj = u * (u.transpose() * &block);
            block = &block - &proj;
        }
        block = thin_qr(&block)?.q;
    }
    Ok(Mat::from_fn(n, r, |i, j| {
        if j < k {
            u[(i, j)]
        } else {
            block[(i, j - k)]
        }
    }))
}

fn pad_factors(u: Matrix, mut values: Vec<f64>, r: usize) -> Result<FixedRankFactors> {
    let u = complete_orthonormal(&u, r)?;
    values.resize(r, 0.0);
    Ok(FixedRankFactors::new_unchecked(u, values))
}

/// Standard fixed-rank Nyström: `C ⟦W⟧_r^† C^T` in factored form.
///
/// 1. `W = V Σ V^T`, keep the leading `r` pairs.
/// 2. `L = C V_r (Σ_r^†)^{1/2}`.
/// 3. `L^T L = Ṽ Σ̃ Ṽ^T`.
/// 4. `Û = L Ṽ (Σ̃^†)^{1/2}`, `Λ̂ = Σ̃`.
///
/// If `W` or `L` has numerical rank `s < r`, the trailing `r - s` eigenvalues
/// are zero and `Û` is completed with an orthonormal block.
pub fn standard_nystrom(pair: &NystromPair, r: usize, rel_tol: f64) -> Result<FixedRankFactors> {
    check_rank(pair, r)?;
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(NystromError::InvalidParameter(format!(
            "pseudo-inverse tolerance must lie in (0,1), got {rel_tol}"
        )));
    }
    let mut w = sym_evd(&pair.w_block)?;
    w.values.iter_mut().for_each(|v| *v = v.max(0.0));
    let s = numerical_rank(&w.values, rel_tol).min(r);
    if s == 0 {
        return pad_factors(Mat::zeros(pair.n(), 0), Vec::new(), r);
    }

    let inv_sqrt: Vec<f64> = w.values[..s].iter().map(|l| 1.0 / l.sqrt()).collect();
    let l = &pair.c_block * scale_columns(&leading_columns(&w.vectors, s), &inv_sqrt);

    let mut inner = sym_evd(&(l.transpose() * &l))?;
    inner.values.iter_mut().for_each(|v| *v = v.max(0.0));
    let t = numerical_rank(&inner.values, rel_tol);
    let inv_sqrt: Vec<f64> = inner.values[..t].iter().map(|l| 1.0 / l.sqrt()).collect();
    let u_hat = &l * scale_columns(&leading_columns(&inner.vectors, t), &inv_sqrt);
    pad_factors(u_hat, inner.values[..t].to_vec(), r)
}

/// Modified fixed-rank Nyström: `⟦C W^† C^T⟧_r` in factored form.
///
/// 1. `C = Q R` (thin QR).
/// 2. `R W^† R^T = V' Σ' V'^T`, symmetrized before the decomposition.
/// 3. `Û = Q V'_r`, `Λ̂ = Σ'_r`.
///
/// `Q V'_r` is orthonormal regardless of rank, so no completion is needed.
pub fn modified_nystrom(pair: &NystromPair, r: usize, rel_tol: f64) -> Result<FixedRankFactors> {
    check_rank(pair, r)?;
    let qr = thin_qr(&pair.c_block)?;
    let w_pinv = spsd_pinv(&pair.w_block, rel_tol)?;
    let core = &qr.r * (&w_pinv * qr.r.transpose());
    let evd = sym_evd(&core)?;
    let u_hat = &qr.q * leading_columns(&evd.vectors, r);
    let values = evd.values[..r].iter().map(|v| v.max(0.0)).collect();
    Ok(FixedRankFactors::new_unchecked(u_hat, values))
}
