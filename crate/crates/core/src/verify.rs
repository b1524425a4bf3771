//! Numerical checks of the trace-norm guarantees and the out-of-sample bound.
//!
//! * trace dominance: `‖K - G_opt‖_* <= ‖K - G_nys‖_*` for in-sample landmarks;
//! * monotonicity: enlarging a landmark set never increases `‖K - G_opt‖_*`;
//! * block structure: if `K_21 = 0` both methods give the same approximation;
//! * out-of-sample gap: `‖C W^† C^T - C W_e^† C^T‖_2 / ‖K‖_2 <= η / (1 - η)`
//!   with `W_e = C^T K^{-1} C` and `η = ‖W_e^{-1/2} (W - W_e) W_e^{-1/2}‖_2`.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use rand::Rng;

use crate::data_io::{fixture, gaussian_points, random_spsd};
use crate::error::{NystromError, Result};
use crate::kernel::{bandwidth_heuristic, build_kernel_matrix, build_nystrom_pair, KernelConfig, NystromPair};
use crate::landmark::{kmeans_landmarks, uniform_sample, LandmarkSet, RngSeed, KMEANS_MAX_ITER};
use crate::linalg::{
    best_rank_r, norms, relative_frobenius_diff, spsd_inv_sqrt, spsd_pinv, sym_eigenvalues,
    symmetrize, thin_qr, Matrix, Norms,
};
use crate::nystrom::{modified_nystrom, rank_m_nystrom, standard_nystrom};

/// Relative slack used by the trace-norm inequalities.
pub const TRACE_SLACK: f64 = 1e-9;
/// Absolute slack on the out-of-sample bound.
pub const BOUND_SLACK: f64 = 1e-9;
/// Agreement required between the two methods when `K_21 = 0`.
pub const BLOCK_AGREEMENT_TOL: f64 = 1e-8;
/// Largest kernel accepted by the out-of-sample diagnostics.
pub const DIAGNOSTICS_MAX_N: usize = 4000;

fn trace_norm(k: &Matrix) -> Result<f64> {
    Ok(norms(k)?.trace)
}

fn in_sample_pair(k: &Matrix, indices: &[usize]) -> Result<NystromPair> {
    NystromPair::from_kernel_columns(k, indices)
}

/// Residual norms of both methods on one in-sample landmark set.
#[derive(Debug, Clone, Copy)]
pub struct MethodComparison {
    pub standard: Norms,
    pub modified: Norms,
}

/// Absolute residual norms `‖K - G‖` of both methods, from materialized matrices.
pub fn compare_methods(
    k: &Matrix,
    indices: &[usize],
    r: usize,
    rel_tol: f64,
) -> Result<MethodComparison> {
    let pair = in_sample_pair(k, indices)?;
    let gs = standard_nystrom(&pair, r, rel_tol)?.reconstruct_unchecked();
    let gm = modified_nystrom(&pair, r, rel_tol)?.reconstruct_unchecked();
    Ok(MethodComparison {
        standard: norms(&(k - &gs))?,
        modified: norms(&(k - &gm))?,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct Theorem1Check {
    pub trace_nys: f64,
    pub trace_opt: f64,
    pub kernel_trace_norm: f64,
    pub holds: bool,
}

impl Theorem1Check {
    /// `(trace_nys - trace_opt) / ‖K‖_*`; negative values are violations beyond the slack.
    pub fn margin(&self) -> f64 {
        (self.trace_nys - self.trace_opt) / self.kernel_trace_norm.max(f64::MIN_POSITIVE)
    }
}

/// Trace dominance of the QR-based method on one in-sample landmark set.
pub fn check_theorem1(k: &Matrix, indices: &[usize], r: usize, rel_tol: f64) -> Result<Theorem1Check> {
    let cmp = compare_methods(k, indices, r, rel_tol)?;
    let kn = trace_norm(k)?;
    Ok(Theorem1Check {
        trace_nys: cmp.standard.trace,
        trace_opt: cmp.modified.trace,
        kernel_trace_norm: kn,
        holds: cmp.modified.trace <= cmp.standard.trace + TRACE_SLACK * kn,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct Theorem2Check {
    pub err_small: f64,
    pub err_large: f64,
    pub kernel_trace_norm: f64,
    pub holds: bool,
}

impl Theorem2Check {
    pub fn margin(&self) -> f64 {
        (self.err_small - self.err_large) / self.kernel_trace_norm.max(f64::MIN_POSITIVE)
    }
}

fn ensure_nested(small: &[usize], large: &[usize]) -> Result<()> {
    if let Some(i) = small.iter().find(|i| !large.contains(i)) {
        return Err(NystromError::NotNested(format!(
            "index {i} of the smaller set is missing from the larger one"
        )));
    }
    Ok(())
}

/// Monotonicity of the QR-based method's trace error under landmark enlargement.
pub fn check_theorem2(
    k: &Matrix,
    small: &[usize],
    large: &[usize],
    r: usize,
    rel_tol: f64,
) -> Result<Theorem2Check> {
    ensure_nested(small, large)?;
    let err = |idx: &[usize]| -> Result<f64> {
        let g = modified_nystrom(&in_sample_pair(k, idx)?, r, rel_tol)?.reconstruct_unchecked();
        trace_norm(&(k - &g))
    };
    let err_small = err(small)?;
    let err_large = if small.len() == large.len() {
        err_small
    } else {
        err(large)?
    };
    let kn = trace_norm(k)?;
    Ok(Theorem2Check {
        err_small,
        err_large,
        kernel_trace_norm: kn,
        holds: err_large <= err_small + TRACE_SLACK * kn,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct Remark1Check {
    /// Largest `|K_21|` entry; the agreement is only expected when this is zero.
    pub off_block_max: f64,
    pub rel_diff: f64,
    pub holds: bool,
}

/// Compares both methods with the first `m` points as landmarks.
pub fn check_remark1(k: &Matrix, m: usize, r: usize, rel_tol: f64) -> Result<Remark1Check> {
    let n = k.nrows();
    if m == 0 || m > n {
        return Err(NystromError::TooMany {
            requested: m,
            available: n,
        });
    }
    let idx: Vec<usize> = (0..m).collect();
    let pair = in_sample_pair(k, &idx)?;
    let gs = standard_nystrom(&pair, r, rel_tol)?.reconstruct_unchecked();
    let gm = modified_nystrom(&pair, r, rel_tol)?.reconstruct_unchecked();
    let mut off_block_max = 0.0_f64;
    for j in 0..m {
        for i in m..n {
            off_block_max = off_block_max.max(k[(i, j)].abs());
        }
    }
    let rel_diff = relative_frobenius_diff(&gm, &gs);
    Ok(Remark1Check {
        off_block_max,
        rel_diff,
        holds: rel_diff <= BLOCK_AGREEMENT_TOL,
    })
}

/// Frobenius reversal on the 4x4 `remark2` fixture with landmarks {1, 2} and `r = 1`.
#[derive(Debug, Clone, Copy)]
pub struct FrobeniusReversal {
    pub comparison: MethodComparison,
    /// Modified better in trace norm and worse in Frobenius norm.
    pub reproduced: bool,
}

pub fn frobenius_reversal(rel_tol: f64) -> Result<FrobeniusReversal> {
    let k = fixture("remark2")?;
    let c = compare_methods(&k, &[0, 1], 1, rel_tol)?;
    Ok(FrobeniusReversal {
        comparison: c,
        reproduced: c.modified.trace < c.standard.trace && c.modified.frobenius > c.standard.frobenius,
    })
}

/// Errors of both methods before and after adding landmarks.
#[derive(Debug, Clone, Copy)]
pub struct NestingContrast {
    pub small: MethodComparison,
    pub large: MethodComparison,
    pub kernel: Norms,
}

impl NestingContrast {
    /// The standard method got strictly worse in both norms.
    pub fn standard_regressed(&self) -> bool {
        self.large.standard.trace > self.small.standard.trace
            && self.large.standard.frobenius > self.small.standard.frobenius
    }

    /// The QR-based method did not get worse in either norm, up to [`TRACE_SLACK`].
    pub fn modified_monotone(&self) -> bool {
        self.large.modified.trace <= self.small.modified.trace + TRACE_SLACK * self.kernel.trace
            && self.large.modified.frobenius
                <= self.small.modified.frobenius + TRACE_SLACK * self.kernel.frobenius
    }
}

pub fn nesting_contrast(
    k: &Matrix,
    small: &[usize],
    large: &[usize],
    r: usize,
    rel_tol: f64,
) -> Result<NestingContrast> {
    ensure_nested(small, large)?;
    Ok(NestingContrast {
        small: compare_methods(k, small, r, rel_tol)?,
        large: compare_methods(k, large, r, rel_tol)?,
        kernel: norms(k)?,
    })
}

/// The `example1` fixture with landmarks {1} versus {1, 2} at `r = 1`.
pub fn landmark_regression(rel_tol: f64) -> Result<NestingContrast> {
    nesting_contrast(&fixture("example1")?, &[0], &[0, 1], 1, rel_tol)
}

/// Cholesky factor of a positive definite kernel matrix, used to form `C^T K^{-1} C`.
pub struct EmpiricalMap {
    llt: faer::linalg::solvers::Llt<f64>,
    n: usize,
    spectral_norm: f64,
}

impl EmpiricalMap {
    /// Fails with [`NystromError::SingularKernel`] unless `K` is numerically positive definite.
    pub fn new(k: &Matrix) -> Result<Self> {
        let n = k.nrows();
        if n > DIAGNOSTICS_MAX_N {
            return Err(NystromError::DenseCapExceeded {
                n,
                cap: DIAGNOSTICS_MAX_N,
            });
        }
        let ev = sym_eigenvalues(k)?;
        let (lmax, lmin) = (ev[0], *ev.last().unwrap());
        // below this the solve loses every significant digit
        if !(lmin > n as f64 * f64::EPSILON * lmax) {
            return Err(NystromError::SingularKernel);
        }
        let llt = symmetrize(k)
            .llt(Side::Lower)
            .map_err(|_| NystromError::SingularKernel)?;
        Ok(Self {
            llt,
            n,
            spectral_norm: lmax,
        })
    }

    pub fn kernel_spectral_norm(&self) -> f64 {
        self.spectral_norm
    }

    /// `W_e = C^T K^{-1} C`, symmetrized.
    pub fn inner_matrix(&self, c_block: &Matrix) -> Result<Matrix> {
        if c_block.nrows() != self.n {
            return Err(NystromError::Dimension(format!(
                "C has {} rows, kernel has {}",
                c_block.nrows(),
                self.n
            )));
        }
        let x = self.llt.solve(c_block);
        Ok(symmetrize(&(c_block.transpose() * &x)))
    }
}

/// `W_e = C^T K^{-1} C` for a positive definite `K`.
pub fn empirical_inner_matrix(k: &Matrix, c_block: &Matrix) -> Result<Matrix> {
    EmpiricalMap::new(k)?.inner_matrix(c_block)
}

#[derive(Debug, Clone)]
pub struct OutOfSampleDiagnostics {
    pub w_e: Matrix,
    pub e_mat: Matrix,
    pub eta: f64,
    pub observed_rel_spec: f64,
    /// `η / (1 - η)`, infinite when `η >= 1`.
    pub bound: f64,
}

impl OutOfSampleDiagnostics {
    pub fn bound_applies(&self) -> bool {
        self.eta < 1.0
    }

    /// `None` when `η >= 1` and the bound says nothing.
    pub fn holds(&self) -> Option<bool> {
        self.bound_applies()
            .then(|| self.observed_rel_spec <= self.bound + BOUND_SLACK)
    }
}

/// Evaluates `η`, the bound and the observed gap for one landmark set.
///
/// The gap is computed as `‖R (W^† - W_e^†) R^T‖_2` with `C = Q R`, which has the
/// same nonzero spectrum as the `n x n` difference.
pub fn theorem3_diagnostics(
    map: &EmpiricalMap,
    pair: &NystromPair,
    rel_tol: f64,
) -> Result<OutOfSampleDiagnostics> {
    let w_e = map.inner_matrix(&pair.c_block)?;
    let e_mat = symmetrize(&(&pair.w_block - &w_e));
    let s = spsd_inv_sqrt(&w_e, rel_tol)?;
    let scaled = &s * (&e_mat * &s);
    let eta = spectral_of_symmetric(&scaled)?;
    let qr = thin_qr(&pair.c_block)?;
    let gap = spsd_pinv(&pair.w_block, rel_tol)? - spsd_pinv(&w_e, rel_tol)?;
    let reduced = &qr.r * (&gap * qr.r.transpose());
    let observed_rel_spec = spectral_of_symmetric(&reduced)? / map.kernel_spectral_norm();
    let bound = if eta < 1.0 { eta / (1.0 - eta) } else { f64::INFINITY };
    Ok(OutOfSampleDiagnostics {
        w_e,
        e_mat,
        eta,
        observed_rel_spec,
        bound,
    })
}

/// The observed gap from the materialized `n x n` matrices; slow, for cross-checks.
pub fn out_of_sample_gap_dense(k: &Matrix, pair: &NystromPair, rel_tol: f64) -> Result<f64> {
    let w_e = empirical_inner_matrix(k, &pair.c_block)?;
    let g = rank_m_nystrom(pair, rel_tol, usize::MAX)?;
    let pe = spsd_pinv(&w_e, rel_tol)?;
    let ge = symmetrize(&(&pair.c_block * (&pe * pair.c_block.transpose())));
    Ok(norms(&(&g - &ge))?.spectral / norms(k)?.spectral)
}

fn spectral_of_symmetric(a: &Matrix) -> Result<f64> {
    Ok(sym_eigenvalues(a)?
        .into_iter()
        .fold(0.0, |acc: f64, l| acc.max(l.abs())))
}

/// Outcome of a randomized sweep.
#[derive(Debug, Clone, Default)]
pub struct SweepReport {
    pub suite: &'static str,
    pub instances: usize,
    pub passes: usize,
    /// Smallest normalized margin seen; negative only for violations beyond the slack.
    pub worst_margin: f64,
    /// Generated instances discarded because they did not meet the preconditions.
    pub rejected: usize,
    pub failures: Vec<String>,
}

impl SweepReport {
    fn new(suite: &'static str) -> Self {
        Self {
            suite,
            worst_margin: f64::INFINITY,
            ..Self::default()
        }
    }

    fn record(&mut self, passed: bool, margin: f64, describe: impl FnOnce() -> String) {
        self.instances += 1;
        self.worst_margin = self.worst_margin.min(margin);
        if passed {
            self.passes += 1;
        } else if self.failures.len() < 10 {
            self.failures.push(describe());
        }
    }

    pub fn all_passed(&self) -> bool {
        self.instances > 0 && self.passes == self.instances
    }
}

fn in_sample_indices(n: usize, m: usize, seed: RngSeed) -> Result<Vec<usize>> {
    match uniform_sample(n, m, seed)? {
        LandmarkSet::InSample(idx) => Ok(idx),
        LandmarkSet::OutOfSample(_) => unreachable!("uniform sampling is in-sample"),
    }
}

/// Random `(n, m, r, rank)` with `n <= 40`, `r < m <= 10`.
fn random_shape(rng: &mut impl Rng) -> (usize, usize, usize, usize) {
    let n = rng.random_range(3..=40);
    let m = rng.random_range(2..=n.min(10));
    let r = rng.random_range(1..m);
    let rank = rng.random_range(1..=n);
    (n, m, r, rank)
}

pub fn theorem1_sweep(instances: usize, seed: RngSeed, rel_tol: f64) -> Result<SweepReport> {
    let mut report = SweepReport::new("thm1");
    let mut rng = seed.rng();
    for t in 0..instances {
        let (n, m, r, rank) = random_shape(&mut rng);
        let s = RngSeed(rng.random());
        let k = random_spsd(n, rank, s)?;
        let idx = in_sample_indices(n, m, s.offset(1))?;
        let c = check_theorem1(&k, &idx, r, rel_tol)?;
        report.record(c.holds, c.margin(), || {
            format!("instance {t}: n={n} m={m} r={r} rank={rank}: {c:?}")
        });
    }
    Ok(report)
}

pub fn theorem2_sweep(instances: usize, seed: RngSeed, rel_tol: f64) -> Result<SweepReport> {
    let mut report = SweepReport::new("thm2");
    let mut rng = seed.rng();
    for t in 0..instances {
        let (n, m_large, r, rank) = random_shape(&mut rng);
        let m_small = rng.random_range(r..=m_large);
        let s = RngSeed(rng.random());
        let k = random_spsd(n, rank, s)?;
        let large = in_sample_indices(n, m_large, s.offset(1))?;
        let small = &large[..m_small];
        let c = check_theorem2(&k, small, &large, r, rel_tol)?;
        report.record(c.holds, c.margin(), || {
            format!("instance {t}: n={n} m={m_small}->{m_large} r={r}: {c:?}")
        });
    }
    Ok(report)
}

/// Smallest eigengap at rank `r` accepted by [`oracle_sweep`].
pub const ORACLE_MIN_GAP: f64 = 1e-6;
/// Agreement required by [`oracle_sweep`].
pub const ORACLE_TOL: f64 = 1e-8;

/// Modified output against `⟦C W^† C^T⟧_r` computed from the materialized matrix.
pub fn oracle_sweep(instances: usize, seed: RngSeed, rel_tol: f64) -> Result<SweepReport> {
    let mut report = SweepReport::new("oracle");
    let mut rng = seed.rng();
    while report.instances < instances {
        let (n, m, r, rank) = random_shape(&mut rng);
        let s = RngSeed(rng.random());
        let k = random_spsd(n, rank, s)?;
        let pair = in_sample_pair(&k, &in_sample_indices(n, m, s.offset(1))?)?;
        let full = rank_m_nystrom(&pair, rel_tol, usize::MAX)?;
        let ev = sym_eigenvalues(&full)?;
        if ev[r - 1] - ev[r] <= ORACLE_MIN_GAP {
            report.rejected += 1;
            continue;
        }
        let want = best_rank_r(&full, r)?.reconstruct_unchecked();
        let got = modified_nystrom(&pair, r, rel_tol)?.reconstruct_unchecked();
        let diff = relative_frobenius_diff(&got, &want);
        let t = report.instances;
        report.record(diff <= ORACLE_TOL, ORACLE_TOL - diff, || {
            format!("instance {t}: n={n} m={m} r={r}: rel diff {diff:e}")
        });
    }
    Ok(report)
}

/// Block-diagonal instances `diag(W, K_22)`: both methods must agree.
pub fn remark1_sweep(instances: usize, seed: RngSeed, rel_tol: f64) -> Result<SweepReport> {
    let mut report = SweepReport::new("remark1");
    let mut rng = seed.rng();
    for t in 0..instances {
        let m = rng.random_range(2..=8);
        let r = rng.random_range(1..=m);
        let n2 = rng.random_range(1..=20);
        let s = RngSeed(rng.random());
        let k = block_diagonal(&random_spsd(m, m, s)?, &random_spsd(n2, rng.random_range(1..=n2), s.offset(1))?);
        let c = check_remark1(&k, m, r, rel_tol)?;
        report.record(c.holds, BLOCK_AGREEMENT_TOL - c.rel_diff, || {
            format!("instance {t}: m={m} r={r} n={}: {c:?}", m + n2)
        });
    }
    Ok(report)
}

/// `diag(a, b)`.
pub fn block_diagonal(a: &Matrix, b: &Matrix) -> Matrix {
    let (p, q) = (a.nrows(), b.nrows());
    Mat::from_fn(p + q, p + q, |i, j| match (i < p, j < p) {
        (true, true) => a[(i, j)],
        (false, false) => b[(i - p, j - p)],
        _ => 0.0,
    })
}

/// Settings for the out-of-sample sweep.
#[derive(Debug, Clone, Copy)]
pub struct Theorem3SweepConfig {
    pub n_range: (usize, usize),
    pub p_range: (usize, usize),
    pub m_range: (usize, usize),
    /// Use uniformly sampled data points instead of K-means centroids.
    pub in_sample: bool,
}

impl Default for Theorem3SweepConfig {
    fn default() -> Self {
        Self {
            n_range: (50, 300),
            p_range: (10, 20),
            m_range: (2, 10),
            in_sample: false,
        }
    }
}

/// Per-instance out-of-sample diagnostics plus a summary.
#[derive(Debug, Clone)]
pub struct Theorem3Sweep {
    pub report: SweepReport,
    pub etas: Vec<f64>,
    pub observed: Vec<f64>,
}

/// Gaussian-kernel instances on standard normal points with the averaged-distance bandwidth.
///
/// Instances whose kernel is numerically singular or whose `η >= 1` are
/// regenerated and counted in `rejected`.
pub fn theorem3_sweep(
    instances: usize,
    seed: RngSeed,
    cfg: Theorem3SweepConfig,
    rel_tol: f64,
) -> Result<Theorem3Sweep> {
    let mut out = Theorem3Sweep {
        report: SweepReport::new(if cfg.in_sample { "thm3-in-sample" } else { "thm3" }),
        etas: Vec::new(),
        observed: Vec::new(),
    };
    let mut rng = seed.rng();
    let mut attempts = 0;
    while out.report.instances < instances {
        attempts += 1;
        if attempts > 20 * instances.max(1) {
            return Err(NystromError::DegenerateData(format!(
                "only {} of {instances} usable instances after {attempts} attempts",
                out.report.instances
            )));
        }
        let n = rng.random_range(cfg.n_range.0..=cfg.n_range.1);
        let p = rng.random_range(cfg.p_range.0..=cfg.p_range.1);
        let m = rng.random_range(cfg.m_range.0..=cfg.m_range.1.min(n));
        let s = RngSeed(rng.random());
        let x = gaussian_points(n, p, s)?;
        let kcfg = KernelConfig::gaussian(bandwidth_heuristic(&x)?)?;
        let k = build_kernel_matrix(&x, &kcfg, DIAGNOSTICS_MAX_N)?;
        let map = match EmpiricalMap::new(&k) {
            Ok(map) => map,
            Err(NystromError::SingularKernel) => {
                out.report.rejected += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let landmarks = if cfg.in_sample {
            uniform_sample(n, m, s.offset(1))?
        } else {
            kmeans_landmarks(&x, m, s.offset(1), KMEANS_MAX_ITER)?
        };
        let pair = build_nystrom_pair(&x, &landmarks, &kcfg)?;
        let d = match theorem3_diagnostics(&map, &pair, rel_tol) {
            Ok(d) => d,
            Err(NystromError::NotPositiveDefinite { .. }) => {
                out.report.rejected += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let Some(holds) = d.holds() else {
            out.report.rejected += 1;
            continue;
        };
        let t = out.report.instances;
        let (eta, obs, bound) = (d.eta, d.observed_rel_spec, d.bound);
        out.report.record(holds, bound - obs, || {
            format!("instance {t}: n={n} p={p} m={m}: eta={eta:e} observed={obs:e} bound={bound:e}")
        });
        out.etas.push(eta);
        out.observed.push(obs);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::DataMatrix;
    use crate::linalg::{max_abs_diff, DEFAULT_PINV_TOL};

    const TOL: f64 = DEFAULT_PINV_TOL;

    fn gaussian_instance(n: usize, p: usize, seed: u64) -> (DataMatrix, KernelConfig, Matrix) {
        let x = gaussian_points(n, p, RngSeed(seed)).unwrap();
        let cfg = KernelConfig::gaussian(bandwidth_heuristic(&x).unwrap()).unwrap();
        let k = build_kernel_matrix(&x, &cfg, 10_000).unwrap();
        (x, cfg, k)
    }

    #[test]
    fn theorem1_on_example1() {
        let k = fixture("example1").unwrap();
        let c = check_theorem1(&k, &[0, 1], 1, TOL).unwrap();
        assert!(c.holds);
        assert!((c.trace_opt / c.kernel_trace_norm - 0.0099).abs() < 1e-4);
        assert!((c.trace_nys / c.kernel_trace_norm - 0.9901).abs() < 1e-4);
    }

    #[test]
    fn theorem1_on_remark2() {
        let c = check_theorem1(&fixture("remark2").unwrap(), &[0, 1], 1, TOL).unwrap();
        assert!(c.holds);
        assert!((c.trace_opt - 1.3299).abs() < 2e-4 && (c.trace_nys - 1.3441).abs() < 2e-4);
    }

    #[test]
    fn theorem2_equal_sets() {
        let k = random_spsd(15, 6, RngSeed(1)).unwrap();
        let c = check_theorem2(&k, &[2, 7, 9], &[2, 7, 9], 2, TOL).unwrap();
        assert_eq!(c.err_small, c.err_large);
        assert!(c.holds);
    }

    #[test]
    fn theorem2_example1() {
        let k = fixture("example1").unwrap();
        let c = check_theorem2(&k, &[0], &[0, 1], 1, TOL).unwrap();
        assert!(c.holds);
        assert!((c.err_small / c.kernel_trace_norm - 1.01 / 102.01).abs() < 1e-12);
        assert!((c.err_large / c.kernel_trace_norm - 1.01 / 102.01).abs() < 1e-12);
    }

    #[test]
    fn theorem2_rejects_non_nested() {
        let k = random_spsd(6, 6, RngSeed(1)).unwrap();
        assert!(matches!(
            check_theorem2(&k, &[0, 5], &[0, 1, 2], 1, TOL),
            Err(NystromError::NotNested(_))
        ));
    }

    #[test]
    fn landmark_regression_on_example1() {
        let c = landmark_regression(TOL).unwrap();
        assert!(c.standard_regressed());
        assert!(c.modified_monotone());
        assert!((c.small.standard.trace - 1.01).abs() < 1e-12);
        assert!((c.large.standard.trace - 101.0).abs() < 1e-10);
    }

    #[test]
    fn reversal_on_remark2() {
        let r = frobenius_reversal(TOL).unwrap();
        assert!(r.reproduced);
    }

    #[test]
    fn remark1_block_diagonal() {
        let k = block_diagonal(
            &random_spsd(4, 4, RngSeed(3)).unwrap(),
            &random_spsd(10, 6, RngSeed(4)).unwrap(),
        );
        let c = check_remark1(&k, 4, 2, TOL).unwrap();
        assert_eq!(c.off_block_max, 0.0);
        assert!(c.holds, "{c:?}");
    }

    #[test]
    fn remark1_identity_block() {
        let k = block_diagonal(&Mat::identity(3, 3), &random_spsd(5, 5, RngSeed(6)).unwrap());
        assert!(check_remark1(&k, 3, 3, TOL).unwrap().holds);
    }

    #[test]
    fn remark1_negative_control_runs() {
        // with K_21 != 0 agreement is not expected; only the report is checked
        let k = random_spsd(12, 12, RngSeed(8)).unwrap();
        let c = check_remark1(&k, 4, 2, TOL).unwrap();
        assert!(c.off_block_max > 0.0);
        assert!(c.rel_diff.is_finite());
    }

    #[test]
    fn empirical_inner_matrix_in_sample() {
        let (_, _, k) = gaussian_instance(60, 12, 2);
        let pair = NystromPair::from_kernel_columns(&k, &[3, 17, 40]).unwrap();
        let w_e = empirical_inner_matrix(&k, &pair.c_block).unwrap();
        assert!(max_abs_diff(&w_e, &pair.w_block) < 1e-10);
    }

    #[test]
    fn empirical_inner_matrix_full() {
        let (_, _, k) = gaussian_instance(40, 12, 3);
        let w_e = empirical_inner_matrix(&k, &k).unwrap();
        assert!(max_abs_diff(&w_e, &k) < 1e-9);
    }

    #[test]
    fn empirical_inner_matrix_centroids() {
        let (x, cfg, k) = gaussian_instance(100, 12, 4);
        let lm = kmeans_landmarks(&x, 5, RngSeed(1), KMEANS_MAX_ITER).unwrap();
        let pair = build_nystrom_pair(&x, &lm, &cfg).unwrap();
        let w_e = empirical_inner_matrix(&k, &pair.c_block).unwrap();
        assert!(*sym_eigenvalues(&w_e).unwrap().last().unwrap() > 0.0);
        assert!(norms(&(&pair.w_block - &w_e)).unwrap().spectral < 0.5);
    }

    #[test]
    fn singular_kernel_is_rejected() {
        let x = DataMatrix::from_rows(&[vec![0.0], vec![0.0], vec![1.0]]).unwrap();
        let k = build_kernel_matrix(&x, &KernelConfig::gaussian(1.0).unwrap(), 10).unwrap();
        assert!(matches!(EmpiricalMap::new(&k), Err(NystromError::SingularKernel)));
    }

    #[test]
    fn in_sample_diagnostics_vanish() {
        let (_, _, k) = gaussian_instance(80, 12, 5);
        let map = EmpiricalMap::new(&k).unwrap();
        let pair = NystromPair::from_kernel_columns(&k, &[1, 30, 55, 79]).unwrap();
        let d = theorem3_diagnostics(&map, &pair, TOL).unwrap();
        assert!(d.eta <= 1e-10, "{}", d.eta);
        assert!(d.observed_rel_spec <= 1e-10);
        assert!(d.bound <= 1e-10);
        assert_eq!(d.holds(), Some(true));
    }

    #[test]
    fn reduced_gap_matches_dense_gap() {
        for seed in 0..5 {
            let (x, cfg, k) = gaussian_instance(70, 10, 10 + seed);
            let map = EmpiricalMap::new(&k).unwrap();
            let lm = kmeans_landmarks(&x, 4, RngSeed(seed), KMEANS_MAX_ITER).unwrap();
            let pair = build_nystrom_pair(&x, &lm, &cfg).unwrap();
            let d = theorem3_diagnostics(&map, &pair, TOL).unwrap();
            let dense = out_of_sample_gap_dense(&k, &pair, TOL).unwrap();
            assert!((d.observed_rel_spec - dense).abs() <= 1e-8 * dense.max(1e-12), "{} {}", d.observed_rel_spec, dense);
        }
    }

    #[test]
    fn bound_holds_in_two_dimensions() {
        // p = 2 kernels are badly conditioned; keep n small so K stays invertible
        let x = gaussian_points(12, 2, RngSeed(21)).unwrap();
        let cfg = KernelConfig::gaussian(bandwidth_heuristic(&x).unwrap()).unwrap();
        let k = build_kernel_matrix(&x, &cfg, 100).unwrap();
        let map = EmpiricalMap::new(&k).unwrap();
        let lm = kmeans_landmarks(&x, 3, RngSeed(2), KMEANS_MAX_ITER).unwrap();
        let d = theorem3_diagnostics(&map, &build_nystrom_pair(&x, &lm, &cfg).unwrap(), TOL).unwrap();
        assert!(d.eta >= 0.0);
        if d.bound_applies() {
            assert_eq!(d.holds(), Some(true), "{d:?}");
        }
    }

    #[test]
    fn small_sweeps_pass() {
        assert!(theorem1_sweep(40, RngSeed(1), TOL).unwrap().all_passed());
        assert!(theorem2_sweep(40, RngSeed(2), TOL).unwrap().all_passed());
        assert!(oracle_sweep(20, RngSeed(3), TOL).unwrap().all_passed());
        assert!(remark1_sweep(20, RngSeed(4), TOL).unwrap().all_passed());
        let cfg = Theorem3SweepConfig {
            n_range: (40, 80),
            ..Default::default()
        };
        assert!(theorem3_sweep(5, RngSeed(5), cfg, TOL).unwrap().report.all_passed());
    }
}
