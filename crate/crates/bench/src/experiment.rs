//! Approximation-error experiments over an m grid and repeated trials.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use nystrom_core::data_io::{gaussian_points, synthetic_sparse_binary};
use nystrom_core::{
    bandwidth_heuristic, build_kernel_matrix, build_nystrom_pair, evd_baseline, fixture,
    kmeans_landmarks, modified_nystrom, read_libsvm, standard_nystrom, subsample, uniform_sample,
    DataMatrix, ErrorEvaluator, ErrorRoute, FixedRankFactors, KernelConfig, LandmarkSet, Matrix,
    NormKind, NystromPair, RngSeed, KMEANS_MAX_ITER,
};

use crate::config::{
    DataSource, ExperimentConfig, Method, Selection, Synthetic, DEFAULT_SYNTHETIC_N,
};
use crate::error::{BenchError, Result};

/// CSV header of the per-trial output.
pub const RECORD_HEADER: [&str; 7] = ["method", "selection", "m", "trial", "norm", "rel_error", "seconds"];

/// Formats a float with 10 significant digits.
pub fn fmt_sig(v: f64) -> String {
    format!("{v:.9e}")
}

/// Seed for the landmarks of trial `t` at grid value `m`.
///
/// Trial `t` is driven by `base + t`; mixing in `m` makes the draws for
/// different grid values independent, while all methods share them.
pub fn landmark_seed(base: u64, trial: usize, m: usize) -> RngSeed {
    let mut z = base
        .wrapping_add(trial as u64)
        .wrapping_add((m as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    RngSeed(z ^ (z >> 31))
}

/// Data points (when the source has them) and the kernel settings.
pub struct Dataset {
    pub points: Option<DataMatrix>,
    pub kernel: Option<KernelConfig>,
}

impl Dataset {
    pub fn n(&self) -> Option<usize> {
        self.points.as_ref().map(DataMatrix::n)
    }
}

/// Loads, subsamples or generates the data points of `cfg`; fixtures have none.
pub fn load_points(cfg: &ExperimentConfig) -> Result<Option<DataMatrix>> {
    let seed = RngSeed(cfg.seed);
    let x = match &cfg.source {
        DataSource::Fixture(_) => {
            if cfg.subsample.is_some() {
                return Err(BenchError::Config("fixtures cannot be subsampled".into()));
            }
            return Ok(None);
        }
        DataSource::File { path, dim } => {
            let x = read_libsvm(path, *dim)?;
            match cfg.subsample {
                Some(n) => subsample(&x, n, seed)?,
                None => x,
            }
        }
        DataSource::Synthetic(s) => {
            let n = cfg.subsample.unwrap_or(DEFAULT_SYNTHETIC_N);
            match *s {
                Synthetic::SparseBinary { p, density } => {
                    synthetic_sparse_binary(n, p, density, seed)?
                }
                Synthetic::Gaussian { p } => gaussian_points(n, p, seed)?,
            }
        }
    };
    Ok(Some(x))
}

/// Points plus the Gaussian kernel with the averaged-distance bandwidth.
pub fn load_dataset(cfg: &ExperimentConfig) -> Result<Dataset> {
    let points = load_points(cfg)?;
    let kernel = match &points {
        Some(x) => Some(KernelConfig::gaussian(bandwidth_heuristic(x)?)?),
        None => None,
    };
    Ok(Dataset { points, kernel })
}

/// The full kernel matrix of the dataset, or the fixture matrix.
pub fn kernel_matrix(cfg: &ExperimentConfig, data: &Dataset) -> Result<Matrix> {
    match (&cfg.source, &data.points, &data.kernel) {
        (DataSource::Fixture(name), _, _) => Ok(fixture(name)?),
        (_, Some(x), Some(k)) => Ok(build_kernel_matrix(x, k, cfg.dense_cap)?),
        _ => unreachable!("data sources other than fixtures always have points"),
    }
}

/// Landmarks for one `(m, trial)` cell, and the label written to the output.
pub fn select_landmarks(
    cfg: &ExperimentConfig,
    data: &Dataset,
    n: usize,
    m: usize,
    trial: usize,
) -> Result<(LandmarkSet, &'static str)> {
    if let Some(cols) = &cfg.columns {
        return Ok((LandmarkSet::InSample(cols.clone()), "fixed"));
    }
    let seed = landmark_seed(cfg.seed, trial, m);
    Ok(match cfg.selection {
        Selection::Uniform => (uniform_sample(n, m, seed)?, "uniform"),
        Selection::Kmeans => {
            let x = data.points.as_ref().ok_or_else(|| {
                BenchError::Config("K-means landmarks need data points".into())
            })?;
            (kmeans_landmarks(x, m, seed, KMEANS_MAX_ITER)?, "kmeans")
        }
    })
}

/// `C` and `W` for a landmark set, evaluated from data or sliced from a fixture.
pub fn landmark_pair(data: &Dataset, k: Option<&Matrix>, lm: &LandmarkSet) -> Result<NystromPair> {
    match (&data.points, &data.kernel, lm) {
        (Some(x), Some(kc), _) => Ok(build_nystrom_pair(x, lm, kc)?),
        (None, _, LandmarkSet::InSample(idx)) => {
            let k = k.expect("fixtures always come with their matrix");
            Ok(NystromPair::from_kernel_columns(k, idx)?)
        }
        _ => Err(BenchError::Config("out-of-sample landmarks need data points".into())),
    }
}

/// Grid values actually run: the fixed column count, or the configured grid.
pub fn effective_grid(cfg: &ExperimentConfig) -> Vec<usize> {
    match &cfg.columns {
        Some(cols) => vec![cols.len()],
        None => cfg.m_grid.clone(),
    }
}

pub fn factorize(
    method: Method,
    pair: &NystromPair,
    rank: usize,
    pinv_tol: f64,
) -> Result<FixedRankFactors> {
    Ok(match method {
        Method::Standard => standard_nystrom(pair, rank, pinv_tol)?,
        Method::Modified => modified_nystrom(pair, rank, pinv_tol)?,
        Method::Evd => unreachable!("the baseline does not use landmarks"),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub method: Method,
    pub selection: &'static str,
    pub m: usize,
    pub trial: usize,
    pub errors: Vec<(NormKind, f64)>,
    pub seconds: f64,
}

impl ExperimentRecord {
    pub fn error(&self, norm: NormKind) -> Option<f64> {
        self.errors.iter().find(|(k, _)| *k == norm).map(|&(_, e)| e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: Method,
    pub selection: &'static str,
    pub m: usize,
    pub norm: NormKind,
    pub mean: f64,
    /// Sample standard deviation; zero for a single trial.
    pub std: f64,
    pub trials: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub records: Vec<ExperimentRecord>,
    pub summary: Vec<SummaryRow>,
    /// Points used after subsampling.
    pub n: usize,
}

impl ExperimentOutput {
    pub fn summary_for(&self, method: Method, m: usize, norm: NormKind) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|s| s.method == method && s.m == m && s.norm == norm)
    }

    pub fn record(&self, method: Method, m: usize, trial: usize) -> Option<&ExperimentRecord> {
        self.records
            .iter()
            .find(|r| r.method == method && r.m == m && r.trial == trial)
    }
}

/// Runs every `(method, m, trial)` cell. The kernel matrix is built once.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let data = load_dataset(cfg)?;
    let k = kernel_matrix(cfg, &data)?;
    let n = k.nrows();
    if let Some(cols) = &cfg.columns {
        if let Some(&c) = cols.iter().find(|&&c| c >= n) {
            return Err(BenchError::Config(format!("column {} exceeds n = {n}", c + 1)));
        }
    }
    let grid = effective_grid(cfg);
    if let Some(&m) = grid.iter().find(|&&m| m > n) {
        return Err(BenchError::Config(format!("m = {m} exceeds n = {n}")));
    }
    log::info!("kernel matrix of {n} points ready");
    let eval = ErrorEvaluator::new(k, ErrorRoute::Auto)?;

    let baseline = if cfg.methods.contains(&Method::Evd) {
        let start = Instant::now();
        let f = evd_baseline(eval.kernel(), cfg.rank, cfg.dense_cap)?;
        let secs = start.elapsed().as_secs_f64();
        Some((eval.relative_errors(&f, &cfg.norms)?, secs))
    } else {
        None
    };

    let mut records = Vec::new();
    for &m in &grid {
        for trial in 0..cfg.trials {
            let (lm, label) = select_landmarks(cfg, &data, n, m, trial)?;
            let pair = landmark_pair(&data, Some(eval.kernel()), &lm)?;
            for &method in &cfg.methods {
                let (errs, seconds) = match method {
                    Method::Evd => baseline.clone().expect("baseline computed"),
                    _ => {
                        let start = Instant::now();
                        let f = factorize(method, &pair, cfg.rank, cfg.pinv_tol)?;
                        let secs = start.elapsed().as_secs_f64();
                        (eval.relative_errors(&f, &cfg.norms)?, secs)
                    }
                };
                records.push(ExperimentRecord {
                    method,
                    selection: label,
                    m,
                    trial,
                    errors: cfg.norms.iter().copied().zip(errs).collect(),
                    seconds: if cfg.omit_timing { 0.0 } else { seconds },
                });
            }
        }
        log::info!("m = {m} done");
    }
    let summary = summarize(&records);
    Ok(ExperimentOutput { records, summary, n })
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Mean and sample standard deviation per `(method, selection, m, norm)`.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(usize, Method, &'static str, NormKind), Vec<f64>> = BTreeMap::new();
    for r in records {
        for &(norm, e) in &r.errors {
            groups.entry((r.m, r.method, r.selection, norm)).or_default().push(e);
        }
    }
    groups
        .into_iter()
        .map(|((m, method, selection, norm), v)| {
            let (mean, std) = mean_std(&v);
            SummaryRow {
                method,
                selection,
                m,
                norm,
                mean,
                std,
                trials: v.len(),
            }
        })
        .collect()
}

pub fn write_records<W: Write>(out: W, records: &[ExperimentRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        for &(norm, e) in &r.errors {
            w.write_record([
                r.method.as_str(),
                r.selection,
                &r.m.to_string(),
                &r.trial.to_string(),
                norm.as_str(),
                &fmt_sig(e),
                &fmt_sig(r.seconds),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(out: W, summary: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "selection", "m", "norm", "mean", "std", "trials"])?;
    for s in summary {
        w.write_record([
            s.method.as_str(),
            s.selection,
            &s.m.to_string(),
            s.norm.as_str(),
            &fmt_sig(s.mean),
            &fmt_sig(s.std),
            &s.trials.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
