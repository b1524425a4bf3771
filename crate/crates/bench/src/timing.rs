//! Wall-clock comparison of the two pipelines.
//!
//! Two times are kept per run: the factorization alone, and the factorization
//! plus evaluation of the `C` and `W` blocks from the data. The second carries
//! the `O(pnm)` kernel cost shared by both methods, which is what makes them
//! comparable when `p` is large. The full kernel matrix is never built.

use std::io::Write;
use std::time::Instant;

use nystrom_core::{evd_baseline, fixture};

use crate::config::{DataSource, ExperimentConfig, Method};
use crate::error::{BenchError, Result};
use crate::experiment::{
    effective_grid, factorize, fmt_sig, landmark_pair, load_dataset, select_landmarks,
};

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub method: Method,
    pub m: usize,
    pub trials: usize,
    pub mean_factor_seconds: f64,
    pub std_factor_seconds: f64,
    pub mean_pipeline_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct TimingOutput {
    pub rows: Vec<TimingRow>,
}

impl TimingOutput {
    pub fn row(&self, method: Method, m: usize) -> Option<&TimingRow> {
        self.rows.iter().find(|r| r.method == method && r.m == m)
    }

    /// Mean modified time over mean standard time, using pipeline times.
    pub fn ratio(&self, m: usize) -> Option<f64> {
        let s = self.row(Method::Standard, m)?;
        let q = self.row(Method::Modified, m)?;
        Some(q.mean_pipeline_seconds / s.mean_pipeline_seconds)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "method",
            "m",
            "trials",
            "mean_factor_seconds",
            "std_factor_seconds",
            "mean_pipeline_seconds",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.method.as_str(),
                &r.m.to_string(),
                &r.trials.to_string(),
                &fmt_sig(r.mean_factor_seconds),
                &fmt_sig(r.std_factor_seconds),
                &fmt_sig(r.mean_pipeline_seconds),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

pub fn run_timing(cfg: &ExperimentConfig) -> Result<TimingOutput> {
    cfg.validate()?;
    let data = load_dataset(cfg)?;
    let fixture_k = match &cfg.source {
        DataSource::Fixture(name) => Some(fixture(name)?),
        _ => None,
    };
    let n = data
        .n()
        .or(fixture_k.as_ref().map(|k| k.nrows()))
        .expect("points or a fixture");
    let grid = effective_grid(cfg);
    if let Some(&m) = grid.iter().find(|&&m| m > n) {
        return Err(BenchError::Config(format!("m = {m} exceeds n = {n}")));
    }

    let mut rows = Vec::new();
    for &m in &grid {
        let mut times: Vec<(Method, Vec<f64>, Vec<f64>)> = cfg
            .methods
            .iter()
            .filter(|&&mt| mt != Method::Evd)
            .map(|&mt| (mt, Vec::new(), Vec::new()))
            .collect();
        for trial in 0..cfg.trials {
            let (lm, _) = select_landmarks(cfg, &data, n, m, trial)?;
            for (method, factor, pipeline) in times.iter_mut() {
                // untimed warm-up on the first trial
                if trial == 0 {
                    let pair = landmark_pair(&data, fixture_k.as_ref(), &lm)?;
                    factorize(*method, &pair, cfg.rank, cfg.pinv_tol)?;
                }
                let t0 = Instant::now();
                let pair = landmark_pair(&data, fixture_k.as_ref(), &lm)?;
                let t1 = Instant::now();
                let f = factorize(*method, &pair, cfg.rank, cfg.pinv_tol)?;
                let t2 = Instant::now();
                std::hint::black_box(&f);
                factor.push((t2 - t1).as_secs_f64());
                pipeline.push((t2 - t0).as_secs_f64());
            }
        }
        for (method, factor, pipeline) in times {
            let (mean, std) = mean_std(&factor);
            rows.push(TimingRow {
                method,
                m,
                trials: cfg.trials,
                mean_factor_seconds: mean,
                std_factor_seconds: std,
                mean_pipeline_seconds: mean_std(&pipeline).0,
            });
        }
    }

    if cfg.methods.contains(&Method::Evd) {
        let k = match fixture_k {
            Some(k) => k,
            None => crate::experiment::kernel_matrix(cfg, &data)?,
        };
        let start = Instant::now();
        std::hint::black_box(evd_baseline(&k, cfg.rank, cfg.dense_cap)?);
        let secs = start.elapsed().as_secs_f64();
        for &m in &grid {
            rows.push(TimingRow {
                method: Method::Evd,
                m,
                trials: 1,
                mean_factor_seconds: secs,
                std_factor_seconds: 0.0,
                mean_pipeline_seconds: secs,
            });
        }
    }
    Ok(TimingOutput { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Synthetic;

    #[test]
    fn smoke() {
        let mut cfg = ExperimentConfig::new(DataSource::Synthetic(Synthetic::SparseBinary {
            p: 50,
            density: 0.1,
        }));
        cfg.subsample = Some(100);
        cfg.trials = 2;
        cfg.m_grid = vec![2, 4];
        cfg.methods = vec![Method::Standard, Method::Modified];
        let out = run_timing(&cfg).unwrap();
        assert_eq!(out.rows.len(), 4);
        for r in &out.rows {
            assert!(r.mean_factor_seconds >= 0.0);
            assert!(r.mean_pipeline_seconds >= r.mean_factor_seconds);
        }
        assert!(out.ratio(4).unwrap() > 0.0);
        let mut buf = Vec::new();
        out.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
    }

    #[test]
    fn fixture_with_baseline() {
        let mut cfg = ExperimentConfig::new(DataSource::Fixture("remark2".into()));
        cfg.rank = 1;
        cfg.trials = 1;
        cfg.columns = Some(vec![0, 1]);
        let out = run_timing(&cfg).unwrap();
        assert!(out.row(Method::Evd, 2).is_some());
        assert!(out.ratio(2).is_some());
    }
}
