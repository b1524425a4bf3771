//! Verification suites: randomized sweeps, fixed witnesses and the out-of-sample bound on data.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nystrom_core::verify::{
    frobenius_reversal, landmark_regression, oracle_sweep, remark1_sweep, theorem1_sweep,
    theorem2_sweep, theorem3_diagnostics, theorem3_sweep, EmpiricalMap, SweepReport,
    Theorem3SweepConfig,
};
use nystrom_core::{kmeans_landmarks, uniform_sample, RngSeed, KMEANS_MAX_ITER};

use crate::config::ExperimentConfig;
use crate::error::{BenchError, Result};
use crate::experiment::{fmt_sig, kernel_matrix, landmark_pair, landmark_seed, load_dataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Thm1,
    Thm2,
    Thm3,
    Remarks,
    Oracle,
    All,
}

impl FromStr for Suite {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "thm1" => Ok(Suite::Thm1),
            "thm2" => Ok(Suite::Thm2),
            "thm3" => Ok(Suite::Thm3),
            "remarks" => Ok(Suite::Remarks),
            "oracle" => Ok(Suite::Oracle),
            "all" => Ok(Suite::All),
            other => Err(BenchError::Config(format!("unknown suite `{other}`"))),
        }
    }
}

/// One named check with pass counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub suite: String,
    pub check: String,
    pub instances: usize,
    pub passes: usize,
    /// Smallest normalized margin; negative only for violations.
    pub worst_margin: f64,
    pub detail: String,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.instances > 0 && self.passes == self.instances
    }

    fn from_sweep(check: &str, r: &SweepReport) -> Self {
        let mut detail = format!("rejected={}", r.rejected);
        for f in &r.failures {
            detail.push_str("; ");
            detail.push_str(f);
        }
        Self {
            suite: r.suite.to_string(),
            check: check.to_string(),
            instances: r.instances,
            passes: r.passes,
            worst_margin: r.worst_margin,
            detail,
        }
    }

    fn single(suite: &str, check: &str, passed: bool, margin: f64, detail: String) -> Self {
        Self {
            suite: suite.to_string(),
            check: check.to_string(),
            instances: 1,
            passes: usize::from(passed),
            worst_margin: margin,
            detail,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["suite", "check", "instances", "passes", "worst_margin", "detail"])?;
        for c in &self.checks {
            w.write_record([
                c.suite.as_str(),
                c.check.as_str(),
                &c.instances.to_string(),
                &c.passes.to_string(),
                &fmt_sig(c.worst_margin),
                c.detail.as_str(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {}/{}: {}/{} passed, worst margin {:.3e} ({})",
                if c.passed() { "PASS" } else { "FAIL" },
                c.suite,
                c.check,
                c.passes,
                c.instances,
                c.worst_margin,
                c.detail
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub suite: Suite,
    pub instances: usize,
    pub seed: u64,
    pub pinv_tol: f64,
    /// Data for the out-of-sample suite; random Gaussian instances when `None`.
    pub data: Option<ExperimentConfig>,
    /// Use uniformly sampled data points as landmarks in the out-of-sample suite.
    pub in_sample: bool,
}

impl VerifyConfig {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            instances: 500,
            seed: 0,
            pinv_tol: nystrom_core::DEFAULT_PINV_TOL,
            data: None,
            in_sample: false,
        }
    }
}

fn remarks(cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    let seed = RngSeed(cfg.seed);
    let mut out = vec![CheckOutcome::from_sweep(
        "block-diagonal agreement",
        &remark1_sweep(cfg.instances, seed, cfg.pinv_tol)?,
    )];
    let rev = frobenius_reversal(cfg.pinv_tol)?;
    let c = rev.comparison;
    out.push(CheckOutcome::single(
        "remarks",
        "frobenius reversal",
        rev.reproduced,
        (c.modified.frobenius - c.standard.frobenius).min(c.standard.trace - c.modified.trace),
        format!(
            "trace std={:.4} mod={:.4}; frobenius std={:.4} mod={:.4}",
            c.standard.trace, c.modified.trace, c.standard.frobenius, c.modified.frobenius
        ),
    ));
    let reg = landmark_regression(cfg.pinv_tol)?;
    let passed = reg.standard_regressed() && reg.modified_monotone();
    out.push(CheckOutcome::single(
        "remarks",
        "standard regression with more landmarks",
        passed,
        reg.large.standard.trace - reg.small.standard.trace,
        format!(
            "standard trace {:.4} -> {:.4}, frobenius {:.4} -> {:.4}; modified trace {:.4} -> {:.4}",
            reg.small.standard.trace,
            reg.large.standard.trace,
            reg.small.standard.frobenius,
            reg.large.standard.frobenius,
            reg.small.modified.trace,
            reg.large.modified.trace
        ),
    ));
    Ok(out)
}

/// Per-m results of the out-of-sample bound on a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundOnData {
    pub m: usize,
    pub trials: usize,
    pub holds: usize,
    /// Trials with `η >= 1`, where the bound does not apply.
    pub vacuous: usize,
    pub mean_observed: f64,
    pub max_observed: f64,
    pub max_eta: f64,
    /// Smallest `bound - observed` over trials where the bound applies.
    pub min_slack: f64,
}

/// The bound on a dataset: one K-means (or uniform) landmark set per `(m, trial)`.
pub fn theorem3_on_data(
    data_cfg: &ExperimentConfig,
    in_sample: bool,
    pinv_tol: f64,
) -> Result<Vec<BoundOnData>> {
    let data = load_dataset(data_cfg)?;
    let x = data
        .points
        .as_ref()
        .ok_or_else(|| BenchError::Config("the out-of-sample suite needs data points".into()))?;
    let k = kernel_matrix(data_cfg, &data)?;
    let map = EmpiricalMap::new(&k)?;
    let mut rows = Vec::new();
    for &m in &data_cfg.m_grid {
        let mut row = BoundOnData {
            m,
            trials: data_cfg.trials,
            holds: 0,
            vacuous: 0,
            mean_observed: 0.0,
            max_observed: 0.0,
            max_eta: 0.0,
            min_slack: f64::INFINITY,
        };
        for t in 0..data_cfg.trials {
            let seed = landmark_seed(data_cfg.seed, t, m);
            let lm = if in_sample {
                uniform_sample(x.n(), m, seed)?
            } else {
                kmeans_landmarks(x, m, seed, KMEANS_MAX_ITER)?
            };
            let pair = landmark_pair(&data, None, &lm)?;
            let d = theorem3_diagnostics(&map, &pair, pinv_tol)?;
            if d.bound_applies() {
                row.min_slack = row.min_slack.min(d.bound - d.observed_rel_spec);
            }
            match d.holds() {
                Some(true) => row.holds += 1,
                Some(false) => {}
                None => row.vacuous += 1,
            }
            row.mean_observed += d.observed_rel_spec / data_cfg.trials as f64;
            row.max_observed = row.max_observed.max(d.observed_rel_spec);
            row.max_eta = row.max_eta.max(d.eta);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn theorem3(cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    let seed = RngSeed(cfg.seed);
    let Some(data_cfg) = &cfg.data else {
        let sweep_cfg = Theorem3SweepConfig {
            in_sample: cfg.in_sample,
            ..Default::default()
        };
        let s = theorem3_sweep(cfg.instances, seed, sweep_cfg, cfg.pinv_tol)?;
        let max_eta = s.etas.iter().copied().fold(0.0, f64::max);
        let mut c = CheckOutcome::from_sweep("random gaussian instances", &s.report);
        c.detail = format!("max eta={max_eta:.3e}; {}", c.detail);
        return Ok(vec![c]);
    };
    let rows = theorem3_on_data(data_cfg, cfg.in_sample, cfg.pinv_tol)?;
    Ok(rows
        .iter()
        .map(|r| CheckOutcome {
            suite: "thm3".into(),
            check: format!("m={}", r.m),
            // trials where the bound is vacuous cannot fail it
            instances: r.trials - r.vacuous,
            passes: r.holds,
            worst_margin: r.min_slack,
            detail: format!(
                "mean observed={:.3e} max observed={:.3e} max eta={:.3e} vacuous={}",
                r.mean_observed, r.max_observed, r.max_eta, r.vacuous
            ),
        })
        .collect())
}

pub fn run_verification(cfg: &VerifyConfig) -> Result<VerificationReport> {
    if cfg.instances == 0 {
        return Err(BenchError::Config("at least one instance is required".into()));
    }
    let seed = RngSeed(cfg.seed);
    let mut report = VerificationReport::default();
    let wants = |s: Suite| cfg.suite == s || cfg.suite == Suite::All;
    if wants(Suite::Thm1) {
        let r = theorem1_sweep(cfg.instances, seed, cfg.pinv_tol)?;
        report.checks.push(CheckOutcome::from_sweep("trace dominance", &r));
    }
    if wants(Suite::Thm2) {
        let r = theorem2_sweep(cfg.instances, seed, cfg.pinv_tol)?;
        report.checks.push(CheckOutcome::from_sweep("nested monotonicity", &r));
    }
    if wants(Suite::Oracle) {
        let r = oracle_sweep(cfg.instances, seed, cfg.pinv_tol)?;
        report.checks.push(CheckOutcome::from_sweep("truncated rank-m oracle", &r));
    }
    if wants(Suite::Remarks) {
        report.checks.extend(remarks(cfg)?);
    }
    if wants(Suite::Thm3) {
        report.checks.extend(theorem3(cfg)?);
    }
    Ok(report)
}
