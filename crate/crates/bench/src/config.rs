use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use nystrom_core::{NormKind, DEFAULT_DENSE_CAP, DEFAULT_PINV_TOL};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Standard,
    Modified,
    Evd,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Standard => "standard",
            Method::Modified => "modified",
            Method::Evd => "evd",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" | "nys" => Ok(Method::Standard),
            "modified" | "qr" | "opt" => Ok(Method::Modified),
            "evd" | "baseline" => Ok(Method::Evd),
            other => Err(BenchError::Config(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Selection {
    Uniform,
    Kmeans,
}

impl Selection {
    pub fn as_str(self) -> &'static str {
        match self {
            Selection::Uniform => "uniform",
            Selection::Kmeans => "kmeans",
        }
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Selection {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(Selection::Uniform),
            "kmeans" | "k-means" => Ok(Selection::Kmeans),
            other => Err(BenchError::Config(format!("unknown selection `{other}`"))),
        }
    }
}

/// Generated point clouds usable in place of a data file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Synthetic {
    /// 0/1 features present with probability `density`.
    SparseBinary { p: usize, density: f64 },
    /// Standard normal coordinates.
    Gaussian { p: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// LIBSVM file, with an optional declared dimension.
    File { path: PathBuf, dim: Option<usize> },
    /// One of the named kernel matrices; only fixed or uniform in-sample landmarks apply.
    Fixture(String),
    Synthetic(Synthetic),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: DataSource,
    /// Points kept after subsampling (all when `None`); the size of synthetic data.
    pub subsample: Option<usize>,
    pub rank: usize,
    pub m_grid: Vec<usize>,
    pub trials: usize,
    pub selection: Selection,
    /// 0-based landmark columns used instead of random selection.
    pub columns: Option<Vec<usize>>,
    pub methods: Vec<Method>,
    pub norms: Vec<NormKind>,
    pub seed: u64,
    pub pinv_tol: f64,
    pub dense_cap: usize,
    /// Write zero instead of measured seconds so that output is reproducible byte for byte.
    pub omit_timing: bool,
}

/// Synthetic data size when no subsample size is given.
pub const DEFAULT_SYNTHETIC_N: usize = 2000;

impl ExperimentConfig {
    pub fn new(source: DataSource) -> Self {
        Self {
            source,
            subsample: None,
            rank: 2,
            m_grid: default_m_grid(2),
            trials: 50,
            selection: Selection::Uniform,
            columns: None,
            methods: vec![Method::Standard, Method::Modified, Method::Evd],
            norms: vec![NormKind::Trace, NormKind::Frobenius],
            seed: 0,
            pinv_tol: DEFAULT_PINV_TOL,
            dense_cap: DEFAULT_DENSE_CAP,
            omit_timing: false,
        }
    }

    /// Checks the cross-field constraints.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(BenchError::Config(msg));
        if self.rank == 0 {
            return bad("rank must be at least 1".into());
        }
        if self.trials == 0 {
            return bad("at least one trial is required".into());
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        if self.norms.is_empty() {
            return bad("no norms selected".into());
        }
        if !(self.pinv_tol > 0.0 && self.pinv_tol < 1.0) {
            return bad(format!("pinv tolerance must lie in (0,1), got {}", self.pinv_tol));
        }
        match &self.columns {
            Some(cols) => {
                if cols.len() < self.rank {
                    return bad(format!(
                        "{} columns cannot support rank {}",
                        cols.len(),
                        self.rank
                    ));
                }
            }
            None => {
                if self.m_grid.is_empty() {
                    return bad("empty m grid".into());
                }
                if let Some(&m) = self.m_grid.iter().find(|&&m| m < self.rank) {
                    return bad(format!("m = {m} is below the rank {}", self.rank));
                }
            }
        }
        if matches!(self.source, DataSource::Fixture(_)) && self.selection == Selection::Kmeans {
            return bad("K-means landmarks need data points, not a fixed kernel matrix".into());
        }
        if let DataSource::Synthetic(Synthetic::SparseBinary { density, .. }) = self.source {
            if !(density > 0.0 && density <= 1.0) {
                return bad(format!("density must lie in (0,1], got {density}"));
            }
        }
        Ok(())
    }
}

/// `r, 2r, ..., 5r`.
pub fn default_m_grid(rank: usize) -> Vec<usize> {
    (1..=5).map(|k| k * rank).collect()
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim)
}

const MAX_GRID_LEN: usize = 10_000;

/// Comma-separated positive integers; `a..b` and `a..=b` expand to ranges.
pub fn parse_m_grid(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for tok in split_list(s) {
        let parse = |t: &str| -> Result<usize> {
            t.trim()
                .parse()
                .map_err(|_| BenchError::Config(format!("invalid integer `{t}` in m grid")))
        };
        let range = if let Some((a, b)) = tok.split_once("..=") {
            let (a, b) = (parse(a)?, parse(b)?);
            a..b.saturating_add(1)
        } else if let Some((a, b)) = tok.split_once("..") {
            parse(a)?..parse(b)?
        } else {
            let a = parse(tok)?;
            a..a.saturating_add(1)
        };
        if out.len() + range.len() > MAX_GRID_LEN {
            return Err(BenchError::Config("m grid too long".into()));
        }
        out.extend(range);
    }
    if out.is_empty() || out.contains(&0) {
        return Err(BenchError::Config(format!("m grid `{s}` must list positive values")));
    }
    Ok(out)
}

fn parse_unique<T: FromStr<Err = E> + PartialEq, E>(s: &str, what: &str) -> Result<Vec<T>>
where
    BenchError: From<E>,
{
    let mut out: Vec<T> = Vec::new();
    for tok in split_list(s) {
        let v: T = tok.parse()?;
        if out.contains(&v) {
            return Err(BenchError::Config(format!("{what} `{tok}` listed twice")));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    parse_unique(s, "method")
}

pub fn parse_norms(s: &str) -> Result<Vec<NormKind>> {
    parse_unique(s, "norm")
}

/// Comma-separated 1-based column numbers, returned 0-based.
pub fn parse_columns(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for tok in split_list(s) {
        let c: usize = tok
            .parse()
            .map_err(|_| BenchError::Config(format!("invalid column `{tok}`")))?;
        if c == 0 {
            return Err(BenchError::Config("columns are numbered from 1".into()));
        }
        if out.contains(&(c - 1)) {
            return Err(BenchError::Config(format!("column {c} listed twice")));
        }
        out.push(c - 1);
    }
    Ok(out)
}
