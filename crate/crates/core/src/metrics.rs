//! Relative approximation errors `‖K - G‖ / ‖K‖` in the trace, Frobenius and spectral norms.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{NystromError, Result};
use crate::linalg::{frobenius, norms, sym_eigenvalues, Matrix};
use crate::nystrom::FixedRankFactors;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NormKind {
    Trace,
    Frobenius,
    Spectral,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::Trace, NormKind::Frobenius, NormKind::Spectral];

    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::Trace => "trace",
            NormKind::Frobenius => "frobenius",
            NormKind::Spectral => "spectral",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormKind {
    type Err = NystromError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "trace" | "nuclear" => Ok(NormKind::Trace),
            "frobenius" | "fro" => Ok(NormKind::Frobenius),
            "spectral" | "2" => Ok(NormKind::Spectral),
            other => Err(NystromError::InvalidParameter(format!("unknown norm `{other}`"))),
        }
    }
}

/// How the trace norm of a residual is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorRoute {
    /// Eigenvalues of the materialized residual: `Σ |λ_i(K - G)|`.
    Exact,
    /// `trace(K - G)`, exact whenever `K - G` is SPSD.
    ///
    /// That holds for every approximation in this crate: `K - C W^† C^T` is a
    /// generalized Schur complement of the (SPSD) kernel matrix of data and
    /// landmarks together, and both fixed-rank pipelines and the EVD baseline
    /// return matrices below `C W^† C^T` or `K` in the Loewner order.
    SpsdResidual,
    /// [`ErrorRoute::Exact`] up to [`EXACT_ROUTE_MAX_N`] points, the SPSD route above.
    #[default]
    Auto,
}

/// Largest `n` for which [`ErrorRoute::Auto`] uses the exact route.
pub const EXACT_ROUTE_MAX_N: usize = 512;

/// Relative errors of approximations against one fixed kernel matrix.
///
/// The norms of `K` are computed once; the spectral norm only on first use.
#[derive(Debug)]
pub struct ErrorEvaluator {
    k: Matrix,
    route: ErrorRoute,
    trace: f64,
    frobenius: f64,
    spectral: OnceLock<f64>,
}

impl ErrorEvaluator {
    pub fn new(k: Matrix, route: ErrorRoute) -> Result<Self> {
        if k.nrows() != k.ncols() {
            return Err(NystromError::Dimension(format!(
                "kernel matrix must be square, got {}x{}",
                k.nrows(),
                k.ncols()
            )));
        }
        crate::linalg::ensure_finite(&k)?;
        // ‖K‖_* = trace(K) for SPSD K
        let trace = (0..k.nrows()).map(|i| k[(i, i)]).sum();
        let frobenius = frobenius(&k);
        Ok(Self {
            k,
            route,
            trace,
            frobenius,
            spectral: OnceLock::new(),
        })
    }

    pub fn kernel(&self) -> &Matrix {
        &self.k
    }

    pub fn n(&self) -> usize {
        self.k.nrows()
    }

    fn uses_exact(&self) -> bool {
        match self.route {
            ErrorRoute::Exact => true,
            ErrorRoute::SpsdResidual => false,
            ErrorRoute::Auto => self.n() <= EXACT_ROUTE_MAX_N,
        }
    }

    pub fn kernel_norm(&self, kind: NormKind) -> Result<f64> {
        Ok(match kind {
            NormKind::Trace => self.trace,
            NormKind::Frobenius => self.frobenius,
            NormKind::Spectral => match self.spectral.get() {
                Some(&s) => s,
                None => {
                    let s = sym_eigenvalues(&self.k)?
                        .into_iter()
                        .fold(0.0, |a: f64, l| a.max(l.abs()));
                    *self.spectral.get_or_init(|| s)
                }
            },
        })
    }

    /// Absolute residual norms `‖K - G‖` for a materialized approximation, in the order of `kinds`.
    pub fn residual_norms_of(&self, g: &Matrix, kinds: &[NormKind]) -> Result<Vec<f64>> {
        if (g.nrows(), g.ncols()) != (self.n(), self.n()) {
            return Err(NystromError::Dimension(format!(
                "approximation is {}x{}, kernel is {}x{}",
                g.nrows(),
                g.ncols(),
                self.n(),
                self.n()
            )));
        }
        let diff = &self.k - g;
        let needs_eigen = kinds.contains(&NormKind::Spectral)
            || (kinds.contains(&NormKind::Trace) && self.uses_exact());
        let eig = if needs_eigen {
            Some(sym_eigenvalues(&diff)?)
        } else {
            None
        };
        kinds
            .iter()
            .map(|kind| {
                Ok(match kind {
                    NormKind::Frobenius => frobenius(&diff),
                    NormKind::Spectral => eig
                        .as_ref()
                        .expect("eigenvalues computed")
                        .iter()
                        .fold(0.0, |a: f64, l| a.max(l.abs())),
                    NormKind::Trace if self.uses_exact() => {
                        eig.as_ref().expect("eigenvalues computed").iter().map(|l| l.abs()).sum()
                    }
                    NormKind::Trace => {
                        let t: f64 = (0..self.n()).map(|i| diff[(i, i)]).sum();
                        t.max(0.0)
                    }
                })
            })
            .collect()
    }

    /// Relative errors `‖K - G‖ / ‖K‖` for a materialized approximation.
    pub fn relative_errors_of(&self, g: &Matrix, kinds: &[NormKind]) -> Result<Vec<f64>> {
        let abs = self.residual_norms_of(g, kinds)?;
        kinds
            .iter()
            .zip(abs)
            .map(|(&kind, a)| {
                let scale = self.kernel_norm(kind)?;
                Ok(if scale > 0.0 { a / scale } else { a })
            })
            .collect()
    }

    /// Relative errors of a factored approximation.
    pub fn relative_errors(&self, f: &FixedRankFactors, kinds: &[NormKind]) -> Result<Vec<f64>> {
        if f.n() != self.n() {
            return Err(NystromError::Dimension(format!(
                "factors have {} rows, kernel has {}",
                f.n(),
                self.n()
            )));
        }
        self.relative_errors_of(&f.reconstruct_unchecked(), kinds)
    }

    pub fn relative_error(&self, f: &FixedRankFactors, kind: NormKind) -> Result<f64> {
        Ok(self.relative_errors(f, &[kind])?[0])
    }
}

/// `‖K - G‖ / ‖K‖` computed from the full singular spectrum of both matrices.
pub fn relative_error(k: &Matrix, g: &Matrix, kind: NormKind) -> Result<f64> {
    let pick = |n: crate::linalg::Norms| match kind {
        NormKind::Trace => n.trace,
        NormKind::Frobenius => n.frobenius,
        NormKind::Spectral => n.spectral,
    };
    let num = pick(norms(&(k - g))?);
    let den = pick(norms(k)?);
    Ok(if den > 0.0 { num / den } else { num })
}
