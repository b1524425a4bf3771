//! Fixed-rank Nyström approximation of SPSD kernel matrices.
//!
//! Two pipelines turn a landmark kernel pair `(C, W)` into a rank-`r`
//! approximation `Û Λ̂ Û^T` of the full kernel matrix `K`:
//!
//! * [`standard_nystrom`] computes `C ⟦W⟧_r^† C^T`;
//! * [`modified_nystrom`] computes `⟦C W^† C^T⟧_r` through a thin QR of `C`.
//!
//! For in-sample landmarks the second is never worse in trace norm, and adding
//! landmarks never hurts it. The [`verify`] module checks these statements and
//! an out-of-sample perturbation bound numerically.
//!
//! ```
//! use nystrom_core::{fixture, modified_nystrom, standard_nystrom, NystromPair, DEFAULT_PINV_TOL};
//!
//! let k = fixture("example1").unwrap();
//! let pair = NystromPair::from_kernel_columns(&k, &[0, 1]).unwrap();
//! let std = standard_nystrom(&pair, 1, DEFAULT_PINV_TOL).unwrap();
//! let qr = modified_nystrom(&pair, 1, DEFAULT_PINV_TOL).unwrap();
//! // the QR-based estimate keeps the dominant eigenvalue 101
//! assert!((qr.lambda_hat()[0] - 101.0).abs() < 1e-10);
//! assert!((std.lambda_hat()[0] - 1.01).abs() < 1e-10);
//! ```

pub mod data_io;
pub mod error;
pub mod kernel;
pub mod landmark;
pub mod linalg;
pub mod metrics;
pub mod nystrom;
pub mod verify;

pub use data_io::{fixture, random_spsd, read_libsvm, subsample};
pub use error::{NystromError, Result};
pub use kernel::{
    bandwidth_heuristic, build_kernel_matrix, build_nystrom_pair, DataMatrix, KernelConfig,
    NystromPair, DEFAULT_DENSE_CAP,
};
pub use landmark::{kmeans_landmarks, uniform_sample, LandmarkSet, RngSeed, KMEANS_MAX_ITER};
pub use linalg::{Matrix, DEFAULT_PINV_TOL};
pub use metrics::{ErrorEvaluator, ErrorRoute, NormKind};
pub use nystrom::{
    evd_baseline, modified_nystrom, rank_m_nystrom, reconstruct, standard_nystrom,
    FixedRankFactors,
};
