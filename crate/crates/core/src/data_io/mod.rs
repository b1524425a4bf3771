//! Dataset ingestion, fixed example matrices and random instance generators.

mod fixtures;
mod libsvm;
mod synth;

pub use fixtures::{fixture, FIXTURE_NAMES};
pub use libsvm::{parse_line, read_libsvm, read_libsvm_from, write_libsvm, LibsvmRecord};
pub use synth::{
    gaussian_points, random_spsd, subsample, subsample_indices, synthetic_sparse_binary,
};
