use faer::Mat;

use crate::error::{NystromError, Result};
use crate::linalg::Matrix;

pub const FIXTURE_NAMES: [&str; 2] = ["example1", "remark2"];

// 3x3 kernel on which truncating W first loses almost everything
const EXAMPLE1: [[f64; 3]; 3] = [[1.0, 0.0, 10.0], [0.0, 1.01, 0.0], [10.0, 0.0, 100.0]];

// 4x4 kernel where the QR-based method wins in trace norm but loses in Frobenius norm
const REMARK2: [[f64; 4]; 4] = [
    [1.0, 0.7, 0.9, 0.4],
    [0.7, 1.0, 0.6, 0.6],
    [0.9, 0.6, 1.0, 0.6],
    [0.4, 0.6, 0.6, 1.0],
];

/// A small named SPSD kernel matrix, entries exactly as listed above.
pub fn fixture(name: &str) -> Result<Matrix> {
    match name {
        "example1" => Ok(Mat::from_fn(3, 3, |i, j| EXAMPLE1[i][j])),
        "remark2" => Ok(Mat::from_fn(4, 4, |i, j| REMARK2[i][j])),
        other => Err(NystromError::UnknownFixture(other.to_string())),
    }
}
