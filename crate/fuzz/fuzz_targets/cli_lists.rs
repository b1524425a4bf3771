#![no_main]

use libfuzzer_sys::fuzz_target;
use nystrom_bench::config::{parse_columns, parse_m_grid, parse_methods, parse_norms};

fuzz_target!(|s: &str| {
    if let Ok(grid) = parse_m_grid(s) {
        assert!(!grid.is_empty() && grid.iter().all(|&m| m > 0));
    }
    if let Ok(cols) = parse_columns(s) {
        let mut sorted = cols.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), cols.len());
    }
    let _ = parse_methods(s);
    let _ = parse_norms(s);
});
