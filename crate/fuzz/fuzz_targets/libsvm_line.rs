#![no_main]

use libfuzzer_sys::fuzz_target;
use nystrom_core::data_io::parse_line;

fuzz_target!(|line: &str| {
    if let Ok(Some(rec)) = parse_line(line) {
        assert!(rec.label.is_finite());
        assert!(rec.features.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(rec.features.iter().all(|&(k, v)| k >= 1 && v.is_finite()));
    }
});
