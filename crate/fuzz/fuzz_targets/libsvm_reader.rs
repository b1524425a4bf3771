#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use nystrom_core::data_io::read_libsvm_from;

fuzz_target!(|data: &[u8]| {
    let declared = data.first().map(|&b| b as usize);
    for p in [None, declared] {
        if let Ok(x) = read_libsvm_from(data, Path::new("fuzz"), p) {
            assert!(x.n() > 0);
            for i in 0..x.n() {
                assert_eq!(x.dense_row(i).len(), x.dim());
            }
        }
    }
});
