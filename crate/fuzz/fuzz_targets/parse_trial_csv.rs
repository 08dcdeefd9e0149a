#![no_main]

use fieldprobe::analysis::read_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = read_csv(data) {
        for r in &records {
            let expect = (r.i_est - r.i_true).abs();
            assert!((r.abs_error - expect).abs() <= 1e-12 * expect.max(1.0));
        }
    }
});
