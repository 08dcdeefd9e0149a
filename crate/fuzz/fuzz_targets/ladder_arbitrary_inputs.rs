#![no_main]

use fieldprobe::quantum::QuantumConfig;
use fieldprobe::quantum::{run_method_ii, MAX_LADDER_STEPS};
use fieldprobe::{MagnitudeScale, RngStream};
use libfuzzer_sys::fuzz_target;

// Layout: integral (8 bytes), alpha (8), seed (8), ladder length (1).
fuzz_target!(|data: &[u8]| {
    if data.len() < 25 {
        return;
    }
    let word = |i: usize| u64::from_le_bytes(data[i * 8..i * 8 + 8].try_into().unwrap());
    let integral = f64::from_bits(word(0));
    let alpha = f64::from_bits(word(1));
    let seed = word(2);
    let n = u32::from(data[24]) % MAX_LADDER_STEPS + 1;

    let Ok(scale) = MagnitudeScale::new(1.0) else {
        return;
    };
    let Ok(cfg) = QuantumConfig::method_ii(scale, n).and_then(|c| c.with_alpha(alpha)) else {
        return;
    };
    if let Ok(r) = run_method_ii(integral, &cfg, 0.0, &RngStream::new(seed)) {
        assert_eq!(r.digits.len(), n as usize);
        assert!(r.m_hat < 1u64 << n);
        for s in &r.steps {
            assert!((0.0..=1.0).contains(&s.flip_probability));
        }
    }
});
