#![no_main]

use fieldprobe::FieldSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = text.parse::<FieldSpec>() else {
        return;
    };
    // Anything accepted renders back to text that parses to the same spec.
    let again: FieldSpec = spec.to_string().parse().expect("rendered spec parses");
    assert_eq!(spec, again);
    spec.validate().expect("parsed specs are valid");
});
