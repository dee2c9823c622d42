#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(h) = spinbath::half::HalfInteger::parse(text) {
            // parsed values round-trip through display
            let again = spinbath::half::HalfInteger::parse(&h.to_string()).unwrap();
            assert_eq!(h, again);
        }
    }
});
