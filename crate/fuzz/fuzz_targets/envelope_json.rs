#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(env) = spinbath::cli::ResultEnvelope::from_json(text) {
            // accepted envelopes must re-serialize
            let _ = env.to_csv();
            let _ = env.to_json();
        }
    }
});
