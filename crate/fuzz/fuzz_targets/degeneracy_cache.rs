#![no_main]

use libfuzzer_sys::fuzz_target;
use spinbath::degeneracy::DegeneracyTable;
use spinbath::half::HalfInteger;

// First two bytes pick (N, 2S), the rest is the cache CSV text.
fuzz_target!(|data: &[u8]| {
    if data.len() < 2 {
        return;
    }
    let n = (data[0] % 16) as u32 + 1;
    let two_s = (data[1] % 8) as i64 + 1;
    if let Ok(text) = std::str::from_utf8(&data[2..]) {
        let _ = DegeneracyTable::from_cache_csv(n, HalfInteger::from_twice(two_s), text);
    }
});
