#![no_main]

use libfuzzer_sys::fuzz_target;

// Whitespace-split fuzz input becomes argv. `--config` is dropped so the
// parser never touches the filesystem; everything else goes through the full
// parse-and-validate path (no dispatch).
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let mut argv: Vec<String> = vec!["spinbath".into()];
    let mut skip_value = false;
    for tok in text.split_whitespace().take(64) {
        if skip_value {
            skip_value = false;
            continue;
        }
        if tok == "--config" {
            skip_value = true;
            continue;
        }
        argv.push(tok.to_string());
    }
    let _ = spinbath::cli::parse_and_validate(argv);
});
