#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = cem_core::caseio::parse_series_csv(text, "fuzzed.csv");
    }
});
