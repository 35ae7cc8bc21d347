#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(u) = helmloc::grid::decode(data) {
        // accepted input re-encodes to the same bytes
        assert_eq!(helmloc::grid::encode(&u), data);
    }
});
