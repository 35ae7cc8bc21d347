#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(src) = std::str::from_utf8(data) {
        if let Ok(e) = helmloc::expr::Expr::parse(src) {
            let _ = e.eval(1.5);
        }
    }
});
