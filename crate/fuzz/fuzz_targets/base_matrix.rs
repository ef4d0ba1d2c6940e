#![no_main]
use libfuzzer_sys::fuzz_target;
use nsfaid::code::QcCode;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(code) = QcCode::parse(text) {
        // keep expansion cheap
        if code.n() <= 1 << 16 {
            let g = code.expand();
            assert_eq!(g.n(), code.n());
            assert_eq!(g.m(), code.m());
        }
    }
});
