#![no_main]
use libfuzzer_sys::fuzz_target;
use nsfaid::code::{parse_alist, write_alist};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_alist(text) {
        let again = parse_alist(&write_alist(&g)).expect("round trip");
        assert_eq!(again.edges(), g.edges());
    }
});
