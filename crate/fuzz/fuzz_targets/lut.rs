#![no_main]
use libfuzzer_sys::fuzz_target;
use nsfaid::framing::FramingFunction;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = text.parse::<FramingFunction>() {
        let back: FramingFunction = f.to_string().parse().expect("display parses");
        assert_eq!(back, f);
        for m in -f.max()..=f.max() {
            assert!(f.image_contains(f.frame(m)));
        }
    }
});
