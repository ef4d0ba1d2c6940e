#![no_main]
use libfuzzer_sys::fuzz_target;
use nsfaid::kernel::KernelConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = KernelConfig::parse(text) {
        let _ = cfg.to_spec(None);
        let back = KernelConfig::parse(&cfg.to_toml()).expect("serialized config parses");
        assert_eq!(back, cfg);
    }
});
