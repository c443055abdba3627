#![no_main]

use anticritical::config::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = parse_config(text) {
            // whatever parses must re-emit to a fixed point
            let emitted = cfg.emit();
            let again = parse_config(&emitted).expect("emitted config parses");
            assert_eq!(again, cfg);
            assert_eq!(again.emit(), emitted);
        }
    }
});
