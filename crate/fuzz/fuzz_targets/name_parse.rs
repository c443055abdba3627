#![no_main]

use anticritical::models::Family;
use anticritical::qfi::{Method, Schedule};
use anticritical::sweep::SweepKind;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(f) = s.parse::<Family>() {
            assert_eq!(f.to_string().parse::<Family>().ok(), Some(f));
        }
        if let Ok(m) = s.parse::<Method>() {
            assert_eq!(m.to_string().parse::<Method>().ok(), Some(m));
        }
        if let Ok(k) = s.parse::<Schedule>() {
            assert_eq!(k.to_string(), s);
        }
        let _ = s.parse::<SweepKind>();
    }
});
