#![no_main]

use anticritical::sweep::Grid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(grid) = s.parse::<Grid>() {
            // cap the work for huge counts
            if grid.len() <= 1 << 16 {
                let v = grid.values();
                assert_eq!(v.len(), grid.len());
                assert!(v.iter().all(|x| x.is_finite()));
                let back: Grid = grid.to_string().parse().expect("display parses");
                assert_eq!(back.values(), v);
            }
        }
    }
});
