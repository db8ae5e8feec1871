#![no_main]

use deltaprime::strip::read_coo;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = read_coo(text) {
        assert!(m.entries.iter().all(|&(i, j, v)| i < m.n && j < m.n && v.is_finite()));
        let _ = m.asymmetry();
    }
});
