#![no_main]

use deltaprime::curve::CurveConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = CurveConfig::from_json(text) {
        let back = CurveConfig::from_json(&cfg.to_json()).expect("serialized config parses");
        assert_eq!(back.to_json(), cfg.to_json());
    }
});
