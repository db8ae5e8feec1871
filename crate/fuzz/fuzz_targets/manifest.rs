#![no_main]

use deltaprime::manifest::ExperimentManifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = ExperimentManifest::from_json(text) {
        assert!(m.outputs.iter().all(|o| !o.contains('/')));
        let back = ExperimentManifest::from_json(&m.to_json()).expect("serialized manifest parses");
        assert_eq!(back.to_json(), m.to_json());
    }
});
