#![no_main]

use deltaprime::parse::parse_beta_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(betas) = parse_beta_list(&text) {
        assert!(betas.iter().all(|b| b.is_finite() && *b > 0.0));
        let joined: Vec<String> = betas.iter().map(|b| b.to_string()).collect();
        assert_eq!(parse_beta_list(&joined.join(",")).unwrap(), betas);
    }
});
