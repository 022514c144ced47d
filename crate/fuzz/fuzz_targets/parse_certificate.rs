#![no_main]

use libfuzzer_sys::fuzz_target;
use majorize::io::{encode_certificate, parse_certificate};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cert) = parse_certificate(text) {
        let again = parse_certificate(&encode_certificate(&cert)).expect("encoded certificate decodes");
        assert_eq!(again.mixture.len(), cert.mixture.len());
        assert_eq!(again.construction, cert.construction);
    }
});
