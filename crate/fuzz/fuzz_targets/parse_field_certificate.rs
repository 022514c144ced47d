#![no_main]

use libfuzzer_sys::fuzz_target;
use majorize::io::{encode_field_certificate, parse_field_certificate};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cert) = parse_field_certificate(text) {
        let again = parse_field_certificate(&encode_field_certificate(&cert))
            .expect("encoded certificate decodes");
        assert_eq!(again.mixture.cells(), cert.mixture.cells());
        assert_eq!(again.mixture.weights().len(), cert.mixture.weights().len());
    }
});
