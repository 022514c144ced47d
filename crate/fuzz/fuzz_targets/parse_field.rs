#![no_main]

use libfuzzer_sys::fuzz_target;
use majorize::io::{encode_field, parse_field};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(field) = parse_field(text) {
        let again = parse_field(&encode_field(&field)).expect("encoded field decodes");
        assert_eq!(again.space(), field.space());
        assert_eq!(again.len(), field.len());
    }
});
