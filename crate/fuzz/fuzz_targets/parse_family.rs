#![no_main]

use libfuzzer_sys::fuzz_target;
use majorize::io::{encode_family, parse_family};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(family) = parse_family(text) {
        let again = parse_family(&encode_family(&family)).expect("encoded family decodes");
        assert_eq!(again.n(), family.n());
        assert_eq!(again.m(), family.m());
    }
});
