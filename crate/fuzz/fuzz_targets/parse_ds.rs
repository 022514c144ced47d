#![no_main]

use libfuzzer_sys::fuzz_target;
use majorize::io::{encode_ds, parse_ds};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(x) = parse_ds(text) {
        let again = parse_ds(&encode_ds(&x)).expect("encoded matrix decodes");
        assert_eq!(again, x);
    }
});
