#![no_main]

use libfuzzer_sys::fuzz_target;
use majorize::io::{encode_ds_field, parse_ds_field};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(x) = parse_ds_field(text) {
        let again = parse_ds_field(&encode_ds_field(&x)).expect("encoded field decodes");
        assert_eq!(again.matrices(), x.matrices());
    }
});
