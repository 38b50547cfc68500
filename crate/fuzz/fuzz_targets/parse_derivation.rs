#![no_main]

use libfuzzer_sys::fuzz_target;
use qrewrite::syntax::{parse_derivation, render_derivation};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = parse_derivation(text) {
        assert_eq!(parse_derivation(&render_derivation(&doc)).as_ref(), Ok(&doc));
    }
});
