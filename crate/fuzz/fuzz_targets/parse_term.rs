#![no_main]

use libfuzzer_sys::fuzz_target;
use qrewrite::{parse_term, render_canonical, sort_of};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    match parse_term(text) {
        Ok(t) => {
            assert!(sort_of(&t).is_ok());
            assert_eq!(parse_term(&render_canonical(&t)).as_ref(), Ok(&t));
        }
        Err(e) => {
            let s = e.span();
            assert!(s.start <= s.end && s.end <= text.len());
            assert!(text.is_char_boundary(s.start) && text.is_char_boundary(s.end));
        }
    }
});
