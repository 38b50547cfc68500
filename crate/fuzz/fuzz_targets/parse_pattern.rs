#![no_main]

use libfuzzer_sys::fuzz_target;
use qrewrite::syntax::parse_pattern;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Err(e) = parse_pattern(text) {
        let s = e.span();
        assert!(s.start <= s.end && s.end <= text.len());
        assert!(text.is_char_boundary(s.start) && text.is_char_boundary(s.end));
    }
});
