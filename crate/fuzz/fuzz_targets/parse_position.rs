#![no_main]

use libfuzzer_sys::fuzz_target;
use qrewrite::Position;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = text.parse::<Position>() {
        assert_eq!(p.to_string().parse::<Position>().as_ref(), Ok(&p));
    }
});
