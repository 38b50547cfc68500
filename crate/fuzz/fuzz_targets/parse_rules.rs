#![no_main]

use libfuzzer_sys::fuzz_target;
use qrewrite::syntax::{parse_rules, render_rule};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    match parse_rules(text) {
        Ok(rules) => {
            let rendered: String = rules.iter().map(|r| render_rule(r) + "\n").collect();
            assert_eq!(parse_rules(&rendered).as_ref(), Ok(&rules));
        }
        Err(e) => assert!(e.line() >= 1 && e.line() <= text.lines().count().max(1)),
    }
});
