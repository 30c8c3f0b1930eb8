#![no_main]

use g2q::parse_polynomial;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_polynomial(src) {
        assert_eq!(parse_polynomial(&p.to_string()).expect("display output parses"), p);
    }
});
