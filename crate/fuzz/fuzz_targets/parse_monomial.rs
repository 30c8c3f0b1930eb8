#![no_main]

use g2q::{parse_monomial, parse_sl2_monomial};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_monomial(src) {
        // printing is canonical, so it must parse back to the same value
        let again = parse_monomial(&m.to_string()).expect("display output parses");
        assert_eq!(again, m);
    }
    let _ = parse_sl2_monomial(src);
});
