#![no_main]

use g2q::QPolynomial;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(p) = QPolynomial::from_json(src) {
        let back = QPolynomial::from_json(&p.to_json().to_string()).expect("own JSON reads back");
        assert_eq!(back, p);
    }
});
