#![no_main]

use g2q::ModuleLabel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(label) = src.parse::<ModuleLabel>() {
        assert_eq!(label.to_string().parse::<ModuleLabel>().unwrap(), label);
        let _ = label.highest_monomial();
    }
});
