#![no_main]

use g2q::cluster::Seed;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok(seed) = Seed::from_json(src) {
        let back = Seed::from_json(&seed.to_json().to_string()).expect("own JSON reads back");
        assert_eq!(back.quiver(), seed.quiver());
        if let Some(v) = seed.quiver().vertices().find(|&v| !seed.quiver().is_frozen(v)) {
            let _ = seed.relation(v);
            let _ = seed.quiver().mutate(v);
        }
    }
});
