#![no_main]

use libfuzzer_sys::fuzz_target;
use steinperm::matrix::AntisymmetricMatrix;
use steinperm::moments::variance_formula;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = AntisymmetricMatrix::from_json(text) {
        let back = AntisymmetricMatrix::from_json(&m.to_json()).expect("own output parses");
        assert_eq!(back, m);
        let _ = variance_formula(&m);
    }
});
