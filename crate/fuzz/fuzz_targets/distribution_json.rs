#![no_main]

use libfuzzer_sys::fuzz_target;
use steinperm::exact_dist::IntegerDistribution;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(d) = IntegerDistribution::from_json(text) {
        assert_eq!(IntegerDistribution::from_json(&d.to_json()).expect("own output parses"), d);
        let _ = d.moments();
    }
});
