#![no_main]

use libfuzzer_sys::fuzz_target;
use steinperm::Permutation;

fuzz_target!(|data: &[u8]| {
    let Ok(p) = serde_json::from_slice::<Permutation>(data) else { return };
    assert_eq!(p.inverse().inverse(), p);
    let text = serde_json::to_string(&p).expect("serializes");
    assert_eq!(serde_json::from_str::<Permutation>(&text).expect("own output parses"), p);
});
