#![no_main]

use libfuzzer_sys::fuzz_target;
use steinperm::analysis::{rate_table_csv, rate_table_from_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rows) = rate_table_from_csv(text) {
        if rows.iter().all(|r| r.d_k.is_finite() && r.scaled.is_finite()) {
            let again = rate_table_from_csv(&rate_table_csv(&rows).expect("serializes")).expect("own output parses");
            assert_eq!(again, rows);
        }
    }
});
