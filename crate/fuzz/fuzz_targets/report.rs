#![no_main]

use covlab_core::runner::{content_hash, Report};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(r) = Report::from_json_str(text) {
            let _ = content_hash(&r.document);
            let again = Report::from_json_str(&r.to_json_string()).expect("a parsed report re-parses");
            assert_eq!(again, r);
        }
    }
});
