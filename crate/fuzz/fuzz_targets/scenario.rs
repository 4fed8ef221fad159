#![no_main]

use covlab_core::scenario::{parse_scenario, Overrides};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(sc) = parse_scenario(text, &Overrides::default()) {
            let _ = sc.settings.to_json();
            for c in &sc.checks {
                let _ = sc.targets(c);
            }
        }
    }
});
