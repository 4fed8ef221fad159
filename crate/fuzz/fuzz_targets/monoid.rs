#![no_main]

use covlab_core::crossed::GaugeAction;
use covlab_core::scalar::GaussRational;
use covlab_core::scenario::parse_monoid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(v) = serde_json::from_slice::<serde_json::Value>(data) else { return };
    let _ = parse_monoid(&v, "monoid");
    for generators in 1..=3 {
        let _ = GaugeAction::<GaussRational>::from_json(&v, generators, "action", 1e-9);
    }
});
