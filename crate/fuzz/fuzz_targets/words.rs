#![no_main]

use covlab_core::ideal::Word;
use covlab_core::monoid::MonoidSpec;
use covlab_core::rep::{Combination, OperatorWord};
use covlab_core::scalar::GaussRational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(v) = serde_json::from_slice::<serde_json::Value>(data) else { return };
    let specs = [
        MonoidSpec::numerical(&[1]).unwrap(),
        MonoidSpec::lattice(2),
        MonoidSpec::free(2),
        MonoidSpec::numerical(&[2, 3]).unwrap(),
        MonoidSpec::affine(&[(1, 1), (0, 2), (0, 3)], false).unwrap(),
    ];
    for spec in &specs {
        if let Ok(g) = spec.element_from_json(&v, "element") {
            assert_eq!(spec.element_from_json(&spec.element_to_json(&g), "element").ok(), Some(g));
        }
        if let Ok(w) = Word::from_json(spec, &v, "word") {
            let _ = w.to_json(spec);
        }
        if let Ok(w) = OperatorWord::from_json(spec, &v, "word") {
            let _ = w.display(spec);
        }
        let _ = Combination::<GaussRational>::from_json(spec, &v, "combination");
    }
});
