#![no_main]

use covlab_core::monoid::MonoidSpec;
use covlab_core::runner::{parse_matrix, parse_product_system};
use covlab_core::scalar::{Float, GaussRational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(v) = serde_json::from_slice::<serde_json::Value>(data) else { return };
    let _ = parse_matrix::<GaussRational>(&v, "matrix");
    let _ = parse_matrix::<Float>(&v, "matrix");
    for m in [MonoidSpec::numerical(&[1]).unwrap(), MonoidSpec::lattice(2)] {
        let _ = parse_product_system::<GaussRational>(&v, &m);
    }
});
