use std::sync::Arc;
use std::time::Instant;

use covlab_core::covariance::{check_theorem_a, Bounds};
use covlab_core::crossed::{
    check_core_identity, check_crossed_axioms, check_crossed_theorem_a, check_expectation, check_gauge_invariance, CrossedSystem,
    GaugeAction,
};
use covlab_core::fock::ProductSystemSpec;
use covlab_core::ideal::IdealEngine;
use covlab_core::monoid::MonoidSpec;
use covlab_core::rep::RepCache;
use covlab_core::scalar::{GaussRational, Numerics};
use covlab_core::verdict::Status;

type Q = GaussRational;

fn run(m: &MonoidSpec, exponents: &[u32]) {
    let eng = IdealEngine::new(m, 16).unwrap();
    let base = Arc::new(RepCache::<Q>::fock("lambda", Arc::new(ProductSystemSpec::x_p(m)), m.clone(), Numerics::default()));
    let cs = CrossedSystem::new("iota", base.clone(), GaugeAction::cyclic(2, exponents).unwrap(), vec![]);
    let b = Bounds { l: 8, l_big: 9, w: 4, letter_radius: 2, ..Bounds::default() };
    let t = Instant::now();
    let v = check_crossed_axioms(&cs, b.l).unwrap();
    assert_eq!(v.status, Status::Pass, "{}", v.reason);
    eprintln!("axioms {:?}", t.elapsed());
    let v = check_core_identity(&eng, &cs, &b).unwrap();
    assert_eq!(v.status, Status::Pass, "{}", v.reason);
    eprintln!("core identity {:?} {}", t.elapsed(), v.reason);
    let v = check_expectation(&cs, &b, 100).unwrap();
    assert_eq!(v.status, Status::Pass, "{}", v.reason);
    eprintln!("expectation {:?}", t.elapsed());
    let v = check_gauge_invariance(&eng, &cs, &b).unwrap();
    assert_eq!(v.status, Status::Pass, "{}", v.reason);
    eprintln!("gauge {:?}", t.elapsed());
    let at = |r| base.get(r);
    let lv = check_theorem_a(&eng, &at, &b, true).unwrap();
    assert_eq!(lv.status, Status::Pass, "{}", lv.reason);
    eprintln!("base theorem A {:?}", t.elapsed());
    let v = check_crossed_theorem_a(&eng, &cs, &b).unwrap();
    assert_eq!(v.status, Status::Pass, "{}", v.reason);
    eprintln!("crossed theorem A {:?}", t.elapsed());
}

#[test]
fn naturals_with_sign_action() {
    run(&MonoidSpec::numerical(&[1]).unwrap(), &[1]);
}

#[test]
fn lattice_with_first_coordinate_sign() {
    run(&MonoidSpec::lattice(2), &[1, 0]);
}
