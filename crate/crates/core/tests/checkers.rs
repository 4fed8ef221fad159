use std::sync::Arc;

use covlab_core::covariance::{
    check_kernel_inclusion, check_nica, check_rep_axioms, check_t_conditions, check_theorem_a, Bounds, T4Instance,
};
use covlab_core::fock::ProductSystemSpec;
use covlab_core::ideal::{IdealEngine, Word};
use covlab_core::monoid::{GroupElement, MonoidSpec};
use covlab_core::rep::{Rep, RepCache};
use covlab_core::scalar::{GaussRational, Numerics};
use covlab_core::verdict::Status;
use covlab_core::Result;

type Q = GaussRational;

fn lambda(m: &MonoidSpec) -> RepCache<Q> {
    RepCache::fock("lambda", Arc::new(ProductSystemSpec::x_p(m)), m.clone(), Numerics::default())
}

fn shift(m: &MonoidSpec, w: &[usize]) -> RepCache<Q> {
    RepCache::shift("shift", m.clone(), w.to_vec(), Numerics::default())
}

fn at(c: &RepCache<Q>) -> impl Fn(usize) -> Result<Arc<Rep<Q>>> + Sync + '_ {
    move |r| c.get(r)
}

fn bounds(l: usize, w: usize) -> Bounds {
    Bounds { l, l_big: l + 1, step: 2, w, ..Bounds::default() }
}

fn int_word(xs: &[i64]) -> Word {
    Word::from_flat(&xs.iter().map(|&x| GroupElement::Int(x)).collect::<Vec<_>>()).unwrap()
}

#[test]
fn lambda_passes_everything_on_naturals() {
    let n = MonoidSpec::numerical(&[1]).unwrap();
    let eng = IdealEngine::new(&n, 12).unwrap();
    let lam = lambda(&n);
    let b = bounds(3, 2);
    assert_eq!(check_rep_axioms(&at(&lam), 3).unwrap().status, Status::Pass);
    assert_eq!(check_t_conditions(&eng, &at(&lam), &b, &[]).unwrap().status, Status::Pass);
    assert_eq!(check_theorem_a(&eng, &at(&lam), &b, true).unwrap().status, Status::Pass);
    assert_eq!(check_nica(&eng, &at(&lam), &at(&lam), &b).unwrap().status, Status::Pass);
}

#[test]
fn numerical_shift_breaks_the_union_identity() {
    let m = MonoidSpec::numerical(&[2, 3]).unwrap();
    let eng = IdealEngine::new(&m, 12).unwrap();
    let lam = lambda(&m);
    let sh = shift(&m, &[2, 3]);
    let b = bounds(3, 2);
    let inst = T4Instance {
        alpha: int_word(&[3, 2, 2, 3]),
        family: vec![int_word(&[0, 2, 2, 0]), int_word(&[0, 3, 3, 0])],
    };
    let v = check_t_conditions(&eng, &at(&sh), &b, std::slice::from_ref(&inst)).unwrap();
    assert_eq!(v.status, Status::Violation, "{}", v.reason);
    assert_eq!(v.details["T4"]["status"], "violation");
    assert_eq!(v.details["T4"]["witness"]["residual_rank"], 2);
    assert_eq!(v.details["T4"]["witness"]["projection"], true);
    let v = check_t_conditions(&eng, &at(&lam), &b, &[inst]).unwrap();
    assert_eq!(v.status, Status::Pass, "{}", v.reason);

    let v = check_theorem_a(&eng, &at(&sh), &b, true).unwrap();
    assert_eq!(v.status, Status::Violation, "{}", v.reason);
    assert_eq!(v.stability.len(), 2);
    let v = check_theorem_a(&eng, &at(&lam), &b, true).unwrap();
    assert_eq!(v.status, Status::Pass, "{}", v.reason);
    let v = check_kernel_inclusion(&eng, &at(&lam), &at(&sh), &b, None).unwrap();
    assert_eq!(v.status, Status::Violation, "{}", v.reason);
}

#[test]
fn broken_homomorphism_is_caught() {
    let m = MonoidSpec::numerical(&[2, 3]).unwrap();
    let sh = shift(&m, &[2, 4]);
    let v = check_rep_axioms(&at(&sh), 4).unwrap();
    assert_eq!(v.status, Status::Violation);
}

#[test]
fn collapsed_free_shift_fails_condition_i() {
    let f = MonoidSpec::free(2);
    let eng = IdealEngine::new(&f, 4).unwrap();
    let sh = shift(&f, &[1, 1]);
    let lam = lambda(&f);
    let b = bounds(2, 2);
    let v = check_theorem_a(&eng, &at(&sh), &b, true).unwrap();
    assert_eq!(v.status, Status::Violation, "{}", v.reason);
    assert_eq!(v.witness.as_ref().unwrap()["kind"], "theorem-a-i");
    let v = check_t_conditions(&eng, &at(&sh), &b, &[]).unwrap();
    assert_eq!(v.details["T2"]["status"], "violation");
    let v = check_nica(&eng, &at(&lam), &at(&sh), &b).unwrap();
    assert_eq!(v.status, Status::Violation);
    let v = check_theorem_a(&eng, &at(&lam), &b, true).unwrap();
    assert_eq!(v.status, Status::Pass, "{}", v.reason);
}

#[test]
fn lattice_reps_cross_validate() {
    let z2 = MonoidSpec::lattice(2);
    let eng = IdealEngine::new(&z2, 6).unwrap();
    let lam = lambda(&z2);
    let b = bounds(2, 2);
    for (w, expect) in [(vec![1, 1], Status::Violation), (vec![1, 0], Status::Pass)] {
        let sh = shift(&z2, &w);
        let ta = check_theorem_a(&eng, &at(&sh), &b, true).unwrap();
        let tc = check_t_conditions(&eng, &at(&sh), &b, &[]).unwrap();
        let ni = check_nica(&eng, &at(&lam), &at(&sh), &b).unwrap();
        assert_eq!(ta.status, expect, "{w:?} theorem-a: {}", ta.reason);
        assert_eq!(tc.status, expect, "{w:?} t-conditions: {}", tc.reason);
        assert_eq!(ni.status, expect, "{w:?} nica: {}", ni.reason);
    }
}

#[test]
fn boundary_columns_are_dropped_not_failed() {
    // Word length is not monotone under left division here, so some probe
    // chains leave any finite ball.
    let m = MonoidSpec::affine(&[(1, 1), (0, 2), (0, 3)], false).unwrap();
    let eng = IdealEngine::new(&m, 8).unwrap();
    let lam = lambda(&m);
    let b = Bounds { l: 3, l_big: 4, step: 2, w: 2, ..Bounds::default() };
    let v = check_theorem_a(&eng, &at(&lam), &b, true).unwrap();
    assert_eq!(v.status, Status::Pass, "{}", v.reason);
    assert!(v.details["boundary_columns"].as_u64().unwrap() > 0);
}

#[test]
fn words_longer_than_the_ball_leave_no_interior() {
    let m = MonoidSpec::numerical(&[2, 3]).unwrap();
    let eng = IdealEngine::new(&m, 8).unwrap();
    let sh = shift(&m, &[2, 3]);
    let fixed = |_: usize| sh.get(0);
    let inst = T4Instance {
        alpha: int_word(&[3, 2, 2, 3]),
        family: vec![int_word(&[0, 2, 2, 0]), int_word(&[0, 3, 3, 0])],
    };
    let v = check_t_conditions(&eng, &fixed, &bounds(0, 2), &[inst]).unwrap();
    assert_eq!(v.details["T4"]["status"], "inconclusive");
    assert!(v.details["T4"]["reason"].as_str().unwrap().contains("interior empty"));
}
