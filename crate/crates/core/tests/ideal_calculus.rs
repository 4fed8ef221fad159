use covlab_core::ideal::{IdealEngine, Tri, Word};
use covlab_core::monoid::{enumerate_ball, Ball, GroupElement, MonoidSpec};
use proptest::prelude::*;

/// Membership by recursion on the innermost pair, written only in terms of the
/// group law and `in_monoid`.
fn oracle(spec: &MonoidSpec, pairs: &[(GroupElement, GroupElement)], r: &GroupElement) -> bool {
    if !spec.in_monoid(r) {
        return false;
    }
    match pairs.split_last() {
        None => true,
        Some(((p, q), rest)) => {
            // r ∈ q⁻¹ p Z  ⇔  p⁻¹ q r ∈ Z
            let z = spec.mul(&spec.inv(p), &spec.mul(q, r));
            oracle(spec, rest, &z)
        }
    }
}

fn families() -> Vec<(&'static str, MonoidSpec)> {
    vec![
        ("N", MonoidSpec::numerical(&[1]).unwrap()),
        ("N2", MonoidSpec::lattice(2)),
        ("F2+", MonoidSpec::free(2)),
        ("<2,3>", MonoidSpec::numerical(&[2, 3]).unwrap()),
        ("affine", MonoidSpec::affine(&[(1, 1), (0, 2), (0, 3)], false).unwrap()),
        ("affine-full", MonoidSpec::affine(&[(1, 1), (0, -1), (0, 2)], true).unwrap()),
    ]
}

fn word_from(ball: &Ball, picks: &[usize]) -> Word {
    let n = ball.len();
    Word::from_flat(&picks.iter().map(|i| ball.element(i % n).clone()).collect::<Vec<_>>()).unwrap()
}

fn picks() -> impl Strategy<Value = Vec<usize>> {
    (1usize..=4).prop_flat_map(|n| proptest::collection::vec(0usize..1000, 2 * n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn backend_matches_oracle(fam in 0usize..6, w in picks()) {
        let (_, spec) = &families()[fam];
        let eng = IdealEngine::new(spec, 6).unwrap();
        let letters = enumerate_ball(spec, 2).unwrap();
        let ball = enumerate_ball(spec, 6).unwrap();
        let word = word_from(&letters, &w);
        let k = eng.k_of_word(&word);
        for r in ball.elements() {
            prop_assert_eq!(eng.member(r, &k), oracle(spec, &word.pairs, r), "r = {}", r);
        }
    }

    #[test]
    fn intersection_is_pointwise_and(fam in 0usize..6, w1 in picks(), w2 in picks()) {
        let (_, spec) = &families()[fam];
        let eng = IdealEngine::new(spec, 6).unwrap();
        let letters = enumerate_ball(spec, 2).unwrap();
        let ball = enumerate_ball(spec, 6).unwrap();
        let (a, b) = (word_from(&letters, &w1), word_from(&letters, &w2));
        let (x, y) = (eng.k_of_word(&a), eng.k_of_word(&b));
        let z = eng.intersect(&x, &y);
        for r in ball.elements() {
            let expect = oracle(spec, &a.pairs, r) && oracle(spec, &b.pairs, r);
            prop_assert_eq!(eng.member(r, &z), expect);
            // the defining word of the intersection also denotes it
            prop_assert_eq!(oracle(spec, &z.word.pairs, r), expect);
        }
    }

    #[test]
    fn reduced_form_law(fam in 0usize..6, w1 in picks(), w2 in picks()) {
        let (_, spec) = &families()[fam];
        let eng = IdealEngine::new(spec, 6).unwrap();
        let letters = enumerate_ball(spec, 2).unwrap();
        let ball = enumerate_ball(spec, 6).unwrap();
        let alpha = word_from(&letters, &w1);
        let z = eng.k_of_word(&word_from(&letters, &w2));
        let lhs = eng.apply(&alpha.mirror().concat(&alpha), &z);
        let rhs = eng.intersect(&eng.k_of_word(&alpha), &z);
        prop_assert_eq!(eng.equal(&lhs, &rhs), Tri::True);
        for r in ball.elements() {
            prop_assert_eq!(eng.member(r, &lhs), oracle(spec, &alpha.pairs, r) && eng.member(r, &z));
        }
    }

    #[test]
    fn ideals_are_right_ideals(fam in 0usize..6, w in picks()) {
        let (_, spec) = &families()[fam];
        let eng = IdealEngine::new(spec, 6).unwrap();
        let letters = enumerate_ball(spec, 2).unwrap();
        let ball = enumerate_ball(spec, 4).unwrap();
        let k = eng.k_of_word(&word_from(&letters, &w));
        for r in ball.elements().iter().filter(|r| eng.member(r, &k)) {
            for s in ball.elements() {
                prop_assert!(eng.member(&spec.mul(r, s), &k));
            }
        }
    }

    #[test]
    fn neutral_words_read_right_to_left(fam in 0usize..6, w in picks()) {
        // For neutral α, K(α) = p₁⁻¹q₁⋯pₙ⁻¹qₙP read as set operations from the right.
        let (_, spec) = &families()[fam];
        let eng = IdealEngine::new(spec, 6).unwrap();
        let letters = enumerate_ball(spec, 2).unwrap();
        let alpha = word_from(&letters, &w);
        let beta = alpha.concat(&alpha.mirror());
        prop_assert!(beta.is_neutral(spec));
        let mut z = eng.full();
        for (p, q) in beta.pairs.iter().rev() {
            z = eng.preimage(p, &eng.left_mult(q, &z));
        }
        prop_assert_eq!(z.backend, eng.k_of_word(&beta).backend);
    }

    #[test]
    fn cap_closure_idempotent(fam in 0usize..6, ws in proptest::collection::vec(picks(), 1..4)) {
        let (_, spec) = &families()[fam];
        let eng = IdealEngine::new(spec, 6).unwrap();
        let letters = enumerate_ball(spec, 2).unwrap();
        let ideals: Vec<_> = ws.iter().map(|w| eng.k_of_word(&word_from(&letters, w))).collect();
        let once = eng.cap_closure(&ideals);
        let twice = eng.cap_closure(&once.ideals);
        prop_assert_eq!(once.ideals.len(), twice.ideals.len());
        for x in &once.ideals {
            for y in &once.ideals {
                let z = eng.intersect(x, y);
                prop_assert!(once.ideals.iter().any(|m| eng.same(m, &z)));
            }
        }
    }

    #[test]
    fn generic_backend_agrees_with_exact(fam in 0usize..6, w in picks()) {
        let (_, spec) = &families()[fam];
        let exact = IdealEngine::new(spec, 5).unwrap();
        let generic = IdealEngine::generic(spec, 5).unwrap();
        let letters = enumerate_ball(spec, 2).unwrap();
        let ball = enumerate_ball(spec, 5).unwrap();
        let word = word_from(&letters, &w);
        let (a, b) = (exact.k_of_word(&word), generic.k_of_word(&word));
        prop_assert!(b.is_generic());
        for r in ball.elements() {
            prop_assert_eq!(exact.member(r, &a), generic.member(r, &b));
        }
    }
}

#[test]
fn family_names_cover_all_cases() {
    assert_eq!(families().len(), 6);
}
