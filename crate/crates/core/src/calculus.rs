//! Randomised cross-checks of the ideal backends against chain membership.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::Result;
use crate::ideal::{chain_member, IdealEngine, Word};
use crate::monoid::{enumerate_ball, Ball, GroupElement};
use crate::verdict::CheckVerdict;

/// Random word of 1..=4 pairs with letters drawn from `letters`.
pub fn random_word(rng: &mut ChaCha8Rng, letters: &Ball) -> Word {
    let n = rng.gen_range(1..=4);
    let flat: Vec<GroupElement> = (0..2 * n).map(|_| letters.element(rng.gen_range(0..letters.len())).clone()).collect();
    Word::from_flat(&flat).expect("even, nonzero letter count")
}

/// `K(α)` membership equals chain membership on `Ball(l)` for `words` random
/// words, and `α̃α` applied to `Z = K(β)` equals `K(α) ∩ Z` for `laws` random pairs.
pub fn check_ideal_calculus(engine: &IdealEngine, l: usize, words: usize, laws: usize, seed: u64) -> Result<CheckVerdict> {
    const CHECK: &str = "ideal-calculus";
    let spec = &engine.spec;
    let letters = enumerate_ball(spec, 2)?;
    let ball = enumerate_ball(spec, l)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut compared = 0usize;
    for i in 0..words {
        let w = random_word(&mut rng, &letters);
        let k = engine.k_of_word(&w);
        for r in ball.elements() {
            compared += 1;
            if engine.member(r, &k) != chain_member(spec, &w, r) {
                let wit = json!({"kind": "ideal-membership", "word": w.to_json(spec), "element": spec.element_to_json(r), "sample": i, "seed": seed});
                return Ok(CheckVerdict::violation(CHECK, format!("membership of {r} in K({w}) disagrees with the chain condition"), wit));
            }
        }
    }
    for i in 0..laws {
        let (a, b) = (random_word(&mut rng, &letters), random_word(&mut rng, &letters));
        let z = engine.k_of_word(&b);
        let lhs = engine.apply(&a.mirror().concat(&a), &z);
        let rhs = engine.intersect(&engine.k_of_word(&a), &z);
        for r in ball.elements() {
            compared += 1;
            let oracle = chain_member(spec, &a, r) && chain_member(spec, &b, r);
            if engine.member(r, &lhs) != oracle || engine.member(r, &rhs) != oracle {
                let wit = json!({
                    "kind": "reduced-form",
                    "alpha": a.to_json(spec),
                    "beta": b.to_json(spec),
                    "element": spec.element_to_json(r),
                    "sample": i,
                    "seed": seed,
                });
                return Ok(CheckVerdict::violation(CHECK, format!("reduced-form law fails at {r}"), wit));
            }
        }
    }
    Ok(CheckVerdict::pass(CHECK, format!("{words} words and {laws} reduced-form pairs agree with chain membership on {} elements", ball.len()))
        .with_details(json!({"words": words, "laws": laws, "ball": ball.len(), "comparisons": compared, "seed": seed, "L": l})))
}

/// Re-decides a membership or reduced-form witness; `true` if it still fails.
pub fn replay_calculus(engine: &IdealEngine, wit: &serde_json::Value) -> Result<bool> {
    let spec = &engine.spec;
    let r = spec.element_from_json(&wit["element"], "witness.element")?;
    match wit["kind"].as_str() {
        Some("ideal-membership") => {
            let w = Word::from_json(spec, &wit["word"], "witness.word")?;
            Ok(engine.member(&r, &engine.k_of_word(&w)) != chain_member(spec, &w, &r))
        }
        _ => {
            let a = Word::from_json(spec, &wit["alpha"], "witness.alpha")?;
            let b = Word::from_json(spec, &wit["beta"], "witness.beta")?;
            let z = engine.k_of_word(&b);
            let oracle = chain_member(spec, &a, &r) && chain_member(spec, &b, &r);
            let lhs = engine.apply(&a.mirror().concat(&a), &z);
            let rhs = engine.intersect(&engine.k_of_word(&a), &z);
            Ok(engine.member(&r, &lhs) != oracle || engine.member(&r, &rhs) != oracle)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::MonoidSpec;
    use crate::verdict::Status;

    #[test]
    fn all_families_agree() {
        for spec in [
            MonoidSpec::numerical(&[1]).unwrap(),
            MonoidSpec::lattice(2),
            MonoidSpec::free(2),
            MonoidSpec::numerical(&[2, 3]).unwrap(),
            MonoidSpec::affine(&[(1, 1), (0, 2), (0, 3)], false).unwrap(),
        ] {
            let eng = IdealEngine::new(&spec, 8).unwrap();
            let v = check_ideal_calculus(&eng, 8, 50, 25, 7).unwrap();
            assert_eq!(v.status, Status::Pass, "{}", v.reason);
        }
    }
}
