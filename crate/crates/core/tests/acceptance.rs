//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use covlab_core::calculus::random_word;
use covlab_core::covariance::{
    check_fock_formulas, check_projection_algebra, check_t_conditions, Bounds, T4Instance,
};
use covlab_core::fock::ProductSystemSpec;
use covlab_core::ideal::{is_right_lcm_up_to, IdealEngine, LcmVerdict, Word};
use covlab_core::monoid::{enumerate_ball, GroupElement, MonoidSpec};
use covlab_core::rep::{Letter, OperatorWord, Rep, RepCache};
use covlab_core::runner::{self, Report, RunOptions, BUNDLED};
use covlab_core::scalar::{GaussRational, Numerics};
use covlab_core::scenario::{parse_scenario, parse_scenario_value, Overrides, RepKind, Scenario};
use covlab_core::verdict::{CheckVerdict, Status};
use covlab_core::wick::{check_wick, wick_normal_form, WickForm};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

type Q = GaussRational;
type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn families() -> Vec<(&'static str, MonoidSpec)> {
    vec![
        ("N", MonoidSpec::numerical(&[1]).unwrap()),
        ("N^2", MonoidSpec::lattice(2)),
        ("F2+", MonoidSpec::free(2)),
        ("<2,3>", MonoidSpec::numerical(&[2, 3]).unwrap()),
        ("N x| Z>0", MonoidSpec::affine(&[(1, 1), (0, 2), (0, 3)], false).unwrap()),
    ]
}

/// Membership in `K(word)` straight from the definition, innermost pair first.
fn oracle(spec: &MonoidSpec, pairs: &[(GroupElement, GroupElement)], r: &GroupElement) -> bool {
    if !spec.in_monoid(r) {
        return false;
    }
    match pairs.split_last() {
        None => true,
        Some(((p, q), rest)) => oracle(spec, rest, &spec.mul(&spec.inv(p), &spec.mul(q, r))),
    }
}

fn lambda(m: &MonoidSpec) -> RepCache<Q> {
    RepCache::fock("lambda", Arc::new(ProductSystemSpec::x_p(m)), m.clone(), Numerics::default())
}

fn at(c: &RepCache<Q>) -> impl Fn(usize) -> covlab_core::Result<Arc<Rep<Q>>> + Sync + '_ {
    move |r| c.get(r)
}

fn status_of(v: &CheckVerdict, want: Status) -> Result<(), String> {
    ensure!(v.status == want, "{} [{}]: expected {}, got {}: {}", v.check, v.rep.as_deref().unwrap_or("-"), want.as_str(), v.status.as_str(), v.reason);
    Ok(())
}

fn bundled_doc(name: &str) -> Value {
    serde_json::from_str(runner::bundled(name).unwrap()).unwrap()
}

/// A bundled scenario with its check list replaced.
fn with_checks(name: &str, checks: Value) -> Scenario {
    let mut doc = bundled_doc(name);
    doc["checks"] = checks;
    parse_scenario_value(&doc).unwrap_or_else(|e| panic!("{name}: {e:?}"))
}

fn run(sc: &Scenario) -> Result<Report, String> {
    runner::run(sc, &RunOptions::default()).map_err(|e| format!("{}: {e:?}", sc.name))
}

fn base_reps(sc: &Scenario) -> Vec<String> {
    sc.representations.iter().filter(|r| !r.is_crossed()).map(|r| r.name.clone()).collect()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut compared = 0;
    for (name, spec) in families() {
        let t = Instant::now();
        let eng = IdealEngine::new(&spec, 8).map_err(|e| e.to_string())?;
        let letters = enumerate_ball(&spec, 2).unwrap();
        let ball = enumerate_ball(&spec, 8).unwrap();
        for _ in 0..200 {
            let w = random_word(&mut rng, &letters);
            let k = eng.k_of_word(&w);
            for r in ball.elements() {
                compared += 1;
                ensure!(eng.member(r, &k) == oracle(&spec, &w.pairs, r), "{name}: membership of {r} in K({w}) disagrees");
            }
        }
        ensure!(t.elapsed() < Duration::from_secs(5), "{name}: took {:?}", t.elapsed());
    }
    Ok(format!("{compared} memberships"))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (name, spec) in families() {
        let t = Instant::now();
        let eng = IdealEngine::new(&spec, 8).map_err(|e| e.to_string())?;
        let letters = enumerate_ball(&spec, 2).unwrap();
        let ball = enumerate_ball(&spec, 8).unwrap();
        for _ in 0..100 {
            let (a, b) = (random_word(&mut rng, &letters), random_word(&mut rng, &letters));
            let z = eng.k_of_word(&b);
            let lhs = eng.apply(&a.mirror().concat(&a), &z);
            for r in ball.elements() {
                let want = oracle(&spec, &a.pairs, r) && oracle(&spec, &b.pairs, r);
                ensure!(eng.member(r, &lhs) == want, "{name}: law fails at {r} for α = {a}, Z = K({b})");
            }
        }
        ensure!(t.elapsed() < Duration::from_secs(5), "{name}: took {:?}", t.elapsed());
    }
    Ok("100 pairs per family".into())
}

const FOCK_SCENARIOS: [&str; 5] = ["n-basic", "n2-nica", "f2-free", "s23-lambda", "affine"];

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let mut pairs = 0;
    for name in FOCK_SCENARIOS {
        let sc = with_checks(name, json!([{"check": "projection-algebra"}]));
        let b = sc.settings.bounds;
        let lam = lambda(&sc.monoid);
        let eng = IdealEngine::new(&sc.monoid, b.l_big + b.step + 8).map_err(|e| e.to_string())?;
        let v = check_projection_algebra(&eng, &at(&lam), &b).map_err(|e| format!("{name}: {e}"))?;
        status_of(&v, Status::Pass).map_err(|e| format!("{name}: {e}"))?;
        pairs += v.details["pairs"].as_u64().unwrap_or(0);
    }
    ensure!(t.elapsed() < Duration::from_secs(5), "took {:?}", t.elapsed());
    Ok(format!("{pairs} lattice pairs"))
}

fn criterion_4() -> Outcome {
    for name in FOCK_SCENARIOS {
        let t = Instant::now();
        let sc = with_checks(name, json!([{"check": "fock-formulas"}]));
        let b = sc.settings.bounds;
        let lam = lambda(&sc.monoid);
        let eng = IdealEngine::new(&sc.monoid, b.l_big + b.step + 8).map_err(|e| e.to_string())?;
        let v = check_fock_formulas(&eng, &at(&lam), &b, 200).map_err(|e| format!("{name}: {e}"))?;
        status_of(&v, Status::Pass).map_err(|e| format!("{name}: {e}"))?;
        ensure!(t.elapsed() < Duration::from_secs(10), "{name}: took {:?}", t.elapsed());
    }
    Ok("200 words per scenario".into())
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let mut words = 0;
    for spec in [MonoidSpec::lattice(2), MonoidSpec::free(2)] {
        let eng = IdealEngine::new(&spec, 8).map_err(|e| e.to_string())?;
        let lam = lambda(&spec);
        let b = Bounds { l: 2, l_big: 3, ..Bounds::default() };
        let v = check_wick(&eng, &at(&lam), &b, 6).map_err(|e| e.to_string())?;
        status_of(&v, Status::Pass)?;
        words += v.details["words"].as_u64().unwrap_or(0);
    }
    let z2 = MonoidSpec::lattice(2);
    let eng = IdealEngine::new(&z2, 4).map_err(|e| e.to_string())?;
    let (a, b) = (GroupElement::Lattice(vec![1, 0]), GroupElement::Lattice(vec![0, 1]));
    let word = OperatorWord::new(vec![Letter::star(a.clone(), 0), Letter::plain(b.clone(), 0)]);
    let (form, _) = wick_normal_form(&eng, &word, 4).map_err(|e| e.to_string())?;
    ensure!(form == WickForm::Ordered { r: b, s: a }, "v_a* v_b rewrote to {}", form.display(&z2));
    ensure!(t.elapsed() < Duration::from_secs(5), "took {:?}", t.elapsed());
    Ok(format!("{words} words; v_a* v_b -> v_b v_a*"))
}

fn int_word(xs: &[i64]) -> Word {
    Word::from_flat(&xs.iter().map(|&x| GroupElement::Int(x)).collect::<Vec<_>>()).unwrap()
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let m = MonoidSpec::numerical(&[2, 3]).unwrap();
    let eng = IdealEngine::new(&m, 16).map_err(|e| e.to_string())?;
    match is_right_lcm_up_to(&eng, 12).map_err(|e| e.to_string())? {
        LcmVerdict::No { ideal, .. } => {
            for n in 0..=40 {
                ensure!(eng.member(&GroupElement::Int(n), &ideal) == (n >= 2), "witness ideal is {}", eng.describe(&ideal));
            }
        }
        _ => return Err("right-LCM search did not find a counterexample".into()),
    }
    let b = Bounds { l: 12, l_big: 12, ..Bounds::default() };
    let inst = T4Instance {
        alpha: int_word(&[3, 2, 2, 3]),
        family: vec![int_word(&[0, 2, 2, 0]), int_word(&[0, 3, 3, 0])],
    };
    let lam = lambda(&m);
    let v = check_t_conditions(&eng, &at(&lam), &b, std::slice::from_ref(&inst)).map_err(|e| e.to_string())?;
    status_of(&v, Status::Pass)?;
    let sh = RepCache::<Q>::shift("shift", m.clone(), vec![2, 3], Numerics::default());
    let v = check_t_conditions(&eng, &at(&sh), &b, &[inst]).map_err(|e| e.to_string())?;
    let t4 = &v.details["T4"];
    ensure!(t4["status"] == "violation", "shift T4 is {}", t4["status"]);
    ensure!(t4["witness"]["residual_rank"] == 2, "residual rank {}", t4["witness"]["residual_rank"]);
    ensure!(t4["witness"]["projection"] == true, "residual is not a projection");
    ensure!(t.elapsed() < Duration::from_secs(10), "took {:?}", t.elapsed());
    Ok("ideal {2,3,4,...}; λ passes T1-T4; shift T4 residual rank 2".into())
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let mut scenarios = 0;
    for (name, _) in BUNDLED {
        let doc = bundled_doc(name);
        let sc = parse_scenario_value(&doc).map_err(|e| format!("{name}: {e:?}"))?;
        let Some(fock) = sc.fock_rep() else { continue };
        // A corrupted product system has no Fock representation to test.
        let axioms = run(&with_checks(name, json!([{"check": "fock-axioms"}])))?;
        if axioms.verdicts[0].status != Status::Pass {
            continue;
        }
        let r = run(&with_checks(name, json!([{"check": "theorem-a", "rep": fock}])))?;
        status_of(&r.verdicts[0], Status::Pass).map_err(|e| format!("{name}: {e}"))?;
        scenarios += 1;
    }
    for (name, rep) in [("s23-shift-T4", "shift"), ("f2-collapsed-shift", "collapsed")] {
        let sc = with_checks(name, json!([{"check": "theorem-a", "rep": rep}]));
        let v = &run(&sc)?.verdicts[0];
        status_of(v, Status::Violation).map_err(|e| format!("{name}: {e}"))?;
        let mut doc = sc.document.clone();
        let b = sc.settings.bounds;
        doc["bounds"]["L_big"] = json!(b.l_big + b.step);
        let grown = parse_scenario_value(&doc).map_err(|e| format!("{e:?}"))?;
        let v = &run(&grown)?.verdicts[0];
        status_of(v, Status::Violation).map_err(|e| format!("{name} after growth: {e}"))?;
    }
    ensure!(t.elapsed() < Duration::from_secs(30), "took {:?}", t.elapsed());
    Ok(format!("λ passes on {scenarios} scenarios; both bad reps stay violations after growth"))
}

fn family(sc: &Scenario) -> &str {
    sc.document["monoid"]["family"].as_str().unwrap_or_default()
}

fn right_lcm_family(sc: &Scenario) -> bool {
    match family(sc) {
        "lattice" | "free" => true,
        "numerical" => sc.document["monoid"]["generators"] == json!([1]),
        _ => false,
    }
}

/// The scenario's own parameters for `check` on `rep`, if it has such an entry.
fn own_entry(sc: &Scenario, check: &str, rep: &str) -> Value {
    sc.checks
        .iter()
        .find(|c| c.name.as_str() == check && sc.targets(c).iter().any(|t| t == rep))
        .map(|c| {
            let mut raw = match &c.raw {
                Value::Object(_) => c.raw.clone(),
                _ => json!({"check": check}),
            };
            raw["rep"] = json!(rep);
            raw
        })
        .unwrap_or_else(|| json!({"check": check, "rep": rep}))
}

fn agree(name: &str, rep: &str, a: &CheckVerdict, b: &CheckVerdict) -> Result<(), String> {
    let decided = |s: Status| matches!(s, Status::Pass | Status::Violation);
    ensure!(
        a.status == b.status && decided(a.status),
        "{name} [{rep}]: {} is {} but {} is {}",
        a.check,
        a.status.as_str(),
        b.check,
        b.status.as_str()
    );
    Ok(())
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let mut pairs = 0;
    for (name, _) in BUNDLED {
        // Its bounds are degenerate on purpose.
        if *name == "too-small" {
            continue;
        }
        let sc = parse_scenario_value(&bundled_doc(name)).map_err(|e| format!("{name}: {e:?}"))?;
        if sc.product_system.is_some() && !right_lcm_family(&sc) {
            continue;
        }
        if run(&with_checks(name, json!([{"check": "fock-axioms"}])))?.verdicts[0].status != Status::Pass {
            continue;
        }
        for rep in base_reps(&sc) {
            if right_lcm_family(&sc) {
                let checks = json!([{"check": "right-lcm"}, own_entry(&sc, "nica", &rep), own_entry(&sc, "theorem-a", &rep)]);
                let r = run(&with_checks(name, checks))?;
                agree(name, &rep, &r.verdicts[1], &r.verdicts[2])?;
                pairs += 1;
            }
            if sc.product_system.is_none() {
                let checks = json!([own_entry(&sc, "t-conditions", &rep), own_entry(&sc, "theorem-a", &rep)]);
                let r = run(&with_checks(name, checks))?;
                agree(name, &rep, &r.verdicts[0], &r.verdicts[1])?;
                pairs += 1;
            }
        }
    }
    ensure!(t.elapsed() < Duration::from_secs(60), "took {:?}", t.elapsed());
    Ok(format!("{pairs} comparisons agree"))
}

fn criterion_9() -> Outcome {
    let t = Instant::now();
    for name in ["crossed-n-z2", "crossed-n2-z2"] {
        let sc = parse_scenario_value(&bundled_doc(name)).map_err(|e| format!("{name}: {e:?}"))?;
        let b = sc.settings.bounds;
        ensure!(b.l == 8 && b.w == 4, "{name}: bounds L = {}, W = {}", b.l, b.w);
        let crossed: Vec<_> = sc.representations.iter().filter(|r| r.is_crossed()).collect();
        ensure!(
            crossed.iter().all(|r| matches!(&r.kind, RepKind::Crossed { action, .. } if sc.actions[action]["group"] == "cyclic(2)")),
            "{name}: action is not ℤ/2"
        );
        let checks = json!([
            {"check": "crossed-axioms"},
            {"check": "crossed-core-identity"},
            {"check": "crossed-expectation", "samples": 100},
            {"check": "crossed-theorem-a"},
        ]);
        let r = run(&with_checks(name, checks))?;
        ensure!(r.verdicts.len() == 4, "{name}: {} verdicts", r.verdicts.len());
        for v in &r.verdicts {
            status_of(v, Status::Pass).map_err(|e| format!("{name}: {e}"))?;
        }
    }
    ensure!(t.elapsed() < Duration::from_secs(30), "took {:?}", t.elapsed());
    Ok("ℕ and ℕ² with ℤ/2".into())
}

fn criterion_10() -> Outcome {
    let cache = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut witnesses = 0;
    for (name, text) in BUNDLED {
        let sc = parse_scenario(text, &Overrides::default()).map_err(|e| format!("{name}: {e:?}"))?;
        let first = run(&sc)?.to_json_string();
        let second = run(&sc)?.to_json_string();
        ensure!(first == second, "{name}: reports differ between runs");
        let cached = RunOptions {
            timing: false,
            cache_dir: Some(cache.path().join(name)),
        };
        for state in ["cold", "hot"] {
            let r = runner::run(&sc, &cached).map_err(|e| format!("{e:?}"))?;
            ensure!(r.to_json_string() == first, "{name}: {state} cache changes the report");
        }
        let report = Report::from_json_str(&first).map_err(|e| e.to_string())?;
        for o in runner::replay(&report, None).map_err(|e| format!("{e:?}"))? {
            if o.original == Status::Violation {
                witnesses += 1;
                ensure!(o.reproduced(), "{name} #{} {}: replayed as {}", o.index, o.check, o.replayed.as_str());
            }
        }
    }
    Ok(format!("{} scenarios byte-stable; {witnesses} violation witnesses replay", BUNDLED.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("ideal-calculus oracle equivalence", criterion_1),
        ("reduced-form law", criterion_2),
        ("projection algebra", criterion_3),
        ("fock formulas", criterion_4),
        ("wick normal form", criterion_5),
        ("non-LCM detection and T4", criterion_6),
        ("theorem A calibration", criterion_7),
        ("cross-validation", criterion_8),
        ("crossed-product identities", criterion_9),
        ("determinism and replay", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(msg) => println!("criterion {:>2} PASS {name} ({secs:.2}s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.2}s): {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
