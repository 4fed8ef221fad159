//! Scenario orchestration: building representations, running checks,
//! assembling reports, the on-disk verdict cache and witness replay.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::calculus::{check_ideal_calculus, replay_calculus};
use crate::covariance::{
    check_compact_alignment, check_fock_formulas, check_kernel_inclusion, check_nica, check_projection_algebra, check_rep_axioms, check_t_conditions,
    check_theorem_a, interior_status, replay_theorem_a_ii, T4Instance,
};
use crate::crossed::{
    check_core_identity, check_crossed_axioms, check_crossed_theorem_a, check_expectation, check_gauge_invariance, crossed_axiom_case, CrossedLetter,
    CrossedSystem, GaugeAction,
};
use crate::error::{Error, Result};
use crate::fock::{check_axiom_pair, check_product_system_axioms, DeclaredFiber, FiberSystem, ProductSystemSpec};
use crate::ideal::{is_right_lcm_up_to, IdealEngine, LcmVerdict, Word};
use crate::linalg::Mat;
use crate::monoid::{enumerate_ball, MonoidSpec};
use crate::rep::{literal_rep, Combination, OperatorWord, Rep, RepCache};
use crate::scalar::{parse_literal, Float, GaussRational, Numerics, Scalar};
use crate::scenario::{Backend, CheckName, CheckSpec, RepKind, Scenario, Target};
use crate::verdict::{combine_exit, CheckVerdict, Status};
use crate::wick::{check_wick, wick_normal_form};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const REPORT_SCHEMA: u64 = 1;

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the canonical (key-sorted, compact) serialisation.
pub fn content_hash(v: &Value) -> String {
    sha256_hex(v.to_string().as_bytes())
}

// ---------------------------------------------------------------------------
// Literal parsing

pub fn parse_matrix<S: Scalar>(v: &Value, path: &str) -> Result<Mat<S>> {
    let rows = v.as_array().filter(|r| !r.is_empty()).ok_or_else(|| Error::schema(path, "expected a non-empty array of rows"))?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        let r = r.as_array().ok_or_else(|| Error::schema(&rp, "expected a row array"))?;
        if r.len() != rows.len() {
            return Err(Error::schema(&rp, format!("row has {} entries; matrices must be {}x{}", r.len(), rows.len(), rows.len())));
        }
        out.push(r.iter().enumerate().map(|(j, x)| S::from_literal(&parse_literal(x, &format!("{rp}[{j}]"))?)).collect::<Result<Vec<S>>>()?);
    }
    Ok(Mat::from_dense(out))
}

fn parse_matrices<S: Scalar>(v: &Value, path: &str) -> Result<Vec<Mat<S>>> {
    let a = v.as_array().ok_or_else(|| Error::schema(path, "expected an array of matrices"))?;
    a.iter().enumerate().map(|(i, m)| parse_matrix(m, &format!("{path}[{i}]"))).collect()
}

pub fn parse_product_system<S: Scalar>(v: &Value, monoid: &MonoidSpec) -> Result<ProductSystemSpec<S>> {
    let path = "product_system";
    let dim = v.get("dim").and_then(Value::as_u64).ok_or_else(|| Error::schema(format!("{path}.dim"), "expected a positive integer"))? as usize;
    let coefficients = parse_matrices(v.get("coefficients").unwrap_or(&Value::Null), &format!("{path}.coefficients"))?;
    let fibers = v
        .get("fibers")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::schema(format!("{path}.fibers"), "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let fp = format!("{path}.fibers[{i}]");
            Ok(DeclaredFiber {
                element: monoid.element_from_json(f.get("element").unwrap_or(&Value::Null), &format!("{fp}.element"))?,
                generators: parse_matrices(f.get("generators").unwrap_or(&Value::Null), &format!("{fp}.generators"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ps = ProductSystemSpec { dim, coefficients, fibers };
    ps.validate(monoid)?;
    Ok(ps)
}

fn parse_words(spec: &MonoidSpec, v: &Value, path: &str) -> Result<Vec<Word>> {
    let a = v.as_array().ok_or_else(|| Error::schema(path, "expected an array of words"))?;
    a.iter().enumerate().map(|(i, w)| Word::from_json(spec, w, &format!("{path}[{i}]"))).collect()
}

fn parse_instances(spec: &MonoidSpec, v: Option<&Value>, path: &str) -> Result<Vec<T4Instance>> {
    let Some(v) = v else { return Ok(Vec::new()) };
    let a = v.as_array().ok_or_else(|| Error::schema(path, "expected an array of {alpha, family}"))?;
    a.iter()
        .enumerate()
        .map(|(i, x)| {
            let ip = format!("{path}[{i}]");
            Ok(T4Instance {
                alpha: Word::from_json(spec, x.get("alpha").unwrap_or(&Value::Null), &format!("{ip}.alpha"))?,
                family: parse_words(spec, x.get("family").unwrap_or(&Value::Null), &format!("{ip}.family"))?,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Context

/// Everything a scenario's checks share.
pub struct Context<S: Scalar> {
    pub scenario: Scenario,
    pub engine: IdealEngine,
    pub product_system: Arc<ProductSystemSpec<S>>,
    pub num: Numerics,
    pub base: BTreeMap<String, Arc<RepCache<S>>>,
    pub crossed: BTreeMap<String, CrossedSystem<S>>,
}

impl<S: Scalar> Context<S> {
    pub fn build(scenario: Scenario) -> std::result::Result<Self, Vec<Error>> {
        let mut errs = Vec::new();
        let monoid = scenario.monoid.clone();
        let tol = scenario.settings.tolerance;
        let num = Numerics {
            tol,
            pivot: Numerics::default().pivot.max(tol),
        };
        let engine = match IdealEngine::new(&monoid, scenario.settings.horizon) {
            Ok(e) => e,
            Err(e) => return Err(vec![e]),
        };
        let ps = match &scenario.product_system {
            None => ProductSystemSpec::x_p(&monoid),
            Some(v) => match parse_product_system(v, &monoid) {
                Ok(p) => p,
                Err(e) => return Err(vec![e]),
            },
        };
        let ps = Arc::new(ps);
        let mut base = BTreeMap::new();
        let mut crossed = BTreeMap::new();
        for (i, decl) in scenario.representations.iter().enumerate() {
            let path = format!("representations[{i}]");
            let name = decl.name.clone();
            match &decl.kind {
                RepKind::Fock => {
                    base.insert(name.clone(), Arc::new(RepCache::fock(&name, ps.clone(), monoid.clone(), num)));
                }
                RepKind::ShiftPower { weights } => {
                    base.insert(name.clone(), Arc::new(RepCache::shift(&name, monoid.clone(), weights.clone(), num)));
                }
                RepKind::Matrix { coefficients, fibers } => {
                    let coefs = parse_matrices::<S>(coefficients, &format!("{path}.coefficients"));
                    let gens = fibers.as_array().ok_or_else(|| Error::schema(format!("{path}.fibers"), "expected one array of matrices per declared fiber")).and_then(|a| {
                        a.iter().enumerate().map(|(k, g)| parse_matrices::<S>(g, &format!("{path}.fibers[{k}]"))).collect::<Result<Vec<_>>>()
                    });
                    let (coefs, gens) = match (coefs, gens) {
                        (Ok(c), Ok(g)) => (c, g),
                        (c, g) => {
                            errs.extend(c.err());
                            errs.extend(g.err());
                            continue;
                        }
                    };
                    // Surface shape errors now rather than at the first check.
                    if let Err(e) = FiberSystem::build(ps.clone(), &monoid, 0, num).and_then(|fs| literal_rep(&name, Arc::new(fs), coefs.clone(), gens.clone())) {
                        errs.push(e);
                        continue;
                    }
                    let (ps, m) = (ps.clone(), monoid.clone());
                    base.insert(
                        name.clone(),
                        Arc::new(RepCache::new(move |r| {
                            let fs = Arc::new(FiberSystem::build(ps.clone(), &m, r, num)?);
                            literal_rep(&name, fs, coefs.clone(), gens.clone())
                        })),
                    );
                }
                RepKind::Crossed { .. } => {}
            }
        }
        for (i, decl) in scenario.representations.iter().enumerate() {
            let RepKind::Crossed { base: b, action, corrupt } = &decl.kind else { continue };
            let path = format!("representations[{i}]");
            let act = match GaugeAction::<S>::from_json(&scenario.actions[action], monoid.generators.len(), &format!("actions.{action}"), tol) {
                Ok(a) => a,
                Err(e) => {
                    errs.push(e);
                    continue;
                }
            };
            let extra = match parse_corrupt(&monoid, corrupt, act.order(), &format!("{path}.corrupt")) {
                Ok(x) => x,
                Err(e) => {
                    errs.push(e);
                    continue;
                }
            };
            crossed.insert(decl.name.clone(), CrossedSystem::new(&decl.name, base[b].clone(), act, extra));
        }
        if !errs.is_empty() {
            return Err(errs);
        }
        Ok(Context {
            scenario,
            engine,
            product_system: ps,
            num,
            base,
            crossed,
        })
    }

    fn bounds(&self) -> &crate::covariance::Bounds {
        &self.scenario.settings.bounds
    }

    fn lambda(&self) -> Result<&RepCache<S>> {
        let name = self.scenario.fock_rep().ok_or_else(|| Error::Structural("no fock representation declared".into()))?;
        Ok(&self.base[name])
    }

    fn clamp(&self, radius: usize) -> usize {
        self.scenario.settings.radius.map_or(radius, |r| radius.min(r))
    }

    fn lambda_at(&self, radius: usize) -> Result<Arc<Rep<S>>> {
        self.lambda()?.get(self.clamp(radius))
    }

    /// A base or crossed representation at `radius` (capped by the scenario's
    /// fixed radius, if any), by name.
    pub fn rep_at(&self, name: &str, radius: usize) -> Result<Arc<Rep<S>>> {
        let radius = self.clamp(radius);
        if let Some(c) = self.base.get(name) {
            return c.get(radius);
        }
        if let Some(c) = self.crossed.get(name) {
            return c.iota(radius);
        }
        Err(Error::schema("rep", format!("unknown representation {name:?}")))
    }

    /// Runs one check entry against one target (empty for scenario-level checks).
    pub fn run_check(&self, check: &CheckSpec, target: &str) -> CheckVerdict {
        let name = check.name.as_str();
        let v = self.dispatch(check, target).unwrap_or_else(|e| CheckVerdict::error(name, &e));
        // Crossed checks label verdicts with their target so replay can find them again.
        match (v.rep.is_none() || self.crossed.contains_key(target), target.is_empty()) {
            (true, false) => v.with_rep(target),
            _ => v,
        }
    }

    fn dispatch(&self, check: &CheckSpec, target: &str) -> Result<CheckVerdict> {
        let b = self.bounds();
        let spec = &self.engine.spec;
        let seed = b.seed;
        let l = b.l;
        let rep_at = |r: usize| self.rep_at(target, r);
        let lam_at = |r: usize| self.lambda_at(r);
        let cs = || self.crossed.get(target).ok_or_else(|| Error::schema("rep", format!("{target:?} is not a crossed representation")));
        match check.name {
            CheckName::FockAxioms => {
                let fs = FiberSystem::build(self.product_system.clone(), spec, l, self.num)?;
                let vs = check_product_system_axioms(&fs, l);
                Ok(match vs.first() {
                    None => CheckVerdict::pass(check.name.as_str(), format!("fiber inclusions hold for all composable pairs with |p| + |q| ≤ {l}"))
                        .with_details(json!({"fibers": fs.fiber_dims_json(), "L": l})),
                    Some(v) => {
                        let mut wit = v.to_json(spec);
                        wit["radius"] = json!(l);
                        let what = match v.kind {
                            crate::fock::Inclusion::Product => format!("X_{}·X_{} ⊄ X_{}", v.p, v.q, spec.mul(&v.p, &v.q)),
                            crate::fock::Inclusion::Adjoint => format!("X_{}^*·X_{} ⊄ X_{}", v.p, spec.mul(&v.p, &v.q), v.q),
                        };
                        CheckVerdict::violation(check.name.as_str(), format!("{what} (residual {:.3e})", v.residual), wit)
                            .with_details(json!({"violations": vs.len()}))
                    }
                })
            }
            CheckName::RightLcm => Ok(lcm_verdict(&self.engine, l)?),
            CheckName::IdealCalculus => check_ideal_calculus(&self.engine, l, check.param_usize("words", 200), check.param_usize("laws", 100), seed),
            CheckName::RepAxioms => check_rep_axioms(&rep_at, l),
            CheckName::TConditions => {
                let inst = parse_instances(spec, check.params.get("instances"), "instances")?;
                check_t_conditions(&self.engine, &rep_at, b, &inst)
            }
            CheckName::Nica => check_nica(&self.engine, &lam_at, &rep_at, b),
            CheckName::CompactAlignment => check_compact_alignment(&self.engine, &lam_at, b),
            CheckName::Wick => check_wick(&self.engine, &lam_at, b, check.param_usize("max_len", 4)),
            CheckName::TheoremA => {
                let pre = check.params.get("preconditions").and_then(Value::as_bool).unwrap_or(true);
                check_theorem_a(&self.engine, &rep_at, b, pre)
            }
            CheckName::KernelInclusion => {
                let family = match check.params.get("family") {
                    None => None,
                    Some(v) => Some(parse_words(spec, v, "family")?.iter().map(|w| self.engine.k_of_word(w)).collect::<Vec<_>>()),
                };
                check_kernel_inclusion(&self.engine, &lam_at, &rep_at, b, family.as_deref())
            }
            CheckName::ProjectionAlgebra => check_projection_algebra(&self.engine, &lam_at, b),
            CheckName::FockFormulas => check_fock_formulas(&self.engine, &lam_at, b, check.param_usize("samples", 200)),
            CheckName::CrossedAxioms => check_crossed_axioms(cs()?, l),
            CheckName::CrossedCoreIdentity => check_core_identity(&self.engine, cs()?, b),
            CheckName::CrossedExpectation => check_expectation(cs()?, b, check.param_usize("samples", 100)),
            CheckName::CrossedGauge => check_gauge_invariance(&self.engine, cs()?, b),
            CheckName::CrossedTheoremA => check_crossed_theorem_a(&self.engine, cs()?, b),
        }
    }
}

fn parse_corrupt(spec: &MonoidSpec, v: &Value, order: usize, path: &str) -> Result<Vec<CrossedLetter>> {
    let a = v.as_array().ok_or_else(|| Error::schema(path, "expected an array"))?;
    a.iter()
        .enumerate()
        .map(|(i, x)| {
            let xp = format!("{path}[{i}]");
            let elem = spec.element_from_json(x.get("element").unwrap_or(&Value::Null), &format!("{xp}.element"))?;
            let idx = |k: &str| x.get(k).and_then(Value::as_u64).map(|n| n as usize).ok_or_else(|| Error::schema(format!("{xp}.{k}"), "expected an index"));
            let h = idx("h")?;
            if h >= order {
                return Err(Error::schema(format!("{xp}.h"), format!("group has only {order} elements")));
            }
            Ok(CrossedLetter { elem, basis: idx("basis")?, h })
        })
        .collect()
}

fn lcm_verdict(engine: &IdealEngine, l: usize) -> Result<CheckVerdict> {
    const CHECK: &str = "right-lcm";
    let spec = &engine.spec;
    Ok(match is_right_lcm_up_to(engine, l)? {
        LcmVerdict::Yes(t) => CheckVerdict::pass(CHECK, "the monoid is right LCM").with_details(json!({"pairs": t.entries.len(), "unit_ambiguity": t.unit_ambiguity, "L": l})),
        LcmVerdict::CounterexampleFree { horizon, table } => CheckVerdict::pass(CHECK, format!("no counterexample to the right-LCM property up to radius {horizon}"))
            .with_details(json!({"pairs": table.entries.len(), "horizon": horizon, "L": l})),
        LcmVerdict::No { p, q, ideal } => {
            let wit = json!({"kind": "right-lcm", "p": spec.element_to_json(&p), "q": spec.element_to_json(&q), "ideal": engine.ideal_to_json(&ideal), "radius": l});
            CheckVerdict::violation(CHECK, format!("pP ∩ qP is not principal for p = {p}, q = {q}"), wit)
        }
    })
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u64,
    pub scenario: String,
    pub scenario_hash: String,
    pub environment: Value,
    #[serde(default)]
    pub assumptions: Vec<String>,
    #[serde(default)]
    pub warnings: Vec<String>,
    pub verdicts: Vec<CheckVerdict>,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Vec<Value>>,
    /// The scenario as run, so the report replays on its own.
    pub document: Value,
}

impl Report {
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
        s.push('\n');
        s
    }

    pub fn from_json_str(text: &str) -> Result<Report> {
        let r: Report = serde_json::from_str(text).map_err(|e| Error::schema("report", e.to_string()))?;
        if r.schema != REPORT_SCHEMA {
            return Err(Error::schema("report.schema", format!("unsupported report schema {}", r.schema)));
        }
        Ok(r)
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub timing: bool,
    pub cache_dir: Option<PathBuf>,
}

/// Key for one (check entry, target) verdict: everything the verdict depends on.
fn cache_key(sc: &Scenario, check: &CheckSpec, target: &str) -> String {
    let mut doc = sc.document.clone();
    if let Some(o) = doc.as_object_mut() {
        for k in ["name", "description", "checks"] {
            o.remove(k);
        }
    }
    content_hash(&json!({"version": VERSION, "scenario": doc, "check": check.raw, "target": target}))
}

fn cache_load(dir: &Path, key: &str) -> Option<CheckVerdict> {
    let text = std::fs::read_to_string(dir.join(format!("{key}.json"))).ok()?;
    serde_json::from_str(&text).ok()
}

fn cache_store(dir: &Path, key: &str, v: &CheckVerdict) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!("{key}.json.tmp"));
    std::fs::write(&tmp, serde_json::to_string(v).expect("verdicts serialise"))?;
    std::fs::rename(tmp, dir.join(format!("{key}.json")))
}

pub fn environment(sc: &Scenario) -> Value {
    json!({"version": VERSION, "backend": sc.settings.backend.as_str(), "bounds": sc.settings.to_json()})
}

fn run_with<S: Scalar>(ctx: &Context<S>, opts: &RunOptions) -> Report {
    let sc = &ctx.scenario;
    let mut verdicts = Vec::new();
    let mut timing = Vec::new();
    let mut warnings = sc.warnings.clone();
    for check in &sc.checks {
        for target in sc.targets(check) {
            let key = opts.cache_dir.as_ref().map(|_| cache_key(sc, check, &target));
            let start = Instant::now();
            let cached = match (&opts.cache_dir, &key) {
                (Some(d), Some(k)) => cache_load(d, k),
                _ => None,
            };
            let hit = cached.is_some();
            let v = cached.unwrap_or_else(|| ctx.run_check(check, &target));
            if let (false, Some(d), Some(k)) = (hit, &opts.cache_dir, &key) {
                if let Err(e) = cache_store(d, k, &v) {
                    warnings.push(format!("verdict cache not written: {e}"));
                }
            }
            timing.push(json!({
                "check": check.name.as_str(),
                "rep": target,
                "seconds": start.elapsed().as_secs_f64(),
                "cached": hit,
            }));
            verdicts.push(v);
        }
    }
    let exit_code = combine_exit(verdicts.iter().map(|v| v.status));
    Report {
        schema: REPORT_SCHEMA,
        scenario: sc.name.clone(),
        scenario_hash: content_hash(&sc.document),
        environment: environment(sc),
        assumptions: sc.assumptions.clone(),
        warnings,
        verdicts,
        exit_code,
        timing: opts.timing.then_some(timing),
        document: sc.document.clone(),
    }
}

/// Builds the scenario for its backend; errors are schema or structural problems.
pub fn validate(sc: &Scenario) -> std::result::Result<(), Vec<Error>> {
    match sc.settings.backend {
        Backend::Exact => Context::<GaussRational>::build(sc.clone()).map(|_| ()),
        Backend::Float => Context::<Float>::build(sc.clone()).map(|_| ()),
    }
}

pub fn run(sc: &Scenario, opts: &RunOptions) -> std::result::Result<Report, Vec<Error>> {
    Ok(match sc.settings.backend {
        Backend::Exact => run_with(&Context::<GaussRational>::build(sc.clone())?, opts),
        Backend::Float => run_with(&Context::<Float>::build(sc.clone())?, opts),
    })
}

// ---------------------------------------------------------------------------
// Replay

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplayOutcome {
    pub index: usize,
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rep: Option<String>,
    pub kind: String,
    pub original: Status,
    pub replayed: Status,
}

impl ReplayOutcome {
    pub fn reproduced(&self) -> bool {
        self.original == self.replayed
    }
}

fn get_usize(w: &Value, k: &str) -> Result<usize> {
    w.get(k).and_then(Value::as_u64).map(|n| n as usize).ok_or_else(|| Error::schema(format!("witness.{k}"), "expected a non-negative integer"))
}

impl<S: Scalar> Context<S> {
    /// Re-decides one verdict's witness. Kinds with a self-contained witness are
    /// re-evaluated directly; the rest re-run their check and compare witnesses.
    pub fn replay_verdict(&self, v: &CheckVerdict) -> Result<Status> {
        let Some(w) = &v.witness else { return Ok(v.status) };
        let spec = &self.engine.spec;
        let kind = w.get("kind").and_then(Value::as_str).unwrap_or_default();
        let rep_name = v.rep.as_deref().unwrap_or_default();
        match kind {
            "rep-star" | "rep-product" | "rep-adjoint" | "theorem-a-i" | "t1" | "t2" | "t3" | "nica" => {
                let comb = Combination::<S>::from_json(spec, &w["combination"], "witness.combination")?;
                let rep = self.rep_at(rep_name, get_usize(w, "radius")?)?;
                interior_status(&comb, &rep, &rep.probe(get_usize(w, "probe")?))
            }
            "theorem-a-ii" => {
                let comb = Combination::<S>::from_json(spec, &w["combination"], "witness.combination")?;
                let rep = self.rep_at(rep_name, get_usize(w, "radius")?)?;
                replay_theorem_a_ii(&self.engine, &rep, &comb, get_usize(w, "probe")?, get_usize(w, "hypothesis_radius")?, get_usize(w, "hypothesis_probe")?)
            }
            "kernel" => {
                let comb = Combination::<S>::from_json(spec, &w["combination"], "witness.combination")?;
                let lam = self.lambda_at(get_usize(w, "lambda_radius")?)?;
                let lam_cols: Vec<usize> = {
                    let h = get_usize(w, "lambda_probe")?;
                    lam.probe(h)
                };
                if interior_status(&comb, &lam, &lam_cols)? != Status::Pass {
                    return Ok(Status::Inconclusive);
                }
                let rep = self.rep_at(rep_name, get_usize(w, "radius")?)?;
                interior_status(&comb, &rep, &rep.probe(get_usize(w, "probe")?))
            }
            "wick" => {
                let word = OperatorWord::from_json(spec, &w["word"], "witness.word")?;
                let max_len = word.len();
                let (form, _) = wick_normal_form(&self.engine, &word, 2 * max_len.max(1))?;
                let lam = self.lambda_at(get_usize(w, "radius")?)?;
                let cols = lam.probe(get_usize(w, "probe")?);
                let mut comb = Combination::<S>::single(word);
                if let Some(nf) = form.to_word(spec) {
                    comb.terms.push((S::one().neg(), nf));
                }
                interior_status(&comb, &lam, &cols)
            }
            "ideal-membership" | "reduced-form" => Ok(if replay_calculus(&self.engine, w)? { Status::Violation } else { Status::Pass }),
            "crossed-product" | "crossed-adjoint" => {
                let p = spec.element_from_json(&w["p"], "witness.p")?;
                let q = spec.element_from_json(&w["q"], "witness.q")?;
                let rep = self.rep_at(rep_name, get_usize(w, "radius")?)?;
                let cols = rep.probe(get_usize(w, "probe")?);
                Ok(match crossed_axiom_case(&rep, kind == "crossed-adjoint", &p, &q, get_usize(w, "left")?, get_usize(w, "right")?, &cols)? {
                    None => Status::Inconclusive,
                    Some(true) => Status::Pass,
                    Some(false) => Status::Violation,
                })
            }
            "fiber-product" | "fiber-adjoint" => {
                let p = spec.element_from_json(&w["p"], "witness.p")?;
                let q = spec.element_from_json(&w["q"], "witness.q")?;
                let radius = get_usize(w, "radius")?;
                let fs = FiberSystem::build(self.product_system.clone(), spec, radius, self.num)?;
                let ball = enumerate_ball(spec, radius)?;
                let (Some(pi), Some(qi)) = (ball.index_of(&p), ball.index_of(&q)) else { return Ok(Status::Inconclusive) };
                let fails = check_axiom_pair(&fs, pi, qi).iter().any(|x| x.to_json(spec)["kind"] == kind);
                Ok(if fails { Status::Violation } else { Status::Pass })
            }
            _ => self.rerun_and_compare(v),
        }
    }

    /// Re-runs the originating check; the status stands only if the witness is reproduced.
    fn rerun_and_compare(&self, v: &CheckVerdict) -> Result<Status> {
        let check = self
            .scenario
            .checks
            .iter()
            .find(|c| c.name.as_str() == v.check || (c.name == CheckName::TheoremA && v.check == "theorem-a"))
            .ok_or_else(|| Error::schema("verdict.check", format!("check {:?} is not in the scenario", v.check)))?;
        let target = match check.name.target() {
            Target::None => String::new(),
            _ => v.rep.clone().unwrap_or_default(),
        };
        let again = self.run_check(check, &target);
        Ok(if again.witness == v.witness { again.status } else { Status::Inconclusive })
    }
}

/// Replays every witness in a report (or only verdict `only`).
pub fn replay(report: &Report, only: Option<usize>) -> std::result::Result<Vec<ReplayOutcome>, Vec<Error>> {
    let sc = crate::scenario::parse_scenario_value(&report.document)?;
    if content_hash(&report.document) != report.scenario_hash {
        return Err(vec![Error::schema("report.scenario_hash", "does not match the embedded scenario")]);
    }
    if let Some(i) = only {
        if i >= report.verdicts.len() {
            return Err(vec![Error::schema("index", format!("report has {} verdicts", report.verdicts.len()))]);
        }
    }
    match sc.settings.backend {
        Backend::Exact => replay_with(&Context::<GaussRational>::build(sc)?, report, only),
        Backend::Float => replay_with(&Context::<Float>::build(sc)?, report, only),
    }
}

fn replay_with<S: Scalar>(ctx: &Context<S>, report: &Report, only: Option<usize>) -> std::result::Result<Vec<ReplayOutcome>, Vec<Error>> {
    Ok(report
        .verdicts
        .iter()
        .enumerate()
        .filter(|(i, v)| only.map_or(v.witness.is_some(), |o| o == *i))
        .map(|(index, v)| ReplayOutcome {
            index,
            check: v.check.clone(),
            rep: v.rep.clone(),
            kind: v.witness.as_ref().and_then(|w| w.get("kind")).and_then(Value::as_str).unwrap_or("none").to_string(),
            original: v.status,
            replayed: ctx.replay_verdict(v).unwrap_or(Status::Error),
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Bundled scenarios

pub const BUNDLED: &[(&str, &str)] = &[
    ("n-basic", include_str!("../scenarios/n-basic.json")),
    ("n2-nica", include_str!("../scenarios/n2-nica.json")),
    ("n2-collapsed", include_str!("../scenarios/n2-collapsed.json")),
    ("f2-free", include_str!("../scenarios/f2-free.json")),
    ("f2-collapsed-shift", include_str!("../scenarios/f2-collapsed-shift.json")),
    ("s23-shift-T4", include_str!("../scenarios/s23-shift-T4.json")),
    ("s23-lambda", include_str!("../scenarios/s23-lambda.json")),
    ("affine", include_str!("../scenarios/affine.json")),
    ("nilpotent-shift", include_str!("../scenarios/nilpotent-shift.json")),
    ("nilpotent-corrupt", include_str!("../scenarios/nilpotent-corrupt.json")),
    ("crossed-n-z2", include_str!("../scenarios/crossed-n-z2.json")),
    ("crossed-n2-z2", include_str!("../scenarios/crossed-n2-z2.json")),
    ("crossed-corrupt", include_str!("../scenarios/crossed-corrupt.json")),
    ("too-small", include_str!("../scenarios/too-small.json")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{parse_scenario, Overrides};

    #[test]
    fn ragged_matrix_is_a_schema_error() {
        let e = parse_matrix::<GaussRational>(&json!([["1", "0"], ["0"]]), "m").unwrap_err();
        assert!(e.to_string().contains("m[1]"), "{e}");
    }

    #[test]
    fn bundled_scenarios_parse_and_build() {
        for (name, text) in BUNDLED {
            let sc = parse_scenario(text, &Overrides::default()).unwrap_or_else(|e| panic!("{name}: {e:?}"));
            assert_eq!(&sc.name, name);
            validate(&sc).unwrap_or_else(|e| panic!("{name}: {e:?}"));
        }
    }

    #[test]
    fn report_round_trips() {
        let sc = parse_scenario(bundled("n-basic").unwrap(), &Overrides::default()).unwrap();
        let r = run(&sc, &RunOptions::default()).unwrap();
        let text = r.to_json_string();
        assert_eq!(Report::from_json_str(&text).unwrap().to_json_string(), text);
    }

    #[test]
    fn floats_survive_a_round_trip() {
        let sc = parse_scenario(bundled("n-basic").unwrap(), &Overrides::default()).unwrap();
        let mut r = run(&sc, &RunOptions::default()).unwrap();
        r.verdicts[0].details = json!({"residual": 0.11100000000003364});
        let back = Report::from_json_str(&r.to_json_string()).unwrap();
        assert_eq!(back, r);
    }
}
