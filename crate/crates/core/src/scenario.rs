//! Scenario documents: parsing, validation and bound overrides.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::covariance::Bounds;
use crate::error::{Error, Result};
use crate::ideal::is_structurally_right_lcm;
use crate::monoid::{MonoidSpec, DEFAULT_BALL_CAP};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exact" => Some(Backend::Exact),
            "float" => Some(Backend::Float),
            _ => None,
        }
    }
}

/// Every check a scenario may name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CheckName {
    FockAxioms,
    RepAxioms,
    RightLcm,
    TConditions,
    Nica,
    CompactAlignment,
    Wick,
    TheoremA,
    KernelInclusion,
    ProjectionAlgebra,
    FockFormulas,
    IdealCalculus,
    CrossedAxioms,
    CrossedCoreIdentity,
    CrossedExpectation,
    CrossedGauge,
    CrossedTheoremA,
}

/// Which representations a check runs against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// Scenario-level: no representation.
    None,
    /// The Fock representation only.
    Fock,
    /// Each base representation (or the one named).
    Base,
    /// Each crossed representation (or the one named).
    Crossed,
}

impl CheckName {
    pub const ALL: [CheckName; 17] = [
        CheckName::FockAxioms,
        CheckName::RepAxioms,
        CheckName::RightLcm,
        CheckName::TConditions,
        CheckName::Nica,
        CheckName::CompactAlignment,
        CheckName::Wick,
        CheckName::TheoremA,
        CheckName::KernelInclusion,
        CheckName::ProjectionAlgebra,
        CheckName::FockFormulas,
        CheckName::IdealCalculus,
        CheckName::CrossedAxioms,
        CheckName::CrossedCoreIdentity,
        CheckName::CrossedExpectation,
        CheckName::CrossedGauge,
        CheckName::CrossedTheoremA,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::FockAxioms => "fock-axioms",
            CheckName::RepAxioms => "rep-axioms",
            CheckName::RightLcm => "right-lcm",
            CheckName::TConditions => "t-conditions",
            CheckName::Nica => "nica",
            CheckName::CompactAlignment => "compact-alignment",
            CheckName::Wick => "wick",
            CheckName::TheoremA => "theorem-a",
            CheckName::KernelInclusion => "kernel-inclusion",
            CheckName::ProjectionAlgebra => "projection-algebra",
            CheckName::FockFormulas => "fock-formulas",
            CheckName::IdealCalculus => "ideal-calculus",
            CheckName::CrossedAxioms => "crossed-axioms",
            CheckName::CrossedCoreIdentity => "crossed-core-identity",
            CheckName::CrossedExpectation => "crossed-expectation",
            CheckName::CrossedGauge => "crossed-gauge",
            CheckName::CrossedTheoremA => "crossed-theorem-a",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }

    pub fn target(self) -> Target {
        use CheckName::*;
        match self {
            FockAxioms | RightLcm | IdealCalculus => Target::None,
            CompactAlignment | Wick | ProjectionAlgebra | FockFormulas => Target::Fock,
            RepAxioms | TConditions | Nica | TheoremA | KernelInclusion => Target::Base,
            CrossedAxioms | CrossedCoreIdentity | CrossedExpectation | CrossedGauge | CrossedTheoremA => Target::Crossed,
        }
    }

    /// Checks whose verdicts assume a right LCM monoid.
    pub fn needs_right_lcm(self) -> bool {
        matches!(self, CheckName::Nica | CheckName::CompactAlignment | CheckName::Wick)
    }

    /// Checks that only make sense for `X_P`.
    pub fn needs_semigroup_case(self) -> bool {
        matches!(self, CheckName::TConditions | CheckName::Wick | CheckName::ProjectionAlgebra)
    }

    /// Checks reading `λ` alongside their target.
    pub fn needs_fock(self) -> bool {
        !matches!(self.target(), Target::None) && !matches!(self, CheckName::RepAxioms | CheckName::TConditions | CheckName::TheoremA)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RepKind {
    Fock,
    ShiftPower { weights: Vec<usize> },
    /// Literal matrices, parsed per backend at run time.
    Matrix { coefficients: Value, fibers: Value },
    Crossed { base: String, action: String, corrupt: Value },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepDecl {
    pub name: String,
    pub kind: RepKind,
}

impl RepDecl {
    pub fn is_crossed(&self) -> bool {
        matches!(self.kind, RepKind::Crossed { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckSpec {
    pub name: CheckName,
    pub rep: Option<String>,
    pub params: Map<String, Value>,
    /// The entry as written, used for cache keys.
    pub raw: Value,
}

impl CheckSpec {
    pub fn param_usize(&self, key: &str, default: usize) -> usize {
        self.params.get(key).and_then(Value::as_u64).map_or(default, |v| v as usize)
    }
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub bounds: Bounds,
    pub backend: Backend,
    pub tolerance: f64,
    pub ball_cap: usize,
    pub horizon: usize,
    /// Fixed evaluation radius. Unset, each check sizes its own ball so that
    /// probes at `L` stay in the interior.
    pub radius: Option<usize>,
}

impl Settings {
    pub fn to_json(&self) -> Value {
        let b = &self.bounds;
        let mut v = json!({
            "L": b.l,
            "L_big": b.l_big,
            "step": b.step,
            "W": b.w,
            "letter_radius": b.letter_radius,
            "core_cap": b.core_cap,
            "seed": b.seed,
            "backend": self.backend.as_str(),
            "tolerance": self.tolerance,
            "ball_cap": self.ball_cap,
            "horizon": self.horizon,
        });
        if let Some(r) = self.radius {
            v["radius"] = json!(r);
        }
        v
    }
}

/// A validated scenario. `document` is the input with overrides applied.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub monoid: MonoidSpec,
    /// `None` for `X_P`.
    pub product_system: Option<Value>,
    pub representations: Vec<RepDecl>,
    pub actions: BTreeMap<String, Value>,
    pub settings: Settings,
    pub checks: Vec<CheckSpec>,
    pub assumptions: Vec<String>,
    pub warnings: Vec<String>,
    pub document: Value,
}

impl Scenario {
    pub fn rep(&self, name: &str) -> Option<&RepDecl> {
        self.representations.iter().find(|r| r.name == name)
    }

    /// Name of the first declared Fock representation.
    pub fn fock_rep(&self) -> Option<&str> {
        self.representations.iter().find(|r| r.kind == RepKind::Fock).map(|r| r.name.as_str())
    }

    pub fn is_semigroup_case(&self) -> bool {
        self.product_system.is_none()
    }

    /// Representation names a check entry runs against, in declaration order.
    pub fn targets(&self, check: &CheckSpec) -> Vec<String> {
        match check.name.target() {
            Target::None => vec![String::new()],
            Target::Fock => self.fock_rep().map(str::to_string).into_iter().collect(),
            Target::Base | Target::Crossed => match &check.rep {
                Some(r) => vec![r.clone()],
                None => {
                    let crossed = check.name.target() == Target::Crossed;
                    self.representations.iter().filter(|r| r.is_crossed() == crossed).map(|r| r.name.clone()).collect()
                }
            },
        }
    }
}

/// Command-line overrides of scenario bounds.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub l: Option<usize>,
    pub l_big: Option<usize>,
    pub w: Option<usize>,
    pub backend: Option<Backend>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn is_empty(&self) -> bool {
        self.l.is_none() && self.l_big.is_none() && self.w.is_none() && self.backend.is_none() && self.tolerance.is_none() && self.seed.is_none()
    }

    /// Writes the overrides into the document's `bounds`. A new `L` without a
    /// new `L_big` lifts `L_big` to at least `L + 2`.
    pub fn apply(&self, doc: &mut Value) {
        let Some(obj) = doc.as_object_mut() else { return };
        let b = obj.entry("bounds").or_insert_with(|| json!({}));
        let Some(b) = b.as_object_mut() else { return };
        if let Some(l) = self.l {
            b.insert("L".into(), json!(l));
            if self.l_big.is_none() {
                let cur = b.get("L_big").and_then(Value::as_u64).unwrap_or(0) as usize;
                if cur < l {
                    b.insert("L_big".into(), json!(l + 2));
                }
            }
        }
        if let Some(v) = self.l_big {
            b.insert("L_big".into(), json!(v));
        }
        if let Some(v) = self.w {
            b.insert("W".into(), json!(v));
        }
        if let Some(v) = self.backend {
            b.insert("backend".into(), json!(v.as_str()));
        }
        if let Some(v) = self.tolerance {
            b.insert("tolerance".into(), json!(v));
        }
        if let Some(v) = self.seed {
            b.insert("seed".into(), json!(v));
        }
    }
}

struct Errors(Vec<Error>);

impl Errors {
    fn push(&mut self, path: impl Into<String>, msg: impl Into<String>) {
        self.0.push(Error::schema(path, msg));
    }

    fn take<T>(&mut self, r: Result<T>) -> Option<T> {
        r.map_err(|e| self.0.push(e)).ok()
    }
}

fn ints(v: &Value) -> Option<Vec<i64>> {
    v.as_array()?.iter().map(Value::as_i64).collect()
}

pub fn parse_monoid(v: &Value, path: &str) -> Result<MonoidSpec> {
    let obj = v.as_object().ok_or_else(|| Error::schema(path, "expected an object"))?;
    let family = obj.get("family").and_then(Value::as_str).ok_or_else(|| Error::schema(format!("{path}.family"), "missing family name"))?;
    let rank = || {
        obj.get("rank")
            .and_then(Value::as_u64)
            .filter(|&r| (1..=8).contains(&r))
            .map(|r| r as usize)
            .ok_or_else(|| Error::schema(format!("{path}.rank"), "expected a rank between 1 and 8"))
    };
    let gens = || obj.get("generators").ok_or_else(|| Error::schema(format!("{path}.generators"), "missing"));
    let spec = match family {
        "lattice" => MonoidSpec::lattice(rank()?),
        "free" => MonoidSpec::free(rank()?),
        "numerical" => {
            let g = ints(gens()?).ok_or_else(|| Error::schema(format!("{path}.generators"), "expected integers"))?;
            MonoidSpec::numerical(&g).map_err(|e| Error::schema(format!("{path}.generators"), e.to_string()))?
        }
        "affine" => {
            let g = gens()?
                .as_array()
                .and_then(|a| a.iter().map(|p| ints(p).filter(|p| p.len() == 2).map(|p| (p[0], p[1]))).collect::<Option<Vec<_>>>())
                .ok_or_else(|| Error::schema(format!("{path}.generators"), "expected [b, a] integer pairs"))?;
            let full = obj.get("full").and_then(Value::as_bool).unwrap_or(false);
            MonoidSpec::affine(&g, full).map_err(|e| Error::schema(format!("{path}.generators"), e.to_string()))?
        }
        other => return Err(Error::schema(format!("{path}.family"), format!("unknown family {other:?}"))),
    };
    for key in obj.keys() {
        if !["family", "rank", "generators", "full"].contains(&key.as_str()) {
            return Err(Error::schema(format!("{path}.{key}"), "unknown field"));
        }
    }
    Ok(spec)
}

fn parse_settings(v: Option<&Value>, errs: &mut Errors) -> Settings {
    let mut s = Settings {
        bounds: Bounds::default(),
        backend: Backend::Exact,
        tolerance: 1e-9,
        ball_cap: DEFAULT_BALL_CAP,
        horizon: 0,
        radius: None,
    };
    let Some(v) = v else {
        s.horizon = s.bounds.l;
        return s;
    };
    let Some(obj) = v.as_object() else {
        errs.push("bounds", "expected an object");
        return s;
    };
    for (k, x) in obj {
        let path = format!("bounds.{k}");
        let uint = |errs: &mut Errors| match x.as_u64() {
            Some(n) => Some(n as usize),
            None => {
                errs.push(&path, "expected a non-negative integer");
                None
            }
        };
        match k.as_str() {
            "L" => s.bounds.l = uint(errs).unwrap_or(s.bounds.l),
            "L_big" => s.bounds.l_big = uint(errs).unwrap_or(s.bounds.l_big),
            "step" => s.bounds.step = uint(errs).unwrap_or(s.bounds.step),
            "W" => s.bounds.w = uint(errs).unwrap_or(s.bounds.w),
            "letter_radius" => s.bounds.letter_radius = uint(errs).unwrap_or(s.bounds.letter_radius),
            "core_cap" => s.bounds.core_cap = uint(errs).unwrap_or(s.bounds.core_cap),
            "ball_cap" => s.ball_cap = uint(errs).unwrap_or(s.ball_cap),
            "horizon" => s.horizon = uint(errs).unwrap_or(0),
            "radius" => s.radius = uint(errs),
            "seed" => s.bounds.seed = x.as_u64().unwrap_or_else(|| {
                errs.push(&path, "expected a non-negative integer");
                0
            }),
            "tolerance" => match x.as_f64().filter(|t| t.is_finite() && *t >= 0.0) {
                Some(t) => s.tolerance = t,
                None => errs.push(&path, "expected a non-negative number"),
            },
            "backend" => match x.as_str().and_then(Backend::parse) {
                Some(b) => s.backend = b,
                None => errs.push(&path, "expected \"exact\" or \"float\""),
            },
            _ => errs.push(&path, "unknown field"),
        }
    }
    let b = &s.bounds;
    if b.l_big < b.l {
        errs.push("bounds.L_big", format!("must be at least L = {}", b.l));
    }
    if s.radius.is_some_and(|r| r < b.l) {
        errs.push("bounds.radius", format!("must be at least L = {}", b.l));
    }
    if b.step == 0 {
        errs.push("bounds.step", "must be positive");
    }
    if b.w == 0 {
        errs.push("bounds.W", "must be positive");
    }
    if b.letter_radius == 0 {
        errs.push("bounds.letter_radius", "must be positive");
    }
    if s.horizon == 0 {
        s.horizon = b.l.max(1);
    }
    s
}

fn parse_rep(v: &Value, path: &str, errs: &mut Errors) -> Option<RepDecl> {
    let Some(obj) = v.as_object() else {
        errs.push(path, "expected an object");
        return None;
    };
    let name = match obj.get("name").and_then(Value::as_str) {
        Some(n) if !n.is_empty() => n.to_string(),
        _ => {
            errs.push(format!("{path}.name"), "missing name");
            return None;
        }
    };
    let kind = match obj.get("kind").and_then(Value::as_str) {
        Some("fock") => RepKind::Fock,
        Some("shift-power") => {
            let w = obj.get("weights").and_then(|w| w.as_array()?.iter().map(|x| x.as_u64().map(|x| x as usize)).collect::<Option<Vec<_>>>());
            match w {
                Some(weights) => RepKind::ShiftPower { weights },
                None => {
                    errs.push(format!("{path}.weights"), "expected non-negative integers");
                    return None;
                }
            }
        }
        Some("matrix") => RepKind::Matrix {
            coefficients: obj.get("coefficients").cloned().unwrap_or(Value::Null),
            fibers: obj.get("fibers").cloned().unwrap_or(Value::Null),
        },
        Some("crossed") => {
            let get = |k: &str, errs: &mut Errors| match obj.get(k).and_then(Value::as_str) {
                Some(s) => Some(s.to_string()),
                None => {
                    errs.push(format!("{path}.{k}"), "expected a name");
                    None
                }
            };
            let base = get("base", errs);
            let action = get("action", errs);
            RepKind::Crossed {
                base: base?,
                action: action?,
                corrupt: obj.get("corrupt").cloned().unwrap_or(json!([])),
            }
        }
        other => {
            errs.push(format!("{path}.kind"), format!("unknown representation kind {other:?}"));
            return None;
        }
    };
    Some(RepDecl { name, kind })
}

fn parse_check(v: &Value, path: &str, errs: &mut Errors) -> Option<CheckSpec> {
    let (name, params) = match v {
        Value::String(s) => (s.clone(), Map::new()),
        Value::Object(o) => match o.get("check").and_then(Value::as_str) {
            Some(s) => (s.to_string(), o.clone()),
            None => {
                errs.push(format!("{path}.check"), "missing check name");
                return None;
            }
        },
        _ => {
            errs.push(path, "expected a check name or object");
            return None;
        }
    };
    let Some(check) = CheckName::parse(&name) else {
        errs.push(path, format!("unknown check {name:?}"));
        return None;
    };
    let rep = params.get("rep").and_then(Value::as_str).map(str::to_string);
    Some(CheckSpec { name: check, rep, params, raw: v.clone() })
}

/// Parses and validates a scenario document; all schema errors are reported.
pub fn parse_scenario_value(doc: &Value) -> std::result::Result<Scenario, Vec<Error>> {
    let mut errs = Errors(Vec::new());
    let Some(obj) = doc.as_object() else {
        return Err(vec![Error::schema("$", "scenario must be a JSON object")]);
    };
    match obj.get("schema").and_then(Value::as_u64) {
        Some(SCHEMA_VERSION) => {}
        Some(v) => errs.push("schema", format!("unsupported schema version {v}")),
        None => errs.push("schema", format!("missing \"schema\": {SCHEMA_VERSION}")),
    }
    for key in obj.keys() {
        if !["schema", "name", "description", "monoid", "product_system", "representations", "actions", "bounds", "checks"].contains(&key.as_str()) {
            errs.push(key.clone(), "unknown field");
        }
    }
    let name = obj.get("name").and_then(Value::as_str).unwrap_or("unnamed").to_string();
    let description = obj.get("description").and_then(Value::as_str).unwrap_or_default().to_string();
    let settings = parse_settings(obj.get("bounds"), &mut errs);
    let monoid = match obj.get("monoid") {
        Some(m) => errs.take(parse_monoid(m, "monoid")).map(|m| m.with_ball_cap(settings.ball_cap)),
        None => {
            errs.push("monoid", "missing");
            None
        }
    };
    let product_system = match obj.get("product_system") {
        None => None,
        Some(Value::String(s)) if s == "X_P" => None,
        Some(v @ Value::Object(_)) => Some(v.clone()),
        Some(_) => {
            errs.push("product_system", "expected \"X_P\" or an object");
            None
        }
    };

    let mut representations = Vec::new();
    match obj.get("representations") {
        None => {}
        Some(Value::Array(a)) => {
            for (i, r) in a.iter().enumerate() {
                if let Some(d) = parse_rep(r, &format!("representations[{i}]"), &mut errs) {
                    if representations.iter().any(|x: &RepDecl| x.name == d.name) {
                        errs.push(format!("representations[{i}].name"), format!("duplicate name {:?}", d.name));
                    }
                    representations.push(d);
                }
            }
        }
        Some(_) => errs.push("representations", "expected an array"),
    }
    let mut actions = BTreeMap::new();
    match obj.get("actions") {
        None => {}
        Some(Value::Object(a)) => actions.extend(a.iter().map(|(k, v)| (k.clone(), v.clone()))),
        Some(_) => errs.push("actions", "expected an object of named actions"),
    }
    let mut checks = Vec::new();
    match obj.get("checks") {
        Some(Value::Array(a)) if !a.is_empty() => {
            for (i, c) in a.iter().enumerate() {
                if let Some(c) = parse_check(c, &format!("checks[{i}]"), &mut errs) {
                    checks.push(c);
                }
            }
        }
        _ => errs.push("checks", "expected a non-empty array"),
    }

    let mut warnings = Vec::new();
    let mut assumptions = Vec::new();
    for (i, r) in representations.iter().enumerate() {
        let path = format!("representations[{i}]");
        match &r.kind {
            RepKind::ShiftPower { weights } => {
                if product_system.is_some() {
                    errs.push(&path, "shift-power representations need the product system X_P");
                }
                if let Some(m) = &monoid {
                    if weights.len() != m.generators.len() {
                        errs.push(format!("{path}.weights"), format!("expected {} weights", m.generators.len()));
                    }
                }
            }
            RepKind::Matrix { .. } if product_system.is_none() => {
                errs.push(&path, "matrix representations need an explicit product system");
            }
            RepKind::Crossed { base, action, .. } => {
                match representations.iter().find(|x| &x.name == base) {
                    Some(b) if b.kind == RepKind::Fock => {}
                    Some(_) => errs.push(format!("{path}.base"), "the base of a crossed representation must be a fock representation"),
                    None => errs.push(format!("{path}.base"), format!("unknown representation {base:?}")),
                }
                if !actions.contains_key(action) {
                    errs.push(format!("{path}.action"), format!("unknown action {action:?}"));
                }
            }
            _ => {}
        }
        if !matches!(r.kind, RepKind::Fock) {
            assumptions.push(format!("{} is equivariant for the grading of its letters by P", r.name));
        }
    }

    let mut seen_lcm = false;
    for (i, c) in checks.iter().enumerate() {
        let path = format!("checks[{i}]");
        let n = c.name.as_str();
        if c.name == CheckName::RightLcm {
            seen_lcm = true;
        }
        if c.name.needs_right_lcm() {
            if !seen_lcm {
                errs.push(&path, format!("{n} needs an earlier right-lcm check"));
            }
            if let Some(m) = &monoid {
                if is_structurally_right_lcm(m) == Some(false) {
                    warnings.push(format!("{n}: the right-LCM prerequisite is unsatisfiable for this monoid; the check will report a structural error"));
                }
            }
        }
        if c.name.needs_semigroup_case() && product_system.is_some() {
            warnings.push(format!("{n} applies to X_P only; the check will report a structural error"));
        }
        if c.name.needs_fock() && representations.iter().all(|r| r.kind != RepKind::Fock) {
            errs.push(&path, format!("{n} needs a fock representation"));
        }
        if let Some(r) = &c.rep {
            match representations.iter().find(|x| &x.name == r) {
                None => errs.push(format!("{path}.rep"), format!("unknown representation {r:?}")),
                Some(d) => {
                    let want_crossed = c.name.target() == Target::Crossed;
                    if matches!(c.name.target(), Target::None | Target::Fock) {
                        errs.push(format!("{path}.rep"), format!("{n} does not take a representation"));
                    } else if d.is_crossed() != want_crossed {
                        errs.push(format!("{path}.rep"), format!("{n} needs a {} representation", if want_crossed { "crossed" } else { "base" }));
                    }
                }
            }
        } else if matches!(c.name.target(), Target::Crossed) && !representations.iter().any(RepDecl::is_crossed) {
            errs.push(&path, format!("{n} needs a crossed representation"));
        }
    }

    if !errs.0.is_empty() {
        return Err(errs.0);
    }
    Ok(Scenario {
        name,
        description,
        monoid: monoid.expect("no errors"),
        product_system,
        representations,
        actions,
        settings,
        checks,
        assumptions,
        warnings,
        document: doc.clone(),
    })
}

pub fn parse_scenario(text: &str, overrides: &Overrides) -> std::result::Result<Scenario, Vec<Error>> {
    let mut doc: Value = serde_json::from_str(text).map_err(|e| vec![Error::schema("$", format!("invalid JSON: {e}"))])?;
    overrides.apply(&mut doc);
    parse_scenario_value(&doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(v: Value) -> std::result::Result<Scenario, Vec<Error>> {
        parse_scenario_value(&v)
    }

    #[test]
    fn minimal_scenario() {
        let s = parse(json!({"schema": 1, "monoid": {"family": "numerical", "generators": [1]}, "checks": ["fock-axioms"]})).unwrap();
        assert!(s.is_semigroup_case());
        assert_eq!(s.checks[0].name, CheckName::FockAxioms);
    }

    #[test]
    fn errors_carry_paths() {
        let errs = parse(json!({
            "schema": 2,
            "monoid": {"family": "torus"},
            "bounds": {"L": 4, "L_big": 2},
            "checks": ["fock-axioms", "bogus"]
        }))
        .unwrap_err();
        let text: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
        for needle in ["schema", "monoid.family", "bounds.L_big", "checks[1]"] {
            assert!(text.iter().any(|t| t.contains(needle)), "{needle} missing from {text:?}");
        }
    }

    #[test]
    fn nica_on_non_lcm_warns() {
        let s = parse(json!({
            "schema": 1,
            "monoid": {"family": "numerical", "generators": [2, 3]},
            "representations": [{"name": "lambda", "kind": "fock"}],
            "checks": ["right-lcm", "nica"]
        }))
        .unwrap();
        assert_eq!(s.warnings.len(), 1);
        assert!(parse(json!({
            "schema": 1,
            "monoid": {"family": "numerical", "generators": [2, 3]},
            "representations": [{"name": "lambda", "kind": "fock"}],
            "checks": ["nica"]
        }))
        .is_err());
    }

    #[test]
    fn overrides_lift_big_truncation() {
        let mut doc = json!({"bounds": {"L": 3, "L_big": 5}});
        Overrides { l: Some(8), ..Default::default() }.apply(&mut doc);
        assert_eq!(doc["bounds"]["L_big"], 10);
    }
}
