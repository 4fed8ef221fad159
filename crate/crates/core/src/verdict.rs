//! Check outcomes shared by every checker.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Violation,
    Error,
}

impl Status {
    /// Process exit code contribution.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Violation => 1,
            Status::Inconclusive => 2,
            Status::Error => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Inconclusive => "inconclusive",
            Status::Violation => "violation",
            Status::Error => "error",
        }
    }
}

/// Overall exit code: errors dominate, then violations, then inconclusive verdicts.
pub fn combine_exit(statuses: impl IntoIterator<Item = Status>) -> i32 {
    let mut worst = 0;
    for s in statuses {
        worst = match (worst, s) {
            (3, _) | (_, Status::Error) => 3,
            (1, _) | (_, Status::Violation) => 1,
            (2, _) | (_, Status::Inconclusive) => 2,
            _ => 0,
        };
    }
    worst
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckVerdict {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rep: Option<String>,
    pub status: Status,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Value>,
    /// Radii at which the verdict was observed.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub stability: Vec<usize>,
    #[serde(skip_serializing_if = "Value::is_null", default)]
    pub details: Value,
}

impl CheckVerdict {
    pub fn new(check: &str, status: Status, reason: impl Into<String>) -> Self {
        CheckVerdict {
            check: check.to_string(),
            rep: None,
            status,
            reason: reason.into(),
            witness: None,
            stability: Vec::new(),
            details: Value::Null,
        }
    }

    pub fn pass(check: &str, reason: impl Into<String>) -> Self {
        Self::new(check, Status::Pass, reason)
    }

    pub fn violation(check: &str, reason: impl Into<String>, witness: Value) -> Self {
        let mut v = Self::new(check, Status::Violation, reason);
        v.witness = Some(witness);
        v
    }

    pub fn inconclusive(check: &str, reason: impl Into<String>) -> Self {
        Self::new(check, Status::Inconclusive, reason)
    }

    pub fn error(check: &str, err: &crate::Error) -> Self {
        Self::new(check, Status::Error, err.to_string())
    }

    pub fn with_rep(mut self, rep: &str) -> Self {
        self.rep = Some(rep.to_string());
        self
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn with_stability(mut self, radii: Vec<usize>) -> Self {
        self.stability = radii;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_rank_errors_first() {
        use Status::*;
        assert_eq!(combine_exit([Pass, Pass]), 0);
        assert_eq!(combine_exit([Pass, Inconclusive]), 2);
        assert_eq!(combine_exit([Inconclusive, Violation, Pass]), 1);
        assert_eq!(combine_exit([Violation, Error]), 3);
        assert_eq!(combine_exit([]), 0);
    }
}
