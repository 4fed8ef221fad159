use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),
    #[error("resource cap exceeded: {what} would exceed {cap} (raise `{knob}`)")]
    Resource {
        what: String,
        cap: usize,
        knob: String,
    },
    #[error("invalid input at {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("structural error: {0}")]
    Structural(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn schema(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            msg: msg.into(),
        }
    }

    pub fn resource(what: impl Into<String>, cap: usize, knob: impl Into<String>) -> Self {
        Error::Resource {
            what: what.into(),
            cap,
            knob: knob.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
