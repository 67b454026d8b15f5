use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// One violated law, with the identifiers that witness the failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub law: String,
    pub witness: Vec<String>,
    pub detail: String,
}

/// Outcome of a structural validation. An empty list of violations means the
/// candidate satisfies every checked law.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok() -> Self {
        Self::default()
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, law: &str, witness: Vec<String>, detail: impl Into<String>) {
        self.violations.push(Violation {
            law: law.to_string(),
            witness,
            detail: detail.into(),
        });
    }

    /// True if some violation is filed under `law`.
    pub fn has(&self, law: &str) -> bool {
        self.violations.iter().any(|v| v.law == law)
    }

    pub fn into_result<T>(self, value: T, wrap: fn(ValidationReport) -> Error) -> Result<T> {
        if self.is_ok() {
            Ok(value)
        } else {
            Err(wrap(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {} [{}]", v.law, v.detail, v.witness.join(", "))?;
        }
        Ok(())
    }
}

/// Raised when a search visits more partial assignments than its ceiling allows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResourceExceeded {
    pub ceiling: u64,
    pub context: String,
    /// Sizes of whatever had been completed before the ceiling was hit, e.g.
    /// the total cardinalities of successive conjugates.
    pub profile: Vec<usize>,
}

impl fmt::Display for ResourceExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "search ceiling of {} partial assignments exceeded while {}",
            self.ceiling, self.context
        )?;
        if !self.profile.is_empty() {
            let sizes: Vec<String> = self.profile.iter().map(|s| s.to_string()).collect();
            write!(f, " (completed sizes: {})", sizes.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid category: {0}")]
    InvalidCategory(ValidationReport),
    #[error("invalid functor: {0}")]
    InvalidFunctor(ValidationReport),
    #[error("invalid natural transformation: {0}")]
    InvalidTransformation(ValidationReport),
    #[error("invalid poset: {0}")]
    InvalidPoset(ValidationReport),
    #[error("invalid metric space: {0}")]
    InvalidMetric(ValidationReport),
    #[error("invalid cost vector: {0}")]
    InvalidCost(ValidationReport),
    #[error("invalid envelope object: {0}")]
    InvalidEnvelope(ValidationReport),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("variance mismatch: expected {expected}, found {found}")]
    VarianceMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("functors live on different base categories")]
    BaseMismatch,
    #[error("metric space is not symmetric")]
    NotSymmetric,
    #[error("cost vectors live on different spaces")]
    SpaceMismatch,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{0}")]
    Resource(ResourceExceeded),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
