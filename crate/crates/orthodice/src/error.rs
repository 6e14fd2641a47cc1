//! Crate-wide error type.
//!
//! Every fallible operation in this crate returns [`Error`]. The variant name
//! doubles as a stable machine-readable tag (see [`Error::name`]) so the CLI
//! can report `Name: detail` on stderr and scripts can match on the name.

use thiserror::Error;

/// Errors produced by dice construction, law evaluation, simulation and the
/// application studies.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The index is not in the family index set I = {k >= 1 : 3 does not divide k}.
    #[error("IndexNotInI: {0}")]
    IndexNotInI(String),

    /// A side count must be >= 5 and coprime to both 2 and 3.
    #[error("InvalidSideCount: {0}")]
    InvalidSideCount(String),

    /// A support {m..n} must satisfy m <= n with n >= 1.
    #[error("InvalidSupport: {0}")]
    InvalidSupport(String),

    /// The argument is below the smallest value for which the quantity is defined.
    #[error("DomainTooSmall: {0}")]
    DomainTooSmall(String),

    /// The requested exact computation would materialize a support larger than the cap.
    #[error("SupportTooLarge: {0}")]
    SupportTooLarge(String),

    /// Occupancy counts do not form a valid partition of the hand.
    #[error("InvalidPartition: {0}")]
    InvalidPartition(String),

    /// A time argument lies outside the model horizon [0, T].
    #[error("TimeOutOfRange: {0}")]
    TimeOutOfRange(String),

    /// The potential kernel is singular at the requested point and no softening is active.
    #[error("SingularEvaluationPoint: {0}")]
    SingularEvaluationPoint(String),

    /// The moment (Hankel) matrix is not positive definite at the requested degree.
    #[error("DegenerateMomentMatrix: {0}")]
    DegenerateMomentMatrix(String),

    /// A parameter failed validation (thinning level, replicate count, grid, ...).
    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Stable name of the error variant, e.g. `"IndexNotInI"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::IndexNotInI(_) => "IndexNotInI",
            Error::InvalidSideCount(_) => "InvalidSideCount",
            Error::InvalidSupport(_) => "InvalidSupport",
            Error::DomainTooSmall(_) => "DomainTooSmall",
            Error::SupportTooLarge(_) => "SupportTooLarge",
            Error::InvalidPartition(_) => "InvalidPartition",
            Error::TimeOutOfRange(_) => "TimeOutOfRange",
            Error::SingularEvaluationPoint(_) => "SingularEvaluationPoint",
            Error::DegenerateMomentMatrix(_) => "DegenerateMomentMatrix",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_prefixes_variant_name() {
        let e = Error::IndexNotInI("k = 3".into());
        assert_eq!(e.to_string(), "IndexNotInI: k = 3");
        assert_eq!(e.name(), "IndexNotInI");
    }

    #[test]
    fn names_are_distinct() {
        let errs = [
            Error::IndexNotInI(String::new()),
            Error::InvalidSideCount(String::new()),
            Error::InvalidSupport(String::new()),
            Error::DomainTooSmall(String::new()),
            Error::SupportTooLarge(String::new()),
            Error::InvalidPartition(String::new()),
            Error::TimeOutOfRange(String::new()),
            Error::SingularEvaluationPoint(String::new()),
            Error::DegenerateMomentMatrix(String::new()),
            Error::InvalidParameter(String::new()),
        ];
        let mut names: Vec<_> = errs.iter().map(|e| e.name()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), errs.len());
    }
}
