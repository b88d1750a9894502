//! Error type shared across the crate.

use std::fmt;

/// Errors produced by construction, arithmetic and the sparsification pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An element or vector does not conform to the group spec it was used with.
    ShapeMismatch {
        expected: usize,
        got: usize,
    },
    /// A modulus smaller than 2 was supplied.
    InvalidModulus(u64),
    /// A row with no nonzero entry was given where a pivot is required.
    AllZeroRow,
    /// Coordinate or column index outside the matrix.
    IndexOutOfRange {
        index: usize,
        bound: usize,
    },
    /// Caller violated a documented argument contract.
    InvalidArgument(String),
    /// Enumeration would exceed the configured cap.
    EnumerationCapExceeded {
        needed: num_bigint::BigUint,
        cap: u64,
    },
    /// Unweighting would materialize more replicas than the configured cap.
    ReplicaCapExceeded {
        needed: u128,
        cap: u64,
    },
    /// Constraints with different predicates were passed to a single-predicate encoder.
    MixedPredicates,
    /// A predicate expected to be symmetric is not.
    NotSymmetric,
    /// A symmetric predicate is aperiodic; carries a validated projection witness.
    Aperiodic {
        witness: crate::csp::AndWitness,
    },
    /// A predicate with exactly one satisfying assignment was given to the
    /// non-trivial driver; such predicates sit on the lower-bound side.
    SingleSatisfyingAssignment {
        constraint: usize,
    },
    /// The zero set is not closed under integer linear combinations; carries
    /// the first assignment in the lattice that the predicate maps to 1.
    ZeroSetNotClosed {
        counterexample: Vec<u8>,
    },
    /// Generic unsupported-case error (e.g. non-cyclically-closed Cayley spec).
    Unsupported(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch { expected, got } => {
                write!(f, "shape mismatch: expected {expected} components, got {got}")
            }
            Error::InvalidModulus(q) => write!(f, "modulus {q} is invalid; moduli must be >= 2"),
            Error::AllZeroRow => write!(f, "row is all zero; no pivot exists"),
            Error::IndexOutOfRange { index, bound } => {
                write!(f, "index {index} out of range (bound {bound})")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::EnumerationCapExceeded { needed, cap } => {
                write!(f, "enumeration needs {needed} messages, cap is {cap}")
            }
            Error::ReplicaCapExceeded { needed, cap } => {
                write!(f, "unweighting needs {needed} replicas, cap is {cap}")
            }
            Error::MixedPredicates => write!(f, "constraints do not share a single predicate"),
            Error::NotSymmetric => write!(f, "predicate is not symmetric"),
            Error::Aperiodic { .. } => {
                write!(f, "predicate is aperiodic; AND_2 projection witness attached")
            }
            Error::SingleSatisfyingAssignment { constraint } => {
                write!(
                    f,
                    "constraint {constraint} has exactly one satisfying assignment (lower-bound case)"
                )
            }
            Error::ZeroSetNotClosed { counterexample } => {
                let s: String = counterexample.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect();
                write!(f, "zero set not closed under integer combinations; counterexample {s}")
            }
            Error::Unsupported(msg) => write!(f, "unsupported: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
