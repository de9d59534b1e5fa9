//! Exact arithmetic: ordered value groups of rational rank at most two,
//! lattice indices, residue-field towers over ℚ or 𝔽_p, and linear algebra
//! over the base field.

mod lattice;
mod linalg;
mod tower;
mod value;

pub use lattice::{group_index, in_group, GroupIndex};
pub use linalg::Span;
pub use tower::{
    degree_over, minimal_polynomial_over, tower_extend, BaseField, Irreducibility, ResidueTower,
    Subfield, TowerElem, TowerLevel,
};
pub use value::{int, rat, value_cmp, IrrationalDescriptor, Rat, Value, ValueGroup};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("undecided comparison of {0} and {1}: refinement budget exhausted")]
    UndecidedComparison(String, String),
    #[error("value {0} needs an irrational basis element but none is declared")]
    MissingIrrational(String),
    #[error("bad irrational descriptor: {0}")]
    BadDescriptor(String),
    #[error("value {0} is not contained in the group generated by the larger list")]
    NotContained(String),
    #[error("index does not fit in 64 bits")]
    IndexOverflow,
    #[error("not a field extension: {0} is a factor witness")]
    NotFieldExtension(String),
    #[error("degree-one adjoin of {0} is not allowed; absorb it into the level below")]
    DegreeOneAdjoin(String),
    #[error("malformed minimal polynomial: {0}")]
    MalformedMinpoly(String),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{0} has no image in characteristic {1}")]
    NotInField(String, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to unrelated residue towers")]
    TowerMismatch,
    #[error("malformed subfield description: {0}")]
    BadSubfield(String),
}
