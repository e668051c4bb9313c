use thiserror::Error;

use crate::algebra::Element;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed group spec `{spec}`: {reason}")]
    GroupSpec { spec: String, reason: String },

    #[error("malformed function spec `{spec}`: {reason}")]
    FunctionSpec { spec: String, reason: String },

    #[error("table does not define a group: {0}")]
    NotAGroup(String),

    #[error("modulus {modulus:?} is not a monic irreducible polynomial over GF({p})")]
    ReducibleModulus { modulus: Vec<u32>, p: u32 },

    #[error("element {element} out of range for a group of order {order}")]
    OutOfRange { element: Element, order: usize },

    #[error("group of order {0} exceeds the supported maximum 65536")]
    OrderTooLarge(usize),

    #[error("function table has length {got}, expected {expected}")]
    TableLength { got: usize, expected: usize },

    #[error("direction a must be nonzero")]
    ZeroDirection,

    #[error("power maps require a field group")]
    NotAField,

    #[error("exponent 0 is not supported for power maps")]
    ZeroExponent,

    #[error("selector {selector} is out of range (there are {count} realizations)")]
    SelectorOutOfRange { selector: u128, count: String },

    #[error("cells do not form an admissible subtable: {0}")]
    NotAdmissible(String),

    #[error("brute-force oracle supports groups of order at most 5, got {0}")]
    OracleTooLarge(usize),

    #[error("no feasible value set with at most {max_k} elements; pres >= {lower_bound}")]
    SearchExhausted { max_k: usize, lower_bound: usize },

    #[error("invalid precondition: {0}")]
    Precondition(String),

    #[error("value set is not a cover for f; uncovered rows {0:?}")]
    NotACover(Vec<Element>),

    #[error("assignment is missing variables: {}", .0.join(", "))]
    MissingVariables(Vec<String>),

    #[error("assignment mentions unknown variables: {}", .0.join(", "))]
    UnknownVariables(Vec<String>),

    #[error("assignment value for `{name}` is not integral: {value}")]
    NonIntegral { name: String, value: f64 },

    #[error("x variables do not decode to a permutation")]
    NotPermutationMatrix,

    #[error("operation requires an abelian group")]
    NonAbelian,

    #[error("model has no variables")]
    EmptyModel,

    #[error("recurrence variant does not match parity of q = {0}")]
    ParityMismatch(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
