//! Finite groups and finite fields on dense element indices.

mod field;
mod group;
mod spec;

pub use field::{is_irreducible, is_prime, prime_power, FieldContext};
pub use group::{Group, GroupKind, MAX_ORDER};
pub use spec::{build_group, load_cayley};

/// Group elements are indices `0..q`; 0 is the identity.
pub type Element = usize;
