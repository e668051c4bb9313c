//! Permutation resemblance of functions over finite groups.
//!
//! `pres(f)` is the least image size `V(g)` over all `g` with `g + f` a
//! permutation. The crate computes it exactly through admissible subtables of
//! the subtraction table, builds constructive upper bounds, and exports the
//! corresponding binary integer programs.

pub mod algebra;
pub mod cover;
pub mod du;
pub mod error;
pub mod fixtures;
pub mod function;
pub mod greedy;
pub mod ip;
pub mod pres;
pub mod repro;
pub mod subtable;

pub use algebra::{build_group, Element, FieldContext, Group, GroupKind};
pub use error::{Error, Result};
pub use function::{build_function, FunctionTable, PreimagePartition};
