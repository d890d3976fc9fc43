//! Exact computations with ternary operations on small finite sets.
//!
//! Operations are dense lookup tables. On top of them the crate computes
//! ternary parts of generated clones (unitary Menger algebras of rank 3),
//! decides whether a majority operation generates a minimal clone, builds
//! one-point star extensions, works with cyclic shifts of terms, and runs a
//! resumable exhaustive search over cyclically symmetric majority operations.

pub mod canon;
pub mod closure;
pub mod error;
pub mod fixtures;
pub mod op;
pub mod parallel;
pub mod relations;
pub mod search;
pub mod star;
pub mod term;
pub mod universe;
pub mod verify;

pub use canon::{are_isomorphic, canonical_form, CanonMode, Canonical};
pub use closure::{
    closure_of, generates, majority_members, menger_table, minimality_check, restriction_homomorphism,
    ternary_closure, MengerTable, MinimalityReport, OpSet,
};
pub use error::{Error, Result};
pub use op::{TernaryOp, VarPerm};
pub use relations::{generate_invariant_pairs, preserves_relation, BinaryRelation};
pub use star::{d_op, star_decompose, star_extend};
pub use term::{classify_over_d1, constructive_shift_triple, cyclic_shift_set, D1Class, Term};
pub use universe::{Relabeling, Universe};
