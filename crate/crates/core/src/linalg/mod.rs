//! Exact integer linear algebra, built on the Smith normal form.

mod complex;
mod group;
mod lattice;
mod matrix;
mod smith;

pub use complex::{homology_at, CochainComplex};
pub use group::{group_invariants, is_torsion_free, FgAbGroup, GroupHom, Presentation, QuotientMap};
pub use lattice::{integer_kernel, RowLattice};
pub use matrix::{DecimalInt, IntMatrix};
pub use smith::{smith_normal_form, SmithForm};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not in canonical form: {0}")]
    NotCanonical(String),
    #[error("homomorphism not well defined: {0}")]
    NotWellDefined(String),
    #[error("incompatible maps: {0}")]
    Incompatible(String),
    #[error("composition of consecutive maps is not zero")]
    CompositionNonzero,
    #[error("parse error: {0}")]
    Parse(String),
}
