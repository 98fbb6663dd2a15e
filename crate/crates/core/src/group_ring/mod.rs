//! Laurent polynomial rings `A[ℤ^r]` over a closed family of base rings.

mod base;
mod element;
mod matrix;
mod text;

pub use base::{BaseRing, Scalar};
pub use element::{GroupRingElement, NotUnitReason, UnitRecognition};
pub use matrix::GroupRingMatrix;
pub use text::{format_document, format_scalar, parse_base_ring, parse_document, parse_element, parse_element_with};
pub(crate) use text::parse_in_env;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("invalid base ring: {0}")]
    InvalidBase(String),
    #[error("base ring mismatch: {0}")]
    Mismatch(String),
    #[error("unsupported base ring: {0}")]
    UnsupportedBase(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
}
