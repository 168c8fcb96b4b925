//! The sixth Painlevé equation in Hamiltonian form, its extended affine Weyl
//! group of Bäcklund transformations, and the `so(8)` loop-algebra Lax pair
//! that generates them.
//!
//! Identities are proved by exact rational-function computation
//! ([`pvi_field`]); [`numeric`] cross-checks them along integrated
//! trajectories.

pub mod backlund;
pub mod hamiltonian;
pub mod lax;
pub mod numeric;
pub mod report;
pub mod suites;
pub mod weyl;

mod expr;

use pvi_field::FieldError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoreError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("cannot parse group word: {0}")]
    ParseWord(String),
    #[error("gauge transform does not reproduce the Lax template: {0}")]
    TemplateMismatch(String),
    #[error("resonant exponents at order {order}, entry ({row},{col})")]
    Resonance { order: usize, row: usize, col: usize },
    #[error("trajectory approaches a singularity near t = {t}: {what}")]
    Singularity { t: String, what: String },
    #[error("step size underflow near t = {0}")]
    StepUnderflow(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
