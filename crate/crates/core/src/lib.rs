//! Exact-arithmetic computation of tautological cohomology rings of moduli
//! stacks and spaces of one-dimensional sheaves on the projective plane.
//!
//! The crate is organized bottom-up:
//! - [`rat`], [`vars`], [`poly`], [`linalg`]: sparse weighted-graded polynomials
//!   over exact rationals and degreewise ideal linear algebra;
//! - [`descendent`]: the descendent algebra of the plane in normalized
//!   `c_k(j)` coordinates;
//! - [`virasoro`]: the Virasoro operators acting on it;
//! - [`relations`]: Mumford, generalized Mumford and base relations, plus the
//!   quadratic tensor identities;
//! - [`pipeline`]: the inductive ring-building loop and the persistent registry;
//! - [`bps`]: plethystic exponentials and BPS-integrality Poincaré series;
//! - [`filt`]: Chern/perverse filtrations and refined Gopakumar-Vafa extraction;
//! - [`hrr`]: Todd classes, integration and Euler characteristics.

pub mod rat;
pub mod vars;
pub mod poly;
pub mod linalg;
pub mod descendent;
pub mod virasoro;
pub mod relations;
pub mod pipeline;
pub mod bps;
pub mod filt;
pub mod hrr;

pub use poly::{Monomial, Polynomial};
pub use rat::Rat;
pub use vars::VariableTable;

/// Errors surfaced by operations whose preconditions are caller-visible.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("inhomogeneous polynomial where a homogeneous one is required: {0}")]
    Inhomogeneous(String),
    #[error("degree {0} exceeds truncation bound {1}")]
    DegreeOverflow(u32, u32),
    #[error("rank condition violated: {0}")]
    RankCondition(String),
    #[error("slope window violated: {0}")]
    SlopeWindow(String),
    #[error("missing prerequisite: {0}")]
    MissingPrerequisite(String),
    #[error("registry error: {0}")]
    Registry(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("structural check failed: {0}")]
    Structural(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
