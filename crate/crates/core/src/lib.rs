//! Executable order theory for unsharp values.
//!
//! The crate makes a family of order-theoretic and operator-algebraic
//! constructions computable at finite scale:
//!
//! - [`poset`]: finite posets with definitional checks for directedness,
//!   way-below, continuity, algebraicity, bounded completeness and the
//!   other domain properties;
//! - [`interval`]: the interval domain of unsharp values with exact
//!   rational endpoints, plus its lifted variant with a least element;
//! - [`algebra`]: finite universal algebra — generated subalgebras,
//!   equation satisfaction, and subalgebra lattices as posets;
//! - [`matrix`] and [`contexts`]: Hermitian eigendecomposition and the
//!   poset of abelian subalgebra contexts of a matrix algebra;
//! - [`dasein`]: spectral order, inner/outer approximation of operators
//!   into contexts, and the interval-valued sections this produces;
//! - [`partitions`]: symbolic partitions of the naturals, enough to run
//!   the non-continuity witness for the infinite-dimensional context
//!   poset;
//! - [`suite`]: the seeded property battery behind `suite all`.

pub mod algebra;
pub mod contexts;
pub mod dasein;
pub mod interval;
pub mod matrix;
pub mod partitions;
pub mod poset;
pub mod rat;
pub mod suite;

pub use interval::{IrBot, RatInterval};
pub use poset::{DomainReport, FinitePoset, MonotoneMap};
pub use rat::Rat;
