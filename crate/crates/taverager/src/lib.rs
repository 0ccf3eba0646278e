//! Exact combinatorial and linear-algebra engine for truncating and averaging
//! t-structures on bounded derived categories of hereditary algebras of finite
//! type, together with the coordinate calculus for stable tubes, the
//! combinatorial existence criterion for the tame domestic case, and averaging
//! of aisles over finite symmetry groups.
//!
//! All linear algebra is over exact rationals; there is no floating point
//! anywhere in the crate.

pub mod action;
pub mod aisle;
pub mod averaging;
pub mod domestic;
pub mod engine;
pub mod error;
pub mod id;
pub mod matrix;
pub mod quiver;
pub mod tube;
pub mod window;

pub use error::Error;
