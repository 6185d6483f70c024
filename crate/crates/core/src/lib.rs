//! Certification and structural analysis of self-similar dendrites.
//!
//! A system is a convex polytope `P` in ℝ¹, ℝ² or ℝ³ with contraction
//! similarities `S_1 … S_m`. [`validator::validate_system`] decides whether
//! the pieces `S_i(P)` satisfy the polyhedral conditions D1–D4, in which case
//! the attractor is a dendrite. The remaining modules compute its addresses,
//! main tree, point orders and dimensions.

pub mod address;
pub mod catalog;
pub mod dimension;
pub mod error;
pub mod geometry;
pub mod io;
pub mod tree;
pub mod validator;

pub use error::{Error, Result};
