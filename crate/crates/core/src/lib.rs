//! Arithmetic of imaginary quadratic rings, finitely presented abelian groups
//! and scissors-congruence style Bloch groups of finite fields.

pub mod bloch;
pub mod characters;
pub mod error;
pub mod finite_field;
pub mod quad_field;
pub mod quad_ring;
pub mod rewrite;
pub mod suites;
pub mod zmodkit;

pub use error::{Error, Result};
