//! Murmuration functions for families of Dirichlet characters.

pub mod arith;
pub mod characters;
pub mod complex_family;
pub mod error;
pub mod numerics;
pub mod real_family;
pub mod validation;

pub use error::{Error, Result};
