//! Numerical contact geometry on the standard sphere `S^{2n-1} ⊂ ℂⁿ`.

pub mod auxiliary;
pub mod error;
pub mod maps;
pub mod moebius;
pub mod neighbors;
pub mod simplex;
pub mod sphere;
pub mod translated;

pub use error::{ContactError, Result};
