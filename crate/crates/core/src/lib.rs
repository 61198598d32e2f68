//! Growth of words under free-group, free-abelian and product automorphisms,
//! and of elements under graph-of-groups maps.

pub mod error;
pub mod fgaut;
pub mod product;
pub mod rates;
pub mod splitting;
pub mod word;
pub mod zlin;

pub use error::{Error, Result};
