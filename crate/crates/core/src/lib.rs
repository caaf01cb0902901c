//! Pseudo-boson ladder operators on truncated Fock spaces.

mod dd;
pub mod cli;
pub mod coherent;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod ladder;
pub mod linalg;
pub mod poly;
pub mod position;
pub mod quadrature;

pub use error::{Error, Result};
