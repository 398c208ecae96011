//! Exact arithmetic for the tame Jacquet–Langlands rectifier: roots of unity,
//! Galois double cosets of tame extensions, finite symplectic modules, their
//! t-factors, and ζ-data.

pub mod config;
pub mod cyclotomic;
pub mod error;
pub mod galois;
pub mod inner_form;
pub mod modules;
pub mod report;
pub mod sweep;
pub mod tfactors;
pub mod zeta;

pub use error::{Error, Result};
