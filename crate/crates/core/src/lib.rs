//! Exact workbench for constructible right ideals, truncated Fock
//! representations of product systems over semigroups, covariance checkers,
//! and finite-group crossed products.

pub mod calculus;
pub mod cores;
pub mod covariance;
pub mod crossed;
pub mod error;
pub mod fock;
pub mod ideal;
pub mod linalg;
pub mod monoid;
pub mod rep;
pub mod runner;
pub mod scenario;
pub mod scalar;
pub mod verdict;
pub mod wick;

pub use error::{Error, Result};
