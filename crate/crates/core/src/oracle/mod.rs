//! Independent brute-force checks of the closed-form results.

pub mod quadrature;
pub mod reorder;
pub mod wick;

pub use quadrature::{quadrature_moment_oracle, GaussHermite};
pub use reorder::{fock_verify_reorder, reorder_coefficients, ReorderSpec, ReorderTerm};
pub use wick::{
    partition_moment_oracle, tilde_moment_oracle, wick_moment, ContractionTable, LinearForm,
};
