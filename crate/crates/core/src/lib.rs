//! Higher-order moment separability witnesses for three-mode Gaussian states.
//!
//! The crate computes the per-bipartition moment hierarchy
//! `A⁽ᵐ⁾ = (1/m!)⟨Z†ᵐZᵐ⟩` in closed form, classifies states as fully
//! separable, biseparable or genuinely tripartite entangled from the
//! symmetric sum of those moments, cross-checks every closed form against
//! brute-force oracles, runs the symplectic partial-transpose test, and
//! simulates a four-mode homodyne measurement of the lowest-order witness.

#[cfg(test)]
#[macro_use]
mod test_util;

pub mod corpus;
pub mod error;
pub mod exact;
pub mod homodyne;
pub mod moments;
pub mod oracle;
pub mod ppt;
pub mod reproduce;
pub mod states;
pub mod witnesses;

pub use error::{Error, Result};
