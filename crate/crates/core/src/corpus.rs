//! Reproducible test-state collections.

use nalgebra::{DMatrix, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::states::{make_ghzw_state, make_proposition_state, make_xi_state, GaussianPureState};

pub const DEFAULT_CORPUS_SEED: u64 = 20_240_611;
pub const DEFAULT_CORPUS_SIZE: usize = 50;

/// `Q D Qᵀ` with Haar-like `Q` and eigenvalues drawn from `[0.3, 3]`
/// (condition number at most 10). Entries are rounded to their shortest
/// decimals, so the exact matrix is exactly what the decimals say.
pub fn random_pure_states(count: usize, seed: u64) -> Result<Vec<GaussianPureState>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = DMatrix::<f64>::from_fn(3, 3, |_, _| rng.sample(StandardNormal));
        let q = g.qr().q();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(3, |_, _| {
            rng.random_range(0.3..3.0)
        }));
        let a = &q * d * q.transpose();
        let m = Matrix3::from_fn(|i, j| if i <= j { a[(i, j)] } else { a[(j, i)] });
        let rows = std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]));
        if let Ok(state) = GaussianPureState::from_rows(rows) {
            out.push(state);
        }
    }
    Ok(out)
}

/// The named family members used across the checks.
pub fn family_states() -> Result<Vec<GaussianPureState>> {
    let mut out = Vec::new();
    for xi in [-0.4, -0.2, 0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999] {
        out.push(make_xi_state(xi)?);
    }
    for a in [1.1, 1.5, 2.0, 5.0] {
        out.push(make_ghzw_state(a)?.0);
    }
    out.push(make_proposition_state());
    Ok(out)
}

/// Random states followed by the family states.
pub fn full_corpus() -> Result<Vec<GaussianPureState>> {
    let mut states = random_pure_states(DEFAULT_CORPUS_SIZE, DEFAULT_CORPUS_SEED)?;
    states.extend(family_states()?);
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_reproducible_and_well_conditioned() {
        let a = random_pure_states(10, 3).unwrap();
        let b = random_pure_states(10, 3).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.matrix(), y.matrix());
            assert!(x.condition_number() <= 10.0 + 1e-6);
        }
        assert_eq!(full_corpus().unwrap().len(), DEFAULT_CORPUS_SIZE + 15);
    }
}
