//! Four-mode homodyne measurement of `T′₃⁽¹⁾ = T₃⁽¹⁾ + 3`.
//!
//! The state is augmented with a vacuum ancilla and sent through an
//! orthogonal network `O` acting identically on positions and momenta. The x
//! quadrature of output 1 and the p quadratures of outputs 2–4 commute, so
//! they are sampled jointly.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector, Matrix4};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moments::Partition;
use crate::oracle::wick::{normal_moment, ContractionTable, LinearForm};
use crate::states::CovarianceMatrix;
use crate::witnesses::{below_floor, threshold_verdict, Thresholds, Verdict, DEFAULT_GUARD_BAND};

/// Identifier stored with every batch; changes whenever the sampler would
/// produce different numbers for the same seed.
pub const SAMPLER_ALGORITHM: &str = "chacha20-substream8192-standardnormal-cholesky-v1";
/// Shots per independent substream.
pub const SHOTS_PER_RANGE: usize = 8192;
/// Indices of the sampled quadratures in the `(x₁..x₄, p₁..p₄)` ordering.
pub const MEASURED_INDICES: [usize; 4] = [0, 5, 6, 7];

const SIGNS: [[i64; 4]; 4] = [[1, 1, 1, 1], [1, -1, -1, 1], [-1, 1, -1, 1], [-1, -1, 1, 1]];

/// Thresholds on `T′ − 3`.
pub const TPRIME_THRESHOLDS: Thresholds = Thresholds {
    full_separable: 9.0,
    biseparable: 5.0,
    universal_floor: 3.0,
};

#[derive(Clone, Debug, PartialEq)]
pub struct LinearNetwork {
    o: Matrix4<f64>,
}

impl LinearNetwork {
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.o
    }

    /// Entries as exact rationals `±1/2`.
    pub fn exact_matrix(&self) -> [[BigRational; 4]; 4] {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        std::array::from_fn(|r| std::array::from_fn(|c| &half * BigInt::from(SIGNS[r][c])))
    }

    /// `OᵀO = 𝟙` in rational arithmetic.
    pub fn is_orthogonal_exact(&self) -> bool {
        let o = self.exact_matrix();
        (0..4).all(|i| {
            (0..4).all(|j| {
                let dot = (0..4).fold(BigRational::zero(), |acc, k| acc + &o[k][i] * &o[k][j]);
                dot == if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            })
        })
    }

    /// `O ⊕ O` acting on `(x₁..x₄, p₁..p₄)`.
    pub fn symplectic(&self) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(8, 8);
        for r in 0..4 {
            for c in 0..4 {
                s[(r, c)] = self.o[(r, c)];
                s[(4 + r, 4 + c)] = self.o[(r, c)];
            }
        }
        s
    }
}

/// Rows `½(1,1,1,1)`, `½(1,−1,−1,1)`, `½(−1,1,−1,1)`, `½(−1,−1,1,1)`.
pub fn build_network() -> LinearNetwork {
    LinearNetwork {
        o: Matrix4::from_fn(|r, c| SIGNS[r][c] as f64 / 2.0),
    }
}

/// Appends a vacuum ancilla as mode 4.
pub fn augment_with_vacuum(gamma3: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    if gamma3.modes() != 3 {
        return Err(Error::domain(format!(
            "augmentation expects three modes, got {}",
            gamma3.modes()
        )));
    }
    let g = gamma3.gamma();
    let slot = |i: usize| {
        if i < 3 {
            Some(i)
        } else if (4..7).contains(&i) {
            Some(i - 1)
        } else {
            None
        }
    };
    let gamma = DMatrix::from_fn(8, 8, |r, c| match (slot(r), slot(c)) {
        (Some(a), Some(b)) => g[(a, b)],
        _ => {
            if r == c {
                1.0
            } else {
                0.0
            }
        }
    });
    let m = gamma3.mean();
    let mean = DVector::from_fn(8, |i, _| slot(i).map_or(0.0, |a| m[a]));
    CovarianceMatrix::with_mean(gamma, mean)
}

/// `Γ′ = (O⊕O) Γ (O⊕O)ᵀ`.
pub fn transformed_covariance(
    gamma4: &CovarianceMatrix,
    network: &LinearNetwork,
) -> Result<DMatrix<f64>> {
    if gamma4.modes() != 4 {
        return Err(Error::domain(format!(
            "network acts on four modes, got {}",
            gamma4.modes()
        )));
    }
    let s = network.symplectic();
    Ok(&s * gamma4.gamma() * s.transpose())
}

/// `T′ = 12·Var(x_out1) + 4·Σ_{j=2..4} Var(p_outj)` with `Var = Γ′/2`.
pub fn analytic_tprime(gamma4: &CovarianceMatrix, network: &LinearNetwork) -> Result<f64> {
    if !gamma4.has_zero_mean() {
        return Err(Error::domain("analytic T′ requires a zero-mean state"));
    }
    let g = transformed_covariance(gamma4, network)?;
    Ok(12.0 * g[(0, 0)] / 2.0 + 4.0 * (5..8).map(|i| g[(i, i)] / 2.0).sum::<f64>())
}

/// Joint outcomes of the four commuting quadratures, row-major `shots × 4`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch {
    pub shots: usize,
    pub seed: u64,
    pub algorithm: String,
    pub samples: Vec<f64>,
}

impl SampleBatch {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.samples[4 * i..4 * i + 4]
    }
}

fn factor(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if let Some(ch) = cov.clone().cholesky() {
        return Ok(ch.l());
    }
    let eig = cov.clone().symmetric_eigen();
    let scale = eig.eigenvalues.amax().max(1.0);
    if eig.eigenvalues.iter().any(|&v| v < -1e-12 * scale) {
        return Err(Error::numeric(format!(
            "measured sub-block is not positive semidefinite (eigenvalues {:?})",
            eig.eigenvalues.as_slice()
        )));
    }
    let root = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0).sqrt()));
    Ok(&eig.eigenvectors * root)
}

/// Draws `shots` outcomes from `N(0, Γ′[MEASURED, MEASURED]/2)`.
///
/// Shot range `r` (of [`SHOTS_PER_RANGE`] shots) uses ChaCha20 seeded from
/// `seed` on stream `r`, so batches are identical regardless of thread count.
pub fn sample(
    gamma4: &CovarianceMatrix,
    network: &LinearNetwork,
    shots: usize,
    seed: u64,
) -> Result<SampleBatch> {
    if shots < 2 {
        return Err(Error::domain(format!(
            "sampling needs at least 2 shots, got {shots}"
        )));
    }
    if !gamma4.has_zero_mean() {
        return Err(Error::domain("sampling requires a zero-mean state"));
    }
    let g = transformed_covariance(gamma4, network)?;
    let cov = DMatrix::from_fn(4, 4, |r, c| {
        g[(MEASURED_INDICES[r], MEASURED_INDICES[c])] / 2.0
    });
    let l = factor(&cov)?;
    let ranges = shots.div_ceil(SHOTS_PER_RANGE);
    let chunks: Vec<Vec<f64>> = (0..ranges)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let count = SHOTS_PER_RANGE.min(shots - r * SHOTS_PER_RANGE);
            let mut out = Vec::with_capacity(4 * count);
            for _ in 0..count {
                let z: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
                for row in 0..4 {
                    out.push((0..4).map(|c| l[(row, c)] * z[c]).sum::<f64>());
                }
            }
            out
        })
        .collect();
    Ok(SampleBatch {
        shots,
        seed,
        algorithm: SAMPLER_ALGORITHM.to_string(),
        samples: chunks.concat(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub shots: usize,
    pub t_prime_estimate: f64,
    pub std_error: f64,
    pub analytic_value: Option<f64>,
    /// Verdict of `T′ − 3 + 3σ` against `{9, 5, 3}`.
    pub verdict: Verdict,
    pub below_floor: bool,
}

impl EstimateReport {
    /// `(estimate − analytic)/σ`.
    pub fn z_score(&self) -> Option<f64> {
        self.analytic_value
            .map(|a| (self.t_prime_estimate - a) / self.std_error)
    }
}

fn shot_value(row: &[f64]) -> f64 {
    12.0 * row[0] * row[0] + 4.0 * (row[1] * row[1] + row[2] * row[2] + row[3] * row[3])
}

/// Estimates `T′` from the known-zero-mean second moments, with a
/// delete-one jackknife standard error.
pub fn estimate(batch: &SampleBatch, analytic_value: Option<f64>) -> Result<EstimateReport> {
    let n = batch.shots;
    if n < 2 || batch.samples.len() != 4 * n {
        return Err(Error::domain("estimation needs at least 2 complete shots"));
    }
    let values: Vec<f64> = (0..n).map(|i| shot_value(batch.row(i))).collect();
    let total: f64 = values.iter().sum();
    let nf = n as f64;
    let mean = total / nf;
    let leave_one_out = values.iter().map(|v| (total - v) / (nf - 1.0));
    let spread: f64 = leave_one_out.map(|t| (t - mean).powi(2)).sum();
    let std_error = ((nf - 1.0) / nf * spread).sqrt();
    let statistic = mean - 3.0 + 3.0 * std_error;
    Ok(EstimateReport {
        shots: n,
        t_prime_estimate: mean,
        std_error,
        analytic_value,
        verdict: threshold_verdict(statistic, &TPRIME_THRESHOLDS, DEFAULT_GUARD_BAND),
        below_floor: below_floor(
            mean - 3.0 - 3.0 * std_error,
            &TPRIME_THRESHOLDS,
            DEFAULT_GUARD_BAND,
        ),
    })
}

const MAGIC: &[u8; 3] = b"T3H";
const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 16;

/// Header `"T3H"`, version byte, shots (u32), seed (u64), then
/// little-endian f64 samples, row-major `shots × 4`.
pub fn write_batch(batch: &SampleBatch, mut out: impl Write) -> Result<()> {
    let shots = u32::try_from(batch.shots)
        .map_err(|_| Error::Format("batch too large for the file format".into()))?;
    let mut bytes = Vec::with_capacity(HEADER_LEN + 8 * batch.samples.len());
    bytes.extend_from_slice(MAGIC);
    bytes.push(VERSION);
    bytes.extend_from_slice(&shots.to_le_bytes());
    bytes.extend_from_slice(&batch.seed.to_le_bytes());
    for v in &batch.samples {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&bytes)
        .map_err(|e| Error::Resource(format!("writing batch: {e}")))
}

pub fn read_batch(mut input: impl Read) -> Result<SampleBatch> {
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| Error::Resource(format!("reading batch: {e}")))?;
    if bytes.len() < HEADER_LEN || &bytes[..3] != MAGIC {
        return Err(Error::Format("not a sample batch file".into()));
    }
    if bytes[3] != VERSION {
        return Err(Error::Format(format!(
            "unsupported batch version {}",
            bytes[3]
        )));
    }
    let shots = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    let seed = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let body = &bytes[HEADER_LEN..];
    if body.len() != 32 * shots {
        return Err(Error::Format(format!(
            "batch body has {} bytes, expected {}",
            body.len(),
            32 * shots
        )));
    }
    let samples = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok(SampleBatch {
        shots,
        seed,
        algorithm: SAMPLER_ALGORITHM.to_string(),
        samples,
    })
}

/// `Z′_k = â_k + Σ_{j≠k} â_j† + ẑ` over the three modes plus the ancilla.
pub fn augmented_partition_operator(partition: Partition) -> LinearForm {
    let k = partition.index();
    let one = Complex64::ONE;
    let annihilation = (0..4)
        .map(|i| {
            if i == k || i == 3 {
                one
            } else {
                Complex64::ZERO
            }
        })
        .collect();
    let creation = (0..4)
        .map(|i| {
            if i == k || i == 3 {
                Complex64::ZERO
            } else {
                one
            }
        })
        .collect();
    LinearForm::new(annihilation, creation).expect("nonzero form")
}

/// `A′⁽ᵐ⁾ = (1/m!)⟨Z′†ᵐZ′ᵐ⟩` on the augmented state, by pairing enumeration.
pub fn augmented_moment(gamma4: &CovarianceMatrix, partition: Partition, m: usize) -> Result<f64> {
    if gamma4.modes() != 4 {
        return Err(Error::domain("augmented moments need the four-mode state"));
    }
    let table = ContractionTable::from_covariance(gamma4)?;
    normal_moment(&table, &augmented_partition_operator(partition), m)
}
