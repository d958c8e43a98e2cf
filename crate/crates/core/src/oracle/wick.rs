//! Brute-force Gaussian moments by enumerating every perfect pairing.
//!
//! For a zero-mean Gaussian state the expectation of an ordered product of
//! linear forms `L₁L₂…L₂ₘ` in the mode operators is the sum, over all
//! `(2M−1)!!` perfect pairings, of the products of ordered two-point
//! contractions `⟨LᵢLⱼ⟩` (`i < j`). Nothing here depends on the closed-form
//! generating function; it only needs second moments.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moments::Partition;
use crate::states::{CovarianceMatrix, GaussianPureState};

/// Default cap on the number of pairs `M` (`(2M−1)!!` pairings).
pub const DEFAULT_MAX_PAIRS: usize = 8;

/// `Σᵢ αᵢ âᵢ + βᵢ âᵢ†` over `n` modes.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearForm {
    annihilation: Vec<Complex64>,
    creation: Vec<Complex64>,
}

impl LinearForm {
    pub fn new(annihilation: Vec<Complex64>, creation: Vec<Complex64>) -> Result<Self> {
        if annihilation.len() != creation.len() || annihilation.is_empty() {
            return Err(Error::domain(
                "linear form coefficient vectors must match in length",
            ));
        }
        if annihilation
            .iter()
            .chain(&creation)
            .all(|c| *c == Complex64::ZERO)
        {
            return Err(Error::domain("linear form needs a nonzero coefficient"));
        }
        Ok(LinearForm {
            annihilation,
            creation,
        })
    }

    /// Builds a form from real coefficients of annihilators and creators.
    pub fn real(annihilation: &[f64], creation: &[f64]) -> Result<Self> {
        Self::new(
            annihilation
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
            creation.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn modes(&self) -> usize {
        self.annihilation.len()
    }

    pub fn annihilation(&self) -> &[Complex64] {
        &self.annihilation
    }

    pub fn creation(&self) -> &[Complex64] {
        &self.creation
    }

    /// Hermitian conjugate: `(Σ αâ + βâ†)† = Σ β* â + α* â†`.
    pub fn dagger(&self) -> Self {
        LinearForm {
            annihilation: self.creation.iter().map(|c| c.conj()).collect(),
            creation: self.annihilation.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        LinearForm {
            annihilation: self.annihilation.iter().map(|c| c * factor).collect(),
            creation: self.creation.iter().map(|c| c * factor).collect(),
        }
    }
}

/// Ordered second moments of the mode operators of a zero-mean Gaussian state.
#[derive(Clone, Debug)]
pub struct ContractionTable {
    /// `⟨âᵢâⱼ⟩`
    pub aa: DMatrix<Complex64>,
    /// `⟨âᵢâⱼ†⟩`
    pub a_adag: DMatrix<Complex64>,
    /// `⟨âᵢ†âⱼ⟩`
    pub adag_a: DMatrix<Complex64>,
    /// `⟨âᵢ†âⱼ†⟩`
    pub adag_adag: DMatrix<Complex64>,
}

impl ContractionTable {
    /// From a covariance matrix in the `γ = 2 × Cov` convention.
    ///
    /// With `X = γ_xx/2`, `P = γ_pp/2`, `C = γ_xp/2` (symmetrized) and
    /// `⟨x̂ᵢp̂ⱼ⟩ = Cᵢⱼ + iδᵢⱼ/2`, expanding `â = (x̂ + ip̂)/√2` gives
    /// `⟨ââ⟩ = (X − P + i(C + Cᵀ))/2`, `⟨ââ†⟩ = (X + P + 𝟙 + i(Cᵀ − C))/2`,
    /// `⟨â†â⟩ = (X + P − 𝟙 + i(C − Cᵀ))/2`, `⟨â†â†⟩ = (X − P − i(C + Cᵀ))/2`.
    pub fn from_covariance(cov: &CovarianceMatrix) -> Result<Self> {
        if !cov.has_zero_mean() {
            return Err(Error::domain(
                "contraction tables require a zero-mean state",
            ));
        }
        let n = cov.modes();
        let g = cov.gamma();
        let half = |i: usize, j: usize| g[(i, j)] / 2.0;
        let c = |i: usize, j: usize| Complex64::new(0.0, 1.0) * half(i, n + j);
        let x = |i: usize, j: usize| half(i, j);
        let p = |i: usize, j: usize| half(n + i, n + j);
        let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        let aa = DMatrix::from_fn(n, n, |i, j| {
            (Complex64::from(x(i, j) - p(i, j)) + c(i, j) + c(j, i)) / 2.0
        });
        let adag_adag = DMatrix::from_fn(n, n, |i, j| {
            (Complex64::from(x(i, j) - p(i, j)) - c(i, j) - c(j, i)) / 2.0
        });
        let a_adag = DMatrix::from_fn(n, n, |i, j| {
            (Complex64::from(x(i, j) + p(i, j) + delta(i, j)) + c(j, i) - c(i, j)) / 2.0
        });
        let adag_a = DMatrix::from_fn(n, n, |i, j| {
            (Complex64::from(x(i, j) + p(i, j) - delta(i, j)) + c(i, j) - c(j, i)) / 2.0
        });
        Ok(ContractionTable {
            aa,
            a_adag,
            adag_a,
            adag_adag,
        })
    }

    /// Closed form for a pure real state with matrix `A`:
    /// `⟨ââ⟩ = ⟨â†â†⟩ = (A⁻¹ − A)/4`, `⟨ââ†⟩ = (A⁻¹ + A)/4 + 𝟙/2`,
    /// `⟨â†â⟩ = (A⁻¹ + A)/4 − 𝟙/2`.
    pub fn pure_state(state: &GaussianPureState) -> Self {
        let a = state.matrix();
        let inv = state.inverse();
        let c = |v: f64| Complex64::new(v, 0.0);
        let delta = |i: usize, j: usize| if i == j { 0.5 } else { 0.0 };
        let diff = DMatrix::from_fn(3, 3, |i, j| c((inv[(i, j)] - a[(i, j)]) / 4.0));
        ContractionTable {
            aa: diff.clone(),
            adag_adag: diff,
            a_adag: DMatrix::from_fn(
                3,
                3,
                |i, j| c((inv[(i, j)] + a[(i, j)]) / 4.0 + delta(i, j)),
            ),
            adag_a: DMatrix::from_fn(
                3,
                3,
                |i, j| c((inv[(i, j)] + a[(i, j)]) / 4.0 - delta(i, j)),
            ),
        }
    }

    pub fn modes(&self) -> usize {
        self.aa.nrows()
    }

    /// Largest entry of `|⟨ââ†⟩ − ⟨â†â⟩ᵀ − 𝟙|`; zero for a consistent table.
    pub fn commutation_defect(&self) -> f64 {
        let n = self.modes();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let id = if i == j { 1.0 } else { 0.0 };
                let d = self.a_adag[(i, j)] - self.adag_a[(j, i)] - id;
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// `⟨L₁L₂⟩`.
    pub fn contract(&self, left: &LinearForm, right: &LinearForm) -> Complex64 {
        let n = self.modes();
        let mut acc = Complex64::ZERO;
        for i in 0..n {
            let (la, lc) = (left.annihilation[i], left.creation[i]);
            if la == Complex64::ZERO && lc == Complex64::ZERO {
                continue;
            }
            for j in 0..n {
                let (ra, rc) = (right.annihilation[j], right.creation[j]);
                acc += la * ra * self.aa[(i, j)]
                    + la * rc * self.a_adag[(i, j)]
                    + lc * ra * self.adag_a[(i, j)]
                    + lc * rc * self.adag_adag[(i, j)];
            }
        }
        acc
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

impl CompensatedSum {
    fn add_part(state: &mut (f64, f64), v: f64) {
        let (sum, comp) = *state;
        let t = sum + v;
        let c = if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        *state = (t, comp + c);
    }

    fn add(&mut self, z: Complex64) {
        Self::add_part(&mut self.re, z.re);
        Self::add_part(&mut self.im, z.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

fn enumerate(
    table: &[Complex64],
    size: usize,
    used: u32,
    product: Complex64,
    acc: &mut CompensatedSum,
) {
    let full = (1u32 << size) - 1;
    if used == full {
        acc.add(product);
        return;
    }
    let i = (!used).trailing_zeros() as usize;
    let used = used | (1 << i);
    for j in (i + 1)..size {
        if used & (1 << j) != 0 {
            continue;
        }
        let c = table[i * size + j];
        if c == Complex64::ZERO {
            continue;
        }
        enumerate(table, size, used | (1 << j), product * c, acc);
    }
}

/// `⟨L₁L₂…L₂ₘ⟩` by explicit pairing enumeration, with at most
/// [`DEFAULT_MAX_PAIRS`] pairs.
pub fn wick_moment(table: &ContractionTable, forms: &[LinearForm]) -> Result<Complex64> {
    wick_moment_capped(table, forms, DEFAULT_MAX_PAIRS)
}

pub fn wick_moment_capped(
    table: &ContractionTable,
    forms: &[LinearForm],
    max_pairs: usize,
) -> Result<Complex64> {
    if !forms.len().is_multiple_of(2) {
        return Ok(Complex64::ZERO);
    }
    let pairs = forms.len() / 2;
    if pairs > max_pairs {
        return Err(Error::Resource(format!(
            "{pairs} pairs exceed the Wick enumeration cap of {max_pairs}"
        )));
    }
    if pairs > 15 {
        return Err(Error::Resource("at most 15 pairs are supported".into()));
    }
    if forms.iter().any(|f| f.modes() != table.modes()) {
        return Err(Error::domain(
            "linear forms and contraction table disagree on mode count",
        ));
    }
    if pairs == 0 {
        return Ok(Complex64::ONE);
    }
    let size = forms.len();
    let mut contractions = vec![Complex64::ZERO; size * size];
    for i in 0..size {
        for j in (i + 1)..size {
            contractions[i * size + j] = table.contract(&forms[i], &forms[j]);
        }
    }
    // first index 0 is paired with each j; branches are summed in order of j
    let branches: Vec<Complex64> = (1..size)
        .into_par_iter()
        .map(|j| {
            let mut acc = CompensatedSum::default();
            let c = contractions[j];
            if c != Complex64::ZERO {
                enumerate(&contractions, size, 1 | (1 << j), c, &mut acc);
            }
            acc.value()
        })
        .collect();
    let mut total = CompensatedSum::default();
    for b in branches {
        total.add(b);
    }
    Ok(total.value())
}

/// `Z_k = â_k + Σ_{j≠k} â_j†` over three modes.
pub fn partition_operator(partition: Partition) -> LinearForm {
    let k = partition.index();
    let annihilation = (0..3)
        .map(|i| if i == k { 1.0 } else { 0.0 })
        .collect::<Vec<_>>();
    let creation = (0..3)
        .map(|i| if i == k { 0.0 } else { 1.0 })
        .collect::<Vec<_>>();
    LinearForm::real(&annihilation, &creation).expect("nonzero form")
}

/// `−â_k + Σ_{j≠k} â_j†`, the operator behind the tilde quantities.
pub fn tilde_partition_operator(partition: Partition) -> LinearForm {
    let k = partition.index();
    let annihilation = (0..3)
        .map(|i| if i == k { -1.0 } else { 0.0 })
        .collect::<Vec<_>>();
    let creation = (0..3)
        .map(|i| if i == k { 0.0 } else { 1.0 })
        .collect::<Vec<_>>();
    LinearForm::real(&annihilation, &creation).expect("nonzero form")
}

/// `(1/m!)⟨Z†ᵐZᵐ⟩`, checked to be real.
pub fn normal_moment(table: &ContractionTable, z: &LinearForm, m: usize) -> Result<f64> {
    let zd = z.dagger();
    let forms: Vec<LinearForm> = std::iter::repeat_n(zd, m)
        .chain(std::iter::repeat_n(z.clone(), m))
        .collect();
    let value = wick_moment(table, &forms)?;
    let factorial: f64 = (1..=m).map(|v| v as f64).product();
    let value = value / factorial;
    if value.im.abs() > 1e-10 * value.re.abs().max(1.0) {
        return Err(Error::Consistency(format!(
            "moment has imaginary part {:e} (real part {:e})",
            value.im, value.re
        )));
    }
    Ok(value.re)
}

/// `A⁽ᵐ⁾` for bipartition `k`, by pairing enumeration.
pub fn partition_moment_oracle(
    state: &GaussianPureState,
    partition: Partition,
    m: usize,
) -> Result<f64> {
    let table = ContractionTable::pure_state(state);
    normal_moment(&table, &partition_operator(partition), m)
}

/// Tilde moment for bipartition `k`, by pairing enumeration.
pub fn tilde_moment_oracle(
    state: &GaussianPureState,
    partition: Partition,
    m: usize,
) -> Result<f64> {
    let table = ContractionTable::pure_state(state);
    normal_moment(&table, &tilde_partition_operator(partition), m)
}
