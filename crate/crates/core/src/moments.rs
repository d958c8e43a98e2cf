//! Closed-form per-partition moment hierarchy.
//!
//! For a pure real Gaussian state with matrix `A` and bipartition `k|rest`,
//! the moments `A⁽ᵐ⁾ = (1/m!)⟨Z†ᵐZᵐ⟩` with `Z = â_k + Σ_{j≠k} â_j†` have the
//! generating function
//!
//! ```text
//! Σ_m A⁽ᵐ⁾ tᵐ = 1/√((1 − αt)(1 − βt)),   α = (1 + eᵀAe)/2,  β = (1 + jᵀA⁻¹j)/2
//! ```
//!
//! with `e` the sign vector (+1 at slot `k`, −1 elsewhere) and `j` all ones.
//! Expanding gives `A⁽ᵐ⁾ = 4⁻ᵐ Σₖ C(2k,k) C(2m−2k,m−k) αᵏ β^{m−k}`, which is
//! evaluated here exactly (rational or quadratic-field arithmetic).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{central_binomials, rational_from_f64, QuadraticNumber};
use crate::states::{make_ghzw_state, GaussianPureState};

pub const DEFAULT_MAX_ORDER: usize = 12;
/// Hard cap on the series length.
pub const ORDER_CAP: usize = 64;

/// One of the three bipartitions `1|23`, `2|13`, `3|12`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(usize);

impl Partition {
    pub const ALL: [Partition; 3] = [Partition(0), Partition(1), Partition(2)];

    /// `k` is one-based.
    pub fn new(k: usize) -> Result<Self> {
        if (1..=3).contains(&k) {
            Ok(Partition(k - 1))
        } else {
            Err(Error::domain(format!(
                "partition index must be 1, 2 or 3, got {k}"
            )))
        }
    }

    /// Zero-based mode index of the isolated party.
    pub fn index(self) -> usize {
        self.0
    }

    pub fn number(self) -> usize {
        self.0 + 1
    }

    /// `+1` at the isolated mode, `−1` elsewhere.
    pub fn sign_vector(self) -> [i64; 3] {
        std::array::from_fn(|i| if i == self.0 { 1 } else { -1 })
    }

    pub fn label(self) -> &'static str {
        ["1|23", "2|13", "3|12"][self.0]
    }
}

pub const ALL_ONES: [i64; 3] = [1, 1, 1];

/// Derived geometry of a bipartition for a given state.
#[derive(Clone, Debug)]
pub struct PartitionGeometry {
    pub partition: Partition,
    pub e: [i64; 3],
    pub j: [i64; 3],
    /// `1 + eᵀAe`
    pub lambda: QuadraticNumber,
    /// `j − Ae`
    pub u: [QuadraticNumber; 3],
    pub alpha: QuadraticNumber,
    pub beta: QuadraticNumber,
}

pub fn partition_geometry(state: &GaussianPureState, partition: Partition) -> PartitionGeometry {
    let e = partition.sign_vector();
    let a = state.exact_matrix();
    let one = QuadraticNumber::one();
    let two = QuadraticNumber::from_integer(2);
    let lambda = &one + &a.quadratic_form(e);
    let u = std::array::from_fn(|i| {
        let ae = (0..3).fold(QuadraticNumber::zero(), |acc, k| {
            acc + a.get(i, k) * &QuadraticNumber::from_integer(e[k])
        });
        &one - &ae
    });
    let beta = &(&one + &state.exact_inverse().quadratic_form(ALL_ONES)) / &two;
    PartitionGeometry {
        partition,
        e,
        j: ALL_ONES,
        alpha: &lambda / &two,
        lambda,
        u,
        beta,
    }
}

/// The two poles of a moment generating function `1/√((1−αt)(1−βt))`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolePair {
    pub alpha: QuadraticNumber,
    pub beta: QuadraticNumber,
}

impl PolePair {
    pub fn new(alpha: QuadraticNumber, beta: QuadraticNumber) -> Self {
        PolePair { alpha, beta }
    }

    pub fn from_f64(alpha: f64, beta: f64) -> Result<Self> {
        Ok(PolePair {
            alpha: rational_from_f64(alpha)?.into(),
            beta: rational_from_f64(beta)?.into(),
        })
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha.to_f64()
    }

    pub fn beta_f64(&self) -> f64 {
        self.beta.to_f64()
    }

    pub fn is_rational(&self) -> bool {
        self.alpha.is_rational() && self.beta.is_rational()
    }
}

/// `α = (1 + e_kᵀAe_k)/2`, `β = (1 + jᵀA⁻¹j)/2`.
pub fn pole_pair(state: &GaussianPureState, partition: Partition) -> PolePair {
    let g = partition_geometry(state, partition);
    PolePair::new(g.alpha, g.beta)
}

/// Poles of the tilde quantity built on `−â_k + Σ_{j≠k} â_j†`:
/// `((1 + e_kᵀA⁻¹e_k)/2, (1 + jᵀAj)/2)`.
pub fn tilde_pole_pair(state: &GaussianPureState, partition: Partition) -> PolePair {
    let one = QuadraticNumber::one();
    let two = QuadraticNumber::from_integer(2);
    let e = partition.sign_vector();
    let alpha = &(&one + &state.exact_inverse().quadratic_form(e)) / &two;
    let beta = &(&one + &state.exact_matrix().quadratic_form(ALL_ONES)) / &two;
    PolePair::new(alpha, beta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithmeticMode {
    ExactRational,
    /// Exact values in a real quadratic field, rendered to any requested
    /// number of digits.
    HighPrecision,
    /// Double precision only (oracles, sampled data).
    Double,
}

impl ArithmeticMode {
    pub fn name(self) -> &'static str {
        match self {
            ArithmeticMode::ExactRational => "exact-rational",
            ArithmeticMode::HighPrecision => "high-precision",
            ArithmeticMode::Double => "double",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesSource {
    ClosedForm,
    WickOracle,
    QuadratureOracle,
    Mixture,
}

impl SeriesSource {
    pub fn name(self) -> &'static str {
        match self {
            SeriesSource::ClosedForm => "closed-form",
            SeriesSource::WickOracle => "wick-oracle",
            SeriesSource::QuadratureOracle => "quadrature-oracle",
            SeriesSource::Mixture => "mixture",
        }
    }
}

/// Per-order moment values for `m = 0..=m_max`.
#[derive(Clone, Debug)]
pub struct MomentSeries {
    values: Vec<f64>,
    exact: Option<Vec<QuadraticNumber>>,
    source: SeriesSource,
}

impl MomentSeries {
    pub fn from_exact(exact: Vec<QuadraticNumber>, source: SeriesSource) -> Result<Self> {
        if exact.is_empty() || exact[0] != QuadraticNumber::one() {
            return Err(Error::Consistency(
                "series must start with the value 1".into(),
            ));
        }
        if exact.iter().any(|v| v.signum() <= 0) {
            return Err(Error::Consistency("series values must be positive".into()));
        }
        let values = exact.iter().map(QuadraticNumber::to_f64).collect();
        Ok(MomentSeries {
            values,
            exact: Some(exact),
            source,
        })
    }

    /// Wraps double-precision values; `values[0]` must be 1 to within 1e−12.
    pub fn from_f64(values: Vec<f64>, source: SeriesSource) -> Result<Self> {
        match values.first() {
            Some(v) if (v - 1.0).abs() <= 1e-12 => {}
            _ => {
                return Err(Error::Consistency(
                    "series must start with the value 1".into(),
                ))
            }
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Consistency("series values must be positive".into()));
        }
        Ok(MomentSeries {
            values,
            exact: None,
            source,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, m: usize) -> f64 {
        self.values[m]
    }

    pub fn exact_values(&self) -> Option<&[QuadraticNumber]> {
        self.exact.as_deref()
    }

    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn source(&self) -> SeriesSource {
        self.source
    }

    pub fn mode(&self) -> ArithmeticMode {
        match &self.exact {
            None => ArithmeticMode::Double,
            Some(v) if v.iter().all(QuadraticNumber::is_rational) => ArithmeticMode::ExactRational,
            Some(_) => ArithmeticMode::HighPrecision,
        }
    }

    /// Decimal rendering of each value; exact series honour `digits`, double
    /// series always print 17 significant digits.
    pub fn decimal_strings(&self, digits: usize) -> Vec<String> {
        match &self.exact {
            Some(v) => v.iter().map(|x| x.to_decimal(digits)).collect(),
            None => self
                .values
                .iter()
                .map(|&x| crate::exact::format_f64(x))
                .collect(),
        }
    }

    /// `p/q` strings when every value is rational.
    pub fn rational_strings(&self) -> Option<Vec<String>> {
        let exact = self.exact.as_ref()?;
        exact
            .iter()
            .map(|v| {
                v.as_rational()
                    .map(|r| format!("{}/{}", r.numer(), r.denom()))
            })
            .collect()
    }
}

fn check_order(m_max: usize, cap: usize) -> Result<()> {
    if m_max > cap {
        return Err(Error::Resource(format!(
            "series order {m_max} exceeds the cap of {cap}"
        )));
    }
    Ok(())
}

/// `4⁻ᵐ Σₖ C(2k,k) C(2m−2k,m−k) αᵏ β^{m−k}` for `m = 0..=m_max`.
fn pole_expansion(
    alpha: &QuadraticNumber,
    beta: &QuadraticNumber,
    m_max: usize,
) -> Vec<QuadraticNumber> {
    let binom: Vec<QuadraticNumber> = central_binomials(m_max)
        .into_iter()
        .map(|c| QuadraticNumber::from_rational(BigRational::from_integer(c)))
        .collect();
    let mut alpha_pow = vec![QuadraticNumber::one()];
    let mut beta_pow = vec![QuadraticNumber::one()];
    for k in 1..=m_max {
        alpha_pow.push(&alpha_pow[k - 1] * alpha);
        beta_pow.push(&beta_pow[k - 1] * beta);
    }
    let quarter = QuadraticNumber::ratio(1, 4);
    let mut scale = QuadraticNumber::one();
    let mut out = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let mut acc = QuadraticNumber::zero();
        for k in 0..=m {
            let coeff = &binom[k] * &binom[m - k];
            acc = acc + &coeff * &(&alpha_pow[k] * &beta_pow[m - k]);
        }
        out.push(&acc * &scale);
        scale = &scale * &quarter;
    }
    out
}

pub fn series_from_poles(poles: &PolePair, m_max: usize) -> Result<MomentSeries> {
    series_from_poles_capped(poles, m_max, ORDER_CAP)
}

pub fn series_from_poles_capped(
    poles: &PolePair,
    m_max: usize,
    cap: usize,
) -> Result<MomentSeries> {
    check_order(m_max, cap)?;
    if poles.alpha.signum() <= 0 || poles.beta.signum() <= 0 {
        return Err(Error::domain("poles must be positive"));
    }
    MomentSeries::from_exact(
        pole_expansion(&poles.alpha, &poles.beta, m_max),
        SeriesSource::ClosedForm,
    )
}

pub fn partition_series(
    state: &GaussianPureState,
    partition: Partition,
    m_max: usize,
) -> Result<MomentSeries> {
    series_from_poles(&pole_pair(state, partition), m_max)
}

pub fn tilde_series(
    state: &GaussianPureState,
    partition: Partition,
    m_max: usize,
) -> Result<MomentSeries> {
    series_from_poles(&tilde_pole_pair(state, partition), m_max)
}

fn average_of_partitions(
    state: &GaussianPureState,
    m_max: usize,
    series: impl Fn(&GaussianPureState, Partition, usize) -> Result<MomentSeries>,
) -> Result<MomentSeries> {
    check_order(m_max, ORDER_CAP)?;
    let parts = Partition::ALL
        .iter()
        .map(|&p| series(state, p, m_max))
        .collect::<Result<Vec<_>>>()?;
    let third = QuadraticNumber::ratio(1, 3);
    let exact = (0..=m_max)
        .map(|m| {
            let sum = parts.iter().fold(QuadraticNumber::zero(), |acc, s| {
                acc + &s.exact.as_ref().expect("closed form is exact")[m]
            });
            &sum * &third
        })
        .collect();
    MomentSeries::from_exact(exact, SeriesSource::ClosedForm)
}

/// `S⁽ᵐ⁾ = (A⁽ᵐ⁾₁|₂₃ + A⁽ᵐ⁾₂|₁₃ + A⁽ᵐ⁾₃|₁₂)/3`.
pub fn symmetric_sum(state: &GaussianPureState, m_max: usize) -> Result<MomentSeries> {
    average_of_partitions(state, m_max, partition_series)
}

/// Symmetric sum of the tilde quantities.
pub fn tilde_symmetric_sum(state: &GaussianPureState, m_max: usize) -> Result<MomentSeries> {
    average_of_partitions(state, m_max, tilde_series)
}

/// `E_m(x) = 4⁻ᵐ Σₖ C(2k,k) C(2m−2k,m−k) xᵏ`, exactly.
pub fn e_m_exact(x: &BigRational, m: usize) -> Result<BigRational> {
    if *x < BigRational::zero() || *x > BigRational::one() {
        return Err(Error::domain(format!("E_m requires 0 ≤ x ≤ 1, got {x}")));
    }
    check_order(m, ORDER_CAP)?;
    let v = pole_expansion(&x.clone().into(), &QuadraticNumber::one(), m);
    Ok(v[m].as_rational().expect("rational input").clone())
}

pub fn e_m(x: f64, m: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("E_m requires 0 ≤ x ≤ 1, got {x}")));
    }
    let r = e_m_exact(&rational_from_f64(x)?, m)?;
    Ok(QuadraticNumber::from_rational(r).to_f64())
}

/// Biseparable threshold `(2ᵐ + 2)/3`, exactly.
pub fn biseparable_threshold(m: usize) -> BigRational {
    let two_m = num_traits::pow(BigInt::from(2), m);
    BigRational::new(two_m + 2, BigInt::from(3))
}

/// Fully separable threshold `2ᵐ`, exactly.
pub fn full_separability_threshold(m: usize) -> BigRational {
    BigRational::from_integer(num_traits::pow(BigInt::from(2), m))
}

/// `((2ᵐ+2)/3) / S⁽ᵐ⁾` for the GHZ/W state with parameter `a`, exactly
/// evaluated and then rounded.
pub fn violation_ratio_exact(a: f64, m: usize) -> Result<QuadraticNumber> {
    let (state, _) = make_ghzw_state(a)?;
    let s = symmetric_sum(&state, m)?;
    let value = &s.exact.as_ref().expect("closed form is exact")[m];
    Ok(&QuadraticNumber::from_rational(biseparable_threshold(m)) / value)
}

pub fn violation_ratio(a: f64, m: usize) -> Result<f64> {
    Ok(violation_ratio_exact(a, m)?.to_f64())
}

/// Pointwise convex combination of series. Exact whenever every component is
/// exact and they share a number field.
pub fn mixture_series(components: &[(f64, &MomentSeries)]) -> Result<MomentSeries> {
    let first = components
        .first()
        .ok_or_else(|| Error::domain("mixture needs at least one component"))?;
    let len = first.1.len();
    if components.iter().any(|(_, s)| s.len() != len) {
        return Err(Error::domain("mixture components must have equal length"));
    }
    if components
        .iter()
        .any(|(w, _)| !(w.is_finite() && *w >= 0.0))
    {
        return Err(Error::domain("mixture weights must be non-negative"));
    }
    let total: f64 = components.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!(
            "mixture weights sum to {total}, not 1"
        )));
    }

    let exact = exact_mixture(components, len);
    match exact {
        Some(values) => {
            let mut series = MomentSeries::from_exact(values, SeriesSource::Mixture)?;
            if components.len() == 1 {
                series.source = first.1.source;
            }
            Ok(series)
        }
        None => {
            let values = (0..len)
                .map(|m| components.iter().map(|(w, s)| w * s.values[m]).sum::<f64>())
                .collect::<Vec<_>>();
            // weights summing to 1 within tolerance leave values[0] within tolerance of 1
            let mut values = values;
            values[0] = 1.0;
            let source = if components.len() == 1 {
                first.1.source
            } else {
                SeriesSource::Mixture
            };
            MomentSeries::from_f64(values, source)
        }
    }
}

fn exact_mixture(components: &[(f64, &MomentSeries)], len: usize) -> Option<Vec<QuadraticNumber>> {
    let weights: Vec<QuadraticNumber> = components
        .iter()
        .map(|(w, _)| {
            rational_from_f64(*w)
                .ok()
                .map(QuadraticNumber::from_rational)
        })
        .collect::<Option<_>>()?;
    let total = weights
        .iter()
        .fold(QuadraticNumber::zero(), |acc, w| acc + w);
    if total != QuadraticNumber::one() {
        return None;
    }
    let series: Vec<&[QuadraticNumber]> = components
        .iter()
        .map(|(_, s)| s.exact.as_deref())
        .collect::<Option<_>>()?;
    for m in 0..len {
        for a in &series {
            for b in &series {
                if !a[m].compatible(&b[m]) {
                    return None;
                }
            }
        }
    }
    Some(
        (0..len)
            .map(|m| {
                weights
                    .iter()
                    .zip(&series)
                    .fold(QuadraticNumber::zero(), |acc, (w, s)| acc + w * &s[m])
            })
            .collect(),
    )
}
