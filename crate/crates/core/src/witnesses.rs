//! Threshold bookkeeping for the moment hierarchy, the lowest-order
//! quadrature witness and the bipartite EPR hierarchy.

use std::fmt;

use nalgebra::DVector;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::moments::{biseparable_threshold, full_separability_threshold, MomentSeries, Partition};
use crate::oracle::wick::{wick_moment, ContractionTable, LinearForm};
use crate::states::{two_mode_squeezed_vacuum, CovarianceMatrix};

/// Relative width of the band around a threshold inside which no verdict is drawn.
pub const DEFAULT_GUARD_BAND: f64 = 1e-9;

/// Verdict at a single order, or for a single witness value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    NoDetection,
    BoundaryInconclusive,
    FullSeparabilityExcluded,
    GenuineEntanglement,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::NoDetection => "no-detection",
            Verdict::BoundaryInconclusive => "boundary-inconclusive",
            Verdict::FullSeparabilityExcluded => "full-separability-excluded",
            Verdict::GenuineEntanglement => "genuine-entanglement-detected",
        }
    }

    /// Collapses boundary cases to no detection.
    pub fn overall(self) -> Verdict {
        match self {
            Verdict::BoundaryInconclusive => Verdict::NoDetection,
            v => v,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Thresholds for a witness where smaller values are stronger evidence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub full_separable: f64,
    pub biseparable: f64,
    pub universal_floor: f64,
}

fn near(value: f64, threshold: f64, guard: f64) -> bool {
    (value - threshold).abs() <= guard * threshold.abs()
}

/// Applies strict inequalities with a relative guard band.
pub fn threshold_verdict(value: f64, thresholds: &Thresholds, guard: f64) -> Verdict {
    if near(value, thresholds.biseparable, guard) {
        Verdict::BoundaryInconclusive
    } else if value < thresholds.biseparable {
        Verdict::GenuineEntanglement
    } else if near(value, thresholds.full_separable, guard) {
        Verdict::BoundaryInconclusive
    } else if value < thresholds.full_separable {
        Verdict::FullSeparabilityExcluded
    } else {
        Verdict::NoDetection
    }
}

/// Whether `value` lies below the universal floor by more than the guard band.
pub fn below_floor(value: f64, thresholds: &Thresholds, guard: f64) -> bool {
    value < thresholds.universal_floor * (1.0 - guard)
}

/// Thresholds of `S⁽ᵐ⁾`: `2ᵐ`, `(2ᵐ+2)/3` and `1`.
pub fn moment_thresholds(m: usize) -> Thresholds {
    Thresholds {
        full_separable: full_separability_threshold(m)
            .to_f64()
            .unwrap_or(f64::INFINITY),
        biseparable: biseparable_threshold(m).to_f64().unwrap_or(f64::INFINITY),
        universal_floor: 1.0,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderVerdict {
    pub m: usize,
    pub value: f64,
    pub full_sep_threshold: f64,
    pub bisep_threshold: f64,
    pub universal_floor: f64,
    pub verdict: Verdict,
    /// `(value − 2ᵐ)/2ᵐ`
    pub full_sep_margin: f64,
    /// `(value − (2ᵐ+2)/3)/((2ᵐ+2)/3)`
    pub bisep_margin: f64,
    pub unphysical: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessReport {
    pub per_m: Vec<OrderVerdict>,
    pub overall: Verdict,
    pub unphysical_input: bool,
    pub guard_band: f64,
}

impl WitnessReport {
    pub fn order(&self, m: usize) -> Option<&OrderVerdict> {
        self.per_m.iter().find(|o| o.m == m)
    }
}

/// Classifies orders `1..=m_max` of a symmetric-sum series.
pub fn classify(series: &MomentSeries) -> Result<WitnessReport> {
    classify_with_guard(series, DEFAULT_GUARD_BAND)
}

pub fn classify_with_guard(series: &MomentSeries, guard: f64) -> Result<WitnessReport> {
    if series.max_order() == 0 {
        return Err(Error::domain("series has no orders m ≥ 1 to classify"));
    }
    if !(0.0..1.0).contains(&guard) {
        return Err(Error::domain(format!(
            "guard band must lie in [0, 1), got {guard}"
        )));
    }
    let per_m: Vec<OrderVerdict> = (1..=series.max_order())
        .map(|m| {
            let value = series.value(m);
            let t = moment_thresholds(m);
            OrderVerdict {
                m,
                value,
                full_sep_threshold: t.full_separable,
                bisep_threshold: t.biseparable,
                universal_floor: t.universal_floor,
                verdict: threshold_verdict(value, &t, guard),
                full_sep_margin: (value - t.full_separable) / t.full_separable,
                bisep_margin: (value - t.biseparable) / t.biseparable,
                unphysical: below_floor(value, &t, guard),
            }
        })
        .collect();
    let overall = per_m
        .iter()
        .map(|o| o.verdict.overall())
        .max()
        .unwrap_or(Verdict::NoDetection);
    Ok(WitnessReport {
        unphysical_input: per_m.iter().any(|o| o.unphysical),
        per_m,
        overall,
        guard_band: guard,
    })
}

/// Thresholds of `T₃⁽¹⁾`: `9`, `5` and `3`.
pub const QUADRATURE_THRESHOLDS: Thresholds = Thresholds {
    full_separable: 9.0,
    biseparable: 5.0,
    universal_floor: 3.0,
};

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureWitness {
    pub t1: f64,
    /// `⟨(x₁+x₂+x₃)²⟩` followed by `⟨(e_kᵀp)²⟩` for `k = 1, 2, 3`.
    pub components: [f64; 4],
    pub verdict: Verdict,
    pub unphysical: bool,
}

impl QuadratureWitness {
    /// The equivalent first-order moment `T/6 + 1/2`.
    pub fn first_order_moment(&self) -> f64 {
        self.t1 / 6.0 + 0.5
    }
}

/// `T₃⁽¹⁾ = 3⟨(x₁+x₂+x₃)²⟩ + Σₖ ⟨(e_kᵀp)²⟩` from a three-mode covariance.
pub fn t1_from_covariance(gamma: &CovarianceMatrix) -> Result<QuadratureWitness> {
    if gamma.modes() != 3 {
        return Err(Error::domain(format!(
            "quadrature witness needs three modes, got {}",
            gamma.modes()
        )));
    }
    if !gamma.has_zero_mean() {
        return Err(Error::domain(
            "quadrature witness requires a zero-mean state",
        ));
    }
    let quad = |block: nalgebra::DMatrix<f64>, v: [f64; 3]| {
        let v = DVector::from_row_slice(&v);
        v.dot(&(block * &v)) / 2.0
    };
    let x = quad(gamma.x_block(), [1.0, 1.0, 1.0]);
    let mut components = [x, 0.0, 0.0, 0.0];
    for p in Partition::ALL {
        let e = p.sign_vector().map(|s| s as f64);
        components[p.number()] = quad(gamma.p_block(), e);
    }
    let t1 = 3.0 * components[0] + components[1] + components[2] + components[3];
    Ok(QuadratureWitness {
        t1,
        components,
        verdict: threshold_verdict(t1, &QUADRATURE_THRESHOLDS, DEFAULT_GUARD_BAND),
        unphysical: below_floor(t1, &QUADRATURE_THRESHOLDS, DEFAULT_GUARD_BAND),
    })
}

/// `(9/(1+2ξ) + 9 − 6ξ)/2`, including the limit point `ξ = 1`.
pub fn t1_xi_closed_form(xi: f64) -> Result<f64> {
    if !(xi > -0.5 && xi <= 1.0) {
        return Err(Error::domain(format!(
            "closed form needs −1/2 < ξ ≤ 1, got {xi}"
        )));
    }
    Ok((9.0 / (1.0 + 2.0 * xi) + 9.0 - 6.0 * xi) / 2.0)
}

/// The unphysical `ξ → 1` limit of the closed form.
pub fn t1_xi_limit() -> f64 {
    t1_xi_closed_form(1.0).expect("limit point is in range")
}

#[derive(Clone, Debug, PartialEq)]
pub struct EprCheck {
    pub n: usize,
    pub r: f64,
    pub value: f64,
    pub bound: f64,
    pub closed_form: f64,
    pub violated: bool,
}

/// `⟨Ôⁿ⟩` for `Ô = (x̂_a − x̂_b)² + (p̂_a + p̂_b)² = 2(â† − b̂)(â − b̂†)` on the
/// two-mode squeezed vacuum, by pairing enumeration.
pub fn epr_moment_bound_check(n: usize, r: f64) -> Result<EprCheck> {
    let gamma = two_mode_squeezed_vacuum(r)?;
    let table = ContractionTable::from_covariance(&gamma)?;
    let lowering = LinearForm::real(&[1.0, 0.0], &[0.0, -1.0])?;
    let raising = lowering.dagger();
    let forms: Vec<LinearForm> = (0..n)
        .flat_map(|_| [raising.clone(), lowering.clone()])
        .collect();
    let raw = wick_moment(&table, &forms)?;
    if raw.im.abs() > 1e-10 * raw.re.abs().max(1.0) {
        return Err(Error::Consistency(format!(
            "EPR moment has imaginary part {:e}",
            raw.im
        )));
    }
    let factorial: f64 = (1..=n).map(|v| v as f64).product();
    let two_n = 2f64.powi(n as i32);
    let value = two_n * raw.re;
    let bound = two_n * factorial;
    Ok(EprCheck {
        n,
        r,
        value,
        bound,
        closed_form: bound * (-2.0 * r * n as f64).exp(),
        violated: value < bound * (1.0 - DEFAULT_GUARD_BAND),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{symmetric_sum, MomentSeries, SeriesSource};
    use crate::states::{covariance_of, make_ghzw_state, make_xi_state};

    #[test]
    fn vacuum_is_boundary() {
        let s = symmetric_sum(&make_xi_state(0.0).unwrap(), 8).unwrap();
        let r = classify(&s).unwrap();
        assert_eq!(r.overall, Verdict::NoDetection);
        assert!(!r.unphysical_input);
        for o in &r.per_m {
            assert_eq!(o.full_sep_margin, 0.0);
            assert_eq!(o.verdict, Verdict::BoundaryInconclusive);
        }
    }

    #[test]
    fn xi_half_orders() {
        let s = symmetric_sum(&make_xi_state(0.5).unwrap(), 4).unwrap();
        let r = classify(&s).unwrap();
        assert_eq!(
            r.order(1).unwrap().verdict,
            Verdict::FullSeparabilityExcluded
        );
        assert_eq!(r.order(2).unwrap().verdict, Verdict::GenuineEntanglement);
        assert_eq!(r.overall, Verdict::GenuineEntanglement);
    }

    #[test]
    fn ghzw_genuine_everywhere() {
        let (state, _) = make_ghzw_state(1.5).unwrap();
        let r = classify(&symmetric_sum(&state, 12).unwrap()).unwrap();
        assert!(r
            .per_m
            .iter()
            .all(|o| o.verdict == Verdict::GenuineEntanglement));
    }

    #[test]
    fn unphysical_values_flagged() {
        let s = MomentSeries::from_f64(vec![1.0, 0.9, 3.0], SeriesSource::Mixture).unwrap();
        let r = classify(&s).unwrap();
        assert!(r.unphysical_input);
        assert!(r.order(1).unwrap().unphysical);
    }

    #[test]
    fn empty_series_rejected() {
        let s = MomentSeries::from_f64(vec![1.0], SeriesSource::Mixture).unwrap();
        assert!(classify(&s).is_err());
    }

    #[test]
    fn guard_band_blocks_ties() {
        let t = moment_thresholds(1);
        let just_below = t.biseparable * (1.0 - 1e-12);
        assert_eq!(
            threshold_verdict(just_below, &t, 1e-9),
            Verdict::BoundaryInconclusive
        );
        assert_eq!(
            threshold_verdict(just_below, &t, 0.0),
            Verdict::GenuineEntanglement
        );
    }

    #[test]
    fn quadrature_witness_values() {
        let vac = t1_from_covariance(&CovarianceMatrix::vacuum(3)).unwrap();
        assert_eq!(vac.t1, 9.0);
        let w = t1_from_covariance(&covariance_of(&make_xi_state(0.5).unwrap())).unwrap();
        assert_close!(w.t1, 5.25, 1e-12);
        assert_close!(w.first_order_moment(), 1.375, 1e-12);
        assert_eq!(w.verdict, Verdict::FullSeparabilityExcluded);
        assert_eq!(t1_xi_limit(), 3.0);
        assert!(t1_from_covariance(&CovarianceMatrix::vacuum(2)).is_err());
    }

    #[test]
    fn epr_examples() {
        let c = epr_moment_bound_check(1, 0.5).unwrap();
        assert_close!(c.value, 2.0 * (-1f64).exp(), 1e-12);
        assert!(c.violated);
        let c = epr_moment_bound_check(3, 0.0).unwrap();
        assert_close!(c.value, 48.0, 1e-10);
        assert!(!c.violated);
        let c = epr_moment_bound_check(4, 0.5).unwrap();
        assert_rel!(c.value / c.bound, (-4f64).exp(), 1e-9);
    }
}
