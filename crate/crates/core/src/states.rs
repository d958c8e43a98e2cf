//! Pure three-mode Gaussian states `ψ(x) ∝ exp(−½ xᵀAx)` and their covariance
//! matrices.
//!
//! Covariance convention: quadratures `x̂ = (â+â†)/√2`, `p̂ = −i(â−â†)/√2`, and
//! `γ = 2 × (symmetrized second central moments)`, so the vacuum has `γ = 𝟙`
//! and physicality reads `γ − iJ ⪰ 0` with `J = [[0, −𝟙], [𝟙, 0]]`. Under this
//! convention a pure state with real position-space matrix `A` has
//! `γ = diag(A⁻¹, A)`.

use nalgebra::{DMatrix, DVector, Matrix3};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exact::{rational_from_f64, ExactMatrix3, QuadraticNumber};

/// Largest accepted condition number of a state matrix.
pub const DEFAULT_CONDITION_LIMIT: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub enum StateKind {
    /// Unit diagonal, every off-diagonal entry equal to `xi`.
    Xi {
        xi: BigRational,
    },
    /// The symmetric GHZ/W family with parameter `a > 1`.
    Ghzw {
        a: BigRational,
    },
    /// The nullifier state `A = [[3,2,2],[2,2,1],[2,1,2]]`.
    Proposition,
    Raw,
}

impl StateKind {
    pub fn name(&self) -> &'static str {
        match self {
            StateKind::Xi { .. } => "xi",
            StateKind::Ghzw { .. } => "ghzw",
            StateKind::Proposition => "proposition",
            StateKind::Raw => "raw",
        }
    }
}

/// A validated pure Gaussian state. Immutable; build it through the family
/// constructors or [`GaussianPureState::from_exact`].
#[derive(Clone, Debug)]
pub struct GaussianPureState {
    kind: StateKind,
    exact: ExactMatrix3,
    exact_inverse: ExactMatrix3,
    matrix: Matrix3<f64>,
    inverse: Matrix3<f64>,
    condition: f64,
}

impl GaussianPureState {
    /// Validates an arbitrary exact symmetric matrix as a state.
    pub fn from_exact(matrix: ExactMatrix3) -> Result<Self> {
        Self::build(StateKind::Raw, matrix)
    }

    /// Builds a raw state from double entries, read as their shortest decimals.
    pub fn from_rows(rows: [[f64; 3]; 3]) -> Result<Self> {
        let mut exact = Vec::with_capacity(9);
        for row in rows.iter() {
            for &v in row {
                exact.push(QuadraticNumber::from_rational(rational_from_f64(v)?));
            }
        }
        Self::from_exact(ExactMatrix3::from_fn(|i, j| exact[3 * i + j].clone()))
    }

    fn build(kind: StateKind, exact: ExactMatrix3) -> Result<Self> {
        if !exact.is_symmetric() {
            return Err(Error::domain("state matrix must be symmetric"));
        }
        let minors = exact.leading_minors();
        if minors.iter().any(|m| m.signum() <= 0) {
            return Err(Error::domain(
                "state matrix must be positive definite (a leading principal minor is not positive)",
            ));
        }
        let exact_inverse = exact
            .inverse()
            .expect("positive definite matrix is invertible");
        let entries = exact.to_f64();
        let matrix = Matrix3::from_fn(|i, j| entries[i][j]);
        let eig = matrix.symmetric_eigenvalues();
        let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
        let condition = hi / lo;
        if lo.is_nan() || lo <= 0.0 || condition > DEFAULT_CONDITION_LIMIT {
            return Err(Error::numeric(format!(
                "state matrix is too ill-conditioned (condition number {condition:e})"
            )));
        }
        let inverse = matrix
            .cholesky()
            .ok_or_else(|| Error::numeric("Cholesky factorization failed"))?
            .inverse();
        Ok(GaussianPureState {
            kind,
            exact,
            exact_inverse,
            matrix,
            inverse,
            condition,
        })
    }

    pub fn kind(&self) -> &StateKind {
        &self.kind
    }

    /// Position-space matrix `A`.
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    /// `A⁻¹`, from the Cholesky factor of `A`.
    pub fn inverse(&self) -> &Matrix3<f64> {
        &self.inverse
    }

    pub fn exact_matrix(&self) -> &ExactMatrix3 {
        &self.exact
    }

    pub fn exact_inverse(&self) -> &ExactMatrix3 {
        &self.exact_inverse
    }

    pub fn condition_number(&self) -> f64 {
        self.condition
    }

    /// Whether the state is invariant under every permutation of its modes.
    pub fn is_mode_symmetric(&self) -> bool {
        let m = &self.exact;
        m.get(0, 0) == m.get(1, 1)
            && m.get(1, 1) == m.get(2, 2)
            && m.get(0, 1) == m.get(0, 2)
            && m.get(0, 2) == m.get(1, 2)
    }

    /// Same state with `A` replaced by `A⁻¹` (position and momentum exchanged).
    pub fn inverted(&self) -> Result<Self> {
        Self::build(StateKind::Raw, self.exact_inverse.clone())
    }
}

/// The ξ family `A_ξ` (unit diagonal, off-diagonal `ξ`), valid for −½ < ξ < 1.
pub fn make_xi_state(xi: f64) -> Result<GaussianPureState> {
    make_xi_state_exact(rational_from_f64(xi)?)
}

pub fn make_xi_state_exact(xi: BigRational) -> Result<GaussianPureState> {
    let lower = BigRational::new(BigInt::from(-1), BigInt::from(2));
    if xi <= lower || xi >= BigRational::one() {
        return Err(Error::domain(format!(
            "xi must lie in the open interval (-1/2, 1), got {xi}"
        )));
    }
    let q = QuadraticNumber::from_rational(xi.clone());
    let m = ExactMatrix3::from_fn(|i, j| {
        if i == j {
            QuadraticNumber::one()
        } else {
            q.clone()
        }
    });
    GaussianPureState::build(StateKind::Xi { xi }, m)
}

#[derive(Clone, Debug)]
pub struct GhzwParameters {
    pub a: f64,
    pub e_minus: f64,
    pub e_plus: f64,
    pub exact_a: BigRational,
    pub exact_e_minus: QuadraticNumber,
    pub exact_e_plus: QuadraticNumber,
}

/// `e_± = (a²−1 ± √((a²−1)(9a²−1)))/(4a)`, exactly.
pub fn ghzw_parameters(a: &BigRational) -> Result<GhzwParameters> {
    if *a <= BigRational::one() {
        return Err(Error::domain(format!(
            "GHZ/W parameter must exceed 1, got {a}"
        )));
    }
    let one = BigRational::one();
    let a2m1 = a * a - &one;
    let nine = BigRational::from_integer(BigInt::from(9));
    let radicand = &a2m1 * (&nine * a * a - &one);
    let root = QuadraticNumber::sqrt_rational(&radicand)?;
    let base = QuadraticNumber::from_rational(a2m1);
    let denom = QuadraticNumber::from_rational(BigRational::from_integer(BigInt::from(4)) * a);
    let e_minus = &(&base - &root) / &denom;
    let e_plus = &(&base + &root) / &denom;
    Ok(GhzwParameters {
        a: QuadraticNumber::from_rational(a.clone()).to_f64(),
        e_minus: e_minus.to_f64(),
        e_plus: e_plus.to_f64(),
        exact_a: a.clone(),
        exact_e_minus: e_minus,
        exact_e_plus: e_plus,
    })
}

/// The GHZ/W family member with parameter `a > 1`.
///
/// The position-space matrix has diagonal `a` and off-diagonal `e₊`, so the
/// covariance is `γ = diag(A_a, A_a⁻¹)` where `A_a` has off-diagonal `e₋`.
/// This is the orientation under which the family's moment poles, its
/// violation growth and its partial-transpose minor take their published
/// values. Both matrices share the diagonal `a`.
pub fn make_ghzw_state(a: f64) -> Result<(GaussianPureState, GhzwParameters)> {
    make_ghzw_state_exact(rational_from_f64(a)?)
}

pub fn make_ghzw_state_exact(a: BigRational) -> Result<(GaussianPureState, GhzwParameters)> {
    let params = ghzw_parameters(&a)?;
    let diag = QuadraticNumber::from_rational(a.clone());
    let m = ExactMatrix3::from_fn(|i, j| {
        if i == j {
            diag.clone()
        } else {
            params.exact_e_plus.clone()
        }
    });
    let state = GaussianPureState::build(StateKind::Ghzw { a }, m)?;
    Ok((state, params))
}

/// `A = [[3,2,2],[2,2,1],[2,1,2]]`, annihilated by `â† + b̂ + ĉ`.
pub fn make_proposition_state() -> GaussianPureState {
    const A: [[i64; 3]; 3] = [[3, 2, 2], [2, 2, 1], [2, 1, 2]];
    let m = ExactMatrix3::from_fn(|i, j| QuadraticNumber::from_integer(A[i][j]));
    GaussianPureState::build(StateKind::Proposition, m).expect("proposition matrix is valid")
}

/// Rebuilds a state from its kind tag and exact matrix.
pub fn state_from_kind(kind: StateKind, matrix: Option<ExactMatrix3>) -> Result<GaussianPureState> {
    match kind {
        StateKind::Xi { xi } => make_xi_state_exact(xi),
        StateKind::Ghzw { a } => make_ghzw_state_exact(a).map(|(s, _)| s),
        StateKind::Proposition => Ok(make_proposition_state()),
        StateKind::Raw => GaussianPureState::from_exact(
            matrix.ok_or_else(|| Error::Format("raw state requires a matrix".into()))?,
        ),
    }
}

/// Zero-mean covariance matrix over `n` modes, ordered `(x₁..xₙ, p₁..pₙ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    gamma: DMatrix<f64>,
    mean: DVector<f64>,
}

impl CovarianceMatrix {
    pub fn new(gamma: DMatrix<f64>) -> Result<Self> {
        let n = gamma.nrows();
        Self::with_mean(gamma, DVector::zeros(n))
    }

    pub fn with_mean(gamma: DMatrix<f64>, mean: DVector<f64>) -> Result<Self> {
        let n = gamma.nrows();
        if n == 0 || !n.is_multiple_of(2) || gamma.ncols() != n {
            return Err(Error::domain(format!(
                "covariance must be square with even dimension, got {}×{}",
                gamma.nrows(),
                gamma.ncols()
            )));
        }
        if mean.len() != n {
            return Err(Error::domain(
                "mean vector length does not match covariance",
            ));
        }
        Ok(CovarianceMatrix { gamma, mean })
    }

    pub fn vacuum(modes: usize) -> Self {
        CovarianceMatrix {
            gamma: DMatrix::identity(2 * modes, 2 * modes),
            mean: DVector::zeros(2 * modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.gamma.nrows() / 2
    }

    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn has_zero_mean(&self) -> bool {
        self.mean.iter().all(|&v| v == 0.0)
    }

    pub fn x_block(&self) -> DMatrix<f64> {
        let n = self.modes();
        self.gamma.view((0, 0), (n, n)).into_owned()
    }

    pub fn p_block(&self) -> DMatrix<f64> {
        let n = self.modes();
        self.gamma.view((n, n), (n, n)).into_owned()
    }

    /// Largest absolute asymmetry `|γᵢⱼ − γⱼᵢ|`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.gamma.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.gamma[(i, j)] - self.gamma[(j, i)]).abs());
            }
        }
        worst
    }
}

/// `γ = diag(A⁻¹, A)`, zero mean.
pub fn covariance_of(state: &GaussianPureState) -> CovarianceMatrix {
    let mut gamma = DMatrix::zeros(6, 6);
    gamma.view_mut((0, 0), (3, 3)).copy_from(state.inverse());
    gamma.view_mut((3, 3), (3, 3)).copy_from(state.matrix());
    CovarianceMatrix {
        gamma,
        mean: DVector::zeros(6),
    }
}

/// Like [`covariance_of`] but with a caller-chosen condition-number limit.
pub fn covariance_with_condition_limit(
    state: &GaussianPureState,
    limit: f64,
) -> Result<CovarianceMatrix> {
    if state.condition_number() > limit {
        return Err(Error::numeric(format!(
            "condition number {:e} exceeds limit {limit:e}",
            state.condition_number()
        )));
    }
    Ok(covariance_of(state))
}

/// Two-mode squeezed vacuum with squeezing `r ≥ 0`, ordered `(x_a, x_b, p_a, p_b)`.
/// `Var(x_a − x_b) = Var(p_a + p_b) = e^{−2r}`.
pub fn two_mode_squeezed_vacuum(r: f64) -> Result<CovarianceMatrix> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::domain(format!(
            "squeezing must be finite and non-negative, got {r}"
        )));
    }
    let c = (2.0 * r).cosh();
    let s = (2.0 * r).sinh();
    #[rustfmt::skip]
    let gamma = DMatrix::from_row_slice(4, 4, &[
        c,   s,   0.0, 0.0,
        s,   c,   0.0, 0.0,
        0.0, 0.0, c,   -s,
        0.0, 0.0, -s,  c,
    ]);
    CovarianceMatrix::new(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xi_zero_is_vacuum() {
        let s = make_xi_state(0.0).unwrap();
        assert_eq!(*s.matrix(), Matrix3::identity());
        let cov = covariance_of(&s);
        assert_eq!(*cov.gamma(), DMatrix::<f64>::identity(6, 6));
    }

    #[test]
    fn xi_half_minors() {
        let s = make_xi_state(0.5).unwrap();
        let m = s.exact_matrix().leading_minors();
        assert_eq!(m[0], QuadraticNumber::one());
        assert_eq!(m[1], QuadraticNumber::ratio(3, 4));
        assert_eq!(m[2], QuadraticNumber::ratio(1, 2));
        assert_eq!(s.matrix()[(0, 1)], 0.5);
        assert!(s.is_mode_symmetric());
    }

    #[test]
    fn xi_domain_boundaries() {
        for bad in [1.0, -0.5, 1.5, -0.7] {
            assert!(matches!(make_xi_state(bad), Err(Error::Domain(_))), "{bad}");
        }
        assert!(make_xi_state(-0.49).is_ok());
        assert!(make_xi_state(0.999).is_ok());
    }

    #[test]
    fn ghzw_parameters_at_three_halves() {
        let (state, p) = make_ghzw_state(1.5).unwrap();
        // e± = (5 ± √385)/24
        assert_close!(p.e_minus, (5.0 - 385f64.sqrt()) / 24.0, 1e-15);
        assert_close!(p.e_plus, (5.0 + 385f64.sqrt()) / 24.0, 1e-15);
        assert_close!(p.e_minus, -0.60922570293119, 1e-12);
        assert_close!(p.e_plus, 1.02589236959786, 1e-12);
        for i in 0..3 {
            assert_close!(state.inverse()[(i, i)], 1.5, 1e-12);
            assert_close!(state.matrix()[(i, i)], 1.5, 1e-12);
        }
        // the inverse has off-diagonal e₋ exactly
        let inv = state.exact_inverse();
        assert_eq!(inv.get(0, 1), &p.exact_e_minus);
        assert_eq!(inv.get(0, 0), &QuadraticNumber::ratio(3, 2));
    }

    #[test]
    fn ghzw_rejects_boundary() {
        assert!(matches!(make_ghzw_state(1.0), Err(Error::Domain(_))));
        assert!(matches!(make_ghzw_state(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn ghzw_off_diagonals_for_several_a() {
        for a in [1.1, 2.0, 5.0, 1.5] {
            let (state, p) = make_ghzw_state(a).unwrap();
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                assert_close!(state.inverse()[(i, j)], p.e_minus, 1e-12);
                assert_close!(state.matrix()[(i, j)], p.e_plus, 1e-12);
            }
        }
    }

    #[test]
    fn proposition_state_structure() {
        let s = make_proposition_state();
        assert_eq!(s.exact_matrix().determinant(), QuadraticNumber::one());
        let m = s.exact_matrix().leading_minors();
        assert_eq!(
            m,
            [
                QuadraticNumber::from_integer(3),
                QuadraticNumber::from_integer(2),
                QuadraticNumber::from_integer(1)
            ]
        );
        let cov = covariance_of(&s);
        let expected = [[3.0, -2.0, -2.0], [-2.0, 2.0, 1.0], [-2.0, 1.0, 2.0]];
        for (i, row) in expected.iter().enumerate() {
            for (j, want) in row.iter().enumerate() {
                assert_close!(cov.gamma()[(i, j)], *want, 1e-12);
            }
        }
    }

    #[test]
    fn xi_covariance_eigen_direction() {
        // A_ξ j = (1+2ξ) j, so the x-block maps j to j/(1+2ξ)
        let cov = covariance_of(&make_xi_state(0.5).unwrap());
        let x = cov.x_block();
        let j = DVector::from_element(3, 1.0);
        let image = &x * &j;
        for v in image.iter() {
            assert_close!(*v, 0.5, 1e-12);
        }
    }

    #[test]
    fn family_inverses_are_consistent() {
        let states = vec![
            make_xi_state(0.3).unwrap(),
            make_xi_state(-0.4).unwrap(),
            make_ghzw_state(2.0).unwrap().0,
            make_proposition_state(),
        ];
        for s in states {
            let prod = s.matrix() * s.inverse();
            assert!((prod - Matrix3::identity()).abs().max() < 1e-12);
            assert_eq!(
                s.exact_matrix().mul(s.exact_inverse()),
                ExactMatrix3::identity()
            );
        }
    }

    #[test]
    fn xi_eigenvalues() {
        for xi in [-0.4, 0.0, 0.3, 0.9] {
            let s = make_xi_state(xi).unwrap();
            let mut eig: Vec<f64> = s.matrix().symmetric_eigenvalues().iter().copied().collect();
            eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut want = vec![1.0 + 2.0 * xi, 1.0 - xi, 1.0 - xi];
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (g, w) in eig.iter().zip(want) {
                assert_close!(*g, w, 1e-12);
            }
        }
    }

    #[test]
    fn raw_state_validation() {
        assert!(matches!(
            GaussianPureState::from_rows([[1.0, 0.2, 0.0], [0.1, 1.0, 0.0], [0.0, 0.0, 1.0]]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            GaussianPureState::from_rows([[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            GaussianPureState::from_rows([[1.0, 0.0, 0.0], [0.0, 1e-13, 0.0], [0.0, 0.0, 1.0]]),
            Err(Error::Numeric(_))
        ));
        let ok =
            GaussianPureState::from_rows([[2.0, 0.3, -0.1], [0.3, 1.0, 0.2], [-0.1, 0.2, 0.7]])
                .unwrap();
        assert_eq!(ok.kind(), &StateKind::Raw);
        assert!(covariance_with_condition_limit(&ok, 1.5).is_err());
        assert!(covariance_with_condition_limit(&ok, 1e3).is_ok());
    }

    #[test]
    fn tmsv_epr_variances() {
        let cov = two_mode_squeezed_vacuum(0.5).unwrap();
        let g = cov.gamma();
        let var_x_minus = (g[(0, 0)] + g[(1, 1)] - 2.0 * g[(0, 1)]) / 2.0;
        let var_p_plus = (g[(2, 2)] + g[(3, 3)] + 2.0 * g[(2, 3)]) / 2.0;
        assert_close!(var_x_minus, (-1.0f64).exp(), 1e-14);
        assert_close!(var_p_plus, (-1.0f64).exp(), 1e-14);
        assert!(two_mode_squeezed_vacuum(-0.1).is_err());
    }
}
