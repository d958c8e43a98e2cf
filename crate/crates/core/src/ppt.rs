//! Physicality `γ ⪰ iJ` and partial-transpose tests on covariance matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::CovarianceMatrix;

/// Absolute tolerance on the smallest eigenvalue of `γ − iJ`.
pub const DEFAULT_PSD_TOLERANCE: f64 = -1e-10;
const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// `J = [[0, −𝟙],[𝟙, 0]]` and the momentum-flip matrices `Λ_k` for `n` modes.
#[derive(Clone, Debug)]
pub struct SymplecticContext {
    modes: usize,
    j: DMatrix<f64>,
}

impl SymplecticContext {
    pub fn new(modes: usize) -> Self {
        let mut j = DMatrix::zeros(2 * modes, 2 * modes);
        for i in 0..modes {
            j[(i, modes + i)] = -1.0;
            j[(modes + i, i)] = 1.0;
        }
        SymplecticContext { modes, j }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn j(&self) -> &DMatrix<f64> {
        &self.j
    }

    /// Flips the sign of `p_k` (zero-based `k`).
    pub fn lambda(&self, k: usize) -> DMatrix<f64> {
        let mut d = DMatrix::identity(2 * self.modes, 2 * self.modes);
        d[(self.modes + k, self.modes + k)] = -1.0;
        d
    }

    /// `γ − iJ`.
    pub fn uncertainty_matrix(&self, gamma: &DMatrix<f64>) -> DMatrix<Complex64> {
        DMatrix::from_fn(gamma.nrows(), gamma.ncols(), |r, c| {
            Complex64::new(gamma[(r, c)], -self.j[(r, c)])
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Physicality {
    pub physical: bool,
    pub min_eigenvalue: f64,
}

fn checked_context(gamma: &CovarianceMatrix) -> Result<SymplecticContext> {
    let asym = gamma.asymmetry();
    if asym > SYMMETRY_TOLERANCE {
        return Err(Error::domain(format!(
            "covariance asymmetry {asym:e} exceeds 1e-12"
        )));
    }
    Ok(SymplecticContext::new(gamma.modes()))
}

fn min_eigenvalue(h: DMatrix<Complex64>) -> f64 {
    h.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn principal_minor(h: &DMatrix<Complex64>, keep: &[usize]) -> f64 {
    let sub = DMatrix::from_fn(keep.len(), keep.len(), |r, c| h[(keep[r], keep[c])]);
    sub.determinant().re
}

pub fn is_physical(gamma: &CovarianceMatrix) -> Result<Physicality> {
    is_physical_with_tolerance(gamma, DEFAULT_PSD_TOLERANCE)
}

pub fn is_physical_with_tolerance(gamma: &CovarianceMatrix, tolerance: f64) -> Result<Physicality> {
    let ctx = checked_context(gamma)?;
    let min = min_eigenvalue(ctx.uncertainty_matrix(gamma.gamma()));
    Ok(Physicality {
        physical: min >= tolerance,
        min_eigenvalue: min,
    })
}

/// Partial-transpose test across one bipartition.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionPt {
    /// Zero-based index of the transposed mode.
    pub mode: usize,
    /// The transposed matrix fails `⪰ iJ`.
    pub negative: bool,
    pub min_eigenvalue: f64,
    /// Leading principal minor of size `2n − 1`.
    pub leading_minor: f64,
    /// Principal minors with one row/column removed, indexed by the removed
    /// (zero-based) index.
    pub drop_one_minors: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PtReport {
    pub physicality: Physicality,
    pub partitions: Vec<PartitionPt>,
    /// All partial transposes are unphysical.
    pub class1: bool,
}

/// Evaluates `Λ_k γ Λ_k − iJ` for every mode `k`.
pub fn pt_class1_check(gamma: &CovarianceMatrix) -> Result<PtReport> {
    pt_class1_check_with_tolerance(gamma, DEFAULT_PSD_TOLERANCE)
}

pub fn pt_class1_check_with_tolerance(
    gamma: &CovarianceMatrix,
    tolerance: f64,
) -> Result<PtReport> {
    let ctx = checked_context(gamma)?;
    let physicality = is_physical_with_tolerance(gamma, tolerance)?;
    let size = 2 * ctx.modes();
    let partitions: Vec<PartitionPt> = (0..ctx.modes())
        .map(|k| {
            let lambda = ctx.lambda(k);
            let flipped = &lambda * gamma.gamma() * &lambda;
            let h = ctx.uncertainty_matrix(&flipped);
            let leading: Vec<usize> = (0..size - 1).collect();
            let drop_one_minors = (0..size)
                .map(|d| {
                    let keep: Vec<usize> = (0..size).filter(|&i| i != d).collect();
                    principal_minor(&h, &keep)
                })
                .collect();
            let min = min_eigenvalue(h.clone());
            PartitionPt {
                mode: k,
                negative: min < tolerance,
                min_eigenvalue: min,
                leading_minor: principal_minor(&h, &leading),
                drop_one_minors,
            }
        })
        .collect();
    Ok(PtReport {
        physicality,
        class1: partitions.iter().all(|p| p.negative),
        partitions,
    })
}

/// Principal minor of `Λ_k γ Λ_k − iJ` (or of `γ − iJ` without a flip) with
/// the zero-based row/column `removed` deleted.
pub fn uncertainty_minor(
    gamma: &CovarianceMatrix,
    flip: Option<usize>,
    removed: usize,
) -> Result<f64> {
    let ctx = checked_context(gamma)?;
    let size = 2 * ctx.modes();
    if removed >= size || flip.is_some_and(|k| k >= ctx.modes()) {
        return Err(Error::domain("minor indices out of range"));
    }
    let flipped = match flip {
        Some(k) => {
            let lambda = ctx.lambda(k);
            &lambda * gamma.gamma() * &lambda
        }
        None => gamma.gamma().clone(),
    };
    let keep: Vec<usize> = (0..size).filter(|&i| i != removed).collect();
    Ok(principal_minor(&ctx.uncertainty_matrix(&flipped), &keep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{covariance_of, make_ghzw_state, make_xi_state};

    #[test]
    fn context_invariants() {
        let ctx = SymplecticContext::new(3);
        let j = ctx.j();
        assert_eq!(j.transpose(), -j.clone());
        assert_eq!(j * j, -DMatrix::<f64>::identity(6, 6));
        for k in 0..3 {
            let l = ctx.lambda(k);
            assert_eq!(&l * &l, DMatrix::<f64>::identity(6, 6));
        }
        assert_eq!(ctx.lambda(0)[(3, 3)], -1.0);
    }

    #[test]
    fn vacuum_is_physical_boundary() {
        let p = is_physical(&CovarianceMatrix::vacuum(3)).unwrap();
        assert!(p.physical);
        assert!(p.min_eigenvalue.abs() < 1e-12);
        let r = pt_class1_check(&CovarianceMatrix::vacuum(3)).unwrap();
        assert!(!r.class1);
        assert!(r.partitions.iter().all(|p| !p.negative));
    }

    #[test]
    fn half_vacuum_is_unphysical() {
        let g = CovarianceMatrix::new(DMatrix::identity(6, 6) * 0.5).unwrap();
        assert!(!is_physical(&g).unwrap().physical);
    }

    #[test]
    fn asymmetric_input_rejected() {
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = 1e-6;
        let g = CovarianceMatrix::new(m).unwrap();
        assert!(matches!(is_physical(&g), Err(Error::Domain(_))));
    }

    #[test]
    fn xi_family_minor() {
        for xi in [0.25, 0.5, 0.75] {
            let g = covariance_of(&make_xi_state(xi).unwrap());
            let r = pt_class1_check(&g).unwrap();
            let want = -4.0 * xi * xi / ((1.0 - xi).powi(2) * (1.0 + 2.0 * xi));
            assert_rel!(r.partitions[0].leading_minor, want, 1e-10);
            assert!(r.class1);
            let p = is_physical(&g).unwrap();
            assert!(p.physical && p.min_eigenvalue.abs() < 1e-9);
            let e0 = r.partitions[0].min_eigenvalue;
            assert!(r
                .partitions
                .iter()
                .all(|p| (p.min_eigenvalue - e0).abs() < 1e-10));
        }
    }

    #[test]
    fn ghzw_minor() {
        let (s, _) = make_ghzw_state(1.5).unwrap();
        let r = pt_class1_check(&covariance_of(&s)).unwrap();
        assert!(r.class1);
        assert_close!(r.partitions[0].drop_one_minors[1], -1.185, 5e-4);
        let m = uncertainty_minor(&covariance_of(&s), Some(0), 1).unwrap();
        assert_eq!(m, r.partitions[0].drop_one_minors[1]);
    }
}
