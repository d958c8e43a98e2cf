//! Reordering `XⁿYᵐ` for operators with a c-number commutator, checked on
//! truncated Fock matrices.

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReorderSpec {
    pub n: usize,
    pub m: usize,
    /// `[X, Y] = c`
    pub c: Complex64,
}

/// One term `coefficient · Y^{m−k} X^{n−k}` of the reordered product.
#[derive(Clone, Debug, PartialEq)]
pub struct ReorderTerm {
    pub k: usize,
    /// `k! C(n,k) C(m,k)`
    pub integer_factor: BigUint,
    /// `k! C(n,k) C(m,k) cᵏ`
    pub coefficient: Complex64,
}

fn binomial(n: usize, k: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `XⁿYᵐ = Σ_{k=0}^{min(n,m)} k! C(n,k) C(m,k) cᵏ Y^{m−k} X^{n−k}`.
/// Terms with a zero coefficient (`c = 0`, `k > 0`) are omitted.
pub fn reorder_coefficients(spec: &ReorderSpec) -> Vec<ReorderTerm> {
    let mut terms = Vec::new();
    let mut factorial = BigUint::one();
    let mut c_pow = Complex64::ONE;
    for k in 0..=spec.n.min(spec.m) {
        if k > 0 {
            factorial *= BigUint::from(k);
            c_pow *= spec.c;
        }
        if k > 0 && spec.c == Complex64::ZERO {
            break;
        }
        let integer_factor = &factorial * binomial(spec.n, k) * binomial(spec.m, k);
        let coefficient = c_pow * integer_factor.to_f64().unwrap_or(f64::INFINITY);
        terms.push(ReorderTerm {
            k,
            integer_factor,
            coefficient,
        });
    }
    terms
}

fn power(base: &DMatrix<Complex64>, exp: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::identity(base.nrows(), base.ncols());
    for _ in 0..exp {
        out = &out * base;
    }
    out
}

/// Checks the reordering identity with `X = â` and `Y = c·â†` on a
/// `dim`-level truncated Fock space. Only the leading `(dim−n−m)` block is
/// compared: there every intermediate state stays below the cutoff.
pub fn fock_verify_reorder(spec: &ReorderSpec, dim: usize) -> Result<bool> {
    if dim < spec.n + spec.m + 2 {
        return Err(Error::domain(format!(
            "Fock dimension {dim} is below n + m + 2 = {}",
            spec.n + spec.m + 2
        )));
    }
    let annihilator = DMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            Complex64::ZERO
        }
    });
    let x = annihilator.clone();
    let y = annihilator.adjoint() * spec.c;
    let lhs = power(&x, spec.n) * power(&y, spec.m);
    let mut rhs = DMatrix::zeros(dim, dim);
    for term in reorder_coefficients(spec) {
        rhs += power(&y, spec.m - term.k) * power(&x, spec.n - term.k) * term.coefficient;
    }
    let block = dim - spec.n - spec.m;
    for i in 0..block {
        for j in 0..block {
            let (l, r) = (lhs[(i, j)], rhs[(i, j)]);
            if (l - r).norm() > 1e-10 * l.norm().max(1.0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, m: usize, c: Complex64) -> ReorderSpec {
        ReorderSpec { n, m, c }
    }

    #[test]
    fn base_case() {
        let c = Complex64::new(0.3, -0.2);
        let terms = reorder_coefficients(&spec(1, 1, c));
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0].coefficient, Complex64::ONE);
        assert_eq!(terms[1].k, 1);
        assert_eq!(terms[1].coefficient, c);
    }

    #[test]
    fn commuting_case() {
        let terms = reorder_coefficients(&spec(3, 4, Complex64::ZERO));
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].k, 0);
        assert_eq!(terms[0].coefficient, Complex64::ONE);
    }

    #[test]
    fn two_one_case() {
        let c = Complex64::new(1.5, 0.0);
        let terms = reorder_coefficients(&spec(2, 1, c));
        assert_eq!(terms[1].integer_factor, BigUint::from(2u32));
        assert_eq!(terms[1].coefficient, 2.0 * c);
    }

    #[test]
    fn integer_factors() {
        // n = 3, m = 2: k! C(3,k) C(2,k) = 1, 6, 6
        let f: Vec<u32> = reorder_coefficients(&spec(3, 2, Complex64::ONE))
            .iter()
            .map(|t| t.integer_factor.to_u32().unwrap())
            .collect();
        assert_eq!(f, vec![1, 6, 6]);
    }

    #[test]
    fn fock_checks() {
        assert!(fock_verify_reorder(&spec(1, 1, Complex64::ONE), 10).unwrap());
        assert!(fock_verify_reorder(&spec(3, 2, Complex64::ONE), 16).unwrap());
        assert!(fock_verify_reorder(&spec(2, 3, Complex64::new(0.5, 0.8)), 12).unwrap());
        assert!(matches!(
            fock_verify_reorder(&spec(3, 2, Complex64::ONE), 4),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn fock_check_detects_wrong_identity() {
        // dropping the commutator terms must fail
        let s = spec(2, 2, Complex64::ONE);
        let dim = 10;
        let a = DMatrix::from_fn(dim, dim, |i, j| {
            if j == i + 1 {
                Complex64::new((j as f64).sqrt(), 0.0)
            } else {
                Complex64::ZERO
            }
        });
        let lhs = power(&a, s.n) * power(&a.adjoint(), s.m);
        let wrong = power(&a.adjoint(), s.m) * power(&a, s.n);
        assert!((lhs[(0, 0)] - wrong[(0, 0)]).norm() > 1.0);
    }
}
