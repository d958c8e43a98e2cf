//! Moments from the Hermite-polynomial integral representation.
//!
//! `Zᵐψ` is a Hermite polynomial in the single direction `s = uᵀx` times
//! `ψ`, so the moment reduces to a one-dimensional Gaussian average of
//! `H²_m`, which Gauss–Hermite quadrature integrates exactly once the node
//! count exceeds `m`.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::moments::Partition;
use crate::states::GaussianPureState;

/// Largest order accepted by the quadrature oracle.
pub const MAX_QUADRATURE_ORDER: usize = 30;

/// Nodes and weights for `∫ f(y) e^{−y²} dy`.
#[derive(Clone, Debug)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Newton iteration on the orthonormal Hermite recurrence, with the usual
    /// asymptotic starting guesses for successive roots.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("quadrature needs at least one node"));
        }
        let pim4 = std::f64::consts::PI.powf(-0.25);
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let nf = n as f64;
        let mut z = 0.0f64;
        for i in 1..=n.div_ceil(2) {
            z = match i {
                1 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
                2 => z - 1.14 * nf.powf(0.426) / z,
                3 => 1.86 * z - 0.86 * x[0],
                4 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 3],
            };
            let mut derivative = 0.0;
            let mut converged = false;
            for _ in 0..100 {
                let (mut p1, mut p2) = (pim4, 0.0);
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
                }
                derivative = (2.0 * nf).sqrt() * p2;
                let previous = z;
                z = previous - p1 / derivative;
                if (z - previous).abs() <= 1e-15 * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::numeric(format!(
                    "Gauss-Hermite root {i} of {n} did not converge"
                )));
            }
            x[i - 1] = z;
            x[n - i] = -z;
            w[i - 1] = 2.0 / (derivative * derivative);
            w[n - i] = w[i - 1];
        }
        Ok(GaussHermite {
            nodes: x,
            weights: w,
        })
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&y, &w)| w * f(y))
            .sum()
    }
}

/// `H_m(y)/√(2ᵐ m!)` by the scaled three-term recurrence.
pub fn scaled_hermite(m: usize, y: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for n in 0..m {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * y * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn integral_with_nodes(lambda: f64, variance: f64, m: usize, nodes: usize) -> Result<f64> {
    let rule = GaussHermite::new(nodes)?;
    let scale = (variance / lambda).sqrt();
    let mean_square =
        rule.integrate(|y| scaled_hermite(m, scale * y).powi(2)) / std::f64::consts::PI.sqrt();
    Ok((lambda / 2.0).powi(m as i32) * mean_square)
}

/// `A⁽ᵐ⁾ = λᵐ/(m! 4ᵐ) · E[H²_m(s/√(2λ))]` with `s = uᵀx` distributed as
/// `N(0, uᵀ(2A)⁻¹u)` under `ψ²`, `λ = 1 + eᵀAe`, `u = j − Ae`.
pub fn quadrature_moment_oracle(
    state: &GaussianPureState,
    partition: Partition,
    m: usize,
) -> Result<f64> {
    if m > MAX_QUADRATURE_ORDER {
        return Err(Error::Resource(format!(
            "quadrature oracle supports m ≤ {MAX_QUADRATURE_ORDER}, got {m}"
        )));
    }
    let a = state.matrix();
    let e = Vector3::from(partition.sign_vector().map(|v| v as f64));
    let j = Vector3::new(1.0, 1.0, 1.0);
    let ae = a * e;
    let lambda = 1.0 + e.dot(&ae);
    let u = j - ae;
    let variance = u.dot(&(state.inverse() * u)) / 2.0;
    let nodes = 2 * m + 16;
    let base = integral_with_nodes(lambda, variance, m, nodes)?;
    let refined = integral_with_nodes(lambda, variance, m, 2 * nodes)?;
    if (base - refined).abs() > 1e-10 * refined.abs().max(1.0) {
        return Err(Error::numeric(format!(
            "quadrature did not converge: {base} with {nodes} nodes vs {refined} with {} nodes",
            2 * nodes
        )));
    }
    Ok(refined)
}
