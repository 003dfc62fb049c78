//! Single ring of `n` nodes fed directly by the source (no cluster heads),
//! the benchmark the clustered ring is compared against.
//!
//! Unrolling that ring's chain gives
//! `Δ_{S_1} = (λe/λ)·(Σ_{i=1}^{n-1} a_i + a_{n-1})` with
//! `a_i = Π_{j=1..i} n/(n+j)`. Since `-ln a_i = Σ ln(1 + j/n) ≈ i²/(2n)`,
//! `a_i ≈ e^{-i²/(2n)}` and `(1/√n)·Σ a_i` is a Riemann sum of
//! `∫₀^∞ e^{-t²/2} dt = √(π/2)` with step `1/√n`. Hence
//! `Δ_{S_1} ≈ √(π/2)·(λe/λ)·√n`; see [`gaussian_riemann_sum`].

use super::CoefficientVector;
use crate::error::{Error, Result};
use crate::numeric::SQRT_HALF_PI;

/// `a_i = Π_{j=1..i} n/(n+j)` for `i = 1..n-1`.
pub fn flat_ring_coefficients(n: usize) -> CoefficientVector {
    let nf = n as f64;
    CoefficientVector::products(n.saturating_sub(1), |j| nf / (nf + j as f64))
}

pub fn flat_ring_age_exact(n: usize, lambda_e: f64, lambda: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Precondition("the flat ring needs at least 2 nodes"));
    }
    check_rates(lambda_e, lambda)?;
    let a = flat_ring_coefficients(n);
    Ok(lambda_e / lambda * (a.sum() + a.last()))
}

/// `√(π/2)·(λe/λ)·√n`. Accuracy is only claimed for large `n`.
pub fn flat_ring_age_approx(n: usize, lambda_e: f64, lambda: f64) -> f64 {
    SQRT_HALF_PI * lambda_e / lambda * libm::sqrt(n as f64)
}

/// `(1/√n)·Σ_{i=1}^{n-1} e^{-i²/(2n)}`, which tends to `√(π/2)`.
pub fn gaussian_riemann_sum(n: usize) -> f64 {
    let nf = n as f64;
    let sum: f64 = (1..n)
        .map(|i| libm::exp(-((i * i) as f64) / (2.0 * nf)))
        .take_while(|t| *t > 0.0)
        .sum();
    sum / libm::sqrt(nf)
}

fn check_rates(lambda_e: f64, lambda: f64) -> Result<()> {
    if !(lambda_e.is_finite() && lambda_e > 0.0) {
        return Err(Error::InvalidRate {
            name: "lambda_e",
            requirement: "finite and positive",
            value: lambda_e,
        });
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidRate {
            name: "lambda",
            requirement: "finite and positive",
            value: lambda,
        });
    }
    Ok(())
}
