//! Uni- and bi-directional rings.
//!
//! A run of `j < k` adjacent nodes receives gossip at total rate `λ` from
//! outside (one neighbor at `λ` on a uni-ring, two at `λ/2` on a bi-ring,
//! or one at `λ` once `j = k - 1`) and head updates at `j·λc/k`. Both ring
//! kinds therefore produce the same chain
//!
//! ```text
//! Δ_{S_j} = (λe + j(λc/k)·Δc + λ·Δ_{S_{j+1}}) / (j(λc/k) + λ),   Δ_{S_k} = Δc + λe/λc
//! ```

use alloc::vec;

use super::{check_chain_args, head_age, require_pair, whole_cluster_age, ChainRecursionTrace, CoefficientVector};
use crate::error::Result;
use crate::model::{AgeMethod, AgeReport, RateConfig, TopologyKind};
use crate::numeric::SQRT_HALF_PI;

/// Back-substitutes the ring chain from `j = k` down to `j = 1`.
pub fn ring_node_age_exact(rates: &RateConfig, m: usize, k: usize) -> Result<ChainRecursionTrace> {
    check_chain_args(TopologyKind::BiRing, rates, m, k)?;
    let dc = head_age(rates, m);
    let (le, lc, l) = (rates.lambda_e(), rates.lambda_c(), rates.lambda());
    let per_node = lc / k as f64;
    let mut values = vec![0.0; k];
    values[k - 1] = whole_cluster_age(rates, m);
    for j in (1..k).rev() {
        let from_head = j as f64 * per_node;
        values[j - 1] = (le + from_head * dc + l * values[j]) / (from_head + l);
    }
    Ok(ChainRecursionTrace::new(values, dc))
}

/// `b_i = Π_{j=1..i} k / (k + j·λc/λ)` for `i = 1..k-1`.
pub fn ring_coefficients(k: usize, lambda_c: f64, lambda: f64) -> CoefficientVector {
    let kf = k as f64;
    let ratio = lambda_c / lambda;
    CoefficientVector::products(k.saturating_sub(1), |j| kf / (kf + j as f64 * ratio))
}

/// Unrolled ring chain:
/// `Δ_{S_1} = (λe/λ)·Σ b_i + Δc·(1 - b_{k-1}) + Δ_{S_k}·b_{k-1}`.
pub fn ring_node_age_closed_form(rates: &RateConfig, m: usize, k: usize) -> Result<AgeReport> {
    check_chain_args(TopologyKind::BiRing, rates, m, k)?;
    require_pair(k)?;
    let b = ring_coefficients(k, rates.lambda_c(), rates.lambda());
    let dc = head_age(rates, m);
    let tail = b.last();
    let node = rates.lambda_e() / rates.lambda() * b.sum() + dc * (1.0 - tail) + whole_cluster_age(rates, m) * tail;
    Ok(AgeReport::new(dc, node, AgeMethod::ClosedForm))
}

/// Large-`k` ring age `√(π/2)·λe/√(λ·λc)·√k + m·λe/λs`.
///
/// Drops the `b_{k-1}` boundary term and replaces `Σ b_i` by its Gaussian
/// integral, so it is only accurate once `k` is large.
pub fn ring_node_age_approx(rates: &RateConfig, m: usize, k: usize) -> Result<AgeReport> {
    check_chain_args(TopologyKind::BiRing, rates, m, k)?;
    require_pair(k)?;
    let dc = head_age(rates, m);
    let gossip = SQRT_HALF_PI * rates.lambda_e() / libm::sqrt(rates.lambda() * rates.lambda_c()) * libm::sqrt(k as f64);
    Ok(AgeReport::new(dc, gossip + dc, AgeMethod::Approximation))
}
