//! Fully connected clusters: every node pushes to each of the other `k - 1`
//! nodes at rate `λ/(k-1)`, so a set of `j` nodes receives gossip at
//! `j(k-j)λ/(k-1)` and
//!
//! ```text
//! Δ_{S_j} = (λe + j(λc/k)·Δc + j(k-j)λ/(k-1)·Δ_{S_{j+1}}) / (j(λc/k) + j(k-j)λ/(k-1))
//! ```

use alloc::vec;

use super::{check_chain_args, head_age, require_pair, whole_cluster_age, ChainRecursionTrace};
use crate::error::{Error, Result};
use crate::model::{AgeMethod, AgeReport, RateConfig, TopologyKind};
use crate::numeric::harmonic;

pub fn fully_connected_node_age_exact(rates: &RateConfig, m: usize, k: usize) -> Result<ChainRecursionTrace> {
    check_chain_args(TopologyKind::FullyConnected, rates, m, k)?;
    let dc = head_age(rates, m);
    let (le, lc, l) = (rates.lambda_e(), rates.lambda_c(), rates.lambda());
    let kf = k as f64;
    let mut values = vec![0.0; k];
    values[k - 1] = whole_cluster_age(rates, m);
    for j in (1..k).rev() {
        let jf = j as f64;
        let from_head = jf * lc / kf;
        let gossip = jf * (kf - jf) * l / (kf - 1.0);
        values[j - 1] = (le + from_head * dc + gossip * values[j]) / (from_head + gossip);
    }
    Ok(ChainRecursionTrace::new(values, dc))
}

/// Closed interval known to contain the fully connected node age.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgeBracket {
    pub lower: f64,
    pub upper: f64,
}

impl AgeBracket {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn lower_report(&self, head_age: f64) -> AgeReport {
        AgeReport::new(head_age, self.lower, AgeMethod::LowerBound)
    }

    pub fn upper_report(&self, head_age: f64) -> AgeReport {
        AgeReport::new(head_age, self.upper, AgeMethod::UpperBound)
    }
}

/// Harmonic-number bracket on the fully connected node age, valid when
/// `λc = λ`:
///
/// ```text
/// ((k-1)² + k)/k² · Δc + (λe/λ)·((k-1)/k · H_{k-1} + 1/k)  ≤  Δ_{S_1}  ≤  Δc + (λe/λ)·H_k
/// ```
pub fn fully_connected_bounds(rates: &RateConfig, m: usize, k: usize) -> Result<AgeBracket> {
    check_chain_args(TopologyKind::FullyConnected, rates, m, k)?;
    let (lc, l) = (rates.lambda_c(), rates.lambda());
    if (lc - l).abs() > 1e-12 * lc.max(l) {
        return Err(Error::Precondition(
            "fully connected bounds require lambda_c == lambda",
        ));
    }
    let dc = head_age(rates, m);
    let scale = rates.lambda_e() / l;
    let kf = k as f64;
    let km1 = kf - 1.0;
    let lower = (km1 * km1 + kf) / (kf * kf) * dc + scale * (km1 / kf * harmonic(k as u64 - 1) + 1.0 / kf);
    let upper = dc + scale * harmonic(k as u64);
    Ok(AgeBracket { lower, upper })
}

/// `m·λe/λs + (λe/λ)·ln k`, the large-cluster form of the bracket.
pub fn fully_connected_age_approx(rates: &RateConfig, m: usize, k: usize) -> Result<AgeReport> {
    check_chain_args(TopologyKind::FullyConnected, rates, m, k)?;
    require_pair(k)?;
    let dc = head_age(rates, m);
    let node = dc + rates.lambda_e() / rates.lambda() * libm::log(k as f64);
    Ok(AgeReport::new(dc, node, AgeMethod::Approximation))
}
