//! Cluster-size sweeps, scaling schedules and log-log exponent fits.

use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::analytic::exact_node_age;
use crate::error::{Error, Result};
use crate::model::{RateConfig, TopologyKind};
use crate::numeric::fit_line;

/// Two node ages closer than this are a tie when extracting the argmin.
pub const ARGMIN_TOLERANCE: f64 = 1e-9;

/// All divisors of `n` in ascending order.
pub fn divisors(n: usize) -> Vec<usize> {
    let mut low = Vec::new();
    let mut high = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            low.push(d);
            if d * d != n {
                high.push(n / d);
            }
        }
        d += 1;
    }
    low.extend(high.into_iter().rev());
    low
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SweepPoint {
    pub m: usize,
    pub k: usize,
    pub node_age: f64,
}

/// Node age over every split `n = m·k`, ordered by increasing `k`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SweepResult {
    pub n: usize,
    pub topology: TopologyKind,
    pub points: Vec<SweepPoint>,
    /// Cluster sizes whose age is within [`ARGMIN_TOLERANCE`] of the minimum.
    pub argmin_set: Vec<usize>,
    pub min_age: f64,
}

/// Evaluates the exact node age at every divisor `k` of `n`.
pub fn sweep_cluster_sizes(n: usize, rates: &RateConfig, topology: TopologyKind) -> Result<SweepResult> {
    if n == 0 {
        return Err(Error::ZeroSize { what: "n" });
    }
    let points = divisors(n)
        .into_iter()
        .map(|k| {
            let m = n / k;
            Ok(SweepPoint {
                m,
                k,
                node_age: exact_node_age(topology, rates, m, k)?.node_age,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let min_age = points.iter().map(|p| p.node_age).fold(f64::INFINITY, f64::min);
    let argmin_set = points
        .iter()
        .filter(|p| p.node_age - min_age <= ARGMIN_TOLERANCE)
        .map(|p| p.k)
        .collect();
    Ok(SweepResult {
        n,
        topology,
        points,
        argmin_set,
        min_age,
    })
}

/// Target cluster count achieving each topology's growth order:
/// `√n` disconnected, `n^(1/3)` rings, `round(ln n)` fully connected.
fn target_clusters(topology: TopologyKind, n: usize) -> Result<f64> {
    let nf = n as f64;
    match topology {
        TopologyKind::Disconnected => Ok(libm::sqrt(nf)),
        TopologyKind::UniRing | TopologyKind::BiRing => Ok(libm::cbrt(nf)),
        TopologyKind::FullyConnected => Ok(libm::round(libm::log(nf)).max(1.0)),
        TopologyKind::Custom => Err(Error::Precondition("custom topologies have no scaling schedule")),
    }
}

/// `(m, k)` for network size `n`, snapped to the divisor `m` of `n` closest
/// to the target in log space (smaller `m` on ties).
pub fn scaling_schedule(topology: TopologyKind, n: usize) -> Result<(usize, usize)> {
    if n < 2 {
        return Err(Error::Precondition("scaling schedules need n >= 2"));
    }
    let target = libm::log(target_clusters(topology, n)?);
    let m = divisors(n)
        .into_iter()
        .map(|m| (m, libm::fabs(libm::log(m as f64) - target)))
        .fold(None, |best: Option<(usize, f64)>, (m, d)| match best {
            Some((_, bd)) if bd <= d => best,
            _ => Some((m, d)),
        })
        .map(|(m, _)| m)
        .unwrap_or(1);
    Ok((m, n / m))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ScalingSample {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub node_age: f64,
}

/// Exact node age along the topology's scaling schedule.
pub fn scaling_samples(topology: TopologyKind, rates: &RateConfig, sizes: &[usize]) -> Result<Vec<ScalingSample>> {
    sizes
        .iter()
        .map(|&n| {
            let (m, k) = scaling_schedule(topology, n)?;
            Ok(ScalingSample {
                n,
                m,
                k,
                node_age: exact_node_age(topology, rates, m, k)?.node_age,
            })
        })
        .collect()
}

/// Least-squares slope of `ln(age)` against `ln(n)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ScalingFit {
    pub samples: Vec<(f64, f64)>,
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Linear fit of `age` against `ln(x)`, for logarithmic growth.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct LogModelFit {
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

fn check_samples(samples: &[(f64, f64)]) -> Result<()> {
    if samples.len() < 4 {
        return Err(Error::InsufficientSamples("at least 4 samples"));
    }
    for &(x, y) in samples {
        if !(x.is_finite() && y.is_finite() && x > 0.0 && y > 0.0) {
            return Err(Error::NonPositiveSample { x, y });
        }
    }
    let lo = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    if hi < 100.0 * lo * (1.0 - 1e-12) {
        return Err(Error::InsufficientSamples("samples spanning at least 2 decades"));
    }
    Ok(())
}

/// Fits `age ∝ n^exponent` on `(n, age)` pairs.
pub fn fit_scaling_exponent(samples: &[(f64, f64)]) -> Result<ScalingFit> {
    check_samples(samples)?;
    let fit = fit_line(samples.iter().map(|&(x, y)| (libm::log(x), libm::log(y))))
        .ok_or(Error::InsufficientSamples("distinct sample sizes"))?;
    Ok(ScalingFit {
        samples: samples.to_vec(),
        exponent: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
    })
}

/// Fits `age ≈ slope·ln(x) + intercept`.
pub fn fit_log_model(samples: &[(f64, f64)]) -> Result<LogModelFit> {
    check_samples(samples)?;
    let fit = fit_line(samples.iter().map(|&(x, y)| (libm::log(x), y)))
        .ok_or(Error::InsufficientSamples("distinct sample sizes"))?;
    Ok(LogModelFit {
        samples: samples.to_vec(),
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn divisors_of_120() {
        assert_eq!(
            divisors(120),
            vec![1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 20, 24, 30, 40, 60, 120]
        );
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(49), vec![1, 7, 49]);
    }

    #[test]
    fn disconnected_sweep_at_120() {
        let s = sweep_cluster_sizes(120, &RateConfig::unit(), TopologyKind::Disconnected).unwrap();
        assert_eq!(s.argmin_set, vec![10, 12]);
        assert_eq!(s.min_age, 22.0);
        for p in &s.points {
            assert_eq!(p.m * p.k, 120);
            assert_eq!(p.node_age, p.m as f64 + p.k as f64);
        }
    }

    #[test]
    fn connected_sweeps_at_120() {
        let r = RateConfig::unit();
        assert_eq!(sweep_cluster_sizes(120, &r, TopologyKind::FullyConnected).unwrap().argmin_set, vec![120]);
        assert_eq!(sweep_cluster_sizes(120, &r, TopologyKind::BiRing).unwrap().argmin_set, vec![30]);
        assert_eq!(sweep_cluster_sizes(120, &r, TopologyKind::UniRing).unwrap().argmin_set, vec![30]);
    }

    #[test]
    fn ring_sweep_rejects_zero_gossip() {
        let r = RateConfig::new(1.0, 1.0, 1.0, 0.0).unwrap();
        assert!(sweep_cluster_sizes(12, &r, TopologyKind::BiRing).is_err());
        assert!(sweep_cluster_sizes(12, &r, TopologyKind::Disconnected).is_ok());
    }

    #[test]
    fn schedules() {
        assert_eq!(scaling_schedule(TopologyKind::Disconnected, 100).unwrap(), (10, 10));
        assert_eq!(scaling_schedule(TopologyKind::BiRing, 1000).unwrap(), (10, 100));
        assert_eq!(scaling_schedule(TopologyKind::FullyConnected, 1024).unwrap(), (8, 128));
        assert!(scaling_schedule(TopologyKind::Disconnected, 1).is_err());
        assert!(scaling_schedule(TopologyKind::Custom, 100).is_err());
        let (m, k) = scaling_schedule(TopologyKind::Disconnected, 97).unwrap();
        assert_eq!(m * k, 97);
    }

    #[test]
    fn constant_samples_have_zero_exponent() {
        let s = [(10.0, 3.0), (100.0, 3.0), (1000.0, 3.0), (10000.0, 3.0)];
        let fit = fit_scaling_exponent(&s).unwrap();
        assert_eq!(fit.exponent, 0.0);
    }

    #[test]
    fn power_law_recovered() {
        let s: Vec<(f64, f64)> = [1e2, 1e3, 1e4, 1e5].iter().map(|&n| (n, 3.0 * libm::pow(n, 0.25))).collect();
        let fit = fit_scaling_exponent(&s).unwrap();
        assert!((fit.exponent - 0.25).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_preconditions() {
        let few = [(10.0, 1.0), (100.0, 2.0), (1000.0, 3.0)];
        assert!(matches!(fit_scaling_exponent(&few), Err(Error::InsufficientSamples(_))));
        let narrow = [(10.0, 1.0), (20.0, 2.0), (30.0, 3.0), (40.0, 3.0)];
        assert!(matches!(fit_scaling_exponent(&narrow), Err(Error::InsufficientSamples(_))));
        let bad = [(10.0, 1.0), (100.0, 0.0), (1000.0, 3.0), (10000.0, 3.0)];
        assert!(matches!(fit_scaling_exponent(&bad), Err(Error::NonPositiveSample { .. })));
    }

    #[test]
    fn log_model_recovers_slope() {
        let s: Vec<(f64, f64)> = (4..12).map(|e| {
            let x = (1u64 << e) as f64;
            (x, 2.0 * libm::log(x) + 1.0)
        }).collect();
        let fit = fit_log_model(&s).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
    }
}
