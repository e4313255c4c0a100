//! Statistical over-subscription of a link shared by on/off sources.
//!
//! A population of `n` unsynchronised sources, each bursting up to `R` bits/s,
//! is sized as the aggregate mean plus a safety margin proportional to the
//! aggregate standard deviation:
//!
//! ```text
//! C = (R / 2) · n + C_ε · S_max · √n,    S_max = R / (2√3)
//! ```
//!
//! `S_max` is the standard deviation of a rate drawn uniformly from `[0, R]`,
//! and `C_ε` is the standard-normal quantile matching the exceedance budget ε.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal;

/// Population of bursty on/off sources feeding one link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    sources: u64,
    peak_rate: f64,
    period: f64,
}

impl SourceModel {
    /// `peak_rate` in bits/s, `period` (the on/off slot length) in seconds.
    pub fn new(sources: u64, peak_rate: f64, period: f64) -> Result<Self> {
        if !(peak_rate >= 0.0 && peak_rate.is_finite()) {
            return Err(Error::domain("peak rate", peak_rate, "[0, inf) bits/s"));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::domain("period", period, "(0, inf) seconds"));
        }
        Ok(SourceModel {
            sources,
            peak_rate,
            period,
        })
    }

    pub fn sources(&self) -> u64 {
        self.sources
    }

    pub fn peak_rate(&self) -> f64 {
        self.peak_rate
    }

    /// Slot length. It has no influence on the closed-form capacity.
    pub fn period(&self) -> f64 {
        self.period
    }
}

/// How the exceedance budget ε maps onto a normal quantile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sidedness {
    /// `Φ(z) = 1 − ε/2`; ε = 0.01 gives 2.5758.
    #[default]
    TwoSided,
    /// `Φ(z) = 1 − ε`; ε = 0.01 gives 2.3263.
    OneSided,
}

/// Confidence target: the exceedance budget and its quantile factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QosSpec {
    epsilon: f64,
    c_epsilon: f64,
    convention: Sidedness,
}

/// Tolerance used when checking a stored quantile factor against ε.
pub const FACTOR_TOLERANCE: f64 = 1e-6;

impl QosSpec {
    pub fn new(epsilon: f64, convention: Sidedness) -> Result<Self> {
        let c_epsilon = quantile_factor(epsilon, convention)?;
        Ok(QosSpec {
            epsilon,
            c_epsilon,
            convention,
        })
    }

    /// Builds a spec from a factor read elsewhere (a table, a config file),
    /// rejecting it unless it agrees with `epsilon` to [`FACTOR_TOLERANCE`].
    pub fn with_factor(epsilon: f64, convention: Sidedness, c_epsilon: f64) -> Result<Self> {
        let expected = quantile_factor(epsilon, convention)?;
        let gap = (c_epsilon - expected).abs();
        if gap.is_nan() || gap > FACTOR_TOLERANCE {
            return Err(Error::domain(
                "quantile factor",
                c_epsilon,
                "the normal quantile implied by epsilon (within 1e-6)",
            ));
        }
        Ok(QosSpec {
            epsilon,
            c_epsilon,
            convention,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn c_epsilon(&self) -> f64 {
        self.c_epsilon
    }

    pub fn convention(&self) -> Sidedness {
        self.convention
    }

    /// Recomputes the factor from ε and compares it with the stored one.
    pub fn is_consistent(&self) -> bool {
        quantile_factor(self.epsilon, self.convention)
            .map(|z| (z - self.c_epsilon).abs() <= FACTOR_TOLERANCE)
            .unwrap_or(false)
    }
}

/// Link sizing figures, all in bits/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityEstimate {
    /// Every source on at once: `nR`.
    pub c_max: f64,
    /// Aggregate mean: `nR / 2`.
    pub c_mean: f64,
    /// Per-source standard deviation: `R / (2√3)`.
    pub s_max: f64,
    /// Mean plus `C_ε · S_max · √n`.
    pub c_stat: f64,
}

/// Normal quantile factor for exceedance budget `epsilon`.
///
/// Two-sided accepts `0 < ε ≤ 1`. One-sided accepts `0 < ε ≤ 0.5`; above
/// that the factor would be negative.
pub fn quantile_factor(epsilon: f64, convention: Sidedness) -> Result<f64> {
    let (tail, upper) = match convention {
        Sidedness::TwoSided => (epsilon / 2.0, 1.0),
        Sidedness::OneSided => (epsilon, 0.5),
    };
    if !(epsilon > 0.0 && epsilon <= upper) {
        let expected = match convention {
            Sidedness::TwoSided => "(0, 1]",
            Sidedness::OneSided => "(0, 0.5]",
        };
        return Err(Error::domain("epsilon", epsilon, expected));
    }
    // `+ 0.0` folds the -0.0 returned at the median into 0.0.
    Ok(normal::upper_quantile(tail) + 0.0)
}

/// Standard deviation of a single source, `R / (2√3)`.
pub fn per_source_stddev(peak_rate: f64) -> Result<f64> {
    if !(peak_rate >= 0.0 && peak_rate.is_finite()) {
        return Err(Error::domain("peak rate", peak_rate, "[0, inf) bits/s"));
    }
    Ok(peak_rate / (2.0 * 3f64.sqrt()))
}

/// Closed-form statistical capacity for `model` at confidence `qos`.
pub fn stat_capacity(model: &SourceModel, qos: &QosSpec) -> CapacityEstimate {
    let n = model.sources as f64;
    let rate = model.peak_rate;
    let s_max = rate / (2.0 * 3f64.sqrt());
    let c_max = n * rate;
    let c_mean = rate / 2.0 * n;
    CapacityEstimate {
        c_max,
        c_mean,
        s_max,
        c_stat: c_mean + qos.c_epsilon * s_max * n.sqrt(),
    }
}

/// Smallest population for which `c_stat ≤ c_max` holds at factor `c_epsilon`,
/// i.e. the least `n` with `n ≥ (C_ε / √3)²`.
pub fn min_sources_within_peak(c_epsilon: f64) -> u64 {
    (c_epsilon * c_epsilon / 3.0).ceil() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_model() -> SourceModel {
        SourceModel::new(100, 1e6, 1.0).unwrap()
    }

    #[test]
    fn factor_two_sided_one_percent() {
        let z = quantile_factor(0.01, Sidedness::TwoSided).unwrap();
        assert!((z - 2.575829303549).abs() < 1e-9, "{z}");
    }

    #[test]
    fn factor_at_full_budget_is_zero() {
        let z = quantile_factor(1.0, Sidedness::TwoSided).unwrap();
        assert_eq!(z, 0.0);
        assert!(z.is_sign_positive());
        assert_eq!(quantile_factor(0.5, Sidedness::OneSided).unwrap(), 0.0);
    }

    #[test]
    fn factor_rejects_out_of_domain() {
        for eps in [0.0, -0.1, 1.0001, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                quantile_factor(eps, Sidedness::TwoSided),
                Err(Error::Domain {
                    name: "epsilon",
                    ..
                })
            ));
        }
        assert!(quantile_factor(0.6, Sidedness::OneSided).is_err());
    }

    #[test]
    fn stddev_examples() {
        let s = per_source_stddev(1e6).unwrap();
        assert!((s - 288_675.13).abs() < 0.01, "{s}");
        assert_eq!(per_source_stddev(0.0).unwrap(), 0.0);
        assert!((per_source_stddev(2.0 * 3f64.sqrt()).unwrap() - 1.0).abs() < 1e-15);
        assert!(per_source_stddev(-1.0).is_err());
    }

    #[test]
    fn worked_example() {
        let qos = QosSpec::new(0.01, Sidedness::TwoSided).unwrap();
        let est = stat_capacity(&reference_model(), &qos);
        assert_eq!(est.c_max, 1e8);
        assert_eq!(est.c_mean, 5e7);
        assert!((est.c_stat - 57.44e6).abs() < 0.01e6, "{}", est.c_stat);
    }

    #[test]
    fn empty_population() {
        let qos = QosSpec::new(0.01, Sidedness::TwoSided).unwrap();
        let est = stat_capacity(&SourceModel::new(0, 1e6, 1.0).unwrap(), &qos);
        assert_eq!(est.c_max, 0.0);
        assert_eq!(est.c_mean, 0.0);
        assert_eq!(est.c_stat, 0.0);
    }

    #[test]
    fn zero_factor_leaves_mean() {
        let qos = QosSpec::new(1.0, Sidedness::TwoSided).unwrap();
        let est = stat_capacity(&SourceModel::new(1, 1e6, 1.0).unwrap(), &qos);
        assert_eq!(est.c_stat, 500_000.0);
    }

    #[test]
    fn model_validation() {
        assert!(SourceModel::new(1, -1.0, 1.0).is_err());
        assert!(SourceModel::new(1, 1.0, 0.0).is_err());
        assert!(SourceModel::new(1, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn stored_factor_checked() {
        assert!(QosSpec::with_factor(0.01, Sidedness::TwoSided, 2.575829).is_ok());
        assert!(QosSpec::with_factor(0.01, Sidedness::TwoSided, 2.58).is_err());
        assert!(QosSpec::new(0.05, Sidedness::OneSided)
            .unwrap()
            .is_consistent());
    }

    #[test]
    fn peak_bound_threshold() {
        let z = quantile_factor(0.01, Sidedness::TwoSided).unwrap();
        let n = min_sources_within_peak(z);
        assert_eq!(n, 3);
        let qos = QosSpec::new(0.01, Sidedness::TwoSided).unwrap();
        let at = stat_capacity(&SourceModel::new(n, 1e6, 1.0).unwrap(), &qos);
        assert!(at.c_stat <= at.c_max);
        let below = stat_capacity(&SourceModel::new(n - 1, 1e6, 1.0).unwrap(), &qos);
        assert!(below.c_stat > below.c_max);
    }
}
