//! Concentration bounds and confidence arithmetic shared by the protocols.
//!
//! Natural logarithms throughout; `0 ln 0` is taken as `0`.

use crate::error::{Error, Result};

/// Binary relative entropy `D(x‖y) = x ln(x/y) + (1-x) ln((1-x)/(1-y))`.
pub fn kl_divergence(x: f64, y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || x.is_nan() {
        return Err(Error::invalid(format!("kl_divergence: x = {x} outside [0, 1]")));
    }
    if !(y > 0.0 && y < 1.0) {
        return Err(Error::invalid(format!("kl_divergence: y = {y} outside (0, 1)")));
    }
    let term = |p: f64, q: f64| if p == 0.0 { 0.0 } else { p * (p / q).ln() };
    // Clamp tiny negative rounding so the result respects D >= 0.
    Ok((term(x, y) + term(1.0 - x, 1.0 - y)).max(0.0))
}

/// Chernoff tail `exp(-D(p_s + ε ‖ p_s) · trials)`.
pub fn chernoff_tail(p_s: f64, epsilon: f64, trials: u64) -> Result<f64> {
    if epsilon < 0.0 || p_s + epsilon > 1.0 + 1e-12 {
        return Err(Error::invalid(format!(
            "chernoff_tail: need 0 <= ε and p_s + ε <= 1 (p_s = {p_s}, ε = {epsilon})"
        )));
    }
    let x = (p_s + epsilon).min(1.0);
    Ok((-kl_divergence(x, p_s)? * trials as f64).exp())
}

/// Union-bound split of a total failure probability across `m` estimates.
pub fn union_split(delta_total: f64, m_estimates: u64) -> Result<f64> {
    if m_estimates == 0 {
        return Err(Error::invalid("union_split: need at least one estimate"));
    }
    Ok(delta_total / m_estimates as f64)
}

/// Lower bound on detection confidence after `trials` binary trials with the
/// observed success `rate` against the separable bound `p_s`.
///
/// Returns `1 - exp(-D(rate‖p_s)·trials)` when `rate > p_s`, else `0`.
pub fn confidence_lower_bound(rate: f64, p_s: f64, trials: u64) -> Result<f64> {
    let rate = rate.clamp(0.0, 1.0);
    if rate <= p_s {
        return Ok(0.0);
    }
    Ok(1.0 - (-kl_divergence(rate, p_s)? * trials as f64).exp())
}

/// Observed rate, separable reference and the resulting confidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceBound {
    pub observed_rate: f64,
    pub reference_bound: f64,
    pub trials: u64,
    pub c_min: f64,
}

impl ConfidenceBound {
    pub fn new(observed_rate: f64, reference_bound: f64, trials: u64) -> Result<Self> {
        let c_min = confidence_lower_bound(observed_rate, reference_bound, trials)?;
        Ok(Self {
            observed_rate: observed_rate.clamp(0.0, 1.0),
            reference_bound,
            trials,
            c_min,
        })
    }

    pub fn from_counts(successes: u64, trials: u64, reference_bound: f64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::invalid("confidence bound needs at least one trial"));
        }
        Self::new(successes as f64 / trials as f64, reference_bound, trials)
    }

    pub fn epsilon(&self) -> f64 {
        self.observed_rate - self.reference_bound
    }
}

pub fn mean(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Median of a slice (average of the two middle values for even length).
pub fn median(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("median of empty sequence"));
    }
    let mut v = samples.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let mid = v.len() / 2;
    Ok(if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) })
}

/// Median of `k_groups` consecutive group means. Samples beyond the largest
/// multiple of `k_groups` are dropped.
pub fn median_of_means(samples: &[f64], k_groups: usize) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("median_of_means: empty input"));
    }
    if k_groups == 0 || k_groups > samples.len() {
        return Err(Error::invalid(format!(
            "median_of_means: k_groups = {k_groups} must lie in 1..={}",
            samples.len()
        )));
    }
    let group = samples.len() / k_groups;
    let means: Vec<f64> = samples[..group * k_groups].chunks(group).map(mean).collect();
    median(&means)
}

/// Two-sided Hoeffding radius for the mean of `n` variables with values in
/// an interval of width `range`: `Pr[|mean - μ| >= t] <= 2 exp(-2 n t² / range²)`.
pub fn hoeffding_radius(n: u64, range: f64, delta: f64) -> f64 {
    range * ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kl_closed_forms() {
        assert_eq!(kl_divergence(0.3, 0.3).unwrap(), 0.0);
        let d = kl_divergence(1.0, 0.75).unwrap();
        assert!((d - (4.0f64 / 3.0).ln()).abs() < 1e-15);
        assert!((d - 0.28768).abs() < 1e-5);
        let d = kl_divergence(1.0, 2.0 / 3.0).unwrap();
        assert!((d - 1.5f64.ln()).abs() < 1e-15);
        assert!(((-8.0 * d).exp() - 0.0390).abs() < 1e-4);
    }

    #[test]
    fn kl_rejects_degenerate_reference() {
        assert!(kl_divergence(0.5, 0.0).is_err());
        assert!(kl_divergence(0.5, 1.0).is_err());
        assert!(kl_divergence(1.5, 0.5).is_err());
    }

    #[test]
    fn chernoff_values() {
        assert_eq!(chernoff_tail(0.75, 0.0, 100).unwrap(), 1.0);
        let t = chernoff_tail(0.75, 0.25, 16).unwrap();
        assert!((t - 0.75f64.powi(16)).abs() < 1e-12);
        assert!((t - 0.01002).abs() < 1e-5);
        let t = chernoff_tail(2.0 / 3.0, 1.0 / 3.0, 8).unwrap();
        assert!((t - 0.0390).abs() < 1e-4);
        assert!(chernoff_tail(0.75, 0.5, 1).is_err());
    }

    #[test]
    fn union_split_values() {
        assert_eq!(union_split(0.01, 1).unwrap(), 0.01);
        assert!((union_split(0.01, 100).unwrap() - 1e-4).abs() < 1e-18);
        assert!(union_split(0.01, 0).is_err());
    }

    #[test]
    fn median_of_means_examples() {
        assert_eq!(median_of_means(&[1.0, 2.0, 3.0], 1).unwrap(), 2.0);
        let xs = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1000.0];
        assert_eq!(median_of_means(&xs, 3).unwrap(), 0.0);
        assert!((mean(&xs) - 111.111).abs() < 1e-3);
        let c = [4.25; 12];
        for k in 1..=12 {
            assert_eq!(median_of_means(&c, k).unwrap(), 4.25);
        }
        assert!(median_of_means(&[], 1).is_err());
    }

    #[test]
    fn median_of_means_truncates_remainder() {
        // groups {1,2},{3,4} -> means 1.5, 3.5; trailing 100 dropped
        assert_eq!(median_of_means(&[1.0, 2.0, 3.0, 4.0, 100.0], 2).unwrap(), 2.5);
    }

    #[test]
    fn confidence_is_zero_below_bound() {
        assert_eq!(confidence_lower_bound(0.7, 0.75, 1000).unwrap(), 0.0);
        assert_eq!(confidence_lower_bound(0.75, 0.75, 1000).unwrap(), 0.0);
        let c = ConfidenceBound::from_counts(16, 16, 0.75).unwrap();
        assert!((c.c_min - (1.0 - 0.75f64.powi(16))).abs() < 1e-12);
        assert!((c.epsilon() - 0.25).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn kl_nonnegative_and_zero_only_on_diagonal(x in 0.0f64..=1.0, y in 0.001f64..0.999) {
            let d = kl_divergence(x, y).unwrap();
            prop_assert!(d >= 0.0);
            if (x - y).abs() > 1e-3 {
                prop_assert!(d > 0.0);
            }
        }
    }

    proptest! {
        #[test]
        fn chernoff_monotone(p in 0.05f64..0.9, e1 in 0.001f64..0.05, de in 0.001f64..0.05, t in 1u64..500) {
            let e2 = e1 + de;
            prop_assume!(p + e2 <= 1.0);
            let a = chernoff_tail(p, e1, t).unwrap();
            prop_assert!(chernoff_tail(p, e1, t + 1).unwrap() <= a);
            prop_assert!(chernoff_tail(p, e2, t).unwrap() <= a);
        }

        #[test]
        fn confidence_monotone_in_trials(p in 0.05f64..0.9, gap in 0.001f64..0.1, t in 1u64..2000) {
            let rate = (p + gap).min(1.0);
            let c1 = confidence_lower_bound(rate, p, t).unwrap();
            let c2 = confidence_lower_bound(rate, p, t + 1).unwrap();
            prop_assert!(c2 >= c1);
        }
    }
}
