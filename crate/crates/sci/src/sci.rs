//! The symbolic correlation integral estimator.
//!
//! `S_n^d` is the U-statistic averaging the pattern-equality indicator over
//! all unordered window pairs. With pattern counts `c_pi` over `N` windows
//! it collapses to `sum_pi c_pi (c_pi - 1) / (N (N - 1))`. The empirical
//! projection series uses the leave-one-out form `(c - 1)/(N - 1)` so that
//! its mean reproduces the U-statistic exactly; this is the plug-in fed to
//! the long-run variance estimator.

use crate::error::{Result, SciError};
use crate::patterns::{self, factorial, PatternCounts};

/// SCI estimate for one series: the statistic itself, the per-window
/// empirical projection values, and the underlying pattern histogram.
#[derive(Debug, Clone)]
pub struct SciEstimate {
    d: usize,
    s_value: f64,
    h1_series: Vec<f64>,
    pattern_counts: PatternCounts,
}

impl SciEstimate {
    pub fn order(&self) -> usize {
        self.d
    }

    /// Number of windows `N = m - d + 1`.
    pub fn window_count(&self) -> usize {
        self.h1_series.len()
    }

    /// The U-statistic `S_n^d`, in `[0, 1]`.
    pub fn s_value(&self) -> f64 {
        self.s_value
    }

    /// Leave-one-out projection values `(c_{pi(i)} - 1)/(N - 1)`, one per
    /// window in window order. Their mean equals `s_value`.
    pub fn h1_series(&self) -> &[f64] {
        &self.h1_series
    }

    pub fn pattern_counts(&self) -> &PatternCounts {
        &self.pattern_counts
    }

    /// Renyi-2 permutation entropy `-ln S_n^d` of this estimate.
    pub fn renyi2(&self) -> Result<f64> {
        renyi2_from_sci(self.s_value)
    }
}

/// Compute `S_n^d` for a series using the count-based form.
pub fn sci_u_statistic(series: &[f64], d: usize) -> Result<SciEstimate> {
    let codes = patterns::window_codes(series, d)?;
    let n = codes.len();
    if n < 2 {
        return Err(SciError::InsufficientData(format!(
            "need at least 2 windows, got {n} (series length {}, d={d})",
            series.len()
        )));
    }
    let counts = patterns::counts_from_codes(&codes, d);
    let nf = n as f64;
    let mut pair_sum = 0.0;
    for (_, c) in counts.nonzero() {
        let c = c as f64;
        pair_sum += c * (c - 1.0);
    }
    let s_value = pair_sum / (nf * (nf - 1.0));
    let h1_series: Vec<f64> = codes
        .iter()
        .map(|&code| (counts.count(code) as f64 - 1.0) / (nf - 1.0))
        .collect();
    Ok(SciEstimate {
        d,
        s_value,
        h1_series,
        pattern_counts: counts,
    })
}

/// Renyi-2 permutation entropy `-ln s`. Undefined for `s <= 0` (a sample in
/// which every window shows a distinct pattern).
pub fn renyi2_from_sci(s: f64) -> Result<f64> {
    if s <= 0.0 {
        return Err(SciError::Domain(format!(
            "Renyi-2 entropy undefined for SCI estimate {s} <= 0"
        )));
    }
    Ok(-s.ln())
}

/// Population SCI under a uniform pattern distribution (i.i.d. data): `1/d!`.
pub fn sci_theoretical_iid(d: usize) -> Result<f64> {
    if !(patterns::MIN_ORDER..=patterns::MAX_ORDER).contains(&d) {
        return Err(SciError::InvalidInput(format!(
            "order d={d} outside supported range"
        )));
    }
    Ok(1.0 / factorial(d) as f64)
}

fn check_prob_vector(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(SciError::InvalidInput("empty probability vector".into()));
    }
    if p.iter().any(|&v| !v.is_finite() || v < 0.0) {
        return Err(SciError::InvalidInput(
            "probability vector has negative or non-finite entries".into(),
        ));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(SciError::InvalidInput(format!(
            "probability vector sums to {sum}, not 1"
        )));
    }
    Ok(())
}

/// Population SCI of a pattern probability vector: `sum p_pi^2`.
pub fn sci_population(p: &[f64]) -> Result<f64> {
    check_prob_vector(p)?;
    Ok(p.iter().map(|&v| v * v).sum())
}

/// Second moment of the projection under `p`: `E h_1^2 = sum p_pi^3`.
/// `Var h_1 = sum p^3 - (sum p^2)^2` vanishes exactly when `p` is uniform.
pub fn h1_second_moment(p: &[f64]) -> Result<f64> {
    check_prob_vector(p)?;
    Ok(p.iter().map(|&v| v * v * v).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    #[test]
    fn monotone_series_has_sci_one() {
        let series: Vec<f64> = (1..=10).map(|v| v as f64).collect();
        let est = sci_u_statistic(&series, 3).unwrap();
        assert_eq!(est.s_value(), 1.0);
        assert_eq!(est.renyi2().unwrap(), 0.0);
    }

    #[test]
    fn three_window_hand_case() {
        // Windows of (1,2,1,2) at d=2: codes asc, desc, asc -> counts {A:2, B:1}.
        let est = sci_u_statistic(&[1.0, 2.0, 1.0, 2.0], 2).unwrap();
        assert!((est.s_value() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(est.h1_series(), &[0.5, 0.0, 0.5]);
    }

    // O(N^2) pairwise oracle, straight from the defining double sum.
    fn pairwise_oracle(series: &[f64], d: usize) -> f64 {
        let codes: Vec<u64> = series
            .windows(d)
            .map(|w| crate::patterns::ordinal_pattern(w).unwrap().code())
            .collect();
        let n = codes.len();
        let mut matches = 0u64;
        for j in 0..n {
            for k in j + 1..n {
                if codes[j] == codes[k] {
                    matches += 1;
                }
            }
        }
        2.0 * matches as f64 / (n as f64 * (n as f64 - 1.0))
    }

    #[test]
    fn count_form_equals_pairwise_form_exactly() {
        let mut rng = CounterRng::derive(99, 0);
        for rep in 0..20 {
            let n = 50 + (rng.next_u64() % 250) as usize;
            let d = 2 + (rep % 3);
            let series: Vec<f64> = (0..n).map(|_| rng.next_normal()).collect();
            let est = sci_u_statistic(&series, d).unwrap();
            assert_eq!(est.s_value(), pairwise_oracle(&series, d));
        }
    }

    #[test]
    fn h1_mean_equals_s_value() {
        let mut rng = CounterRng::derive(100, 0);
        let series: Vec<f64> = (0..400).map(|_| rng.next_normal()).collect();
        let est = sci_u_statistic(&series, 3).unwrap();
        let mean: f64 = est.h1_series().iter().sum::<f64>() / est.window_count() as f64;
        assert!((mean - est.s_value()).abs() < 1e-13);
    }

    #[test]
    fn insufficient_windows_rejected() {
        assert!(matches!(
            sci_u_statistic(&[1.0, 2.0, 3.0], 3),
            Err(SciError::InsufficientData(_))
        ));
    }

    #[test]
    fn renyi2_examples() {
        assert_eq!(renyi2_from_sci(1.0).unwrap(), 0.0);
        assert!((renyi2_from_sci(1.0 / 6.0).unwrap() - 6.0f64.ln()).abs() < 1e-15);
        assert!(
            (renyi2_from_sci(sci_theoretical_iid(4).unwrap()).unwrap() - 24.0f64.ln()).abs()
                < 1e-12
        );
        assert!(renyi2_from_sci(0.0).is_err());
        assert!(renyi2_from_sci(-0.1).is_err());
    }

    #[test]
    fn theoretical_iid_values() {
        assert_eq!(sci_theoretical_iid(2).unwrap(), 0.5);
        assert!((sci_theoretical_iid(3).unwrap() - 1.0 / 6.0).abs() < 1e-16);
        assert!((sci_theoretical_iid(5).unwrap() - 1.0 / 120.0).abs() < 1e-16);
        assert!(sci_theoretical_iid(1).is_err());
        assert!(sci_theoretical_iid(11).is_err());
    }

    #[test]
    fn population_values() {
        let uniform = vec![1.0 / 6.0; 6];
        assert!((sci_population(&uniform).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let point = vec![1.0, 0.0, 0.0];
        assert_eq!(sci_population(&point).unwrap(), 1.0);
        let half = vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(sci_population(&half).unwrap(), 0.5);
        assert!(sci_population(&[0.5, 0.4]).is_err());
    }

    #[test]
    fn h1_second_moment_values() {
        let uniform = vec![1.0 / 6.0; 6];
        let m2 = h1_second_moment(&uniform).unwrap();
        assert!((m2 - 1.0 / 36.0).abs() < 1e-15);
        let s = sci_population(&uniform).unwrap();
        assert!((m2 - s * s).abs() < 1e-15); // Var h1 = 0 at uniform

        assert_eq!(h1_second_moment(&[1.0, 0.0]).unwrap(), 1.0);

        let half = vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0];
        let m2 = h1_second_moment(&half).unwrap();
        assert_eq!(m2, 0.25);
        // h1 is constant at 0.5 here, so its variance vanishes as well
        let s = sci_population(&half).unwrap();
        assert_eq!(m2 - s * s, 0.0);
    }
}
