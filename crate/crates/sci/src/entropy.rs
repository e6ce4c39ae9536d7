//! Shannon, Renyi and Tsallis entropies on finite probability vectors,
//! with the conventions `0 ln 0 := 0` and `0^alpha := 0` for `alpha > 0`.

use crate::error::{Result, SciError};

/// A validated stochastic vector: entries in `[0, 1]` summing to 1.
#[derive(Debug, Clone)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(SciError::InvalidInput("empty probability vector".into()));
        }
        if p.iter().any(|&v| !v.is_finite() || v < 0.0 || v > 1.0) {
            return Err(SciError::InvalidInput(
                "probability entries must lie in [0, 1]".into(),
            ));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(SciError::InvalidInput(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        Ok(Self(p))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || alpha == 1.0 {
        return Err(SciError::Domain(format!(
            "alpha must be positive and != 1, got {alpha} (use shannon for alpha = 1)"
        )));
    }
    Ok(())
}

/// Shannon entropy `-sum p ln p` (natural log).
pub fn shannon(p: &ProbVector) -> f64 {
    p.values()
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.ln())
        .sum()
}

/// Renyi entropy `ln(sum p^alpha) / (1 - alpha)`.
pub fn renyi(p: &ProbVector, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let power_sum: f64 = p
        .values()
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v.powf(alpha))
        .sum();
    Ok(power_sum.ln() / (1.0 - alpha))
}

/// Tsallis entropy `(1 - sum p^alpha) / (alpha - 1)`.
pub fn tsallis(p: &ProbVector, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let power_sum: f64 = p
        .values()
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v.powf(alpha))
        .sum();
    Ok((1.0 - power_sum) / (alpha - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterRng;

    fn uniform(l: usize) -> ProbVector {
        ProbVector::new(vec![1.0 / l as f64; l]).unwrap()
    }

    fn random_prob(rng: &mut CounterRng, l: usize) -> ProbVector {
        let mut raw: Vec<f64> = (0..l).map(|_| rng.next_uniform()).collect();
        let sum: f64 = raw.iter().sum();
        for v in &mut raw {
            *v /= sum;
        }
        // renormalize the largest entry to absorb rounding
        let total: f64 = raw.iter().sum();
        let imax = raw
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        raw[imax] += 1.0 - total;
        ProbVector::new(raw).unwrap()
    }

    #[test]
    fn shannon_values() {
        assert!((shannon(&uniform(6)) - 6.0f64.ln()).abs() < 1e-14);
        let point = ProbVector::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(shannon(&point), 0.0);
        let half = ProbVector::new(vec![0.5, 0.5]).unwrap();
        assert!((shannon(&half) - 2.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn renyi_values() {
        assert!((renyi(&uniform(24), 2.0).unwrap() - 24.0f64.ln()).abs() < 1e-13);
        let half = ProbVector::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        assert!((renyi(&half, 2.0).unwrap() - 2.0f64.ln()).abs() < 1e-15);
        assert!(renyi(&half, 1.0).is_err());
        assert!(renyi(&half, 0.0).is_err());
        assert!(renyi(&half, -2.0).is_err());
    }

    #[test]
    fn renyi_near_one_approaches_shannon() {
        let mut rng = CounterRng::derive(71, 0);
        for _ in 0..20 {
            let p = random_prob(&mut rng, 8);
            let s = shannon(&p);
            for alpha in [1.0 - 1e-6, 1.0 + 1e-6] {
                let r = renyi(&p, alpha).unwrap();
                assert!((r - s).abs() < 1e-4, "alpha={alpha}: {r} vs {s}");
            }
        }
    }

    #[test]
    fn tsallis_values() {
        let l = 5;
        let t = tsallis(&uniform(l), 2.0).unwrap();
        assert!((t - (1.0 - 1.0 / l as f64)).abs() < 1e-15);
        let point = ProbVector::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(tsallis(&point, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn renyi_tsallis_identity() {
        let mut rng = CounterRng::derive(72, 0);
        for _ in 0..50 {
            let p = random_prob(&mut rng, 10);
            for alpha in [0.5, 2.0, 3.0] {
                let hr = renyi(&p, alpha).unwrap();
                let ht = tsallis(&p, alpha).unwrap();
                let via_t = (1.0 - (alpha - 1.0) * ht).ln() / (1.0 - alpha);
                assert!((hr - via_t).abs() < 1e-10, "alpha={alpha}");
            }
        }
    }

    #[test]
    fn sign_coupling_of_renyi_and_tsallis() {
        let mut rng = CounterRng::derive(73, 0);
        for _ in 0..100 {
            let p = random_prob(&mut rng, 6);
            let q = random_prob(&mut rng, 9);
            for alpha in [0.5, 2.0, 3.0] {
                let dr = renyi(&p, alpha).unwrap() - renyi(&q, alpha).unwrap();
                let dt = tsallis(&p, alpha).unwrap() - tsallis(&q, alpha).unwrap();
                assert!(
                    dr.signum() == dt.signum() || dr.abs() < 1e-12 || dt.abs() < 1e-12,
                    "alpha={alpha} dr={dr} dt={dt}"
                );
            }
        }
    }

    #[test]
    fn merging_toward_uniform_does_not_decrease_tsallis() {
        let mut rng = CounterRng::derive(74, 0);
        for _ in 0..100 {
            let p = random_prob(&mut rng, 8);
            let k = (rng.next_u64() % 6) as usize;
            let m = k + 1 + (rng.next_u64() % (7 - k as u64)) as usize;
            let mut merged = p.values().to_vec();
            let block_sum: f64 = merged[k..=m].iter().sum();
            let avg = block_sum / (m - k + 1) as f64;
            for v in &mut merged[k..=m] {
                *v = avg;
            }
            let total: f64 = merged.iter().sum();
            merged[0] += 1.0 - total;
            let q = ProbVector::new(merged).unwrap();
            for alpha in [0.5, 2.0, 3.0] {
                let before = tsallis(&p, alpha).unwrap();
                let after = tsallis(&q, alpha).unwrap();
                assert!(after >= before - 1e-12, "alpha={alpha}");
            }
        }
    }

    #[test]
    fn tsallis_maximal_at_uniform() {
        let mut rng = CounterRng::derive(75, 0);
        for _ in 0..100 {
            let p = random_prob(&mut rng, 7);
            for alpha in [0.5, 2.0, 3.0] {
                assert!(
                    tsallis(&p, alpha).unwrap() <= tsallis(&uniform(7), alpha).unwrap() + 1e-12
                );
            }
        }
    }

    #[test]
    fn invalid_vectors_rejected() {
        assert!(ProbVector::new(vec![]).is_err());
        assert!(ProbVector::new(vec![0.5, 0.4]).is_err());
        assert!(ProbVector::new(vec![1.5, -0.5]).is_err());
        assert!(ProbVector::new(vec![f64::NAN, 1.0]).is_err());
    }
}
