//! Reproducible reductions over per-trial values.

use serde::Serialize;

/// Sum with a fixed binary tree determined only by `xs.len()`, so the result
/// does not depend on how the values were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Monte Carlo estimate with a 95% interval: normal approximation for means
/// and ratios, Wilson score interval for proportions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SimEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub trials: u64,
    pub master_seed: u64,
}

impl SimEstimate {
    pub fn new(mean: f64, std_error: f64, trials: u64, master_seed: u64) -> Self {
        Self {
            mean,
            std_error,
            ci95_low: mean - 1.96 * std_error,
            ci95_high: mean + 1.96 * std_error,
            trials,
            master_seed,
        }
    }

    /// Sample mean with the standard error of the mean. A single trial has
    /// no spread information and reports zero.
    pub fn from_samples(xs: &[f64], master_seed: u64) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self::new(f64::NAN, f64::NAN, 0, master_seed);
        }
        let mean = pairwise_sum(xs) / n as f64;
        let se = if n < 2 {
            0.0
        } else {
            let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
            (pairwise_sum(&dev) / ((n - 1) as f64 * n as f64)).sqrt()
        };
        Self::new(mean, se, n as u64, master_seed)
    }

    /// Fraction of `true` flags with the binomial standard error. The
    /// interval is Wilson's, which keeps its coverage for rare events where
    /// the normal interval is too narrow.
    pub fn from_flags(flags: impl ExactSizeIterator<Item = bool>, master_seed: u64) -> Self {
        const Z: f64 = 1.959_963_984_540_054;
        let n = flags.len();
        let hits = flags.filter(|f| *f).count();
        let nf = n as f64;
        let p = hits as f64 / nf;
        let mut e = Self::new(p, (p * (1.0 - p) / nf).sqrt(), n as u64, master_seed);
        if n > 0 {
            let k = Z * Z / nf;
            let center = (p + k / 2.0) / (1.0 + k);
            let half = Z / (1.0 + k) * (p * (1.0 - p) / nf + k / (4.0 * nf)).sqrt();
            e.ci95_low = (center - half).max(0.0);
            e.ci95_high = (center + half).min(1.0);
        }
        e
    }

    /// Ratio `sum(num) / sum(den)` with the delta-method standard error.
    pub fn ratio(num: &[f64], den: &[f64], master_seed: u64) -> Option<Self> {
        let n = num.len();
        let total = pairwise_sum(den);
        if n == 0 || total <= 0.0 {
            return None;
        }
        let r = pairwise_sum(num) / total;
        let se = if n < 2 {
            0.0
        } else {
            let mean_den = total / n as f64;
            let resid: Vec<f64> = num
                .iter()
                .zip(den)
                .map(|(a, b)| (a - r * b) * (a - r * b))
                .collect();
            (pairwise_sum(&resid) / ((n - 1) as f64 * n as f64)).sqrt() / mean_den
        };
        Some(Self::new(r, se, n as u64, master_seed))
    }

    pub fn covers(&self, value: f64) -> bool {
        self.ci95_low <= value && value <= self.ci95_high
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_exact_sums() {
        let xs: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
        // ten million copies of 0.1: naive summation drifts, the tree does not
        let tenths = vec![0.1; 10_000_000];
        assert!((pairwise_sum(&tenths) - 1e6).abs() < 1e-6);
    }

    #[test]
    fn estimates() {
        let e = SimEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0], 9);
        assert_eq!(e.mean, 2.5);
        assert!((e.std_error - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert!((e.ci95_high - e.mean - 1.96 * e.std_error).abs() < 1e-15);
        assert_eq!(e.master_seed, 9);
        let z = SimEstimate::from_samples(&[0.0; 10], 0);
        assert_eq!((z.mean, z.std_error), (0.0, 0.0));

        let b = SimEstimate::from_flags([true, false, false, true].into_iter(), 0);
        assert_eq!(b.mean, 0.5);
        assert!((b.std_error - 0.25).abs() < 1e-15);

        // no hits: the upper bound is z^2 / (n + z^2)
        let none = SimEstimate::from_flags(std::iter::repeat_n(false, 100), 0);
        let z2 = 1.959_963_984_540_054f64.powi(2);
        assert!(none.ci95_low.abs() < 1e-15);
        assert!((none.ci95_high - z2 / (100.0 + z2)).abs() < 1e-15);
        // both bounds solve (p_hat - p)^2 = z^2 p (1 - p) / n
        let w = SimEstimate::from_flags((0..40).map(|i| i < 5), 0);
        for p in [w.ci95_low, w.ci95_high] {
            assert!(((0.125 - p).powi(2) - z2 * p * (1.0 - p) / 40.0).abs() < 1e-14);
        }

        let r = SimEstimate::ratio(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0], 0).unwrap();
        assert_eq!(r.mean, 0.5);
        assert_eq!(r.std_error, 0.0);
        assert!(SimEstimate::ratio(&[0.0], &[0.0], 0).is_none());
    }
}
