//! Frequencies with binomial standard errors.

#[allow(unused_imports)]
use num_traits::Float;

/// `successes` out of `trials`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Frequency {
    pub successes: u64,
    pub trials: u64,
}

impl Frequency {
    pub fn new(successes: u64, trials: u64) -> Self {
        Self { successes, trials }
    }

    pub fn record(&mut self, hit: bool) {
        self.trials += 1;
        self.successes += u64::from(hit);
    }

    pub fn value(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.successes as f64 / self.trials as f64
    }

    /// Standard error under a hypothesised rate `p`.
    pub fn sigma_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Three standard errors of the plus-four estimate
    /// `(s+2)/(n+4)`; positive for every `n ≥ 1`.
    pub fn half_width(&self) -> f64 {
        let n = self.trials as f64 + 4.0;
        let p = (self.successes as f64 + 2.0) / n;
        3.0 * (p * (1.0 - p) / n).sqrt()
    }
}

/// Mean of a sample, 0 for an empty one.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Three standard errors of the sample mean; 0 below two samples.
pub fn mean_half_width(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64;
    3.0 * (var / n as f64).sqrt()
}
