//! Sample summaries for repeated trials.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation; zero for a single sample.
    pub std: f64,
    /// Half-width of the two-sided 95% Student-t interval; zero for a single sample.
    pub ci95: f64,
}

/// Summarizes `samples` in the order given, so equal inputs give equal bits.
pub fn summarize(samples: &[f64]) -> Summary {
    let n = samples.len();
    assert!(n > 0, "cannot summarize an empty sample");
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Summary { mean, std: 0.0, ci95: 0.0 };
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let std = var.sqrt();
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("positive degrees of freedom").inverse_cdf(0.975);
    Summary { mean, std, ci95: t * std / (n as f64).sqrt() }
}
