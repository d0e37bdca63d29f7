//! Binomial confidence intervals for Monte Carlo frequencies.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilsonInterval {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl WilsonInterval {
    /// Half-width of the interval, used as the Monte Carlo slack.
    pub fn half_width(&self) -> f64 {
        (self.upper - self.lower) / 2.0
    }
}

/// Wilson score interval for `successes` out of `trials` at quantile `z`.
pub fn wilson(successes: usize, trials: usize, z: f64) -> WilsonInterval {
    assert!(trials > 0, "wilson interval needs at least one trial");
    assert!(successes <= trials);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    WilsonInterval {
        estimate: p,
        lower: (centre - half).max(0.0),
        upper: (centre + half).min(1.0),
    }
}
