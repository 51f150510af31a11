//! Small estimators shared by the Monte Carlo drivers.

/// Two-sided z value for 95% intervals.
pub const Z95: f64 = 1.959963984540054;

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Standard error of a binomial frequency.
pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Whether `b` does not exceed `a` by more than `k` combined standard errors.
pub fn not_greater_within(a: (u64, u64), b: (u64, u64), k: f64) -> bool {
    let pa = a.0 as f64 / a.1 as f64;
    let pb = b.0 as f64 / b.1 as f64;
    let s = (binomial_sigma(pa, a.1).powi(2) + binomial_sigma(pb, b.1).powi(2)).sqrt();
    pb <= pa + k * s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_brackets_estimate() {
        let (lo, hi) = wilson(10, 100, Z95);
        assert!(lo < 0.1 && 0.1 < hi);
        assert!((lo - 0.0552).abs() < 1e-3, "{lo}");
        assert!((hi - 0.1744).abs() < 1e-3, "{hi}");
        let (lo, hi) = wilson(0, 50, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
    }

    #[test]
    fn comparison_tolerates_noise() {
        assert!(not_greater_within((10, 1000), (12, 1000), 3.0));
        assert!(!not_greater_within((10, 100000), (200, 100000), 3.0));
    }
}
