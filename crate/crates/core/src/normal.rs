//! Standard normal distribution and logistic helpers.

use libm::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal cdf, evaluated through `erfc` so both tails keep full
/// relative precision.
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// E[(h)_+] for h ~ N(mean, 1).
pub fn positive_part_mean(mean: f64) -> f64 {
    mean * cdf(mean) + pdf(mean)
}

/// E[(-h)_+] for h ~ N(mean, 1).
pub fn negative_part_mean(mean: f64) -> f64 {
    -mean * cdf(-mean) + pdf(mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // Values from a 50-digit evaluation of 0.5 * erfc(-x / sqrt 2).
        assert!((cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((cdf(0.2) - 0.579_259_709_439_102_96).abs() < 1e-15);
        assert!((cdf(-1.0) - 0.158_655_253_931_457_05).abs() < 1e-15);
        assert!((cdf(1.96) - 0.975_002_104_851_779_6).abs() < 1e-15);
        assert!((cdf(-8.0) - 6.220_960_574_271_785e-16).abs() < 1e-28);
        assert!((pdf(0.0) - 0.398_942_280_401_432_7).abs() < 1e-16);
    }

    #[test]
    fn truncated_moments_match_quadrature() {
        for &m in &[-2.0, -0.3, 0.0, 0.7, 2.5] {
            let (mut pos, mut neg) = (0.0, 0.0);
            let step = 1e-4;
            let mut z = -12.0;
            while z < 12.0 {
                let h = m + z;
                let w = pdf(z) * step;
                pos += h.max(0.0) * w;
                neg += (-h).max(0.0) * w;
                z += step;
            }
            assert!((positive_part_mean(m) - pos).abs() < 1e-6);
            assert!((negative_part_mean(m) - neg).abs() < 1e-6);
        }
    }
}
