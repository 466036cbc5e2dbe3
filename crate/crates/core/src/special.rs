//! Small numeric helpers.

use statrs::function::erf::erfc;

/// Upper tail of the standard normal, `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(std::f64::consts::TAU);
    // rem_euclid can return exactly TAU for tiny negative inputs
    if t >= std::f64::consts::TAU {
        0.0
    } else {
        t
    }
}

/// Signed angular difference `a - b` in `[-π, π)`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    use std::f64::consts::PI;
    (a - b + PI).rem_euclid(std::f64::consts::TAU) - PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn q_reference_values() {
        assert!((q_function(0.0) - 0.5).abs() < 1e-15);
        // standard normal table
        assert!((q_function(2.0) - 0.022_750_131_948_179).abs() < 1e-10);
        assert!((q_function(1.0) - 0.158_655_253_931_457).abs() < 1e-10);
    }

    #[test]
    fn wrapping() {
        assert_eq!(wrap_angle(-1e-300), 0.0);
        assert!((wrap_angle(-PI / 2.0) - 1.5 * PI).abs() < 1e-12);
        assert!((angle_diff(0.1, 2.0 * PI - 0.1) - 0.2).abs() < 1e-12);
    }
}
