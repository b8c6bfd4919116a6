use num_complex::Complex64;

use crate::error::{domain, Result};

/// ln|e^a − e^b|, accurate when a and b are close.
fn ln_abs_exp_diff(a: Complex64, b: Complex64) -> f64 {
    let (a, b) = if a.re >= b.re { (a, b) } else { (b, a) };
    let u = b - a;
    // e^u − 1 split into real and imaginary parts without cancellation
    let half = (0.5 * u.im).sin();
    let re = u.re.exp_m1() * u.im.cos() - 2.0 * half * half;
    let im = u.re.exp() * u.im.sin();
    a.re + re.hypot(im).ln()
}

/// Covariance kernel of the strip field.
///
/// G(z, w) = −log|e^z − e^w| − log|e^z − e^{w̄}| + 2max(Re z, 0) + 2max(Re w, 0).
pub fn strip_covariance(z: Complex64, w: Complex64) -> Result<f64> {
    let d1 = ln_abs_exp_diff(z, w);
    let d2 = ln_abs_exp_diff(z, w.conj());
    if !d1.is_finite() || !d2.is_finite() {
        return Err(domain(format!("covariance is singular at z = {z}, w = {w}")));
    }
    Ok(-d1 - d2 + 2.0 * z.re.max(0.0) + 2.0 * w.re.max(0.0))
}

/// The kernel restricted to the top boundary, G(x + πi, y + πi) for x ≠ y.
pub fn top_covariance(x: f64, y: f64) -> f64 {
    let gap = (x - y).abs();
    let ln_diff = x.max(y) + (-(-gap).exp_m1()).ln();
    -2.0 * ln_diff + 2.0 * x.max(0.0) + 2.0 * y.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn top(x: f64) -> Complex64 {
        Complex64::new(x, PI)
    }

    #[test]
    fn restriction_matches_general_kernel() {
        for &(x, y) in &[(-3.0, 1.0), (0.2, 0.25), (5.0, -7.5), (-1e-3, 2e-3)] {
            let g = strip_covariance(top(x), top(y)).unwrap();
            assert!((g - top_covariance(x, y)).abs() < 1e-10 * (1.0 + g.abs()), "{x} {y}");
        }
    }

    #[test]
    fn symmetric() {
        let (z, w) = (Complex64::new(0.3, 1.0), Complex64::new(-2.0, 2.5));
        assert_eq!(strip_covariance(z, w).unwrap(), strip_covariance(w, z).unwrap());
    }

    #[test]
    fn far_field_limit() {
        for &y in &[-2.0, 0.5, 3.0] {
            let g = top_covariance(-60.0, y);
            assert!((g - 2.0 * (-y).max(0.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn insertion_term_at_origin() {
        let g = strip_covariance(top(0.0), Complex64::new(0.0, 0.0)).unwrap();
        assert!((g + 2.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn diagonal_is_an_error() {
        assert!(strip_covariance(top(1.0), top(1.0)).is_err());
    }
}
