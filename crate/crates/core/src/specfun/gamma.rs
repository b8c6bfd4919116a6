//! Ordinary Gamma function (Lanczos, g = 7, n = 9) with reflection.

use std::f64::consts::PI;

const G: f64 = 7.0;
const COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn lanczos_sum(z: f64) -> f64 {
    // z = x - 1, x >= 0.5
    let mut a = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    a
}

/// sin(πx) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    if r < 0.5 {
        (PI * r).sin()
    } else if r < 1.5 {
        (PI * (1.0 - r)).sin()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

/// `(ln|Γ(x)|, sign Γ(x))`. At the poles (non-positive integers) the log is `+∞`.
pub fn ln_gamma(x: f64) -> (f64, f64) {
    if x < 0.5 {
        let s = sin_pi(x);
        if s == 0.0 {
            return (f64::INFINITY, 1.0);
        }
        let (lg, _) = ln_gamma(1.0 - x);
        return (PI.ln() - s.abs().ln() - lg, s.signum());
    }
    let z = x - 1.0;
    let t = z + G + 0.5;
    (LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln(), 1.0)
}

/// Γ(x). Returns `±∞` at the poles and overflows to `∞` beyond x ≈ 171.6.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = sin_pi(x);
        if s == 0.0 {
            return f64::INFINITY;
        }
        return PI / (s * gamma(1.0 - x));
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    let z = x - 1.0;
    let t = z + G + 0.5;
    // split the power so t^(z+1/2) does not overflow before e^-t brings it down
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * (-t).exp() * half * lanczos_sum(z)
}

/// Γ(x)Γ(1−x)·sin(πx)/π − 1, the residual of the reflection formula.
pub fn reflection_residual(x: f64) -> f64 {
    gamma(x) * gamma(1.0 - x) * sin_pi(x) / PI - 1.0
}
