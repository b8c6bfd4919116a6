//! Adaptive Gauss–Legendre quadrature on finite and semi-infinite intervals.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const ORDER: usize = 15;

/// Tolerances for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Below this point the double-gamma integrand is replaced by its Taylor series.
    pub small_t_cutoff: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { abs_tol: 1e-14, rel_tol: 1e-13, max_subdivisions: 2000, small_t_cutoff: 0.5 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.abs_tol > 0.0
            && self.rel_tol > 0.0
            && self.max_subdivisions >= 1
            && self.small_t_cutoff > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid quadrature config {self:?}")))
        }
    }
}

/// Nodes and weights on [-1, 1], found by Newton iteration on P_n.
fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        out
    })
}

fn gl<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    h * rule().iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>()
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn piece<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let m = 0.5 * (a + b);
    let whole = gl(f, a, b);
    let halves = gl(f, a, m) + gl(f, m, b);
    Piece { a, b, value: halves, err: (whole - halves).abs() }
}

/// Globally adaptive integration of `f` over `[a, b]`: the piece with the
/// largest error estimate is bisected until the total error is within tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let mut heap = BinaryHeap::new();
    heap.push(piece(&f, a, b));
    for _ in 0..cfg.max_subdivisions {
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.err).sum();
        if !total.is_finite() {
            break;
        }
        if err <= cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
            return Ok(total);
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        heap.push(piece(&f, worst.a, m));
        heap.push(piece(&f, m, worst.b));
    }
    let err: f64 = heap.iter().map(|p| p.err).sum();
    Err(Error::NonConvergence { a, b, estimate: err })
}

/// Integral over `[a, ∞)` by panels of doubling width. Stops once both the
/// integrand and the last panel fall below `abs_tol·1e-3`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let cut = cfg.abs_tol * 1e-3;
    let mut lo = a;
    let mut width = 1.0;
    let mut total = 0.0;
    for _ in 0..200 {
        let hi = lo + width;
        let panel = integrate(&f, lo, hi, cfg)?;
        total += panel;
        if f(hi).abs() < cut && panel.abs() < cut {
            return Ok(total);
        }
        lo = hi;
        width = (width * 2.0).min(64.0);
    }
    Err(Error::NonConvergence { a, b: f64::INFINITY, estimate: f(lo).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_integrate_polynomials() {
        let s: f64 = rule().iter().map(|p| p.1).sum();
        assert!((s - 2.0).abs() < 1e-14);
        // degree 29 is exact for a 15-point rule
        let v = gl(&|x: f64| x.powi(28), -1.0, 1.0);
        assert!((v - 2.0 / 29.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_sharp_peak() {
        let cfg = QuadratureConfig::default();
        let v = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, &cfg).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((v / exact - 1.0).abs() < 1e-12);
    }

    #[test]
    fn semi_infinite_exponential() {
        let cfg = QuadratureConfig::default();
        let v = integrate_to_infinity(|t| (-0.3 * t).exp(), 0.0, &cfg).unwrap();
        assert!((v - 1.0 / 0.3).abs() < 1e-12);
    }

    #[test]
    fn reports_nonconvergence() {
        let cfg = QuadratureConfig { max_subdivisions: 3, ..Default::default() };
        let r = integrate(|x: f64| x.abs().sqrt().recip(), -1.0, 1.0, &cfg);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
