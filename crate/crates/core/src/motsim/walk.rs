use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::rng::{stream, Rng};

/// A Gaussian walk (L, R) with Var = s²dt and Cov = ρs²dt per step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WalkConfig {
    pub n_steps: usize,
    pub dt: f64,
    pub rho: f64,
    pub seed: u64,
    /// s: 𝐚 for absolute units, 1 for unit variance.
    pub variance_scale: f64,
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 || !(self.dt > 0.0) {
            return Err(domain("walk needs n_steps >= 1 and dt > 0"));
        }
        if !(self.rho > -1.0 && self.rho < 1.0) {
            return Err(domain(format!("walk correlation {} outside (-1, 1)", self.rho)));
        }
        if !(self.variance_scale > 0.0) {
            return Err(domain("variance scale must be positive"));
        }
        Ok(())
    }
}

/// Positions of L and R at times 0, dt, …, n·dt (both start at 0).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelatedPath {
    pub dt: f64,
    pub l: Vec<f64>,
    pub r: Vec<f64>,
}

/// Samples a walk from stream 0 of `cfg.seed`.
pub fn sample_correlated_walk(cfg: &WalkConfig) -> Result<CorrelatedPath> {
    correlated_walk_from(cfg, &mut stream(cfg.seed, 0))
}

/// Samples a walk from a caller-supplied stream.
pub fn correlated_walk_from(cfg: &WalkConfig, rng: &mut Rng) -> Result<CorrelatedPath> {
    cfg.validate()?;
    let sd = cfg.variance_scale * cfg.dt.sqrt();
    let perp = (1.0 - cfg.rho * cfg.rho).sqrt();
    let mut l = Vec::with_capacity(cfg.n_steps + 1);
    let mut r = Vec::with_capacity(cfg.n_steps + 1);
    let (mut x, mut y) = (0.0, 0.0);
    l.push(x);
    r.push(y);
    for _ in 0..cfg.n_steps {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        x += sd * a;
        y += sd * (cfg.rho * a + perp * b);
        l.push(x);
        r.push(y);
    }
    Ok(CorrelatedPath { dt: cfg.dt, l, r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::map_replicas;
    use crate::stats::{correlation, Summary};

    fn endpoints(rho: f64, s: f64, m: usize) -> (Vec<f64>, Vec<f64>) {
        let cfg = WalkConfig { n_steps: 50, dt: 0.02, rho, seed: 11, variance_scale: s };
        let ends = map_replicas(11, m, |_, rng| {
            let p = correlated_walk_from(&cfg, rng).unwrap();
            (p.l[50], p.r[50])
        });
        ends.into_iter().unzip()
    }

    #[test]
    fn variance_and_correlation() {
        let (rho, s, m) = (-0.6, 1.7, 10_000);
        let (l, r) = endpoints(rho, s, m);
        // Var(L_T)/T with T = 1, compared through the mean of L²
        let sq: Vec<f64> = l.iter().map(|x| x * x).collect();
        let v = Summary::of(&sq);
        assert!(v.z_score(s * s).abs() < 3.0, "{v:?}");
        let c = correlation(&l, &r);
        // stderr of a sample correlation ≈ (1−ρ²)/√m
        assert!((c - rho).abs() < 3.0 * (1.0 - rho * rho) / (m as f64).sqrt(), "{c}");
    }

    #[test]
    fn independent_when_uncorrelated() {
        let m = 10_000;
        let (l, r) = endpoints(0.0, 1.0, m);
        assert!(correlation(&l, &r).abs() < 3.0 / (m as f64).sqrt());
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = WalkConfig { n_steps: 100, dt: 0.01, rho: 0.3, seed: 5, variance_scale: 1.0 };
        assert_eq!(sample_correlated_walk(&cfg).unwrap(), sample_correlated_walk(&cfg).unwrap());
        assert!(sample_correlated_walk(&WalkConfig { rho: 1.0, ..cfg }).is_err());
    }
}
