use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::rng::{map_replicas, Rng};

/// Euler scheme for T₁ = inf{s : B_s = 1}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct T1Config {
    pub dt: f64,
    /// Simulated horizon. A path still below 1 at this time is completed with
    /// the exact law of the remaining passage time, (1 − B_H)²/Z².
    pub horizon: f64,
}

impl Default for T1Config {
    fn default() -> Self {
        T1Config { dt: 1e-3, horizon: 1.0 }
    }
}

fn one_path(cfg: &T1Config, rng: &mut Rng) -> f64 {
    let sd = cfg.dt.sqrt();
    let n = (cfg.horizon / cfg.dt).ceil() as usize;
    let two_over_dt = 2.0 / cfg.dt;
    let mut x = 0.0f64;
    for i in 0..n {
        let t = i as f64 * cfg.dt;
        let y = x + sd * rng.sample::<f64, _>(StandardNormal);
        if y >= 1.0 {
            return t + 0.5 * cfg.dt;
        }
        // Brownian bridge from x to y crosses 1 with this probability
        let cross = (-(1.0 - x) * (1.0 - y) * two_over_dt).exp();
        if rng.gen::<f64>() < cross {
            return t + 0.5 * cfg.dt;
        }
        x = y;
    }
    let z: f64 = rng.sample(StandardNormal);
    n as f64 * cfg.dt + (1.0 - x) * (1.0 - x) / (z * z)
}

/// `n_paths` first-passage times of level 1 with time step `dt` and the default horizon.
pub fn sample_t1(n_paths: usize, dt: f64, seed: u64) -> Result<Vec<f64>> {
    sample_t1_with(n_paths, &T1Config { dt, ..Default::default() }, seed)
}

pub fn sample_t1_with(n_paths: usize, cfg: &T1Config, seed: u64) -> Result<Vec<f64>> {
    if n_paths == 0 {
        return Err(domain("need at least one path"));
    }
    if !(cfg.dt > 0.0 && cfg.horizon >= 0.0) {
        return Err(domain("first passage needs dt > 0 and horizon >= 0"));
    }
    Ok(map_replicas(seed, n_paths, |_, rng| one_path(cfg, rng)))
}
