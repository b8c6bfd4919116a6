//! Coalescent-walk flows and the permutons they define.
//!
//! One trajectory starts at 0 at every grid time t_j = j/n and follows
//! [`coupled_step`] with the shared driver increments (+ΔY while ≥ 0, −ΔX
//! while < 0). Each trajectory takes its own Euler step; two trajectories
//! that land on the same state share it from then on, which is the only
//! coalescence the scheme produces. Forcing merges of crossing trajectories
//! biases the sign law of the survivors, so it is not done. The permuton
//! value at t_j is
//!
//! φ(t_j) = (#{i < j : Z^{(i)}(t_j) < 0} + #{i ≥ j : Z^{(j)}(t_i) ≥ 0}) / n.
//!
//! For t_a < t_b the pair is inverted (φ(t_a) > φ(t_b)) exactly when
//! Z^{(t_a)}(t_b) ≥ 0, so pattern statistics only need the trajectories that
//! start at the sampled times.

use rand::seq::index::sample;
use rand::Rng as _;
use serde::Serialize;

use super::driver::{free_walk, quadrant_loop, Driver, DriverPath};
use super::skew::coupled_step;
use crate::error::{domain, Error, Result};
use crate::rng::{map_replicas, stream, Rng};
use crate::stats::Summary;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowConfig {
    /// Correlation of the driving pair.
    pub rho: f64,
    /// Probability of an upward excursion at zero.
    pub q: f64,
    pub n_steps: usize,
    /// Start times whose full trajectories are recorded.
    pub start_times: Vec<f64>,
    pub seed: u64,
    pub driver: Driver,
}

fn check_q(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(domain(format!("q = {q} outside [0, 1]")));
    }
    Ok(())
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        check_q(self.q)?;
        if self.start_times.windows(2).any(|w| w[0] > w[1])
            || self.start_times.iter().any(|t| !(0.0..=1.0).contains(t))
        {
            return Err(domain("start times must be sorted and inside [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoalescentFlow {
    pub n_steps: usize,
    /// φ(j/n) for j = 0..n.
    pub phi: Vec<f64>,
    /// Grid index of each recorded start time.
    pub start_index: Vec<usize>,
    /// Z^{(u)}(t_i) for i = start_index..n (value 0 at the start).
    pub trajectories: Vec<Vec<f64>>,
}

/// Points (t, φ(t)) of a sampled permuton, sorted by t.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutonSample {
    pub points: Vec<(f64, f64)>,
}

#[inline]
fn increments(d: &DriverPath, i: usize) -> (f64, f64) {
    (d.y[i + 1] - d.y[i], d.x[i + 1] - d.x[i])
}

fn make_driver(driver: Driver, rho: f64, n: usize, rng: &mut Rng) -> Result<DriverPath> {
    match driver {
        Driver::QuadrantLoop => quadrant_loop(rho, n, rng),
        Driver::FreeWalk => free_walk(rho, n, rng),
    }
}

/// Samples a driver from stream 0 of `cfg.seed` and runs the flow on it.
pub fn coalescent_flow(cfg: &FlowConfig) -> Result<CoalescentFlow> {
    cfg.validate()?;
    let d = make_driver(cfg.driver, cfg.rho, cfg.n_steps, &mut stream(cfg.seed, 0))?;
    Ok(flow_on(&d, cfg.q, &cfg.start_times))
}

/// Runs the full flow (all n trajectories, O(n²) steps) on a given driver.
pub fn flow_on(d: &DriverPath, q: f64, start_times: &[f64]) -> CoalescentFlow {
    let n = d.n_steps();
    let start_index: Vec<usize> =
        start_times.iter().map(|&u| ((u * n as f64).round() as usize).min(n - 1)).collect();
    let mut z: Vec<f64> = Vec::with_capacity(n);
    let mut nonneg_after = vec![0u32; n];
    let mut neg_before = vec![0u32; n];
    let mut traj: Vec<Vec<f64>> = start_index.iter().map(|&j| Vec::with_capacity(n - j)).collect();
    for j in 0..n {
        z.push(0.0);
        let mut neg = 0;
        for (i, &v) in z.iter().enumerate() {
            if v < 0.0 {
                neg += 1;
            } else {
                nonneg_after[i] += 1;
            }
        }
        neg_before[j] = neg;
        for (k, &s) in start_index.iter().enumerate() {
            if s <= j {
                traj[k].push(z[s]);
            }
        }
        if j + 1 < n {
            let (up, down) = increments(d, j);
            for v in z.iter_mut() {
                *v = coupled_step(*v, up, down, q);
            }
        }
    }
    let phi = (0..n).map(|j| (neg_before[j] + nonneg_after[j]) as f64 / n as f64).collect();
    CoalescentFlow { n_steps: n, phi, start_index, trajectories: traj }
}

/// k distinct grid times and their φ values.
pub fn permuton_from_flow(flow: &CoalescentFlow, k: usize, seed: u64) -> Result<PermutonSample> {
    let n = flow.phi.len();
    let mut rng = stream(seed, 0);
    let idx = sample_times(n, k, &mut rng)?;
    // a uniform position inside the chosen cell keeps t continuous
    let points = idx.iter().map(|&j| ((j as f64 + rng.gen::<f64>()) / n as f64, flow.phi[j])).collect();
    Ok(PermutonSample { points })
}

fn sample_times(n: usize, k: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    if k == 0 || k > n {
        return Err(Error::Resolution(format!("cannot draw {k} distinct points from a grid of {n}")));
    }
    let mut idx = sample(rng, n, k).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

/// Pairs i < j (in t order) with φ_i > φ_j.
pub fn count_inversions(sample: &PermutonSample) -> usize {
    let phi: Vec<f64> = sample.points.iter().map(|p| p.1).collect();
    let mut inv = 0;
    for i in 0..phi.len() {
        for j in i + 1..phi.len() {
            if phi[i] > phi[j] {
                inv += 1;
            }
        }
    }
    inv
}

/// Inverted pairs among trajectories started at the sorted grid indices `idx`.
pub fn pairwise_inversions(d: &DriverPath, q: f64, idx: &[usize]) -> usize {
    let mut inv = 0;
    for (a, &s) in idx.iter().enumerate() {
        let mut z = 0.0;
        let mut at = s;
        for &t in &idx[a + 1..] {
            while at < t {
                let (up, down) = increments(d, at);
                z = coupled_step(z, up, down, q);
                at += 1;
            }
            if z >= 0.0 {
                inv += 1;
            }
        }
    }
    inv
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InversionConfig {
    pub rho: f64,
    pub q: f64,
    pub n_steps: usize,
    pub k: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub driver: Driver,
}

/// Mean over independent flows of the pattern density of 21 among k points.
pub fn inversion_rate_mc(cfg: &InversionConfig) -> Result<Summary> {
    check_q(cfg.q)?;
    if cfg.k < 2 || cfg.n_samples < 2 {
        return Err(domain("need k >= 2 and at least two samples"));
    }
    if cfg.k > cfg.n_steps {
        return Err(Error::Resolution(format!("k = {} exceeds the grid size {}", cfg.k, cfg.n_steps)));
    }
    let pairs = (cfg.k * (cfg.k - 1) / 2) as f64;
    let rates = map_replicas(cfg.seed, cfg.n_samples, |_, rng| -> Result<f64> {
        let d = make_driver(cfg.driver, cfg.rho, cfg.n_steps, rng)?;
        let idx = sample_times(cfg.n_steps, cfg.k, rng)?;
        Ok(pairwise_inversions(&d, cfg.q, &idx) as f64 / pairs)
    });
    let rates: Vec<f64> = rates.into_iter().collect::<Result<_>>()?;
    Ok(Summary::of(&rates))
}
