//! Driving pairs (X, Y) for the coalescent-walk flow.
//!
//! The permuton needs a two-dimensional Brownian loop of correlation ρ that
//! stays in the quadrant {X ≥ 0, Y ≥ 0} and returns to the origin at time 1.
//! After the linear map W ↦ (W₁, ρW₁ + √(1−ρ²)W₂) the quadrant becomes a cone
//! of opening α = arccos(−ρ) for a standard planar motion W, and the loop is
//! a Brownian excursion in that cone. With ν = π/α its skew product is
//!
//! * |W|² is a squared Bessel bridge 0 → 0 of dimension d = 2 + 2ν, sampled
//!   exactly as (1−t)² Z_{t/(1−t)} for a BESQ_d process Z from 0;
//! * the angle Θ ∈ (0, α), through Y = cos(νΘ), is the Jacobi diffusion
//!   dY = −(3/2)ν²Y dτ − ν√(1−Y²) dB run with the clock τ = ∫ ds/|W|²,
//!   whose invariant law is Y = 2B − 1, B ~ Beta(3/2, 3/2).

use rand::Rng as _;
use rand_distr::{Beta, Distribution, Gamma, Poisson, StandardNormal};
use serde::Serialize;

use crate::error::{domain, Result};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum Driver {
    /// Brownian loop conditioned to stay in the quadrant (exact law on the grid).
    #[default]
    QuadrantLoop,
    /// Unconditioned correlated walk; biased for permutons, kept for comparison.
    FreeWalk,
}

/// Grid values of the driving pair at times i/n, i = 0..=n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriverPath {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl DriverPath {
    pub fn n_steps(&self) -> usize {
        self.x.len() - 1
    }
}

fn check_rho(rho: f64, n_steps: usize) -> Result<()> {
    if !(rho > -1.0 && rho < 1.0) {
        return Err(domain(format!("driver correlation {rho} outside (-1, 1)")));
    }
    if n_steps < 2 {
        return Err(domain("driver needs at least two steps"));
    }
    Ok(())
}

/// Unit-variance walk of correlation ρ on [0, 1].
pub fn free_walk(rho: f64, n_steps: usize, rng: &mut Rng) -> Result<DriverPath> {
    check_rho(rho, n_steps)?;
    let sd = (1.0 / n_steps as f64).sqrt();
    let perp = (1.0 - rho * rho).sqrt();
    let (mut x, mut y) = (vec![0.0; n_steps + 1], vec![0.0; n_steps + 1]);
    for i in 0..n_steps {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        x[i + 1] = x[i] + sd * a;
        y[i + 1] = y[i] + sd * (rho * a + perp * b);
    }
    Ok(DriverPath { x, y })
}

/// Noncentral chi-square with `dof` degrees of freedom and noncentrality `lambda`.
fn noncentral_chi2(dof: f64, lambda: f64, rng: &mut Rng) -> f64 {
    let n = if lambda > 0.0 { Poisson::new(0.5 * lambda).expect("positive rate").sample(rng) } else { 0.0 };
    2.0 * Gamma::new(0.5 * dof + n, 1.0).expect("positive shape").sample(rng)
}

/// Squared radius of the cone excursion at times i/n.
fn besq_bridge(dim: f64, n: usize, rng: &mut Rng) -> Vec<f64> {
    let mut r2 = vec![0.0; n + 1];
    let mut z = 0.0;
    let mut u_prev = 0.0;
    for (i, r) in r2.iter_mut().enumerate().take(n).skip(1) {
        let t = i as f64 / n as f64;
        let u = t / (1.0 - t);
        let du = u - u_prev;
        z = du * noncentral_chi2(dim, z / du, rng);
        u_prev = u;
        *r = (1.0 - t) * (1.0 - t) * z;
    }
    r2
}

/// Brownian loop of correlation ρ conditioned on the quadrant, on [0, 1].
pub fn quadrant_loop(rho: f64, n_steps: usize, rng: &mut Rng) -> Result<DriverPath> {
    check_rho(rho, n_steps)?;
    let alpha = (-rho).acos();
    let nu = std::f64::consts::PI / alpha;
    let nu2 = nu * nu;
    let dt = 1.0 / n_steps as f64;
    let r2 = besq_bridge(2.0 + 2.0 * nu, n_steps, rng);
    let stationary = Beta::new(1.5, 1.5).expect("valid beta");
    let offset = -rho.asin();
    let perp = (1.0 - rho * rho).sqrt();
    let (mut x, mut y) = (vec![0.0; n_steps + 1], vec![0.0; n_steps + 1]);
    let mut c = 2.0 * stationary.sample(rng) - 1.0;
    for i in 1..n_steps {
        let prod = r2[i - 1] * r2[i];
        // clock increment ν²∫ds/R² over the step; infinite next to the tip
        let clock = if prod > 0.0 { nu2 * dt / prod.sqrt() } else { f64::INFINITY };
        if clock > 6.0 {
            c = 2.0 * stationary.sample(rng) - 1.0;
        } else {
            let m = (clock / 0.02).ceil().max(1.0);
            let h = clock / m;
            let sh = h.sqrt();
            for _ in 0..m as usize {
                let g: f64 = rng.sample(StandardNormal);
                c += -1.5 * c * h + (1.0 - c * c).max(0.0).sqrt() * sh * g;
                if c > 1.0 {
                    c = (2.0 - c).max(-1.0);
                } else if c < -1.0 {
                    c = (-2.0 - c).min(1.0);
                }
            }
        }
        let angle = offset + c.acos() / nu;
        let r = r2[i].sqrt();
        let (w1, w2) = (r * angle.cos(), r * angle.sin());
        x[i] = w1;
        y[i] = rho * w1 + perp * w2;
    }
    Ok(DriverPath { x, y })
}
