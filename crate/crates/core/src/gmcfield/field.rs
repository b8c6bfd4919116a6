use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::covariance::top_covariance;
use crate::error::{check_gamma, domain, Error, Result};
use crate::rng::{stream, Rng};
use crate::specfun::quad::integrate;
use crate::specfun::{background_charge, InsertionTriple, QuadratureConfig};
use crate::stats::jackknife;

/// Which boundary line of the strip carries the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// ℝ + πi, opposite to the insertion at 0.
    Top,
    /// ℝ, through the insertion.
    Bottom,
}

/// Uniform grid on [−T, T] of one boundary line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryGridSpec {
    pub half_width: f64,
    pub n_points: usize,
    pub boundary: Boundary,
}

impl Default for BoundaryGridSpec {
    fn default() -> Self {
        BoundaryGridSpec { half_width: 20.0, n_points: 4096, boundary: Boundary::Top }
    }
}

impl BoundaryGridSpec {
    pub fn top(half_width: f64, n_points: usize) -> Self {
        BoundaryGridSpec { half_width, n_points, boundary: Boundary::Top }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 2 || !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(domain(format!("grid needs n_points >= 2 and T > 0, got {self:?}")));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n_points - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let d = self.spacing();
        (0..self.n_points).map(|i| -self.half_width + i as f64 * d).collect()
    }
}

/// Coupling constant and insertions of the Liouville field on the strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftSpec {
    pub gamma: f64,
    pub betas: InsertionTriple,
}

impl DriftSpec {
    pub fn new(gamma: f64, betas: InsertionTriple) -> Self {
        DriftSpec { gamma, betas }
    }

    /// Drift at x + πi: (β₁+β₂−2Q)/2·|x| + (β₁−β₂)/2·x + (β₃/2)·G(x+πi, 0).
    pub fn value(&self, x: f64) -> f64 {
        let q = background_charge(self.gamma);
        let InsertionTriple { beta1, beta2, beta3 } = self.betas;
        // G(x+πi, 0) = −2log(1+e^x) + 2max(x,0)
        let g0 = -2.0 * (-x.abs()).exp().ln_1p();
        0.5 * (beta1 + beta2 - 2.0 * q) * x.abs() + 0.5 * (beta1 - beta2) * x + 0.5 * beta3 * g0
    }

    /// ln of the expected cell mass per unit length, (γ/2)d(x) + (γ²/4)|x|.
    fn ln_mean_density(&self, x: f64) -> f64 {
        0.5 * self.gamma * self.value(x) + 0.25 * self.gamma * self.gamma * x.abs()
    }
}

/// One field draw (drift included) and the cell masses of its boundary measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryFieldSample {
    pub grid: BoundaryGridSpec,
    pub drift: DriftSpec,
    pub values: Vec<f64>,
    pub gmc_weights: Vec<f64>,
}

impl BoundaryFieldSample {
    pub fn total_mass(&self) -> f64 {
        crate::stats::compensated_sum(self.gmc_weights.iter().copied())
    }
}

/// ln of the constant factor δ·(δ/2)^{γ²/4} in every cell weight.
///
/// The grid variance is that of a semicircle average of radius δ/2,
/// −2log(δ/2) + 2|x|, so this factor makes E[wᵢ] = δ·exp((γ/2)d + (γ²/4)|x|).
fn ln_cell_factor(delta: f64, gamma: f64) -> f64 {
    delta.ln() + 0.25 * gamma * gamma * (0.5 * delta).ln()
}

fn ln_weights(values: &[f64], delta: f64, gamma: f64) -> impl Iterator<Item = f64> + '_ {
    let c = ln_cell_factor(delta, gamma);
    values.iter().map(move |h| c + 0.5 * gamma * h)
}

/// ln Σ e^{aᵢ} with a compensated sum of the scaled terms.
fn ln_sum_exp(a: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = a.clone().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + crate::stats::compensated_sum(a.map(|v| (v - m).exp())).ln()
}

/// Recomputes the cell masses of `field` for the given γ and stores them.
pub fn gmc_boundary_measure(field: &mut BoundaryFieldSample, gamma: f64) -> Result<()> {
    check_gamma(gamma)?;
    let delta = field.grid.spacing();
    field.gmc_weights = ln_weights(&field.values, delta, gamma).map(f64::exp).collect();
    Ok(())
}

/// Cholesky factor of the grid covariance and the drift on the grid, built
/// once and shared by every replica.
#[derive(Debug, Clone)]
pub struct FieldSampler {
    grid: BoundaryGridSpec,
    drift: DriftSpec,
    drift_values: Vec<f64>,
    factor: DMatrix<f64>,
}

/// Grid covariance: the top-boundary kernel off the diagonal and the
/// semicircle variance −2log(δ/2) + 2|x| on it.
fn grid_covariance(points: &[f64], delta: f64) -> DMatrix<f64> {
    let n = points.len();
    let diag = -2.0 * (0.5 * delta).ln();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag + 2.0 * points[i].abs()
        } else {
            top_covariance(points[i], points[j])
        }
    })
}

impl FieldSampler {
    pub fn new(grid: BoundaryGridSpec, drift: DriftSpec) -> Result<Self> {
        grid.validate()?;
        check_gamma(drift.gamma)?;
        if grid.boundary != Boundary::Top {
            return Err(domain("only the top boundary can be sampled; the bottom one carries the insertion"));
        }
        let points = grid.points();
        let cov = grid_covariance(&points, grid.spacing());
        let factor = match cov.cholesky() {
            Some(c) => c.unpack(),
            None => {
                let cov = grid_covariance(&points, grid.spacing());
                let smallest = SymmetricEigen::new(cov).eigenvalues.min();
                return Err(Error::NotPositiveDefinite { smallest_eigenvalue: smallest });
            }
        };
        let drift_values = points.iter().map(|&x| drift.value(x)).collect();
        Ok(FieldSampler { grid, drift, drift_values, factor })
    }

    pub fn grid(&self) -> &BoundaryGridSpec {
        &self.grid
    }

    pub fn drift_values(&self) -> &[f64] {
        &self.drift_values
    }

    /// Field from a given standard normal vector: L·ξ + drift.
    pub fn field_from_noise(&self, xi: &[f64]) -> Result<BoundaryFieldSample> {
        let n = self.grid.n_points;
        if xi.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: xi.len() });
        }
        let h = &self.factor * DVector::from_column_slice(xi);
        let values = h.iter().zip(&self.drift_values).map(|(a, b)| a + b).collect();
        let mut s = BoundaryFieldSample { grid: self.grid, drift: self.drift, values, gmc_weights: vec![] };
        gmc_boundary_measure(&mut s, self.drift.gamma)?;
        Ok(s)
    }

    fn noise(&self, rng: &mut Rng) -> Vec<f64> {
        (0..self.grid.n_points).map(|_| StandardNormal.sample(rng)).collect()
    }

    /// Replica `index` of the stream family `seed`.
    pub fn sample(&self, seed: u64, index: u64) -> BoundaryFieldSample {
        let xi = self.noise(&mut stream(seed, index));
        self.field_from_noise(&xi).expect("noise has grid length and γ was validated")
    }

    /// ln L for replicas 0..n. Replicas are factored in batches (one matrix
    /// product each), and replica i always uses stream i, so the result does
    /// not depend on the batching.
    pub fn ln_total_masses(&self, seed: u64, n_replicas: usize) -> Vec<f64> {
        const BATCH: usize = 64;
        let n = self.grid.n_points;
        let delta = self.grid.spacing();
        let gamma = self.drift.gamma;
        let n_batches = n_replicas.div_ceil(BATCH);
        (0..n_batches)
            .into_par_iter()
            .flat_map_iter(|b| {
                let lo = b * BATCH;
                let hi = (lo + BATCH).min(n_replicas);
                let mut xi = DMatrix::<f64>::zeros(n, hi - lo);
                for (c, r) in (lo..hi).enumerate() {
                    let col = self.noise(&mut stream(seed, r as u64));
                    xi.column_mut(c).copy_from_slice(&col);
                }
                let h = &self.factor * xi;
                let out: Vec<f64> = (0..hi - lo)
                    .map(|c| {
                        let col = h.column(c);
                        let vals = col.iter().zip(&self.drift_values).map(|(a, d)| a + d);
                        let c0 = ln_cell_factor(delta, gamma);
                        ln_sum_exp(vals.map(move |v| c0 + 0.5 * gamma * v))
                    })
                    .collect();
                out.into_iter()
            })
            .collect()
    }
}

/// One field draw from stream 0 of `seed`.
pub fn sample_boundary_field(grid: BoundaryGridSpec, drift: DriftSpec, seed: u64) -> Result<BoundaryFieldSample> {
    Ok(FieldSampler::new(grid, drift)?.sample(seed, 0))
}

/// E[L] on [−T, T] in the continuum: ∫ exp((γ/2)d(x) + (γ²/4)|x|) dx.
pub fn mean_mass_integral(grid: &BoundaryGridSpec, drift: &DriftSpec) -> Result<f64> {
    let cfg = QuadratureConfig::default();
    let f = |x: f64| drift.ln_mean_density(x).exp();
    let t = grid.half_width;
    Ok(integrate(f, -t, 0.0, &cfg)? + integrate(f, 0.0, t, &cfg)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub power: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub n_replicas: usize,
}

/// Monte Carlo E[L^power] for the total top-boundary mass L.
pub fn moment_estimate(
    grid: BoundaryGridSpec,
    drift: DriftSpec,
    power: f64,
    n_replicas: usize,
    seed: u64,
) -> Result<MomentEstimate> {
    check_gamma(drift.gamma)?;
    drift.betas.check_length_law(drift.gamma)?;
    if power == 0.0 {
        return Ok(MomentEstimate { power, estimate: 1.0, stderr: 0.0, n_replicas });
    }
    if n_replicas < 2 {
        return Err(domain("need at least two replicas"));
    }
    let sampler = FieldSampler::new(grid, drift)?;
    let ln_l = sampler.ln_total_masses(seed, n_replicas);
    let mut samples = Vec::with_capacity(n_replicas);
    for (replica, &l) in ln_l.iter().enumerate() {
        let mass = l.exp();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::DegenerateMass { replica, mass });
        }
        samples.push((power * l).exp());
    }
    let (estimate, stderr) = jackknife(&samples, |m| m);
    Ok(MomentEstimate { power, estimate, stderr, n_replicas })
}
