use serde::Serialize;

use super::Side;
use crate::error::{domain, Result};

/// Starting position of a force point. 0⁻ and 0⁺ are distinct points that
/// both start at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Location {
    ZeroMinus,
    ZeroPlus,
    At(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForcePoint {
    pub location: Location,
    pub rho: f64,
    pub side: Side,
}

impl ForcePoint {
    pub fn new(location: Location, rho: f64, side: Side) -> Self {
        ForcePoint { location, rho, side }
    }

    /// Initial image, with 0∓ placed at ∓tol.
    pub(crate) fn start(&self, tol: f64) -> f64 {
        match self.location {
            Location::ZeroMinus => -tol,
            Location::ZeroPlus => tol,
            Location::At(x) => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SleConfig {
    pub kappa: f64,
    pub force_points: Vec<ForcePoint>,
    pub dt: f64,
    pub horizon: f64,
    pub collision_tol: f64,
    pub seed: u64,
}

impl SleConfig {
    pub fn new(kappa: f64, force_points: Vec<ForcePoint>) -> Self {
        SleConfig { kappa, force_points, dt: 1e-3, horizon: 100.0, collision_tol: 1e-6, seed: 0 }
    }

    /// SLE_κ(W−2; −W, W−2) with κ = γ²: weight W−2 at 0⁻, −W at 0⁺ and W−2 at 1.
    pub fn weld_zero(gamma: f64, weight: f64) -> Self {
        SleConfig::new(
            gamma * gamma,
            vec![
                ForcePoint::new(Location::ZeroMinus, weight - 2.0, Side::Left),
                ForcePoint::new(Location::ZeroPlus, -weight, Side::Right),
                ForcePoint::new(Location::At(1.0), weight - 2.0, Side::Right),
            ],
        )
    }

    /// κ′ = 16/κ.
    pub fn kappa_prime(&self) -> f64 {
        16.0 / self.kappa
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.kappa) || !positive(self.dt) || !positive(self.horizon) || !positive(self.collision_tol) {
            return Err(domain("kappa, dt, horizon and collision_tol must be positive"));
        }
        for p in &self.force_points {
            let ok = match (p.location, p.side) {
                (Location::ZeroMinus, Side::Left) | (Location::ZeroPlus, Side::Right) => true,
                (Location::At(x), Side::Left) => x < 0.0,
                (Location::At(x), Side::Right) => x > 0.0,
                _ => false,
            };
            if !ok || !p.rho.is_finite() {
                return Err(domain(format!("force point {p:?} is on the wrong side of the origin")));
            }
        }
        for side in [Side::Left, Side::Right] {
            let dist: Vec<f64> =
                self.force_points.iter().filter(|p| p.side == side).map(|p| p.start(0.0).abs()).collect();
            if dist.windows(2).any(|w| w[0] > w[1]) {
                return Err(domain("force points must be listed from the origin outwards on each side"));
            }
        }
        Ok(())
    }
}
