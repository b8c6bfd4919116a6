//! SLE_κ(ρ) driving functions with several force points.
//!
//! The driving pair solves dW = √κ dB + Σ ρᵢ/(W − Vᵢ) dt and dVᵢ = 2/(Vᵢ − W) dt.
//! When W meets force points whose cumulative weight (counted from W outwards
//! on that side) is ≤ −2, the continuation threshold is reached. Otherwise the
//! points it touches are absorbed into a single point of summed weight.

mod config;
mod driving;
mod loewner;

pub use crate::ptheta::Side;
pub use config::{ForcePoint, Location, SleConfig};
pub use driving::{
    advance_driving, initial_state, run_threshold_paths, run_until_threshold, run_until_threshold_with, DrivingState,
    ThresholdOutcome,
};
pub use loewner::forward_map_far_field;
