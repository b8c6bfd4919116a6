//! Boundary Gaussian multiplicative chaos on the strip S = ℝ × (0, π).
//!
//! The field is sampled on a grid of the top boundary ℝ + πi, with the
//! insertion β₃ sitting at 0 on the opposite boundary and β₁, β₂ at ±∞. The
//! total boundary mass L of the top line is the quantity whose negative
//! moment reproduces the boundary structure constant.

mod covariance;
mod field;
mod io;

pub use covariance::{strip_covariance, top_covariance};
pub use field::{
    gmc_boundary_measure, mean_mass_integral, moment_estimate, sample_boundary_field, Boundary,
    BoundaryFieldSample, BoundaryGridSpec, DriftSpec, FieldSampler, MomentEstimate,
};
pub use io::{read_field, write_field};
