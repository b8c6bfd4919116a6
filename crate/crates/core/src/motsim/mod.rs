//! Monte Carlo for the mating-of-trees skeleton: correlated walks, skew
//! Brownian motion and its local time, first passage of level one, excursion
//! thinning, and the coalescent-walk construction of skew Brownian permutons.
//!
//! Replicas draw from [`crate::rng::stream`]`(seed, replica)`, so every result
//! is reproducible and independent of the thread count.

mod driver;
mod excursion;
mod first_passage;
mod flow;
mod skew;
mod walk;

pub use driver::{free_walk, quadrant_loop, Driver, DriverPath};
pub use excursion::{thinned_excursion_area, ThinningConfig, ThinningEstimate};
pub use first_passage::{sample_t1, sample_t1_with, T1Config};
pub use flow::{
    coalescent_flow, count_inversions, flow_on, inversion_rate_mc, pairwise_inversions, permuton_from_flow,
    CoalescentFlow, FlowConfig,
    InversionConfig, PermutonSample,
};
pub use skew::{
    coupled_step, sample_coupled_skew, sample_skew_walk, skew_terminal, SkewConfig, SkewPath, SkewTerminal,
};
pub use walk::{correlated_walk_from, sample_correlated_walk, CorrelatedPath, WalkConfig};
