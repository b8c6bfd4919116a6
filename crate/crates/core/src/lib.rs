//! Numerics for mating-of-trees angle relations.
//!
//! * [`specfun`]: double gamma function, boundary Liouville structure constants.
//! * [`ptheta`]: closed-form relations between γ, θ, p, c and the wedge weights.
//! * [`motsim`]: skew Brownian motion, first passage, excursion thinning, permutons.
//! * [`gmcfield`]: boundary Gaussian multiplicative chaos on the strip.
//! * [`sle`]: SLE_κ(ρ) driving functions and the continuation threshold.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gmcfield;
pub mod motsim;
pub mod ptheta;
pub mod rng;
pub mod sle;
pub mod specfun;
pub mod stats;

pub use error::{Error, ErrorKind, Result};
