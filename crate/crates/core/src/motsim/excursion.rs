//! Areas swept by thinned excursions of reflected Brownian motion.
//!
//! The reflected motion is a simple random walk with spacing h and time step
//! h². Each return to 0 ends an excursion and adds h to the (Tanaka) local
//! time, so a path is simulated until it has made N = ℓ/h excursions, where
//! ℓ = ct/𝐚 is the local-time target. Each excursion is marked left with
//! probability p; A^L and A^R sum the marked durations. Excursions still
//! alive after `max_excursion_steps` are finished with the exact continuum
//! law of the time to reach 0 from the current height.

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::first_passage::sample_t1_with;
use super::first_passage::T1Config;
use crate::error::{domain, Error, Result};
use crate::ptheta::{area_laplace, lqg_params, SkewCoupling};
use crate::rng::{map_replicas, Rng};
use crate::stats::{correlation, Summary};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThinningConfig {
    pub gamma: f64,
    pub theta: f64,
    pub t: f64,
    /// Laplace variables; all share the same paths.
    pub mus: Vec<f64>,
    pub n_paths: usize,
    pub seed: u64,
    /// Lattice excursions per path.
    pub excursions: usize,
    pub max_excursion_steps: u64,
    /// Optional cap on simulated time per path.
    pub horizon: Option<f64>,
    /// Time step for the T₁ samples of the representation estimator.
    pub t1_dt: f64,
}

impl ThinningConfig {
    pub fn new(gamma: f64, theta: f64, t: f64, mus: Vec<f64>, n_paths: usize, seed: u64) -> Self {
        ThinningConfig {
            gamma,
            theta,
            t,
            mus,
            n_paths,
            seed,
            excursions: 256,
            max_excursion_steps: 4096,
            horizon: None,
            t1_dt: 1e-3,
        }
    }
}

/// Laplace transforms of the thinned areas at one μ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThinningEstimate {
    pub mu: f64,
    /// E e^{−μA^L} from direct thinning.
    pub left: Summary,
    pub right: Summary,
    /// E e^{−μ(pℓ)²T₁} and E e^{−μ((1−p)ℓ)²T₁} from first-passage samples.
    pub representation_left: Summary,
    pub representation_right: Summary,
    /// Closed forms exp(−𝐚⁻¹cp√(2μ)) and exp(−𝐚⁻¹c(1−p)√(2μ)).
    pub exact_left: f64,
    pub exact_right: f64,
    /// Sample correlation of e^{−μA^L} and e^{−μA^R}.
    pub correlation: f64,
}

// For each byte of random bits: net displacement and lowest partial sum.
const fn byte_table() -> [(i8, i8); 256] {
    let mut t = [(0i8, 0i8); 256];
    let mut b = 0;
    while b < 256 {
        let (mut s, mut m) = (0i8, 8i8);
        let mut k = 0;
        while k < 8 {
            s += if (b >> k) & 1 == 1 { 1 } else { -1 };
            if s < m {
                m = s;
            }
            k += 1;
        }
        t[b] = (s, m);
        b += 1;
    }
    t
}

static BYTES: [(i8, i8); 256] = byte_table();

/// Duration in steps of one excursion of the reflected walk.
fn excursion_steps(max_steps: u64, rng: &mut Rng) -> f64 {
    let mut x: i64 = 1;
    let mut steps: u64 = 1;
    loop {
        let mut bits: u64 = rng.gen();
        for _ in 0..8 {
            let byte = (bits & 0xff) as usize;
            bits >>= 8;
            let (s, m) = BYTES[byte];
            if x + m as i64 > 0 {
                x += s as i64;
                steps += 8;
            } else {
                for k in 0..8 {
                    x += if (byte >> k) & 1 == 1 { 1 } else { -1 };
                    steps += 1;
                    if x == 0 {
                        return steps as f64;
                    }
                }
            }
        }
        if steps >= max_steps {
            let z: f64 = rng.sample(StandardNormal);
            return steps as f64 + (x * x) as f64 / (z * z);
        }
    }
}

pub fn thinned_excursion_area(cfg: &ThinningConfig) -> Result<Vec<ThinningEstimate>> {
    let coupling = SkewCoupling::new(cfg.gamma, cfg.theta)?;
    let a = lqg_params(cfg.gamma)?.a;
    if !(cfg.t > 0.0) || cfg.n_paths < 2 || cfg.excursions == 0 || cfg.max_excursion_steps < 8 {
        return Err(domain("thinning needs t > 0, n_paths >= 2, excursions >= 1, max_excursion_steps >= 8"));
    }
    if cfg.mus.iter().any(|m| !(*m >= 0.0)) {
        return Err(domain("Laplace variables must be nonnegative"));
    }
    let p = coupling.p;
    let ell = coupling.c * cfg.t / a;
    let h = ell / cfg.excursions as f64;
    let dt = h * h;
    let max_units = cfg.horizon.map(|hz| hz / dt);
    let areas = map_replicas(cfg.seed, cfg.n_paths, |_, rng| -> Result<(f64, f64)> {
        let (mut left, mut right) = (0.0, 0.0);
        for _ in 0..cfg.excursions {
            let len = excursion_steps(cfg.max_excursion_steps, rng);
            if rng.gen::<f64>() < p {
                left += len;
            } else {
                right += len;
            }
        }
        if let Some(m) = max_units {
            if left + right > m {
                return Err(Error::TargetNotReached { target: 2.0 * coupling.c * cfg.t, horizon: cfg.horizon.unwrap() });
            }
        }
        Ok((left * dt, right * dt))
    });
    let areas: Vec<(f64, f64)> = areas.into_iter().collect::<Result<_>>()?;
    let t1 = sample_t1_with(cfg.n_paths, &T1Config { dt: cfg.t1_dt, ..Default::default() }, cfg.seed ^ 0x5eed_0f71)?;
    let (sl, sr) = ((p * ell).powi(2), ((1.0 - p) * ell).powi(2));
    cfg.mus
        .iter()
        .map(|&mu| {
            let el: Vec<f64> = areas.iter().map(|(l, _)| (-mu * l).exp()).collect();
            let er: Vec<f64> = areas.iter().map(|(_, r)| (-mu * r).exp()).collect();
            let rl: Vec<f64> = t1.iter().map(|s| (-mu * sl * s).exp()).collect();
            let rr: Vec<f64> = t1.iter().map(|s| (-mu * sr * s).exp()).collect();
            let (exact_left, exact_right) = area_laplace(cfg.gamma, cfg.theta, mu * cfg.t * cfg.t)?;
            Ok(ThinningEstimate {
                mu,
                left: Summary::of(&el),
                right: Summary::of(&er),
                representation_left: Summary::of(&rl),
                representation_right: Summary::of(&rr),
                exact_left,
                exact_right,
                correlation: if mu == 0.0 { 0.0 } else { correlation(&el, &er) },
            })
        })
        .collect()
}
