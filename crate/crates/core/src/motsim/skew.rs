use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::walk::CorrelatedPath;
use crate::error::{domain, Error, Result};
use crate::rng::{stream, Rng};

/// Euler scheme for skew Brownian motion with excursion-sign resampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkewConfig {
    /// Probability that an excursion is positive.
    pub p: f64,
    pub n_steps: usize,
    pub dt: f64,
    /// ε of the local-time estimator; `None` means 2√dt.
    pub zero_band: Option<f64>,
    pub seed: u64,
}

impl SkewConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(domain(format!("skew probability {} outside (0, 1)", self.p)));
        }
        if self.n_steps == 0 || !(self.dt > 0.0) {
            return Err(domain("skew walk needs n_steps >= 1 and dt > 0"));
        }
        if let Some(e) = self.zero_band {
            if !(e > 0.0) {
                return Err(domain("zero band must be positive"));
            }
        }
        Ok(())
    }

    pub fn band(&self) -> f64 {
        self.zero_band.unwrap_or(2.0 * self.dt.sqrt())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkewPath {
    pub dt: f64,
    pub x: Vec<f64>,
    /// Symmetric local time (1/2ε)∫1{|X|≤ε}ds at each grid time.
    pub local_time: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkewTerminal {
    pub x: f64,
    pub local_time: f64,
}

struct SkewStepper {
    p: f64,
    sd: f64,
    lt_inc: f64,
    band: f64,
}

impl SkewStepper {
    fn new(cfg: &SkewConfig) -> Self {
        let band = cfg.band();
        SkewStepper { p: cfg.p, sd: cfg.dt.sqrt(), lt_inc: cfg.dt / (2.0 * band), band }
    }

    #[inline]
    fn step(&self, x: f64, rng: &mut Rng) -> f64 {
        let y = x + self.sd * rng.sample::<f64, _>(StandardNormal);
        // a touch or a crossing starts a new excursion with a fresh sign
        if x == 0.0 || y == 0.0 || (x > 0.0) != (y > 0.0) {
            if rng.gen::<f64>() < self.p {
                y.abs()
            } else {
                -y.abs()
            }
        } else {
            y
        }
    }
}

/// One skew-walk path with its local-time estimate, from stream 0 of `cfg.seed`.
pub fn sample_skew_walk(cfg: &SkewConfig) -> Result<SkewPath> {
    cfg.validate()?;
    let st = SkewStepper::new(cfg);
    let mut rng = stream(cfg.seed, 0);
    let mut x = Vec::with_capacity(cfg.n_steps + 1);
    let mut lt = Vec::with_capacity(cfg.n_steps + 1);
    let (mut cur, mut l) = (0.0f64, 0.0);
    x.push(cur);
    lt.push(l);
    for _ in 0..cfg.n_steps {
        if cur.abs() <= st.band {
            l += st.lt_inc;
        }
        cur = st.step(cur, &mut rng);
        x.push(cur);
        lt.push(l);
    }
    Ok(SkewPath { dt: cfg.dt, x, local_time: lt })
}

/// Terminal value and local time of one path, without storing it.
pub fn skew_terminal(cfg: &SkewConfig, rng: &mut Rng) -> Result<SkewTerminal> {
    cfg.validate()?;
    let st = SkewStepper::new(cfg);
    let (mut x, mut l) = (0.0f64, 0.0);
    for _ in 0..cfg.n_steps {
        if x.abs() <= st.band {
            l += st.lt_inc;
        }
        x = st.step(x, rng);
    }
    Ok(SkewTerminal { x, local_time: l })
}

/// One step of the coupled skew dynamics: `z + up` from z ≥ 0, `z − down` from
/// z < 0. A crossing rescales the overshoot by (1−q)/q (downward) or q/(1−q)
/// (upward), which is the exact step of V = (1−q)z⁺ − qz⁻, a process without a
/// local-time term. For q ∈ {0, 1} the walk is reflected at 0 instead.
#[inline]
pub fn coupled_step(z: f64, up: f64, down: f64, q: f64) -> f64 {
    if q >= 1.0 {
        return (if z >= 0.0 { z + up } else { z - down }).max(0.0);
    }
    if q <= 0.0 {
        return (z - down).min(0.0);
    }
    if z >= 0.0 {
        let c = z + up;
        if c >= 0.0 {
            c
        } else {
            c * (1.0 - q) / q
        }
    } else {
        let c = z - down;
        if c < 0.0 {
            c
        } else {
            c * q / (1.0 - q)
        }
    }
}

/// X driven by the walk: R-increments while X ≥ 0, negated L-increments while
/// X < 0, with skewness p at zero. X is a deterministic function of the walk.
pub fn sample_coupled_skew(walk: &CorrelatedPath, p: f64) -> Result<Vec<f64>> {
    if walk.l.len() != walk.r.len() {
        return Err(Error::LengthMismatch { expected: walk.l.len(), got: walk.r.len() });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(domain(format!("skew probability {p} outside [0, 1]")));
    }
    let mut out = Vec::with_capacity(walk.l.len());
    let mut x = 0.0;
    out.push(x);
    for i in 1..walk.l.len() {
        x = coupled_step(x, walk.r[i] - walk.r[i - 1], walk.l[i] - walk.l[i - 1], p);
        out.push(x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motsim::walk::{correlated_walk_from, WalkConfig};
    use crate::rng::map_replicas;
    use crate::stats::{ks_statistic, Summary};

    fn terminals(p: f64, n: usize, dt: f64, m: usize, seed: u64) -> Vec<SkewTerminal> {
        let cfg = SkewConfig { p, n_steps: n, dt, zero_band: None, seed };
        map_replicas(seed, m, |_, rng| skew_terminal(&cfg, rng).unwrap())
    }

    #[test]
    fn positive_fraction_is_p() {
        for &p in &[0.3, 0.7] {
            let t = terminals(p, 400, 1.0 / 400.0, 20_000, 3);
            let pos: Vec<f64> = t.iter().map(|s| (s.x > 0.0) as u8 as f64).collect();
            assert!(Summary::of(&pos).z_score(p).abs() < 3.0);
        }
    }

    #[test]
    fn symmetric_case_has_unit_variance() {
        let t = terminals(0.5, 400, 1.0 / 400.0, 20_000, 4);
        let sq: Vec<f64> = t.iter().map(|s| s.x * s.x).collect();
        assert!(Summary::of(&sq).z_score(1.0).abs() < 3.0);
    }

    #[test]
    fn modulus_is_reflected_brownian_motion() {
        let t = terminals(0.3, 400, 1.0 / 400.0, 5_000, 5);
        let a: Vec<f64> = t.iter().map(|s| s.x.abs()).collect();
        let d = ks_statistic(&a, |y| 2.0 * crate::stats::normal_cdf(y) - 1.0);
        assert!(d < 1.63 / (a.len() as f64).sqrt(), "KS = {d}");
    }

    #[test]
    fn local_time_mean_follows_tanaka() {
        // E[L_T] = E|X_T| = √(2T/π) for the symmetric local time at T = 1
        let t = terminals(0.5, 2_500, 1.0 / 2_500.0, 20_000, 6);
        let lt: Vec<f64> = t.iter().map(|s| s.local_time).collect();
        let s = Summary::of(&lt);
        let target = (2.0 / std::f64::consts::PI).sqrt();
        // ε-band discretization bias is O(√dt); allow 3%
        assert!((s.mean / target - 1.0).abs() < 0.03, "{s:?}");
    }

    #[test]
    fn brownian_scaling() {
        let a = terminals(0.3, 100, 0.01, 20_000, 7);
        let b = terminals(0.3, 400, 0.0025, 20_000, 8);
        let f = |v: &[SkewTerminal]| Summary::of(&v.iter().map(|s| s.x).collect::<Vec<_>>());
        let (sa, sb) = (f(&a), f(&b));
        let z = (sa.mean - sb.mean) / (sa.stderr.hypot(sb.stderr));
        assert!(z.abs() < 3.0, "{sa:?} {sb:?}");
    }

    #[test]
    fn path_and_terminal_agree() {
        let cfg = SkewConfig { p: 0.4, n_steps: 300, dt: 0.01, zero_band: Some(0.05), seed: 9 };
        let path = sample_skew_walk(&cfg).unwrap();
        let term = skew_terminal(&cfg, &mut stream(9, 0)).unwrap();
        assert_eq!(*path.x.last().unwrap(), term.x);
        assert_eq!(*path.local_time.last().unwrap(), term.local_time);
        assert!(path.local_time.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn coupled_positive_regime() {
        let n = 50;
        let walk = CorrelatedPath {
            dt: 0.1,
            l: (0..=n).map(|i| -(i as f64)).collect(),
            r: (0..=n).map(|i| i as f64 * 0.5).collect(),
        };
        let x = sample_coupled_skew(&walk, 0.3).unwrap();
        assert!(x[1..].iter().all(|&v| v > 0.0));
        let bad = CorrelatedPath { dt: 0.1, l: vec![0.0; 3], r: vec![0.0; 4] };
        assert!(matches!(sample_coupled_skew(&bad, 0.3), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn coupled_symmetric_variance() {
        let cfg = WalkConfig { n_steps: 200, dt: 0.005, rho: -0.5, seed: 10, variance_scale: 1.3 };
        let ends = map_replicas(10, 20_000, |_, rng| {
            let w = correlated_walk_from(&cfg, rng).unwrap();
            let x = sample_coupled_skew(&w, 0.5).unwrap();
            x[200] * x[200]
        });
        assert!(Summary::of(&ends).z_score(1.69).abs() < 3.0);
    }

    #[test]
    fn coupled_excursions_partition_time() {
        // every sign change of X is an excursion boundary; the pieces tile [0, n]
        let cfg = WalkConfig { n_steps: 1000, dt: 0.001, rho: 0.2, seed: 12, variance_scale: 1.0 };
        let w = crate::motsim::sample_correlated_walk(&cfg).unwrap();
        let x = sample_coupled_skew(&w, 0.6).unwrap();
        let mut bounds = vec![0usize];
        for i in 1..x.len() {
            if (x[i] >= 0.0) != (x[i - 1] >= 0.0) {
                bounds.push(i);
            }
        }
        bounds.push(x.len());
        let total: usize = bounds.windows(2).map(|b| b[1] - b[0]).sum();
        assert_eq!(total, x.len());
        for b in bounds.windows(2) {
            let s = x[b[0]] >= 0.0;
            assert!(x[b[0]..b[1]].iter().all(|&v| (v >= 0.0) == s));
        }
    }

    #[test]
    fn coupled_step_edge_probabilities() {
        assert_eq!(coupled_step(0.0, -1.0, 0.0, 1.0), 0.0);
        assert_eq!(coupled_step(0.5, 1.0, 0.0, 1.0), 1.5);
        assert_eq!(coupled_step(-0.5, 0.0, -1.0, 0.0), 0.0);
        // upward crossing with q = 1/2 keeps the overshoot
        assert_eq!(coupled_step(-0.5, 0.0, -1.0, 0.5), 0.5);
        assert!((coupled_step(0.1, -0.4, 0.0, 0.25) + 0.9).abs() < 1e-15);
    }
}
