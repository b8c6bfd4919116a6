use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::{config::SleConfig, Side};
use crate::error::{Error, Result};
use crate::rng::{map_replicas, stream, Rng};

/// Substep safety factor for the drift term.
const ETA: f64 = 0.05;
/// Smallest substep, relative to dt.
const SUBSTEP_FLOOR: f64 = 1e-13;

/// W, the force-point images on each side (nearest first) and their weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrivingState {
    pub t: f64,
    pub w: f64,
    pub left: Vec<f64>,
    pub left_rho: Vec<f64>,
    pub right: Vec<f64>,
    pub right_rho: Vec<f64>,
    /// Number of original force points absorbed into another one so far.
    pub absorbed: usize,
    pub threshold_hit: bool,
    pub threshold_time: Option<f64>,
    /// Side and cumulative weight of the collision that reached the threshold.
    pub fired: Option<(Side, f64)>,
}

impl DrivingState {
    fn gap(&self) -> f64 {
        let l = self.left.first().map_or(f64::INFINITY, |v| self.w - v);
        let r = self.right.first().map_or(f64::INFINITY, |v| v - self.w);
        l.min(r)
    }

    fn drift(&self) -> f64 {
        let l: f64 = self.left.iter().zip(&self.left_rho).map(|(v, r)| r / (self.w - v)).sum();
        let r: f64 = self.right.iter().zip(&self.right_rho).map(|(v, r)| r / (self.w - v)).sum();
        l + r
    }

    /// Handles the points within `tol` of W (or past it) on one side.
    fn collide(&mut self, side: Side, tol: f64) {
        let w = self.w;
        let (pts, rho) = match side {
            Side::Left => (&mut self.left, &mut self.left_rho),
            Side::Right => (&mut self.right, &mut self.right_rho),
        };
        let hit = pts.iter().take_while(|&&v| (w - v).abs() <= tol || (side == Side::Left) == (v > w)).count();
        if hit == 0 {
            return;
        }
        let mut cum = 0.0;
        for r in &rho[..hit] {
            cum += r;
            if cum <= -2.0 {
                self.threshold_hit = true;
                self.threshold_time = Some(self.t);
                self.fired = Some((side, cum));
                return;
            }
        }
        let at = match side {
            Side::Left => w - tol,
            Side::Right => w + tol,
        };
        pts.splice(..hit, [at]);
        rho.splice(..hit, [cum]);
        self.absorbed += hit - 1;
    }

    fn collisions(&mut self, tol: f64) {
        self.collide(Side::Left, tol);
        if !self.threshold_hit {
            self.collide(Side::Right, tol);
        }
    }
}

/// State at t = 0, with collisions already present at the start resolved.
pub fn initial_state(cfg: &SleConfig) -> Result<DrivingState> {
    cfg.validate()?;
    let tol = cfg.collision_tol;
    let side = |s: Side| -> (Vec<f64>, Vec<f64>) {
        cfg.force_points.iter().filter(|p| p.side == s).map(|p| (p.start(tol), p.rho)).unzip()
    };
    let (left, left_rho) = side(Side::Left);
    let (right, right_rho) = side(Side::Right);
    let mut st = DrivingState {
        t: 0.0,
        w: 0.0,
        left,
        left_rho,
        right,
        right_rho,
        absorbed: 0,
        threshold_hit: false,
        threshold_time: None,
        fired: None,
    };
    st.collisions(tol);
    Ok(st)
}

/// One step of length `cfg.dt` with Brownian increment `db`.
///
/// Near a force point the step is split so that no substep moves W by more
/// than a quarter of its distance to the nearest point; the increment is
/// spread linearly over the substeps.
pub fn advance_driving(state: &DrivingState, cfg: &SleConfig, db: f64) -> Result<DrivingState> {
    let mut st = state.clone();
    if st.threshold_hit {
        return Ok(st);
    }
    let sk = cfg.kappa.sqrt();
    let total_rho: f64 = st.left_rho.iter().chain(&st.right_rho).map(|r| r.abs()).sum();
    let stiffness = total_rho + 2.0 + cfg.kappa;
    let mut left = cfg.dt;
    while left > 0.0 {
        let gap = st.gap();
        let mut h = left.min(ETA * gap * gap / stiffness);
        if db != 0.0 {
            h = h.min(gap * cfg.dt / (4.0 * sk * db.abs()));
        }
        if h < SUBSTEP_FLOOR * cfg.dt && h < left {
            return Err(Error::StepUnderflow { t: st.t, gap });
        }
        let dw = sk * db * h / cfg.dt + st.drift() * h;
        let w = st.w;
        for v in st.left.iter_mut().chain(st.right.iter_mut()) {
            *v += 2.0 / (*v - w) * h;
        }
        st.w += dw;
        st.t += h;
        left -= h;
        // keep each side ordered after a coarse substep
        for i in 1..st.left.len() {
            st.left[i] = st.left[i].min(st.left[i - 1]);
        }
        for i in 1..st.right.len() {
            st.right[i] = st.right[i].max(st.right[i - 1]);
        }
        st.collisions(cfg.collision_tol);
        if st.threshold_hit {
            break;
        }
    }
    Ok(st)
}

/// Result of a run: the threshold time, or None if the horizon came first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdOutcome {
    pub threshold_time: Option<f64>,
    pub fired: Option<(Side, f64)>,
    pub state: DrivingState,
}

pub fn run_until_threshold_with(cfg: &SleConfig, rng: &mut Rng) -> Result<ThresholdOutcome> {
    let mut st = initial_state(cfg)?;
    let sd = cfg.dt.sqrt();
    while !st.threshold_hit && st.t < cfg.horizon {
        let z: f64 = StandardNormal.sample(rng);
        st = advance_driving(&st, cfg, sd * z)?;
    }
    Ok(ThresholdOutcome { threshold_time: st.threshold_time, fired: st.fired, state: st })
}

/// One path from stream 0 of `cfg.seed`.
pub fn run_until_threshold(cfg: &SleConfig) -> Result<ThresholdOutcome> {
    run_until_threshold_with(cfg, &mut stream(cfg.seed, 0))
}

/// `n` independent paths, path i on stream i of `cfg.seed`.
pub fn run_threshold_paths(cfg: &SleConfig, n: usize) -> Result<Vec<ThresholdOutcome>> {
    cfg.validate()?;
    map_replicas(cfg.seed, n, |_, rng| run_until_threshold_with(cfg, rng)).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sle::{ForcePoint, Location};
    use crate::stats::Summary;

    fn cfg(points: Vec<ForcePoint>, kappa: f64) -> SleConfig {
        SleConfig { dt: 1e-3, horizon: 1.0, ..SleConfig::new(kappa, points) }
    }

    #[test]
    fn free_driving_variance() {
        let c = cfg(vec![], 3.0);
        let w: Vec<f64> = map_replicas(1, 4_000, |_, rng| run_until_threshold_with(&c, rng).unwrap().state.w);
        let s = Summary::of(&w.iter().map(|x| x * x).collect::<Vec<_>>());
        assert!(s.z_score(3.0).abs() < 3.5, "{s:?}");
    }

    #[test]
    fn positive_weight_repels() {
        let pts = |r| vec![ForcePoint::new(Location::At(0.5), r, Side::Right)];
        let gap = |r| {
            let c = cfg(pts(r), 2.0);
            let g: Vec<f64> = map_replicas(2, 500, |_, rng| {
                let s = run_until_threshold_with(&c, rng).unwrap().state;
                s.right[0] - s.w
            });
            Summary::of(&g)
        };
        let (plus, zero) = (gap(2.0), gap(0.0));
        assert!(plus.mean - zero.mean > 5.0 * plus.stderr.hypot(zero.stderr), "{plus:?} {zero:?}");
    }

    #[test]
    fn ordering_is_preserved() {
        let mut c = SleConfig::weld_zero(1.4, 0.6);
        c.horizon = 2.0;
        c.dt = 1e-2;
        c.collision_tol = 1e-4;
        map_replicas(3, 1_000, |_, rng| {
            let mut st = initial_state(&c).unwrap();
            while !st.threshold_hit && st.t < c.horizon {
                let z: f64 = StandardNormal.sample(rng);
                st = advance_driving(&st, &c, 0.1 * z).unwrap();
                let l = st.left.iter().rev().chain([&st.w]).chain(&st.right).copied().collect::<Vec<_>>();
                assert!(l.windows(2).all(|p| p[0] <= p[1]), "{st:?}");
            }
        });
    }

    #[test]
    fn threshold_at_start() {
        let c = cfg(vec![ForcePoint::new(Location::ZeroPlus, -2.0, Side::Right)], 2.0);
        let o = run_until_threshold(&c).unwrap();
        assert_eq!(o.threshold_time, Some(0.0));
        assert_eq!(o.fired, Some((Side::Right, -2.0)));
    }

    #[test]
    fn zero_weights_never_fire() {
        let c = cfg(
            vec![
                ForcePoint::new(Location::ZeroMinus, 0.0, Side::Left),
                ForcePoint::new(Location::ZeroPlus, 0.0, Side::Right),
            ],
            4.0,
        );
        let hits = run_threshold_paths(&c, 50).unwrap();
        assert!(hits.iter().all(|o| o.threshold_time.is_none()));
    }

    #[test]
    fn merged_point_matches_single_point() {
        let tol = 1e-6;
        let two = SleConfig {
            collision_tol: tol,
            ..cfg(
                vec![
                    ForcePoint::new(Location::ZeroPlus, 0.3, Side::Right),
                    ForcePoint::new(Location::At(0.5 * tol), 0.4, Side::Right),
                ],
                2.0,
            )
        };
        let one = SleConfig { force_points: vec![ForcePoint::new(Location::ZeroPlus, 0.7, Side::Right)], ..two.clone() };
        let (mut a, mut b) = (initial_state(&two).unwrap(), initial_state(&one).unwrap());
        assert_eq!(a.absorbed, 1);
        let mut rng = stream(4, 0);
        for _ in 0..500 {
            let z: f64 = StandardNormal.sample(&mut rng);
            let db = 0.03 * z;
            a = advance_driving(&a, &two, db).unwrap();
            b = advance_driving(&b, &one, db).unwrap();
            assert_eq!((a.w, &a.right), (b.w, &b.right));
        }
    }

    #[test]
    fn threshold_time_stable_under_dt_halving() {
        let mut c = SleConfig::weld_zero(1.4, 0.6);
        c.horizon = 5.0;
        c.collision_tol = 1e-4;
        let frac = |dt: f64, seed: u64| {
            let c = SleConfig { dt, seed, ..c.clone() };
            let h: Vec<f64> = run_threshold_paths(&c, 300)
                .unwrap()
                .iter()
                .map(|o| if o.threshold_time.is_some() { 1.0 } else { 0.0 })
                .collect();
            Summary::of(&h)
        };
        let (a, b) = (frac(2e-3, 5), frac(1e-3, 6));
        assert!((a.mean - b.mean).abs() < 3.5 * a.stderr.hypot(b.stderr).max(0.01), "{a:?} {b:?}");
    }
}
