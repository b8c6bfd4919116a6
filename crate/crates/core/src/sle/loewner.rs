use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use super::config::SleConfig;
use super::driving::{advance_driving, initial_state};
use crate::error::{domain, Error, Result};
use crate::rng::stream;

/// g_t(z) from the Loewner equation ∂g = 2/(g − W), integrated along the
/// driving path of stream 0 of `seed`, with W linear inside each step.
/// Meant for |z| large compared with the hull (|z| ≥ 20√t).
pub fn forward_map_far_field(cfg: &SleConfig, z: Complex64, t: f64, seed: u64) -> Result<Complex64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(domain(format!("time {t} must be nonnegative")));
    }
    let mut st = initial_state(cfg)?;
    let mut rng = stream(seed, 0);
    let mut g = z;
    let n = (t / cfg.dt).ceil() as usize;
    if n == 0 {
        return Ok(z);
    }
    let step = SleConfig { dt: t / n as f64, ..cfg.clone() };
    let sd = step.dt.sqrt();
    for _ in 0..n {
        if st.threshold_hit {
            return Err(domain(format!("driving function reached its threshold at t = {}", st.t)));
        }
        let w0 = st.w;
        let dbv: f64 = StandardNormal.sample(&mut rng);
        st = advance_driving(&st, &step, sd * dbv)?;
        g = loewner_step(g, w0, st.w, st.t - step.dt, step.dt, cfg.collision_tol)?;
    }
    Ok(g)
}

/// Advances g over [t0, t0 + dt] with W linear from w0 to w1, splitting the
/// step so that no midpoint substep moves g by more than a fraction of |g − W|.
fn loewner_step(mut g: Complex64, w0: f64, w1: f64, t0: f64, dt: f64, tol: f64) -> Result<Complex64> {
    let mut s = 0.0;
    while s < dt {
        let w = w0 + (w1 - w0) * s / dt;
        let d = g - w;
        if d.norm() < 1e3 * tol || d.im <= 0.0 {
            return Err(Error::BlowUp { t: t0 + s, gap: d.norm() });
        }
        let h = (dt - s).min(0.05 * d.norm_sqr());
        if h < 1e-13 * dt {
            return Err(Error::BlowUp { t: t0 + s, gap: d.norm() });
        }
        let wm = w0 + (w1 - w0) * (s + 0.5 * h) / dt;
        let half = g + d.inv() * h;
        g += 2.0 * (half - wm).inv() * h;
        s += h;
    }
    Ok(g)
}
