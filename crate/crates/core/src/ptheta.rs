//! Closed-form relations between γ, the angle θ, the probabilities p and q,
//! the local-time constant c, wedge weights and insertion sizes.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{check_gamma, domain, Error, Result};
use crate::specfun::{
    background_charge, bar_h, h_special, InsertionTriple, QuadratureConfig,
};

/// Constants determined by γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LqgParams {
    pub gamma: f64,
    pub kappa: f64,
    pub kappa_prime: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    /// Imaginary-geometry χ = 2/√κ − √κ/2.
    pub chi_ig: f64,
    /// The same quantity for κ′, equal to −χ.
    pub chi_prime: f64,
    /// Mating-of-trees variance constant 𝐚 = √2 sin(πγ²/4)^{−1/2}.
    pub a: f64,
    /// Brownian correlation ρ = −cos(πγ²/4).
    pub rho: f64,
}

pub fn lqg_params(gamma: f64) -> Result<LqgParams> {
    check_gamma(gamma)?;
    let kappa = gamma * gamma;
    let kappa_prime = 16.0 / kappa;
    let chi = |k: f64| 2.0 / k.sqrt() - 0.5 * k.sqrt();
    let s = (PI * kappa / 4.0).sin();
    Ok(LqgParams {
        gamma,
        kappa,
        kappa_prime,
        q: background_charge(gamma),
        chi_ig: chi(kappa),
        chi_prime: chi(kappa_prime),
        a: 2f64.sqrt() / s.sqrt(),
        rho: -(PI * kappa / 4.0).cos(),
    })
}

/// Units for the Brownian pair (L, R) in simulators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum VarianceNormalization {
    /// Var L_t = 𝐚² t.
    Absolute,
    /// Var L_t = t.
    Unit,
    /// Var L_t = s² t for the given s.
    Custom(f64),
}

impl VarianceNormalization {
    /// The standard deviation scale s.
    pub fn scale(self, gamma: f64) -> Result<f64> {
        match self {
            VarianceNormalization::Absolute => Ok(lqg_params(gamma)?.a),
            VarianceNormalization::Unit => Ok(1.0),
            VarianceNormalization::Custom(s) if s > 0.0 && s.is_finite() => Ok(s),
            VarianceNormalization::Custom(s) => Err(domain(format!("variance scale {s} must be positive"))),
        }
    }
}

/// Inverse of ρ = −cos(πγ²/4).
pub fn gamma_from_rho(rho: f64) -> Result<f64> {
    if !(rho > -1.0 && rho < 1.0) {
        return Err(domain(format!("rho = {rho} outside (-1, 1)")));
    }
    Ok((4.0 * (-rho).acos() / PI).sqrt())
}

fn a_gamma(gamma: f64) -> f64 {
    0.5 - gamma * gamma / 8.0
}

/// p_γ(θ) = s₁/(s₁+s₂) with s₁ = sin(a(π−2θ)), s₂ = sin(a(π+2θ)), a = 1/2 − γ²/8.
/// The endpoints θ = ±π/2 give 0 and 1.
pub fn p_of_theta(gamma: f64, theta: f64) -> f64 {
    let a = a_gamma(gamma);
    let s1 = (a * (PI - 2.0 * theta)).sin();
    let s2 = (a * (PI + 2.0 * theta)).sin();
    s1 / (s1 + s2)
}

/// c_γ(θ) = cos((1−γ²/4)θ) / sin(πγ²/8).
pub fn c_of_theta(gamma: f64, theta: f64) -> f64 {
    ((1.0 - gamma * gamma / 4.0) * theta).cos() / (PI * gamma * gamma / 8.0).sin()
}

fn dp_dtheta(gamma: f64, theta: f64) -> f64 {
    let a = a_gamma(gamma);
    let s1 = (a * (PI - 2.0 * theta)).sin();
    let s2 = (a * (PI + 2.0 * theta)).sin();
    let d1 = -2.0 * a * (a * (PI - 2.0 * theta)).cos();
    let d2 = 2.0 * a * (a * (PI + 2.0 * theta)).cos();
    (d1 * s2 - s1 * d2) / ((s1 + s2) * (s1 + s2))
}

/// θ with p_γ(θ) = p: bisection to width 1e−13, then one Newton step.
pub fn theta_of_p(gamma: f64, p: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(format!("p = {p} outside (0, 1)")));
    }
    let (mut lo, mut hi) = (-FRAC_PI_2, FRAC_PI_2);
    let mut iter = 0;
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        // p is decreasing in θ
        if p_of_theta(gamma, mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
        iter += 1;
        if iter > 200 {
            return Err(Error::RootNotFound(format!("theta_of_p({gamma}, {p})")));
        }
    }
    let mid = 0.5 * (lo + hi);
    let d = dp_dtheta(gamma, mid);
    let polished = mid - (p_of_theta(gamma, mid) - p) / d;
    Ok(if d != 0.0 && polished > lo - 1e-12 && polished < hi + 1e-12 { polished } else { mid })
}

/// (p·c, (1−p)·c) from their closed forms
/// sin(a(π∓2θ)) / sin(πγ²/4).
pub fn pc_products(gamma: f64, theta: f64) -> (f64, f64) {
    let a = a_gamma(gamma);
    let s = (PI * gamma * gamma / 4.0).sin();
    ((a * (PI - 2.0 * theta)).sin() / s, (a * (PI + 2.0 * theta)).sin() / s)
}

/// Wedge weights W^L = (1−γ²/4)(1−2θ/π) and W^R = (1−γ²/4)(1+2θ/π).
pub fn wedge_weights(gamma: f64, theta: f64) -> (f64, f64) {
    let base = 1.0 - gamma * gamma / 4.0;
    (base * (1.0 - 2.0 * theta / PI), base * (1.0 + 2.0 * theta / PI))
}

/// Expected inversion rate (π − 2θ)/(2π) of the skew Brownian permuton.
pub fn inversion_rate(theta: f64) -> f64 {
    (PI - 2.0 * theta) / (2.0 * PI)
}

/// Everything derived from one (γ, θ) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkewCoupling {
    pub gamma: f64,
    pub theta: f64,
    pub p: f64,
    pub c: f64,
    #[serde(rename = "wL")]
    pub w_l: f64,
    #[serde(rename = "wR")]
    pub w_r: f64,
    /// Permuton parameter, equal to p.
    pub q: f64,
    /// Brownian correlation, −cos(πγ²/4).
    pub rho: f64,
}

impl SkewCoupling {
    pub fn new(gamma: f64, theta: f64) -> Result<SkewCoupling> {
        let params = lqg_params(gamma)?;
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&theta) {
            return Err(domain(format!("theta = {theta} outside [-π/2, π/2]")));
        }
        let p = p_of_theta(gamma, theta);
        let (w_l, w_r) = wedge_weights(gamma, theta);
        Ok(SkewCoupling { gamma, theta, p, c: c_of_theta(gamma, theta), w_l, w_r, q: p, rho: params.rho })
    }
}

/// Insertion sizes attached to a weight W.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightBetaRecord {
    #[serde(rename = "W")]
    pub w: f64,
    pub beta: f64,
    pub beta_dual: f64,
    /// Δ_β = (β/2)(Q − β/2).
    pub delta: f64,
    /// W(β) = γ(γ + 2/γ − β), which recovers W.
    pub w_reflect: f64,
}

pub fn insertion_calculus(gamma: f64, w: f64) -> WeightBetaRecord {
    let q = background_charge(gamma);
    let beta = gamma + (2.0 - w) / gamma;
    WeightBetaRecord {
        w,
        beta,
        beta_dual: if beta <= q { beta } else { 2.0 * q - beta },
        delta: 0.5 * beta * (q - 0.5 * beta),
        w_reflect: gamma * (gamma + 2.0 / gamma - beta),
    }
}

fn admissible_beta(gamma: f64, w: f64) -> Result<f64> {
    let lo = gamma * gamma / 2.0;
    let hi = 2.0 - gamma * gamma / 2.0;
    if !(w > lo && w < hi) {
        return Err(domain(format!("weight {w} outside ({lo}, {hi}) for gamma = {gamma}")));
    }
    Ok(insertion_calculus(gamma, w).beta)
}

/// Which of the two wedge weights a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

/// One component of [`pc_via_lcft`]: p·c for [`Side::Left`], (1−p)·c for
/// [`Side::Right`].
pub fn pc_via_lcft_side(gamma: f64, theta: f64, side: Side, cfg: &QuadratureConfig) -> Result<f64> {
    check_gamma(gamma)?;
    let (w_l, w_r) = wedge_weights(gamma, theta);
    let w = match side {
        Side::Left => w_l,
        Side::Right => w_r,
    };
    let beta = admissible_beta(gamma, w)?;
    let q = background_charge(gamma);
    let triple = InsertionTriple::new(beta, q + 1.5 * gamma - beta, 2.0 / gamma);
    let pref = 2.0 / (gamma * (PI * gamma * gamma / 4.0).sin().sqrt());
    Ok(pref * bar_h(gamma, &triple, cfg)? / h_special(gamma, beta)?)
}

/// p·c and (1−p)·c recomputed from the structure constants:
/// (2/(γ√sin(πγ²/4))) · bar-H(β, β̃, 2/γ) / H(Q+3γ/2−β, 2/γ, β) at β = β^L, β^R.
///
/// This reorders the arguments of H_{(0,0,0)} assuming it is symmetric in
/// (β₁, β₂, β₃). Both weights must lie in (γ²/2, 2−γ²/2).
pub fn pc_via_lcft(gamma: f64, theta: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    Ok((
        pc_via_lcft_side(gamma, theta, Side::Left, cfg)?,
        pc_via_lcft_side(gamma, theta, Side::Right, cfg)?,
    ))
}

/// Exponent and prefactor of |QT(W₁,W₂,W₃; ℓ)| = prefactor · ℓ^exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthLaw {
    pub exponent: f64,
    pub prefactor: f64,
}

fn qt_betas(gamma: f64, w: [f64; 3]) -> InsertionTriple {
    let b = w.map(|wi| gamma + (2.0 - wi) / gamma);
    InsertionTriple::new(b[0], b[1], b[2])
}

/// Exponent (β̄−2Q)/γ − 1 of the boundary-length law, βᵢ = γ + (2−Wᵢ)/γ.
pub fn qt_length_exponent(gamma: f64, w1: f64, w2: f64, w3: f64) -> f64 {
    let t = qt_betas(gamma, [w1, w2, w3]);
    (t.beta_bar() - 2.0 * background_charge(gamma)) / gamma - 1.0
}

/// Boundary-length law of QT(W₁,W₂,W₃) along the arc between the W₁ and W₂
/// vertices. Arguments are used in the given order.
pub fn qt_length_law(gamma: f64, w1: f64, w2: f64, w3: f64, cfg: &QuadratureConfig) -> Result<LengthLaw> {
    check_gamma(gamma)?;
    let q = background_charge(gamma);
    let t = qt_betas(gamma, [w1, w2, w3]);
    let dual = t.as_array().map(|b| q - (b - q).abs());
    if !((dual[0] - dual[1]).abs() < dual[2] && dual.iter().sum::<f64>() > gamma) {
        return Err(Error::Seiberg(format!("weights ({w1}, {w2}, {w3}) at gamma = {gamma}")));
    }
    let mut prod = 1.0;
    for b in t.as_array() {
        if b == q {
            return Err(Error::DivisionByZero(format!("beta = Q for gamma = {gamma}")));
        }
        prod *= q - b;
    }
    let h = bar_h(gamma, &t, cfg)?;
    Ok(LengthLaw {
        exponent: qt_length_exponent(gamma, w1, w2, w3),
        prefactor: (2.0 / (gamma * prod) * h).abs(),
    })
}

/// Scaling exponent (γ² + 2 − ΣWᵢ)/γ² of QT under adding a constant to the field.
pub fn qt_scaling_exponent(gamma: f64, w1: f64, w2: f64, w3: f64) -> f64 {
    (gamma * gamma + 2.0 - (w1 + w2 + w3)) / (gamma * gamma)
}

/// Density (2/γ) bar-H ℓ^{(β̄−2Q)/γ−1} of the top-boundary length.
pub fn lf_length_density(gamma: f64, betas: &InsertionTriple, ell: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_gamma(gamma)?;
    betas.check_length_law(gamma)?;
    if !(ell > 0.0) {
        return Err(domain(format!("length {ell} must be positive")));
    }
    let q = background_charge(gamma);
    let e = (betas.beta_bar() - 2.0 * q) / gamma - 1.0;
    Ok(2.0 / gamma * bar_h(gamma, betas, cfg)? * ell.powf(e))
}

/// (E e^{−μA^L}, E e^{−μA^R}) = (exp(−a⁻¹cp√(2μ)), exp(−a⁻¹c(1−p)√(2μ))).
pub fn area_laplace(gamma: f64, theta: f64, mu: f64) -> Result<(f64, f64)> {
    let params = lqg_params(gamma)?;
    if !(mu >= 0.0) {
        return Err(domain(format!("mu = {mu} must be nonnegative")));
    }
    let (pc, qc) = pc_products(gamma, theta);
    let r = (2.0 * mu).sqrt() / params.a;
    Ok(((-pc * r).exp(), (-qc * r).exp()))
}
