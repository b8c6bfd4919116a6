//! Boundary Liouville structure constants: bar-R, bar-H, μ_B and the closed
//! form of H on the one-parameter family (Q + 3γ/2 − β, 2/γ, β).
//!
//! All double gamma factors use b = γ/2. Linear-scale functions are `exp` of
//! their `ln_*` counterparts, which never overflow.

use std::f64::consts::PI;

use serde::Serialize;

use super::double_gamma::{ln_gamma_b, POLE_GUARD};
use super::gamma::{gamma as gamma_fn, ln_gamma};
use super::quad::QuadratureConfig;
use super::SignedLog;
use crate::error::{check_gamma, domain, Error, Result};

/// Background charge Q = 2/γ + γ/2.
pub fn background_charge(gamma: f64) -> f64 {
    2.0 / gamma + 0.5 * gamma
}

/// Three boundary insertion sizes. β̄ is always recomputed from the parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InsertionTriple {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

/// The individual Seiberg inequalities for a given γ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeibergFlags {
    /// |β₁ − β₂| < β₃
    pub difference: bool,
    /// β̄ > γ
    pub sum_above_gamma: bool,
    /// βᵢ < Q
    pub below_q: [bool; 3],
}

impl SeibergFlags {
    /// Hypotheses of the boundary length law: β₁, β₂ < Q, |β₁−β₂| < β₃, β̄ > γ.
    pub fn length_law_ok(&self) -> bool {
        self.difference && self.sum_above_gamma && self.below_q[0] && self.below_q[1]
    }
}

impl InsertionTriple {
    pub fn new(beta1: f64, beta2: f64, beta3: f64) -> Self {
        InsertionTriple { beta1, beta2, beta3 }
    }

    pub fn beta_bar(&self) -> f64 {
        self.beta1 + self.beta2 + self.beta3
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.beta1, self.beta2, self.beta3]
    }

    pub fn swapped12(&self) -> Self {
        InsertionTriple::new(self.beta2, self.beta1, self.beta3)
    }

    pub fn seiberg(&self, gamma: f64) -> SeibergFlags {
        let q = background_charge(gamma);
        SeibergFlags {
            difference: (self.beta1 - self.beta2).abs() < self.beta3,
            sum_above_gamma: self.beta_bar() > gamma,
            below_q: self.as_array().map(|b| b < q),
        }
    }

    /// Error unless the boundary length law hypotheses hold.
    pub fn check_length_law(&self, gamma: f64) -> Result<()> {
        let f = self.seiberg(gamma);
        if f.length_law_ok() {
            Ok(())
        } else {
            Err(Error::Seiberg(format!("{self:?} at gamma = {gamma}: {f:?}")))
        }
    }
}

fn named<T>(r: Result<T>, name: &str) -> Result<T> {
    r.map_err(|e| match e {
        Error::Pole { distance, .. } => Error::Pole { factor: name.to_string(), distance },
        other => other,
    })
}

fn gb(gamma: f64, z: f64, name: &str, cfg: &QuadratureConfig) -> Result<SignedLog> {
    named(ln_gamma_b(0.5 * gamma, z, cfg), name)
}

fn ordinary(x: f64, name: &str) -> Result<SignedLog> {
    if x <= POLE_GUARD {
        let d = (x - x.round()).abs();
        if d < POLE_GUARD {
            return Err(Error::Pole { factor: name.to_string(), distance: d });
        }
    }
    let (l, s) = ln_gamma(x);
    Ok(SignedLog { ln_abs: l, sign: s })
}

/// ln of bar-R(β, μ, 0) with its sign; requires μ > 0.
pub fn ln_bar_r(gamma: f64, beta: f64, mu: f64, cfg: &QuadratureConfig) -> Result<SignedLog> {
    check_gamma(gamma)?;
    if !(mu > 0.0) {
        return Err(domain(format!("log-scale bar-R needs mu > 0, got {mu}")));
    }
    let q = background_charge(gamma);
    let d = q - beta;
    if d == 0.0 {
        return Err(Error::DivisionByZero("bar-R at beta = Q".into()));
    }
    let e = 2.0 * d / gamma;
    let lg = ln_gamma(1.0 - 0.25 * gamma * gamma).0;
    let pre = SignedLog {
        ln_abs: e * mu.ln() + (e - 0.5) * (2.0 * PI).ln() + (0.5 * gamma * d - 0.5) * (2.0 / gamma).ln()
            - d.abs().ln()
            - e * lg,
        sign: d.signum(),
    };
    let num = gb(gamma, beta - 0.5 * gamma, "Γ_{γ/2}(β−γ/2)", cfg)?;
    let den = gb(gamma, d, "Γ_{γ/2}(Q−β)", cfg)?;
    Ok(pre * num / den)
}

/// bar-R(β, μ, 0) = bar-R(β, 0, μ).
pub fn bar_r(gamma: f64, beta: f64, mu: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if mu < 0.0 || mu.is_nan() {
        return Err(domain(format!("bar-R needs mu >= 0, got {mu}")));
    }
    if mu == 0.0 {
        check_gamma(gamma)?;
        let e = 2.0 * (background_charge(gamma) - beta) / gamma;
        // the only μ-dependence is μ^e
        return if e > 0.0 {
            Ok(0.0)
        } else {
            Err(domain(format!("bar-R diverges at mu = 0 (exponent {e})")))
        };
    }
    Ok(ln_bar_r(gamma, beta, mu, cfg)?.value())
}

/// ln of bar-H^{(β₁,β₂,β₃)}_{(0,1,0)} with its sign.
pub fn ln_bar_h(gamma: f64, betas: &InsertionTriple, cfg: &QuadratureConfig) -> Result<SignedLog> {
    check_gamma(gamma)?;
    let q = background_charge(gamma);
    let (b1, b2, b3) = (betas.beta1, betas.beta2, betas.beta3);
    let bb = betas.beta_bar();
    let lg = ln_gamma(1.0 - 0.25 * gamma * gamma).0;
    let pre = SignedLog {
        ln_abs: (2.0 * q - bb + gamma) / gamma * (2.0 * PI).ln()
            + ((0.5 * gamma - 2.0 / gamma) * (q - 0.5 * bb) - 1.0) * (2.0 / gamma).ln()
            - (2.0 * q - bb) / gamma * lg,
        sign: 1.0,
    };
    let g_bb = ordinary((bb - 2.0 * q) / gamma, "Γ((β̄−2Q)/γ)")?;
    let mut v = pre / g_bb;
    v = v * gb(gamma, 0.5 * bb - q, "Γ_{γ/2}(β̄/2−Q)", cfg)?;
    v = v * gb(gamma, 0.5 * (bb - 2.0 * b2), "Γ_{γ/2}((β̄−2β₂)/2)", cfg)?;
    v = v * gb(gamma, 0.5 * (bb - 2.0 * b1), "Γ_{γ/2}((β̄−2β₁)/2)", cfg)?;
    v = v * gb(gamma, q - 0.5 * (bb - 2.0 * b3), "Γ_{γ/2}(Q−(β̄−2β₃)/2)", cfg)?;
    v = v / gb(gamma, q, "Γ_{γ/2}(Q)", cfg)?;
    v = v / gb(gamma, q - b1, "Γ_{γ/2}(Q−β₁)", cfg)?;
    v = v / gb(gamma, q - b2, "Γ_{γ/2}(Q−β₂)", cfg)?;
    v = v / gb(gamma, b3, "Γ_{γ/2}(β₃)", cfg)?;
    Ok(v)
}

/// bar-H^{(β₁,β₂,β₃)}_{(0,1,0)} evaluated factor by factor from double gamma values.
pub fn bar_h(gamma: f64, betas: &InsertionTriple, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(ln_bar_h(gamma, betas, cfg)?.value())
}

/// bar-H on the family (β, Q + 3γ/2 − β, 2/γ) after cancelling the double
/// gamma ratios: Γ(1−γ²/4)² / (Γ(γ/2 (Q−β)) Γ(γ/2 (Q−β̃))).
pub fn bar_h_reduced(gamma: f64, beta: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let q = background_charge(gamma);
    if !(beta > 1.5 * gamma && beta < q + 0.5 * gamma) || beta == q {
        return Err(domain(format!("beta = {beta} outside (3γ/2, Q+γ/2) minus {{Q}} for gamma = {gamma}")));
    }
    let beta_t = q + 1.5 * gamma - beta;
    let g = gamma_fn(1.0 - 0.25 * gamma * gamma);
    Ok(g * g / (gamma_fn(0.5 * gamma * (q - beta)) * gamma_fn(0.5 * gamma * (q - beta_t))))
}

/// μ_B(σ) = sin(πγ²/4)^{−1/2} cos(πγ(σ − Q/2)).
pub fn mu_b(gamma: f64, sigma: f64) -> f64 {
    let q = background_charge(gamma);
    (PI * gamma * (sigma - 0.5 * q)).cos() / (PI * gamma * gamma / 4.0).sin().sqrt()
}

fn h_special_args(gamma: f64, beta: f64) -> Result<[f64; 4]> {
    check_gamma(gamma)?;
    let q = background_charge(gamma);
    if !(beta > gamma && beta < q) {
        return Err(domain(format!("beta = {beta} outside (gamma, Q) = ({gamma}, {q})")));
    }
    let h = 0.5 * gamma;
    let args = [h * (q + h - beta), h * (beta - gamma), h * (q - beta), h * (beta - 1.5 * gamma)];
    let names = ["Γ(γ/2(Q+γ/2−β))", "Γ(γ/2(β−γ))", "Γ(γ/2(Q−β))", "Γ(γ/2(β−3γ/2))"];
    for (x, name) in args.iter().zip(names) {
        ordinary(*x, name)?;
    }
    Ok(args)
}

fn h_special_prefactor(gamma: f64) -> f64 {
    2.0 / (gamma * PI) * (PI * gamma * gamma / 4.0).sin().sqrt()
}

/// H^{(Q+3γ/2−β, 2/γ, β)}_{(0,0,0)} for β ∈ (γ, Q), from products of Γ.
pub fn h_special(gamma: f64, beta: f64) -> Result<f64> {
    let [a, b, c, d] = h_special_args(gamma, beta)?;
    let g = gamma_fn(1.0 - 0.25 * gamma * gamma);
    Ok(h_special_prefactor(gamma) * g * g * gamma_fn(a) * gamma_fn(b) / (gamma_fn(c) * gamma_fn(d)))
}

/// Same value as [`h_special`], accumulated through ln Γ throughout.
pub fn h_special_log(gamma: f64, beta: f64) -> Result<f64> {
    let [a, b, c, d] = h_special_args(gamma, beta)?;
    let mut v = SignedLog::from_value(h_special_prefactor(gamma));
    let lg = ln_gamma(1.0 - 0.25 * gamma * gamma).0;
    v.ln_abs += 2.0 * lg;
    for (x, up) in [(a, true), (b, true), (c, false), (d, false)] {
        let (l, s) = ln_gamma(x);
        let f = SignedLog { ln_abs: l, sign: s };
        v = if up { v * f } else { v / f };
    }
    Ok(v.value())
}

/// Π(Q−βᵢ)^{−1} · H: the quantum-triangle Laplace transform QT[e^{−A−Σμᵢ Lᵢ}].
pub fn qt_laplace_from_h(gamma: f64, betas: &InsertionTriple, h_value: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let q = background_charge(gamma);
    let mut prod = 1.0;
    for b in betas.as_array() {
        let d = q - b;
        if d.abs() <= 4.0 * f64::EPSILON * q {
            return Err(Error::DivisionByZero(format!("beta = {b} equals Q")));
        }
        prod *= d;
    }
    Ok(h_value / prod)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn family(gamma: f64, beta: f64) -> InsertionTriple {
        let q = background_charge(gamma);
        InsertionTriple::new(beta, q + 1.5 * gamma - beta, 2.0 / gamma)
    }

    // References below come from a 40-digit mpmath evaluation of the double
    // gamma integral, independent of this crate.
    #[test]
    fn bar_h_frozen_values() {
        let v = bar_h(1.0, &InsertionTriple::new(2.0, 2.0, 2.0), &cfg()).unwrap();
        assert!((v / 0.114_236_645_261_115_90 - 1.0).abs() < 1e-10);
        let v = bar_h(0.8, &family(0.8, 2.6), &cfg()).unwrap();
        assert!((v / 0.100_804_434_777_628_58 - 1.0).abs() < 1e-9);
        // beta > Q: Γ_b at a negative argument, negative value
        let v = bar_h(1.4, &family(1.4, 2.4), &cfg()).unwrap();
        assert!((v / -0.114_205_732_208_239_18 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reduced_known_point() {
        let g = gamma_fn(0.75) / gamma_fn(0.25);
        assert!((bar_h_reduced(1.0, 2.0).unwrap() - g * g).abs() < 1e-15);
        let a = bar_h_reduced(1.0, 1.7).unwrap();
        let b = bar_h_reduced(1.0, 2.5 + 1.5 - 1.7).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert!(bar_h_reduced(1.0, 1.4).is_err());
        assert!(bar_h_reduced(1.0, 2.5).is_err());
    }

    #[test]
    fn direct_equals_reduced_on_family() {
        let v = bar_h(1.0, &InsertionTriple::new(2.3, 1.7, 2.0), &cfg()).unwrap();
        assert!((v / bar_h_reduced(1.0, 2.3).unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn bar_h_swap_symmetry_is_exact() {
        let a = bar_h(1.0, &InsertionTriple::new(2.1, 1.9, 2.0), &cfg()).unwrap();
        let b = bar_h(1.0, &InsertionTriple::new(1.9, 2.1, 2.0), &cfg()).unwrap();
        assert!((a / b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bar_h_pole_is_named() {
        // β₃ = 0 puts Γ_{γ/2}(β₃) on its pole
        match bar_h(1.0, &InsertionTriple::new(2.0, 2.0, 0.0), &cfg()) {
            Err(Error::Pole { factor, .. }) => assert!(factor.contains("β")),
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn bar_r_mu_power_and_zero() {
        let (g, b) = (1.0, 2.2);
        let r1 = bar_r(g, b, 1.0, &cfg()).unwrap();
        let r4 = bar_r(g, b, 4.0, &cfg()).unwrap();
        assert!(r1 > 0.0);
        assert!((r4 / r1 / 4f64.powf(2.0 * (2.5 - b) / g) - 1.0).abs() < 1e-10);
        assert_eq!(bar_r(g, b, 0.0, &cfg()).unwrap(), 0.0);
        assert!(bar_r(g, b, -1.0, &cfg()).is_err());
    }

    #[test]
    fn bar_r_term_by_term() {
        let (g, b) = (1.2, 2.0);
        let q = background_charge(g);
        let d = q - b;
        let e = 2.0 * d / g;
        let c = cfg();
        let manual = (2.0 * PI).powf(e - 0.5) * (2.0 / g).powf(g * d / 2.0 - 0.5)
            / (d * gamma_fn(1.0 - g * g / 4.0).powf(e))
            * crate::specfun::gamma_b(0.6, b - 0.6, &c).unwrap()
            / crate::specfun::gamma_b(0.6, d, &c).unwrap();
        assert!((bar_r(g, b, 1.0, &c).unwrap() / manual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mu_b_values() {
        let g = 1.3;
        let q = background_charge(g);
        let s = (PI * g * g / 4.0).sin();
        assert!((mu_b(g, q / 2.0) - s.powf(-0.5)).abs() < 1e-15);
        assert!(mu_b(g, -1.0 / (2.0 * g) + q / 2.0).abs() < 1e-15);
        let v = mu_b(1.0, 1.25 + 0.1);
        assert!((v - (PI / 4.0).sin().powf(-0.5) * (0.1 * PI).cos()).abs() < 1e-15);
    }

    #[test]
    fn h_special_values() {
        assert!((h_special(1.0, 2.0).unwrap() / 0.192_122_370_981_365_21 - 1.0).abs() < 1e-13);
        let a = h_special(0.8, 1.5).unwrap();
        assert!((a / 0.227_013_695_191_549_37 - 1.0).abs() < 1e-13);
        assert!((a / h_special_log(0.8, 1.5).unwrap() - 1.0).abs() < 1e-10);
        assert!(h_special(1.0, 2.6).is_err());
        assert!(h_special(1.0, 0.9).is_err());
        assert!(matches!(h_special(1.0, 1.5), Err(Error::Pole { .. })));
    }

    #[test]
    fn h_special_vanishes_at_q() {
        let mut last = f64::INFINITY;
        for k in 1..8 {
            let v = h_special(1.0, 2.5 - 10f64.powi(-k)).unwrap();
            assert!(v.abs() < last);
            last = v.abs();
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn qt_laplace_prefactor() {
        let t = family(1.0, 2.0);
        assert_eq!(qt_laplace_from_h(1.0, &t, 0.0).unwrap(), 0.0);
        let h = h_special(1.0, 2.0).unwrap();
        let v = qt_laplace_from_h(1.0, &t, h).unwrap();
        let prod: f64 = t.as_array().iter().map(|b| 2.5 - b).product();
        assert!((v - h / prod).abs() < 1e-15);
        // exactly one factor negative: β₁ > Q
        let s = qt_laplace_from_h(1.0, &InsertionTriple::new(2.8, 2.0, 2.0), 1.0).unwrap();
        assert!(s < 0.0);
        assert!(qt_laplace_from_h(1.0, &InsertionTriple::new(2.5, 2.0, 2.0), 1.0).is_err());
    }

    #[test]
    fn seiberg_flags() {
        let t = InsertionTriple::new(2.0, 2.0, 2.0);
        let f = t.seiberg(1.0);
        assert!(f.length_law_ok());
        let bad = InsertionTriple::new(2.4, 1.0, 1.0).seiberg(1.0);
        assert!(!bad.difference);
        assert!(InsertionTriple::new(2.6, 2.0, 2.0).check_length_law(1.0).is_err());
        assert_eq!(t.beta_bar(), 6.0);
    }
}
