//! Special functions: Γ, Γ_b, and the boundary Liouville constants built on them.

pub mod double_gamma;
pub mod gamma;
pub mod liouville;
pub mod quad;

pub use double_gamma::{gamma_b, ln_gamma_b, pole_distance, shift_residual, POLE_GUARD};
pub use gamma::{gamma, ln_gamma, reflection_residual};
pub use liouville::*;
pub use quad::QuadratureConfig;

use serde::Serialize;

/// A real number stored as `sign · exp(ln_abs)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignedLog {
    pub ln_abs: f64,
    pub sign: f64,
}

impl SignedLog {
    pub const ONE: SignedLog = SignedLog { ln_abs: 0.0, sign: 1.0 };
    pub const ZERO: SignedLog = SignedLog { ln_abs: f64::NEG_INFINITY, sign: 1.0 };

    pub fn from_value(x: f64) -> SignedLog {
        SignedLog { ln_abs: x.abs().ln(), sign: if x < 0.0 { -1.0 } else { 1.0 } }
    }

    pub fn value(self) -> f64 {
        self.sign * self.ln_abs.exp()
    }

    pub fn powf(self, e: f64) -> SignedLog {
        debug_assert!(self.sign > 0.0);
        SignedLog { ln_abs: self.ln_abs * e, sign: 1.0 }
    }
}

impl std::ops::Mul for SignedLog {
    type Output = SignedLog;
    fn mul(self, o: SignedLog) -> SignedLog {
        SignedLog { ln_abs: self.ln_abs + o.ln_abs, sign: self.sign * o.sign }
    }
}

impl std::ops::Div for SignedLog {
    type Output = SignedLog;
    fn div(self, o: SignedLog) -> SignedLog {
        SignedLog { ln_abs: self.ln_abs - o.ln_abs, sign: self.sign * o.sign }
    }
}
