use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// `|t|` at or beyond this is treated as outside the support, which keeps
/// `exp(1/(t^2 - 1))` away from overflow.
const EDGE: f64 = 1.0 - 1e-12;

/// Quadrature tolerance for the normalization integral.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// `chi(t) = D exp(1/(t^2 - 1))` on `|t| < 1`, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffFunction {
    pub d: f64,
}

/// `exp(1/(t^2-1))`.
pub fn bump(t: f64) -> f64 {
    if t.abs() >= EDGE {
        0.0
    } else {
        (1.0 / (t * t - 1.0)).exp()
    }
}

/// Derivative of [`bump`].
pub fn bump_derivative(t: f64) -> f64 {
    if t.abs() >= EDGE {
        return 0.0;
    }
    let s = t * t - 1.0;
    (1.0 / s).exp() * (-2.0 * t / (s * s))
}

impl CutoffFunction {
    /// Chooses `D` so that `int_0^1 |chi'(t)|^2 dt = 1`.
    pub fn normalize() -> Result<Self> {
        let i = adaptive_simpson(|t| bump_derivative(t).powi(2), 0.0, 1.0, NORMALIZATION_TOL)?;
        if !(i.is_finite() && i > 0.0) {
            return Err(Error::Numeric(format!("normalization integral {i}")));
        }
        let chi = CutoffFunction { d: i.powf(-0.5) };
        if chi.at_zero() <= 0.5 {
            return Err(Error::Numeric(format!(
                "chi(0) = {} is not above 1/2",
                chi.at_zero()
            )));
        }
        Ok(chi)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.d * bump(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.d * bump_derivative(t)
    }

    /// `chi(0) = D / e`.
    pub fn at_zero(&self) -> f64 {
        self.d * (-1.0f64).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_and_center() {
        let chi = CutoffFunction::normalize().unwrap();
        assert_eq!(chi.eval(1.0), 0.0);
        assert_eq!(chi.eval(-1.0), 0.0);
        assert_eq!(chi.eval(3.0), 0.0);
        assert_eq!(chi.eval(0.0), chi.d * (-1.0f64).exp());
        assert_eq!(chi.eval(0.3), chi.eval(-0.3));
        assert!(chi.at_zero() > 0.5);
    }

    #[test]
    fn normalization_holds() {
        let chi = CutoffFunction::normalize().unwrap();
        let energy = adaptive_simpson(|t| chi.derivative(t).powi(2), 0.0, 1.0, 1e-12).unwrap();
        assert!((energy - 1.0).abs() < 1e-8);
    }
}
