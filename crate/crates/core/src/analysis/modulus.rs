use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// A concave modulus of continuity `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Modulus {
    /// `ω(ξ) = ξ/(1+4π√(ξ₀ξ))` on `[0, ξ₀]`, `C_{ξ₀}·ln ξ` above.
    Piecewise { xi0: f64, c_xi0: f64 },
    /// `ω(ξ) = ξ`, for tests.
    Linear,
}

impl Default for Modulus {
    fn default() -> Self {
        Modulus::piecewise(1e10).expect("valid default")
    }
}

/// Which quantity [`modulus_eval`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulusMode {
    Value,
    Derivative,
}

/// A positive number kept as its natural logarithm, for values beyond `f64`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogMagnitude {
    pub ln: f64,
}

impl LogMagnitude {
    pub fn from_value(x: f64) -> Self {
        Self { ln: x.ln() }
    }

    /// The value itself; `+∞` once it exceeds `f64::MAX`.
    pub fn value(&self) -> f64 {
        self.ln.exp()
    }

    pub fn log10(&self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }
}

impl Modulus {
    /// The piecewise modulus with `C_{ξ₀}` fixed by continuity at `ξ₀`.
    pub fn piecewise(xi0: f64) -> Result<Self> {
        if !(xi0.is_finite() && xi0 > 1.0) {
            return Err(param("xi0", format!("must be finite and > 1, got {xi0}")));
        }
        let c_xi0 = xi0 / (1.0 + 4.0 * PI * xi0) / xi0.ln();
        Ok(Modulus::Piecewise { xi0, c_xi0 })
    }

    pub fn eval(&self, xi: f64) -> f64 {
        match *self {
            Modulus::Linear => xi,
            Modulus::Piecewise { xi0, c_xi0 } => {
                if xi <= xi0 {
                    xi / (1.0 + 4.0 * PI * (xi0 * xi).sqrt())
                } else {
                    c_xi0 * xi.ln()
                }
            }
        }
    }

    /// `ω(e^{ln_xi})`, valid for arguments far beyond `f64::MAX`.
    pub fn eval_ln(&self, ln_xi: f64) -> f64 {
        match *self {
            Modulus::Linear => ln_xi.exp(),
            Modulus::Piecewise { xi0, c_xi0 } => {
                if ln_xi > xi0.ln() {
                    c_xi0 * ln_xi
                } else {
                    self.eval(ln_xi.exp())
                }
            }
        }
    }

    /// `ω′`; the left derivative at `ξ₀`.
    pub fn derivative(&self, xi: f64) -> f64 {
        match *self {
            Modulus::Linear => 1.0,
            Modulus::Piecewise { xi0, c_xi0 } => {
                if xi <= xi0 {
                    let r = (xi0 * xi).sqrt();
                    let d = 1.0 + 4.0 * PI * r;
                    (1.0 + 2.0 * PI * r) / (d * d)
                } else {
                    c_xi0 / xi
                }
            }
        }
    }

    /// `ω″`; the left value at `ξ₀`. Unbounded as `ξ → 0` for the piecewise modulus.
    pub fn second_derivative(&self, xi: f64) -> f64 {
        match *self {
            Modulus::Linear => 0.0,
            Modulus::Piecewise { xi0, c_xi0 } => {
                if xi <= xi0 {
                    let c = 4.0 * PI * xi0.sqrt();
                    let s = xi.sqrt();
                    let d = 1.0 + c * s;
                    -c * (3.0 + c * s) / (4.0 * s * d * d * d)
                } else {
                    -c_xi0 / (xi * xi)
                }
            }
        }
    }

    /// Jump `ω′(ξ+) − ω′(ξ−)`, nonzero only at the junction of the piecewise modulus.
    pub fn derivative_jump(&self, xi: f64) -> f64 {
        match *self {
            Modulus::Piecewise { xi0, c_xi0 } if xi == xi0 => c_xi0 / xi0 - self.derivative(xi0),
            _ => 0.0,
        }
    }

    /// Points where `ω` is not smooth.
    pub(crate) fn kinks(&self) -> Vec<f64> {
        match *self {
            Modulus::Piecewise { xi0, .. } => vec![xi0],
            Modulus::Linear => Vec::new(),
        }
    }

    /// `ln ω^{-1}(y)`; the inverse itself overflows `f64` for moderate `y`.
    pub fn inverse_ln(&self, y: f64) -> Result<f64> {
        if !(y.is_finite() && y >= 0.0) {
            return Err(param("y", format!("must be finite and nonnegative, got {y}")));
        }
        if y == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(match *self {
            Modulus::Linear => y.ln(),
            Modulus::Piecewise { xi0, c_xi0 } => {
                if y > self.eval(xi0) {
                    y / c_xi0
                } else {
                    bisect_inverse(|x| self.eval(x), y, xi0).ln()
                }
            }
        })
    }

    /// `ω^{-1}(y)`; `+∞` when the inverse exceeds `f64::MAX`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        let ln = self.inverse_ln(y)?;
        Ok(if ln == f64::NEG_INFINITY { 0.0 } else { ln.exp() })
    }
}

/// Bisection for `f(x) = y` on `[0, hi]` with `f` increasing and `f(hi) ≥ y`.
fn bisect_inverse(f: impl Fn(f64) -> f64, y: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (0.0_f64, hi);
    for _ in 0..2000 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) < y {
            a = m;
        } else {
            b = m;
        }
    }
    if (f(a) - y).abs() < (f(b) - y).abs() {
        a
    } else {
        b
    }
}

/// `ω(ξ)` or `ω′(ξ)` with a parameter check on `ξ`.
pub fn modulus_eval(xi: f64, m: &Modulus, mode: ModulusMode) -> Result<f64> {
    if !(xi >= 0.0) {
        return Err(param("xi", format!("must be nonnegative, got {xi}")));
    }
    Ok(match mode {
        ModulusMode::Value => m.eval(xi),
        ModulusMode::Derivative => m.derivative(xi),
    })
}

/// `ω^{-1}(y)` by bisection.
pub fn modulus_inverse(y: f64, m: &Modulus) -> Result<f64> {
    m.inverse(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
            .collect()
    }

    #[test]
    fn anchors() {
        let m = Modulus::default();
        assert_eq!(m.eval(0.0), 0.0);
        assert!((m.derivative(0.0) - 1.0).abs() < 1e-15);
        if let Modulus::Piecewise { xi0, c_xi0 } = m {
            assert!((xi0 / (1.0 + 4.0 * PI * xi0) - c_xi0 * xi0.ln()).abs() < 1e-12);
        }
        assert!(modulus_eval(-1.0, &m, ModulusMode::Value).is_err());
    }

    #[test]
    fn shape_invariants() {
        for xi0 in [1e6, 1e8, 1e10] {
            let m = Modulus::piecewise(xi0).unwrap();
            let grid = log_grid(1e-8, 1e14, 400);
            for w in grid.windows(2) {
                assert!(m.eval(w[1]) > m.eval(w[0]));
            }
            for w in grid.windows(3) {
                let (a, b) = (w[0], w[2]);
                let mid = m.eval(0.5 * (a + b));
                assert!(mid >= 0.5 * (m.eval(a) + m.eval(b)) - 1e-12);
            }
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let m = Modulus::piecewise(1e10).unwrap();
        for xi in log_grid(1e-3, 1e14, 60) {
            if (xi / 1e10 - 1.0).abs() < 1e-3 {
                continue;
            }
            let h = 1e-4 * xi;
            let fd = (m.eval(xi + h) - m.eval(xi - h)) / (2.0 * h);
            assert!((fd - m.derivative(xi)).abs() < 1e-6 * m.derivative(xi).abs(), "xi={xi}");
            let fd2 = (m.derivative(xi + h) - m.derivative(xi - h)) / (2.0 * h);
            let d2 = m.second_derivative(xi);
            assert!((fd2 - d2).abs() < 1e-5 * d2.abs(), "xi={xi}");
        }
    }

    #[test]
    fn inverse_round_trip() {
        let m = Modulus::default();
        assert_eq!(m.inverse(0.0).unwrap(), 0.0);
        assert!((m.inverse(m.eval(5.0)).unwrap() - 5.0).abs() < 1e-10);
        for y in [1e-6, 1e-3, 0.05, 0.079] {
            let x = m.inverse(y).unwrap();
            assert!((m.eval(x) - y).abs() < 1e-12 * y.max(1.0));
        }
        let ln = m.inverse_ln(2.5).unwrap();
        assert!(ln > 700.0);
        assert!((m.eval_ln(ln) - 2.5).abs() < 1e-12 * 2.5);
        assert_eq!(m.inverse(2.5).unwrap(), f64::INFINITY);
        assert!(m.inverse(-1.0).is_err());
    }

    #[test]
    fn kink_jump_is_negative() {
        let m = Modulus::default();
        assert!(m.derivative_jump(1e10) < 0.0);
        assert_eq!(m.derivative_jump(1.0), 0.0);
    }
}
