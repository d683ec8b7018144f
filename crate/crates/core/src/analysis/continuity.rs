use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::spectral::{spatial_derivative, GridFunction};

use super::modulus::{LogMagnitude, Modulus};

fn positive(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(param(name, format!("must be positive and finite, got {x}")))
    }
}

/// `C₀ = ω^{-1}(2.5‖u₀‖_∞)`, the midpoint choice inside `2‖u₀‖ < ω(C₀) < 3‖u₀‖`.
pub fn c0_select(u0_sup: f64, m: &Modulus) -> Result<LogMagnitude> {
    positive("u0_sup", u0_sup)?;
    let c0 = LogMagnitude {
        ln: m.inverse_ln(2.5 * u0_sup)?,
    };
    let w = m.eval_ln(c0.ln);
    if !(2.0 * u0_sup < w && w < 3.0 * u0_sup) {
        return Err(Error::Configuration(format!(
            "ω(C₀) = {w} outside ({}, {})",
            2.0 * u0_sup,
            3.0 * u0_sup
        )));
    }
    Ok(c0)
}

/// `λ = ω^{-1}(3‖u₀‖_∞)/(2‖u₀‖_∞)·‖∂ₓu(T₁)‖_∞`.
pub fn lambda_select(u0_sup: f64, grad_sup_t1: f64, m: &Modulus) -> Result<LogMagnitude> {
    positive("u0_sup", u0_sup)?;
    positive("grad_sup_t1", grad_sup_t1)?;
    Ok(LogMagnitude {
        ln: m.inverse_ln(3.0 * u0_sup)? - (2.0 * u0_sup).ln() + grad_sup_t1.ln(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub x: f64,
    pub y: f64,
    /// `|u(x) − u(y)|`.
    pub difference: f64,
    /// `ω(λ·d(x, y))`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusCheckReport {
    pub passed: bool,
    pub worst_pair: WitnessPair,
    /// `min over pairs of ω_λ(d) − |u(x) − u(y)|`.
    pub margin: f64,
    /// Distance offsets actually scanned.
    pub offsets_checked: usize,
}

/// Checks `|u(x_i) − u(x_j)| < ω(λ·d(x_i, x_j))` over all grid pairs, with
/// `d` the periodic distance.
///
/// Offsets are scanned in order of the lower bound `ω_λ(d) − min(G·d, osc)`,
/// with `G` a slightly inflated bound on `‖∂ₓu‖_∞`, and the scan stops once
/// that bound exceeds the margin found so far.
pub fn modulus_check(u: &GridFunction, lambda: LogMagnitude, m: &Modulus) -> Result<ModulusCheckReport> {
    if !(lambda.ln.is_finite() || lambda.ln == f64::INFINITY) {
        return Err(param("lambda", "must be positive"));
    }
    let d = u.domain();
    let n = d.points;
    let dx = d.dx();
    let s = u.samples();
    let grad = spatial_derivative(&u.refine(4)).sup_norm() * (1.0 + 1e-3);
    let (lo, hi) = s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let osc = hi - lo;

    let mut offsets: Vec<(f64, usize, f64)> = (1..=n / 2)
        .map(|j| {
            let dist = j as f64 * dx;
            let bound = m.eval_ln(lambda.ln + dist.ln());
            (bound - (grad * dist).min(osc), j, bound)
        })
        .collect();
    offsets.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut margin = f64::INFINITY;
    let mut worst = WitnessPair {
        x: 0.0,
        y: 0.0,
        difference: 0.0,
        bound: f64::INFINITY,
    };
    let mut checked = 0;
    for &(lower, j, bound) in &offsets {
        if lower >= margin {
            break;
        }
        checked += 1;
        for i in 0..n {
            let k = (i + j) % n;
            let diff = (s[i] - s[k]).abs();
            let gap = bound - diff;
            if gap < margin {
                margin = gap;
                worst = WitnessPair {
                    x: d.x(i),
                    y: d.x(k),
                    difference: diff,
                    bound,
                };
            }
        }
    }
    Ok(ModulusCheckReport {
        passed: margin > 0.0,
        worst_pair: worst,
        margin,
        offsets_checked: checked,
    })
}
