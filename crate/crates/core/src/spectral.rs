//! Periodic grid functions and exact Fourier multipliers.
//!
//! The real line is replaced by the torus `[0, L)` sampled at `N` uniform
//! points. Every differential operator used by the solver and the analysis
//! code is a Fourier multiplier and is applied exactly on the discrete
//! spectrum.
//!
//! # Fourier convention
//!
//! This is the single place where the discrete transform is fixed:
//!
//! ```text
//! û_k = Σ_j u_j · exp(-2πi·j·k/N),      u_j = (1/N) Σ_k û_k · exp(2πi·j·k/N)
//! ```
//!
//! Index `k ∈ [0, N)` is mapped to the signed wavenumber `k` for `k < N/2`
//! and `k - N` otherwise, so wavenumbers cover `[-N/2, N/2)`. The physical
//! frequency of wavenumber `k` is `ξ = 2πk/L`. With this convention the
//! mean of `u` is `û_0 / N` and Parseval reads
//! `Δx·Σ|u_j|² = (Δx/N)·Σ|û_k|²`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

type PlanKey = (usize, bool);
type PlanCache = RwLock<HashMap<PlanKey, Arc<dyn Fft<f64>>>>;

fn plan_cache() -> &'static PlanCache {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    if let Some(p) = plan_cache().read().expect("fft plan cache").get(&(n, forward)) {
        return Arc::clone(p);
    }
    let mut cache = plan_cache().write().expect("fft plan cache");
    Arc::clone(cache.entry((n, forward)).or_insert_with(|| {
        let dir = if forward {
            FftDirection::Forward
        } else {
            FftDirection::Inverse
        };
        FftPlanner::new().plan_fft(n, dir)
    }))
}

/// Unnormalized forward transform of real samples.
pub(crate) fn forward(samples: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    plan(buf.len(), true).process(&mut buf);
    buf
}

/// Inverse transform (with the `1/N` factor), keeping the real part.
pub(crate) fn inverse(spectrum: &[Complex64]) -> Vec<f64> {
    let n = spectrum.len();
    let mut buf = spectrum.to_vec();
    plan(n, false).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter().map(|c| c.re * scale).collect()
}

/// Signed wavenumber of spectral index `k` on an `n`-point grid.
#[inline]
pub fn signed_wavenumber(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// A uniform periodic grid on `[0, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub length: f64,
    pub points: usize,
}

impl DomainSpec {
    pub fn new(length: f64, points: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(param("length", format!("must be positive and finite, got {length}")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(param(
                "points",
                format!("must be a power of two and at least 8, got {points}"),
            ));
        }
        Ok(Self { length, points })
    }

    /// The `2π`-periodic grid most examples use.
    pub fn periodic_2pi(points: usize) -> Result<Self> {
        Self::new(2.0 * PI, points)
    }

    pub fn dx(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |i| self.x(i))
    }

    /// Physical frequency `2πk/L` of spectral index `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        2.0 * PI * signed_wavenumber(k, self.points) as f64 / self.length
    }

    /// Smallest nonzero `|ξ|` on the grid.
    pub fn min_frequency(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Largest `|ξ|` on the grid (the Nyquist mode).
    pub fn max_frequency(&self) -> f64 {
        PI * self.points as f64 / self.length
    }

    /// The same period sampled at twice the resolution.
    pub fn doubled(&self) -> Self {
        Self {
            length: self.length,
            points: self.points * 2,
        }
    }

    pub(crate) fn ensure_same(&self, other: &DomainSpec) -> Result<()> {
        if self.points != other.points || (self.length - other.length).abs() > 1e-12 * self.length
        {
            return Err(Error::DomainMismatch(format!(
                "(L={}, N={}) vs (L={}, N={})",
                self.length, self.points, other.length, other.points
            )));
        }
        Ok(())
    }
}

/// Dissipation order `α` and viscosity `ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    pub alpha: f64,
    pub nu: f64,
}

impl EvolutionParams {
    pub fn new(alpha: f64, nu: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(nu.is_finite() && nu >= 0.0) {
            return Err(param("nu", format!("must be nonnegative, got {nu}")));
        }
        Ok(Self { alpha, nu })
    }

    /// `α = 1`, `ν = 1`.
    pub fn critical() -> Self {
        Self { alpha: 1.0, nu: 1.0 }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=2.0).contains(&alpha) {
        return Err(param("alpha", format!("must lie in [0, 2], got {alpha}")));
    }
    Ok(())
}

/// `|ξ|^α` with the convention `0^0 = 1`.
#[inline]
pub(crate) fn symbol_power(xi: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else {
        xi.abs().powf(alpha)
    }
}

/// A real function sampled on a [`DomainSpec`], together with its spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    domain: DomainSpec,
    samples: Vec<f64>,
    spectrum: Vec<Complex64>,
}

impl GridFunction {
    pub fn from_samples(domain: DomainSpec, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != domain.points {
            return Err(Error::DomainMismatch(format!(
                "{} samples for a {}-point grid",
                samples.len(),
                domain.points
            )));
        }
        if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let spectrum = forward(&samples);
        Ok(Self {
            domain,
            samples,
            spectrum,
        })
    }

    /// Samples `f` at the grid points.
    pub fn from_fn(domain: DomainSpec, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_samples(domain, domain.grid().map(f).collect())
    }

    pub fn zeros(domain: DomainSpec) -> Self {
        Self {
            domain,
            samples: vec![0.0; domain.points],
            spectrum: vec![Complex64::new(0.0, 0.0); domain.points],
        }
    }

    pub fn constant(domain: DomainSpec, c: f64) -> Self {
        let mut spectrum = vec![Complex64::new(0.0, 0.0); domain.points];
        spectrum[0] = Complex64::new(c * domain.points as f64, 0.0);
        Self {
            domain,
            samples: vec![c; domain.points],
            spectrum,
        }
    }

    /// Builds a function from a Hermitian spectrum.
    pub(crate) fn from_spectrum(domain: DomainSpec, spectrum: Vec<Complex64>) -> Self {
        debug_assert_eq!(spectrum.len(), domain.points);
        let samples = inverse(&spectrum);
        Self {
            domain,
            samples,
            spectrum,
        }
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.spectrum[0].re / self.domain.points as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Applies the radial multiplier `m(ξ)` to every mode.
    pub fn apply_multiplier(&self, m: impl Fn(f64) -> f64) -> GridFunction {
        let d = self.domain;
        let spectrum = self
            .spectrum
            .iter()
            .enumerate()
            .map(|(k, c)| c * m(d.frequency(k)))
            .collect();
        GridFunction::from_spectrum(d, spectrum)
    }

    /// Applies precomputed per-index weights.
    pub(crate) fn apply_weights(&self, weights: &[f64]) -> GridFunction {
        let spectrum = self
            .spectrum
            .iter()
            .zip(weights)
            .map(|(c, w)| c * *w)
            .collect();
        GridFunction::from_spectrum(self.domain, spectrum)
    }

    pub fn scale(&self, a: f64) -> GridFunction {
        GridFunction {
            domain: self.domain,
            samples: self.samples.iter().map(|x| a * x).collect(),
            spectrum: self.spectrum.iter().map(|c| c * a).collect(),
        }
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: f64, other: &GridFunction) -> GridFunction {
        debug_assert_eq!(self.len(), other.len());
        GridFunction {
            domain: self.domain,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(x, y)| x + a * y)
                .collect(),
            spectrum: self
                .spectrum
                .iter()
                .zip(&other.spectrum)
                .map(|(x, y)| x + y * a)
                .collect(),
        }
    }

    pub fn add(&self, other: &GridFunction) -> GridFunction {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        self.axpy(-1.0, other)
    }

    /// The same function with its mean removed.
    pub fn subtract_mean(&self) -> GridFunction {
        let m = self.mean();
        let mut spectrum = self.spectrum.clone();
        spectrum[0] = Complex64::new(0.0, 0.0);
        GridFunction {
            domain: self.domain,
            samples: self.samples.iter().map(|x| x - m).collect(),
            spectrum,
        }
    }

    /// Largest `|k|` carrying a coefficient above `tol·max|û|`.
    pub fn bandwidth(&self, tol: f64) -> usize {
        let n = self.domain.points;
        let peak = self.spectrum.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
        if peak == 0.0 {
            return 0;
        }
        self.spectrum
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > tol * peak)
            .map(|(k, _)| signed_wavenumber(k, n).unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Trigonometric interpolation onto `factor·N` points.
    pub fn refine(&self, factor: usize) -> GridFunction {
        let n = self.domain.points;
        let m = n * factor;
        let mut spec = vec![Complex64::new(0.0, 0.0); m];
        let scale = factor as f64;
        for (k, c) in self.spectrum.iter().enumerate() {
            let w = signed_wavenumber(k, n);
            if w == -(n as i64 / 2) {
                // Split the Nyquist coefficient so the interpolant stays real.
                spec[n / 2] += c * (0.5 * scale);
                spec[m - n / 2] += c * (0.5 * scale);
            } else {
                let idx = if w >= 0 { w as usize } else { (m as i64 + w) as usize };
                spec[idx] += c * scale;
            }
        }
        let domain = DomainSpec {
            length: self.domain.length,
            points: m,
        };
        GridFunction::from_spectrum(domain, spec)
    }

    /// Keeps only wavenumbers with `|k| < n_target/2` and resamples on `n_target` points.
    pub fn project(&self, n_target: usize) -> GridFunction {
        let n = self.domain.points;
        debug_assert!(n_target <= n);
        let half = (n_target / 2) as i64;
        let mut spec = vec![Complex64::new(0.0, 0.0); n_target];
        let scale = n_target as f64 / n as f64;
        for (k, c) in self.spectrum.iter().enumerate() {
            let w = signed_wavenumber(k, n);
            if w.abs() < half {
                let idx = if w >= 0 { w as usize } else { (n_target as i64 + w) as usize };
                spec[idx] = c * scale;
            }
        }
        let domain = DomainSpec {
            length: self.domain.length,
            points: n_target,
        };
        GridFunction::from_spectrum(domain, spec)
    }
}

/// `Λ^α u`, the Fourier multiplier `|ξ|^α`.
pub fn fractional_laplacian(u: &GridFunction, alpha: f64) -> Result<GridFunction> {
    check_alpha(alpha)?;
    Ok(u.apply_multiplier(|xi| symbol_power(xi, alpha)))
}

/// `∂ₓu`. The Nyquist mode is dropped so the result stays real.
pub fn spatial_derivative(u: &GridFunction) -> GridFunction {
    let d = *u.domain();
    let n = d.points;
    let spectrum = u
        .spectrum()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            if k == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                c * Complex64::new(0.0, d.frequency(k))
            }
        })
        .collect();
    GridFunction::from_spectrum(d, spectrum)
}

/// `e^{-tνΛ^α} u`, applied exactly per mode.
pub fn semigroup_apply(u: &GridFunction, t: f64, params: &EvolutionParams) -> Result<GridFunction> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(param("t", format!("must be nonnegative, got {t}")));
    }
    check_alpha(params.alpha)?;
    let rate = params.nu * t;
    Ok(u.apply_multiplier(|xi| (-rate * symbol_power(xi, params.alpha)).exp()))
}

/// Discrete `L^p` norm; `p = f64::INFINITY` gives the max norm.
pub fn lebesgue_norm(u: &GridFunction, p: f64) -> Result<f64> {
    lp_norm(u.samples(), u.domain().dx(), p)
}

pub(crate) fn lp_norm(samples: &[f64], dx: f64, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(param("p", format!("must lie in [1, ∞], got {p}")));
    }
    if p.is_infinite() {
        return Ok(samples.iter().fold(0.0_f64, |m, x| m.max(x.abs())));
    }
    if p == 1.0 {
        return Ok(dx * samples.iter().map(|x| x.abs()).sum::<f64>());
    }
    if p == 2.0 {
        return Ok((dx * samples.iter().map(|x| x * x).sum::<f64>()).sqrt());
    }
    // Scale by the max to keep |x|^p in range for large p.
    let peak = samples.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if peak == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = samples.iter().map(|x| (x.abs() / peak).powf(p)).sum();
    Ok(peak * (dx * s).powf(1.0 / p))
}

/// 2/3-rule truncation: modes with `|k| > N/3` are zeroed.
pub fn dealias(u: &GridFunction) -> GridFunction {
    let n = u.domain().points;
    let spectrum = u
        .spectrum()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            if 3 * signed_wavenumber(k, n).unsigned_abs() as usize > n {
                Complex64::new(0.0, 0.0)
            } else {
                *c
            }
        })
        .collect();
    GridFunction::from_spectrum(*u.domain(), spectrum)
}

/// Pointwise product on the native grid (aliased).
pub fn pointwise_product(f: &GridFunction, g: &GridFunction) -> GridFunction {
    let samples: Vec<f64> = f.samples().iter().zip(g.samples()).map(|(a, b)| a * b).collect();
    let spectrum = forward(&samples);
    GridFunction {
        domain: *f.domain(),
        samples,
        spectrum,
    }
}

/// Alias-free product: evaluated on the doubled grid, then projected back
/// onto wavenumbers `|k| < N/2`. For inputs without a Nyquist component the
/// retained modes are exact.
pub fn product_exact(f: &GridFunction, g: &GridFunction) -> GridFunction {
    let n = f.domain().points;
    let fine_f = f.refine(2);
    let fine_g = g.refine(2);
    pointwise_product(&fine_f, &fine_g).project(n)
}
