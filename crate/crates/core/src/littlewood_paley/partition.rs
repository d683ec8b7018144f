//! The smooth dyadic partition `(χ, φ)` and its resolvable range on a grid.

use crate::error::{Error, Result};
use crate::spectral::DomainSpec;

/// Inner radius of the `χ` transition band.
pub const CHI_PLATEAU: f64 = 3.0 / 4.0;
/// Outer radius of `supp χ`.
pub const CHI_SUPPORT: f64 = 4.0 / 3.0;
/// Outer radius of `supp φ`.
pub const PHI_SUPPORT: f64 = 8.0 / 3.0;

fn bump_tail(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth step: 1 for `t ≤ 0`, 0 for `t ≥ 1`.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let a = bump_tail(1.0 - t);
    a / (bump_tail(t) + a)
}

/// Radial low-pass profile: `χ ≡ 1` on `|ξ| ≤ 3/4`, `χ ≡ 0` on `|ξ| ≥ 4/3`.
pub fn chi(xi: f64) -> f64 {
    smooth_step((xi.abs() - CHI_PLATEAU) / (CHI_SUPPORT - CHI_PLATEAU))
}

/// Shell profile `φ(ξ) = χ(ξ/2) − χ(ξ)`, supported in `3/4 ≤ |ξ| ≤ 8/3`.
pub fn phi(xi: f64) -> f64 {
    chi(0.5 * xi) - chi(xi)
}

/// `(χ, φ)` attached to a grid, with per-block multiplier tables.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    domain: DomainSpec,
    q_min: i32,
    q_max: i32,
    /// `weights[q - q_min][k] = φ(2^{-q}|ξ_k|)`.
    weights: Vec<Vec<f64>>,
}

/// Chooses `(χ, φ)` and the dyadic range for `domain`.
///
/// `q_min` is the largest index with `(4/3)·2^{q_min} ≤ ξ_min` and `q_max` the
/// smallest with `(3/2)·2^{q_max} ≥ ξ_max`, so that
/// `Σ_{q_min}^{q_max} φ(2^{-q}ξ) = 1` at every nonzero grid frequency.
pub fn build_partition(domain: &DomainSpec) -> Result<DyadicPartition> {
    let xi_min = domain.min_frequency();
    let xi_max = domain.max_frequency();
    let mut q_min = (xi_min / CHI_SUPPORT).log2().floor() as i32;
    while CHI_SUPPORT * 2f64.powi(q_min + 1) <= xi_min {
        q_min += 1;
    }
    while CHI_SUPPORT * 2f64.powi(q_min) > xi_min {
        q_min -= 1;
    }
    let upper = 2.0 * CHI_PLATEAU;
    let mut q_max = (xi_max / upper).log2().ceil() as i32;
    while upper * 2f64.powi(q_max - 1) >= xi_max {
        q_max -= 1;
    }
    while upper * 2f64.powi(q_max) < xi_max {
        q_max += 1;
    }
    if q_max - q_min + 1 < 3 {
        return Err(Error::Configuration(format!(
            "grid (L={}, N={}) hosts only {} dyadic shells, need at least 3",
            domain.length,
            domain.points,
            q_max - q_min + 1
        )));
    }
    let weights = (q_min..=q_max)
        .map(|q| {
            let scale = 2f64.powi(-q);
            (0..domain.points)
                .map(|k| phi(scale * domain.frequency(k)))
                .collect()
        })
        .collect();
    Ok(DyadicPartition {
        domain: *domain,
        q_min,
        q_max,
        weights,
    })
}

impl DyadicPartition {
    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn q_min(&self) -> i32 {
        self.q_min
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i32> {
        self.q_min..=self.q_max
    }

    pub fn chi(&self, xi: f64) -> f64 {
        chi(xi)
    }

    pub fn phi(&self, xi: f64) -> f64 {
        phi(xi)
    }

    pub fn contains(&self, q: i32) -> bool {
        (self.q_min..=self.q_max).contains(&q)
    }

    pub(crate) fn check(&self, q: i32) -> Result<()> {
        if self.contains(q) {
            Ok(())
        } else {
            Err(Error::Range {
                q,
                min: self.q_min,
                max: self.q_max,
            })
        }
    }

    /// Multiplier table of block `q`; `None` outside the range.
    pub fn weights(&self, q: i32) -> Option<&[f64]> {
        if self.contains(q) {
            Some(&self.weights[(q - self.q_min) as usize])
        } else {
            None
        }
    }

    /// `Σ_{q_min ≤ q ≤ q_max} φ(2^{-q}ξ)`.
    pub fn truncated_sum(&self, xi: f64) -> f64 {
        self.indices().map(|q| phi(2f64.powi(-q) * xi)).sum()
    }

    /// `χ(ξ) + Σ_{0 ≤ q ≤ q_top} φ(2^{-q}ξ)`.
    pub fn inhomogeneous_sum(&self, xi: f64, q_top: i32) -> f64 {
        chi(xi) + (0..=q_top).map(|q| phi(2f64.powi(-q) * xi)).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(n: usize) -> DyadicPartition {
        build_partition(&DomainSpec::periodic_2pi(n).unwrap()).unwrap()
    }

    #[test]
    fn profile_examples() {
        assert_eq!(chi(0.5), 1.0);
        assert_eq!(phi(0.5), 0.0);
        assert_eq!(chi(4.0 / 3.0), 0.0);
        assert_eq!(chi(2.0), 0.0);
        let p = part(64);
        assert!((p.inhomogeneous_sum(1.0, 8) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn range_on_2pi_grid() {
        let p = part(1024);
        assert_eq!(p.q_min(), -1);
        assert_eq!(p.q_max(), 9);
        let d = p.domain();
        for k in 1..d.points {
            let s = p.truncated_sum(d.frequency(k).abs());
            assert!((s - 1.0).abs() < 1e-12, "k={k}, sum={s}");
        }
        assert_eq!(p.truncated_sum(0.0), 0.0);
    }

    #[test]
    fn supports_on_dense_grid() {
        for i in 0..=10_000 {
            let xi = 4.0 * i as f64 / 10_000.0;
            let c = chi(xi);
            let f = phi(xi);
            assert!((0.0..=1.0).contains(&c));
            assert!((0.0..=1.0).contains(&f));
            if xi >= CHI_SUPPORT {
                assert!(c.abs() < 1e-14);
            }
            if xi <= CHI_PLATEAU || xi >= PHI_SUPPORT {
                assert!(f.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn range_error() {
        let p = part(64);
        assert_eq!(
            p.check(p.q_max() + 1).unwrap_err(),
            Error::Range {
                q: p.q_max() + 1,
                min: p.q_min(),
                max: p.q_max()
            }
        );
    }

    #[test]
    fn non_2pi_domain() {
        let d = DomainSpec::new(100.0, 256).unwrap();
        let p = build_partition(&d).unwrap();
        for k in 1..d.points {
            assert!((p.truncated_sum(d.frequency(k).abs()) - 1.0).abs() < 1e-12);
        }
        assert!(CHI_SUPPORT * 2f64.powi(p.q_min()) <= d.min_frequency());
        assert!(1.5 * 2f64.powi(p.q_max()) >= d.max_frequency());
    }
}
