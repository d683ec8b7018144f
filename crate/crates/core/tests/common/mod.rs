#![allow(dead_code)]

use fbl_core::{DomainSpec, GridFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mean-zero trigonometric polynomial with modes `1..=kmax` and decaying random coefficients.
pub fn random_band_limited(d: DomainSpec, kmax: usize, rng: &mut impl Rng) -> GridFunction {
    let coeffs: Vec<(f64, f64)> = (1..=kmax)
        .map(|k| {
            let a = 1.0 / (1.0 + k as f64 * 0.1);
            (a * rng.gen_range(-1.0..1.0), a * rng.gen_range(-1.0..1.0))
        })
        .collect();
    let w = 2.0 * std::f64::consts::PI / d.length;
    GridFunction::from_fn(d, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let k = (i + 1) as f64 * w;
                a * (k * x).cos() + b * (k * x).sin()
            })
            .sum()
    })
    .unwrap()
}

pub fn rel_err(a: &GridFunction, b: &GridFunction) -> f64 {
    a.sub(b).sup_norm() / b.sup_norm().max(f64::MIN_POSITIVE)
}
