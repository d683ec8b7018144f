mod common;

use common::{random_band_limited, rng};
use fbl_core::littlewood_paley::{
    besov_norm, build_partition, dyadic_block, low_cutoff, BesovSpec, BlockDecomposition,
};
use fbl_core::spectral::{fractional_laplacian, lebesgue_norm, product_exact};
use fbl_core::DomainSpec;
use rand::Rng;

#[test]
fn reconstruction_and_quasi_orthogonality() {
    let d = DomainSpec::periodic_2pi(1024).unwrap();
    let part = build_partition(&d).unwrap();
    let mut r = rng(11);
    for i in 0..100 {
        let u = random_band_limited(d, 5 + i * 3, &mut r);
        let sup = u.sup_norm();
        let rec = BlockDecomposition::new(&u, &part).unwrap().reconstruct();
        assert!(rec.sub(&u).sup_norm() < 1e-10 * sup);
        if i % 10 == 0 {
            for q in part.indices() {
                let bq = dyadic_block(&u, q, &part).unwrap();
                for qq in part.indices().filter(|qq| (qq - q).abs() >= 2) {
                    assert!(dyadic_block(&bq, qq, &part).unwrap().sup_norm() < 1e-13 * sup);
                }
            }
        }
    }
}

#[test]
fn product_shell_support() {
    let d = DomainSpec::periodic_2pi(512).unwrap();
    let part = build_partition(&d).unwrap();
    let mut r = rng(12);
    for _ in 0..5 {
        let u = random_band_limited(d, 100, &mut r);
        let v = random_band_limited(d, 100, &mut r);
        let scale = u.sup_norm() * v.sup_norm();
        for q in part.q_min() + 1..=part.q_max() {
            let prod = product_exact(&low_cutoff(&u, q - 1, &part).unwrap(), &dyadic_block(&v, q, &part).unwrap());
            for qq in part.indices().filter(|qq| (qq - q).abs() >= 5) {
                assert!(dyadic_block(&prod, qq, &part).unwrap().sup_norm() < 1e-12 * scale);
            }
        }
    }
}

#[test]
fn bernstein_constant_is_stable() {
    let d = DomainSpec::periodic_2pi(1024).unwrap();
    let part = build_partition(&d).unwrap();
    let mut r = rng(13);
    for p in [1.0, 2.0, 4.0] {
        let mut per_q = Vec::new();
        for q in 3..=part.q_max() - 2 {
            let mut worst: f64 = 0.0;
            for _ in 0..10 {
                let u = random_bumps(d, &mut r);
                let b = dyadic_block(&u, q, &part).unwrap();
                let c = b.sup_norm() / (2f64.powf(q as f64 / p) * lebesgue_norm(&b, p).unwrap());
                worst = worst.max(c);
            }
            per_q.push(worst);
        }
        let hi = per_q.iter().copied().fold(0.0, f64::max);
        let lo = per_q.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(hi / lo < 2.0, "p={p}: {per_q:?}");
    }
}

/// A few narrow periodic bumps at random places: data near the Bernstein extremals.
fn random_bumps(d: DomainSpec, r: &mut impl Rng) -> fbl_core::GridFunction {
    let bumps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (r.gen_range(0.0..d.length), r.gen_range(0.5..2.0), r.gen_range(0.001..0.002)))
        .collect();
    fbl_core::GridFunction::from_fn(d, |x| {
        bumps
            .iter()
            .map(|&(c, a, w)| {
                let dist = (x - c).rem_euclid(d.length);
                let dist = dist.min(d.length - dist);
                a * (-0.5 * (dist / w).powi(2)).exp()
            })
            .sum()
    })
    .unwrap()
    .subtract_mean()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

#[test]
fn product_estimate_constant_is_stable() {
    let d = DomainSpec::periodic_2pi(512).unwrap();
    let part = build_partition(&d).unwrap();
    let spec = BesovSpec::new(0.5, 2.0, 1.0).unwrap();
    let mut r = rng(14);
    let ratios: Vec<f64> = (0..100)
        .map(|i| {
            let u = random_band_limited(d, 4 + i, &mut r);
            let v = random_band_limited(d, 4 + (i * 7) % 100, &mut r);
            let uv = product_exact(&u, &v).subtract_mean();
            let num = besov_norm(&uv, &spec, &part).unwrap();
            let den = u.sup_norm() * besov_norm(&v, &spec, &part).unwrap()
                + v.sup_norm() * besov_norm(&u, &spec, &part).unwrap();
            num / den
        })
        .collect();
    let max = ratios.iter().copied().fold(0.0, f64::max);
    assert!(max / median(ratios) < 4.0);
}

#[test]
fn generalized_derivative_bracket() {
    let d = DomainSpec::periodic_2pi(512).unwrap();
    let part = build_partition(&d).unwrap();
    let mut r = rng(15);
    for sigma in [0.5, 1.0, 2.0] {
        for i in 0..30 {
            let u = random_band_limited(d, 3 + 5 * i, &mut r);
            let spec = BesovSpec::new(0.7, 2.0, 1.0).unwrap();
            let lu = fractional_laplacian(&u, sigma).unwrap();
            let ratio = besov_norm(&lu, &spec.with_s(0.7 - sigma), &part).unwrap()
                / besov_norm(&u, &spec, &part).unwrap();
            // Block q lives on |ξ| ∈ [3/4, 8/3]·2^q.
            assert!(ratio >= 0.75f64.powf(sigma) && ratio <= (8.0f64 / 3.0).powf(sigma), "σ={sigma}: {ratio}");
        }
    }
}
