use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::spectral::GridFunction;

use super::partition::DyadicPartition;

/// `Δ̇_q u = φ(2^{-q}D)u`.
pub fn dyadic_block(u: &GridFunction, q: i32, part: &DyadicPartition) -> Result<GridFunction> {
    part.check(q)?;
    part.domain().ensure_same(u.domain())?;
    Ok(block_unchecked(u, q, part))
}

/// Block `q`, or zero for indices the grid does not resolve.
pub(crate) fn block_unchecked(u: &GridFunction, q: i32, part: &DyadicPartition) -> GridFunction {
    match part.weights(q) {
        Some(w) => u.apply_weights(w),
        None => GridFunction::zeros(*u.domain()),
    }
}

/// `Ṡ_q u = Σ_{q_min ≤ j ≤ q−1} Δ̇_j u`; the mean mode is never included.
pub fn low_cutoff(u: &GridFunction, q: i32, part: &DyadicPartition) -> Result<GridFunction> {
    if q < part.q_min() || q > part.q_max() + 1 {
        return Err(Error::Range {
            q,
            min: part.q_min(),
            max: part.q_max() + 1,
        });
    }
    part.domain().ensure_same(u.domain())?;
    Ok(low_cutoff_unchecked(u, q, part))
}

/// `Ṡ_q` with out-of-range indices clamped (empty below, full above).
pub(crate) fn low_cutoff_unchecked(u: &GridFunction, q: i32, part: &DyadicPartition) -> GridFunction {
    let top = (q - 1).min(part.q_max());
    if top < part.q_min() {
        return GridFunction::zeros(*u.domain());
    }
    let n = u.len();
    let mut w = vec![0.0; n];
    for j in part.q_min()..=top {
        for (acc, x) in w.iter_mut().zip(part.weights(j).expect("in range")) {
            *acc += x;
        }
    }
    u.apply_weights(&w)
}

/// All blocks `Δ̇_q u`, `q ∈ [q_min, q_max]`.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub blocks: BTreeMap<i32, GridFunction>,
}

impl BlockDecomposition {
    pub fn new(u: &GridFunction, part: &DyadicPartition) -> Result<Self> {
        part.domain().ensure_same(u.domain())?;
        let blocks = part
            .indices()
            .map(|q| (q, block_unchecked(u, q, part)))
            .collect();
        Ok(Self { blocks })
    }

    pub fn get(&self, q: i32) -> Option<&GridFunction> {
        self.blocks.get(&q)
    }

    /// `Σ_q Δ̇_q u`.
    pub fn reconstruct(&self) -> GridFunction {
        let mut it = self.blocks.values();
        let first = it.next().expect("partition has at least three blocks").clone();
        it.fold(first, |acc, b| acc.add(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::littlewood_paley::partition::{build_partition, phi};
    use crate::spectral::DomainSpec;

    fn setup(n: usize) -> DyadicPartition {
        build_partition(&DomainSpec::periodic_2pi(n).unwrap()).unwrap()
    }

    fn sup_diff(a: &GridFunction, b: &GridFunction) -> f64 {
        a.sub(b).sup_norm()
    }

    #[test]
    fn single_mode_block() {
        let p = setup(256);
        let d = *p.domain();
        for q in 0..6 {
            let k = 2f64.powi(q);
            let u = GridFunction::from_fn(d, |x| (k * x).sin()).unwrap();
            let b = dyadic_block(&u, q, &p).unwrap();
            assert!(sup_diff(&b, &u.scale(phi(1.0))) < 1e-13);
        }
    }

    #[test]
    fn block_of_low_content_is_zero() {
        let p = setup(256);
        let d = *p.domain();
        // q = 4: shell starts at 12; modes 1..=12 all sit at or below it.
        let u = GridFunction::from_fn(d, |x| (1..=12).map(|k| (k as f64 * x).cos()).sum()).unwrap();
        assert!(dyadic_block(&u, 4, &p).unwrap().sup_norm() < 1e-13);
    }

    #[test]
    fn quasi_orthogonality() {
        let p = setup(256);
        let d = *p.domain();
        let u = GridFunction::from_fn(d, |x| (1..100).map(|k| (k as f64 * x + 0.1 * k as f64).sin() / k as f64).sum())
            .unwrap();
        for q in p.indices() {
            let bq = dyadic_block(&u, q, &p).unwrap();
            for q2 in p.indices().filter(|q2| (q2 - q).abs() >= 2) {
                let bb = dyadic_block(&bq, q2, &p).unwrap();
                assert!(bb.sup_norm() < 1e-13 * u.sup_norm());
            }
        }
    }

    #[test]
    fn low_cutoff_examples() {
        let p = setup(256);
        let d = *p.domain();
        let q = 3;
        let u = GridFunction::from_fn(d, |x| (8.0 * x).sin()).unwrap();
        let s = low_cutoff(&u, q, &p).unwrap();
        // Oracle: explicit sum of blocks below q.
        let oracle = (p.q_min()..q)
            .map(|j| dyadic_block(&u, j, &p).unwrap())
            .fold(GridFunction::zeros(d), |a, b| a.add(&b));
        assert!(sup_diff(&s, &oracle) < 1e-13);
        assert!(sup_diff(&s, &u.scale(phi(2.0))) < 1e-13);
        assert!(low_cutoff(&u, p.q_min(), &p).unwrap().sup_norm() < 1e-15);
        let full = low_cutoff(&u, p.q_max() + 1, &p).unwrap();
        assert!(sup_diff(&full, &u) < 1e-10);
        assert!(low_cutoff(&u, p.q_max() + 2, &p).is_err());
        assert!(low_cutoff(&u, p.q_min() - 1, &p).is_err());
    }

    #[test]
    fn out_of_range_block() {
        let p = setup(64);
        let u = GridFunction::zeros(*p.domain());
        assert!(matches!(dyadic_block(&u, p.q_max() + 1, &p), Err(Error::Range { .. })));
    }

    #[test]
    fn reconstruction() {
        let p = setup(128);
        let d = *p.domain();
        let u = GridFunction::from_fn(d, |x| (2.0 * x.cos()).sin()).unwrap();
        let u = u.subtract_mean();
        let dec = BlockDecomposition::new(&u, &p).unwrap();
        assert!(sup_diff(&dec.reconstruct(), &u) < 1e-10 * u.sup_norm());
    }
}
