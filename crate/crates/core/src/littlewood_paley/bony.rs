//! Bony's paraproduct, the remainder, and the six-term splitting of the
//! transport commutator `R_q`.
//!
//! All products are formed on the doubled grid and projected back
//! ([`product_exact`]) so that the algebraic identities hold to roundoff.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::spectral::{product_exact, spatial_derivative, GridFunction};

use super::besov::ensure_mean_zero;
use super::blocks::{block_unchecked, low_cutoff_unchecked};
use super::partition::DyadicPartition;

/// Dyadic blocks of one function, with zero outside the resolvable range.
struct Blocks<'a> {
    part: &'a DyadicPartition,
    blocks: BTreeMap<i32, GridFunction>,
    zero: GridFunction,
}

impl<'a> Blocks<'a> {
    fn new(u: &GridFunction, part: &'a DyadicPartition) -> Self {
        let blocks = part
            .indices()
            .map(|q| (q, block_unchecked(u, q, part)))
            .collect();
        Self {
            part,
            blocks,
            zero: GridFunction::zeros(*u.domain()),
        }
    }

    fn get(&self, q: i32) -> &GridFunction {
        self.blocks.get(&q).unwrap_or(&self.zero)
    }

    /// `Ṡ_q = Σ_{j ≤ q−1} Δ̇_j`.
    fn low(&self, q: i32) -> GridFunction {
        let top = (q - 1).min(self.part.q_max());
        (self.part.q_min()..=top).fold(self.zero.clone(), |acc, j| acc.add(self.get(j)))
    }
}

fn sum(domain_of: &GridFunction, terms: impl Iterator<Item = GridFunction>) -> GridFunction {
    terms.fold(GridFunction::zeros(*domain_of.domain()), |acc, t| acc.add(&t))
}

/// `Ṫ_f g = Σ_{q'} Ṡ_{q'−1}f · Δ̇_{q'}g`.
pub fn paraproduct(f: &GridFunction, g: &GridFunction, part: &DyadicPartition) -> Result<GridFunction> {
    part.domain().ensure_same(f.domain())?;
    part.domain().ensure_same(g.domain())?;
    ensure_mean_zero(f)?;
    ensure_mean_zero(g)?;
    let fb = Blocks::new(f, part);
    let gb = Blocks::new(g, part);
    Ok(paraproduct_blocks(&fb, &gb, f))
}

fn paraproduct_blocks(fb: &Blocks, gb: &Blocks, like: &GridFunction) -> GridFunction {
    sum(
        like,
        fb.part.indices().filter_map(|q| {
            let low = fb.low(q - 1);
            let high = gb.get(q);
            if low.sup_norm() == 0.0 || high.sup_norm() == 0.0 {
                None
            } else {
                Some(product_exact(&low, high))
            }
        }),
    )
}

/// `Ṙ(f, g) = Σ_{q'} Δ̇_{q'}f · (Δ̇_{q'−1} + Δ̇_{q'} + Δ̇_{q'+1})g`.
pub fn remainder(f: &GridFunction, g: &GridFunction, part: &DyadicPartition) -> Result<GridFunction> {
    part.domain().ensure_same(f.domain())?;
    part.domain().ensure_same(g.domain())?;
    ensure_mean_zero(f)?;
    ensure_mean_zero(g)?;
    let fb = Blocks::new(f, part);
    let gb = Blocks::new(g, part);
    Ok(remainder_blocks(&fb, &gb, f))
}

fn remainder_blocks(fb: &Blocks, gb: &Blocks, like: &GridFunction) -> GridFunction {
    sum(
        like,
        fb.part.indices().map(|q| {
            let near = gb.get(q - 1).add(gb.get(q)).add(gb.get(q + 1));
            product_exact(fb.get(q), &near)
        }),
    )
}

/// `R_q` computed from its definition together with its six-part splitting.
#[derive(Debug, Clone)]
pub struct CommutatorTerms {
    pub q: i32,
    /// `(Ṡ_{q−1}v − v)∂ₓΔ̇_q u − [Δ̇_q, v∂ₓ]u`.
    pub r_q: GridFunction,
    /// `R_q^1 … R_q^6`.
    pub parts: [GridFunction; 6],
}

impl CommutatorTerms {
    pub fn parts_sum(&self) -> GridFunction {
        self.parts[1..]
            .iter()
            .fold(self.parts[0].clone(), |acc, p| acc.add(p))
    }

    /// `‖r_q − Σ parts‖_∞`.
    pub fn residual(&self) -> f64 {
        self.r_q.sub(&self.parts_sum()).sup_norm()
    }
}

/// Evaluates `R_q` both directly and through the six-term splitting:
///
/// ```text
/// R¹ = Σ_{|q'−q|≤4} [Ṡ_{q'−1}v, Δ̇_q] ∂Δ̇_{q'}u
/// R² = Σ_{q'≥q−3} Ṡ_{q'−1}∂Δ̇_q u · Δ̇_{q'}v
/// R³ = −Σ_{|q'−q|≤4} Δ̇_q(Ṡ_{q'−1}∂u · Δ̇_{q'}v)
/// R⁴ = ∂Ṙ(v, Δ̇_q u) − ∂Δ̇_q Ṙ(v, u)
/// R⁵ = Δ̇_q Ṙ(∂v, u) − Ṙ(∂v, Δ̇_q u)
/// R⁶ = (Ṡ_{q−1}v − v) ∂Δ̇_q u
/// ```
///
/// with the support-restricted index ranges applied to the `Ṙ` sums.
pub fn commutator_terms(
    v: &GridFunction,
    u: &GridFunction,
    q: i32,
    part: &DyadicPartition,
) -> Result<CommutatorTerms> {
    part.check(q)?;
    part.domain().ensure_same(v.domain())?;
    part.domain().ensure_same(u.domain())?;
    ensure_mean_zero(v)?;
    ensure_mean_zero(u)?;

    let du = spatial_derivative(u);
    let dv = spatial_derivative(v);
    let vb = Blocks::new(v, part);
    let ub = Blocks::new(u, part);
    let dub = Blocks::new(&du, part);
    let dvb = Blocks::new(&dv, part);
    let block = |w: &GridFunction| block_unchecked(w, q, part);

    let uq = ub.get(q).clone();
    let d_uq = spatial_derivative(&uq);
    let low_v = low_cutoff_unchecked(v, q - 1, part);
    let low_minus_v = low_v.sub(v);

    // Direct evaluation.
    let r6 = product_exact(&low_minus_v, &d_uq);
    let commutator = block(&product_exact(v, &du)).sub(&product_exact(v, &d_uq));
    let r_q = r6.sub(&commutator);

    let (lo, hi) = (part.q_min(), part.q_max());
    let near = |radius: i32| (q - radius).max(lo)..=(q + radius).min(hi);
    let from = |start: i32| start.max(lo)..=hi;

    let r1 = sum(
        u,
        near(4).map(|qp| {
            let sv = vb.low(qp - 1);
            let d_up = dub.get(qp);
            product_exact(&sv, &block(d_up)).sub(&block(&product_exact(&sv, d_up)))
        }),
    );

    let d_uq_blocks = Blocks::new(&d_uq, part);
    let r2 = sum(
        u,
        from(q - 3).map(|qp| product_exact(&d_uq_blocks.low(qp - 1), vb.get(qp))),
    );

    let r3 = sum(
        u,
        near(4).map(|qp| block(&product_exact(&dub.low(qp - 1), vb.get(qp)))),
    )
    .scale(-1.0);

    let uq_blocks = Blocks::new(&uq, part);
    let pairs_near = || near(2).flat_map(|qp| (qp - 1..=qp + 1).map(move |qpp| (qp, qpp)));
    let pairs_from = || from(q - 3).flat_map(|qp| (qp - 1..=qp + 1).map(move |qpp| (qp, qpp)));

    let r4_a = sum(u, pairs_near().map(|(qp, qpp)| product_exact(vb.get(qp), uq_blocks.get(qpp))));
    let r4_b = sum(u, pairs_from().map(|(qp, qpp)| product_exact(vb.get(qp), ub.get(qpp))));
    let r4 = spatial_derivative(&r4_a).sub(&spatial_derivative(&block(&r4_b)));

    let r5_a = sum(u, pairs_from().map(|(qp, qpp)| product_exact(dvb.get(qp), ub.get(qpp))));
    let r5_b = sum(u, pairs_near().map(|(qp, qpp)| product_exact(dvb.get(qp), uq_blocks.get(qpp))));
    let r5 = block(&r5_a).sub(&r5_b);

    Ok(CommutatorTerms {
        q,
        r_q,
        parts: [r1, r2, r3, r4, r5, r6],
    })
}
