//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn kronrod(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> Estimate {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Estimate {
        value: k * h,
        error: ((k - g) * h).abs(),
    }
}

struct Piece {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// `∫ f` over consecutive `breaks`, bisecting the worst piece until the
/// summed error estimate is below `max(rel_tol·|I|, abs_tol)` or the piece
/// budget is spent.
pub(crate) fn integrate(
    f: &mut dyn FnMut(f64) -> f64,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_pieces: usize,
) -> Estimate {
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(Piece {
                a: w[0],
                b: w[1],
                est: kronrod(f, w[0], w[1]),
            });
        }
    }
    loop {
        let value: f64 = heap.iter().map(|p| p.est.value).sum();
        let error: f64 = heap.iter().map(|p| p.est.error).sum();
        if error <= (rel_tol * value.abs()).max(abs_tol) || heap.len() >= max_pieces {
            return Estimate { value, error };
        }
        let worst = heap.pop().expect("nonempty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Cannot split further; keep it and stop.
            heap.push(worst);
            let value = heap.iter().map(|p| p.est.value).sum();
            let error = heap.iter().map(|p| p.est.error).sum();
            return Estimate { value, error };
        }
        heap.push(Piece {
            a: worst.a,
            b: m,
            est: kronrod(f, worst.a, m),
        });
        heap.push(Piece {
            a: m,
            b: worst.b,
            est: kronrod(f, m, worst.b),
        });
    }
}
