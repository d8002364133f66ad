//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

pub const DEFAULT_REL_TOL: f64 = 1e-9;
const MAX_INTERVALS: usize = 4000;
const INITIAL_PIECES: usize = 8;

#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Piece {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Piece {
        lo,
        hi,
        value: kron * half,
        error: ((kron - gauss) * half).abs(),
    }
}

/// Integrate `f` over a finite interval to the requested relative tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Quadrature {
    if !(hi > lo) {
        return Quadrature {
            value: 0.0,
            error: 0.0,
        };
    }
    assert!(lo.is_finite() && hi.is_finite(), "integrate needs a finite interval");
    let mut heap = BinaryHeap::new();
    let width = (hi - lo) / INITIAL_PIECES as f64;
    for i in 0..INITIAL_PIECES {
        let a = lo + width * i as f64;
        let b = if i + 1 == INITIAL_PIECES { hi } else { a + width };
        heap.push(kronrod(&f, a, b));
    }
    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        let target = rel_tol * value.abs();
        if error <= target || error <= f64::MIN_POSITIVE || heap.len() >= MAX_INTERVALS {
            return Quadrature { value, error };
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            // interval cannot be split further
            heap.push(Piece { error: 0.0, ..worst });
            continue;
        }
        heap.push(kronrod(&f, worst.lo, mid));
        heap.push(kronrod(&f, mid, worst.hi));
    }
}

/// Like [`integrate`], accepting infinite endpoints through the change of
/// variables `x = c + t / (1 - t^2)`.
pub fn integrate_line<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Quadrature {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => integrate(f, lo, hi, rel_tol),
        (true, false) => integrate(
            |t: f64| {
                let u = 1.0 - t;
                f(lo + t / u) / (u * u)
            },
            0.0,
            1.0,
            rel_tol,
        ),
        (false, true) => integrate(
            |t: f64| {
                let u = 1.0 - t;
                f(hi - t / u) / (u * u)
            },
            0.0,
            1.0,
            rel_tol,
        ),
        (false, false) => integrate(
            |t: f64| {
                let u = 1.0 - t * t;
                f(t / u) * (1.0 + t * t) / (u * u)
            },
            -1.0,
            1.0,
            rel_tol,
        ),
    }
}
