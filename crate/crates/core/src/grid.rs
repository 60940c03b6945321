//! Sample grids for sup estimates.

use rayon::prelude::*;
use rug::Float;

use crate::ball::Ball;

/// Default sampling density, points per unit length.
pub const POINTS_PER_UNIT: usize = 1024;

/// Number of points used for an interval of the given length.
pub fn point_count(length: f64, per_unit: usize, min_points: usize) -> usize {
    ((length * per_unit as f64).ceil() as usize + 1).max(min_points)
}

/// `count` equally spaced exact sample points covering `[lo, hi]`.
///
/// The points are exact floats at precision `prec`; the endpoint balls
/// contribute only their midpoints.
pub fn uniform(prec: u32, lo: &Ball, hi: &Ball, count: usize) -> Vec<Ball> {
    assert!(count >= 2);
    let a = lo.mid().clone();
    let b = hi.mid().clone();
    let width = Float::with_val(prec, &b - &a);
    (0..count)
        .map(|i| {
            let t = Float::with_val(prec, &width * i as u32) / (count - 1) as u32;
            let x = Float::with_val(prec, &a + &t);
            Ball::from_float(prec, &x).midpoint()
        })
        .collect()
}

/// `count` closed cells covering `[lo, hi]`, as balls.
pub fn cover(prec: u32, lo: &Ball, hi: &Ball, count: usize) -> Vec<Ball> {
    let nodes = uniform(prec, lo, hi, count + 1);
    nodes
        .windows(2)
        .map(|w| Ball::from_endpoints(prec, w[0].mid(), w[1].mid()))
        .collect()
}

/// Symmetric grid on `[-half_width, half_width]` at the default density.
pub fn symmetric(prec: u32, half_width: &Ball, per_unit: usize) -> Vec<Ball> {
    let n = point_count(2.0 * half_width.mid_f64(), per_unit, 33);
    uniform(prec, &half_width.neg(), half_width, n)
}

/// Grid sup of `|f|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupEstimate {
    /// Largest upper bound of `|f|` over the grid.
    pub upper: f64,
    /// Largest certified lower bound of `|f|` over the grid.
    pub lower: f64,
    /// Index of the point attaining `upper`.
    pub argmax: usize,
}

impl SupEstimate {
    /// Tri-state `sup <= bound` over the grid.
    pub fn le(&self, bound: f64) -> crate::verdict::Verdict {
        use crate::verdict::Verdict;
        if self.upper <= bound {
            Verdict::Verified
        } else if self.lower > bound {
            Verdict::Refuted
        } else {
            Verdict::Undecidable
        }
    }
}

/// Sup of `|f|` over the grid.
///
/// Evaluation is parallel; the reduction is sequential in grid order so the
/// result does not depend on scheduling.
pub fn sup_abs<F>(points: &[Ball], f: F) -> SupEstimate
where
    F: Fn(&Ball) -> Ball + Sync,
{
    let values: Vec<(f64, f64)> = points
        .par_iter()
        .map(|x| {
            let v = f(x);
            (v.mag().to_f64(), v.mig().to_f64())
        })
        .collect();
    let mut out = SupEstimate {
        upper: f64::NEG_INFINITY,
        lower: 0.0,
        argmax: 0,
    };
    for (i, (hi, lo)) in values.into_iter().enumerate() {
        let hi = if hi.is_nan() { f64::INFINITY } else { hi };
        if hi > out.upper {
            out.upper = hi;
            out.argmax = i;
        }
        out.lower = out.lower.max(lo);
    }
    out
}
