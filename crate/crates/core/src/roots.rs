//! Sign-certified zero isolation.
//!
//! A zero is located by scanning a uniform grid for the first (or last)
//! certified sign change and then bisecting on sign balls. Minimality is
//! relative to the scan resolution: two zeros closer than the scan step can
//! be missed.

use std::cmp::Ordering;

use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use crate::ball::Ball;
use crate::dynamics::{trace_eval, Handle};
use crate::error::{Error, Result};
use crate::grid;
use crate::verdict::Verdict;

/// Default enclosure width relative to the searched interval.
pub const DEFAULT_REL_WIDTH_LOG2: i32 = -40;
/// Largest number of scan nodes for a single search.
pub const MAX_SCAN_POINTS: u64 = 1 << 26;
/// Feasibility cap on the trace index in [`sigma_sample`].
pub const SIGMA_CAP: u32 = 24;

const CHUNK: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Smallest zero in the interval.
    Minimal,
    /// Largest zero in the interval.
    Maximal,
}

/// A certified sign change `f(lo) f(hi) < 0` isolating the zero `zero`.
#[derive(Clone, Debug)]
pub struct ZeroBracket {
    pub lo: Ball,
    pub hi: Ball,
    /// Ball hull of `[lo, hi]`.
    pub zero: Ball,
    pub side: Side,
    pub sign_lo: Ordering,
    /// Resolution of the scan that selected the bracket.
    pub scan_step: f64,
}

impl ZeroBracket {
    pub fn width(&self) -> f64 {
        self.hi.mid_f64() - self.lo.mid_f64()
    }
}

fn point(prec: u32, x: &Float) -> Ball {
    Ball::from_float(prec, x).midpoint()
}

fn sign_at(f: Handle<'_>, prec: u32, x: &Float) -> Option<Ordering> {
    f(&point(prec, x)).sign()
}

/// Scan nodes `lo + i (hi - lo) / n` for `i` in `range`, evaluated in parallel.
fn scan_signs(
    f: Handle<'_>,
    prec: u32,
    lo: &Float,
    width: &Float,
    n: u64,
    range: &[u64],
) -> Vec<(Float, Option<Ordering>)> {
    range
        .par_iter()
        .map(|&i| {
            let x = if i == n {
                Float::with_val(prec, lo + width)
            } else {
                let t = Float::with_val(prec, width * i) / n;
                Float::with_val(prec, lo + &t)
            };
            let s = sign_at(f, prec, &x);
            (x, s)
        })
        .collect()
}

/// Bisects a certified sign change down to `target` width.
fn bisect(
    f: Handle<'_>,
    prec: u32,
    mut lo: Float,
    mut hi: Float,
    s_lo: Ordering,
    target: &Float,
) -> Result<(Float, Float)> {
    let mut guard = 0u32;
    while Float::with_val(prec, &hi - &lo) > *target {
        guard += 1;
        if guard > prec + 64 {
            return Err(Error::Undecidable(
                "bisection exhausted the working precision".into(),
            ));
        }
        let width = Float::with_val(prec, &hi - &lo);
        let mut moved = false;
        for (num, den) in [(1u32, 2u32), (3, 8), (5, 8)] {
            let t = Float::with_val(prec, &width * num) / den;
            let m = Float::with_val(prec, &lo + &t);
            if m <= lo || m >= hi {
                continue;
            }
            if let Some(s) = sign_at(f, prec, &m) {
                if s == s_lo {
                    lo = m;
                } else {
                    hi = m;
                }
                moved = true;
                break;
            }
        }
        if !moved {
            return Err(Error::Undecidable(
                "sign indeterminate inside the bracket".into(),
            ));
        }
    }
    Ok((lo, hi))
}

/// Zero of `f` in `[lo, hi]` on the given side, scanned at `scan_step` and
/// refined to width `2^{rel_width_log2} (hi - lo)`.
pub fn find_zero(
    f: Handle<'_>,
    lo: &Ball,
    hi: &Ball,
    side: Side,
    scan_step: f64,
    rel_width_log2: i32,
) -> Result<ZeroBracket> {
    let prec = lo.prec().max(hi.prec());
    let a = lo.mid().clone();
    let b = hi.mid().clone();
    if !scan_step.is_finite() || scan_step <= 0.0 {
        return Err(Error::InvalidInput("scan step must be positive".into()));
    }
    if a >= b {
        return Err(Error::InvalidInput("empty search interval".into()));
    }
    let width = Float::with_val(prec, &b - &a);
    let n_f = (width.to_f64() / scan_step).ceil().max(1.0);
    if n_f > MAX_SCAN_POINTS as f64 {
        return Err(Error::CapExceeded {
            what: "scan points",
            value: n_f as u64,
            cap: MAX_SCAN_POINTS,
        });
    }
    let n = n_f as u64;
    let step = width.to_f64() / n as f64;
    let order: Vec<u64> = match side {
        Side::Minimal => (0..=n).collect(),
        Side::Maximal => (0..=n).rev().collect(),
    };
    let mut prev: Option<(Float, Ordering)> = None;
    for chunk in order.chunks(CHUNK) {
        for (x, s) in scan_signs(f, prec, &a, &width, n, chunk) {
            let s = s.ok_or_else(|| {
                Error::Undecidable(format!("sign of f at scan node {}", x.to_f64()))
            })?;
            if let Some((px, ps)) = &prev {
                if *ps != s {
                    let (l, h, sl) = match side {
                        Side::Minimal => (px.clone(), x, *ps),
                        Side::Maximal => (x, px.clone(), s),
                    };
                    let target = Float::with_val(prec, &width) << rel_width_log2;
                    let (l, h) = bisect(f, prec, l, h, sl, &target)?;
                    let zero = Ball::from_endpoints(prec, &l, &h);
                    return Ok(ZeroBracket {
                        lo: point(prec, &l),
                        hi: point(prec, &h),
                        zero,
                        side,
                        sign_lo: sl,
                        scan_step: step,
                    });
                }
            }
            prev = Some((x, s));
        }
    }
    Err(Error::NotFound(format!(
        "no sign change on [{}, {}] at step {step:e}",
        a.to_f64(),
        b.to_f64()
    )))
}

/// Smallest zero of `f` in `[lo, hi]`.
pub fn min_zero(f: Handle<'_>, lo: &Ball, hi: &Ball, scan_step: f64) -> Result<ZeroBracket> {
    find_zero(f, lo, hi, Side::Minimal, scan_step, DEFAULT_REL_WIDTH_LOG2)
}

/// Largest zero of `f` in `[lo, hi]`.
pub fn max_zero(f: Handle<'_>, lo: &Ball, hi: &Ball, scan_step: f64) -> Result<ZeroBracket> {
    find_zero(f, lo, hi, Side::Maximal, scan_step, DEFAULT_REL_WIDTH_LOG2)
}

/// All sign changes of `f` on `[lo, hi]` at the scan resolution, each
/// refined independently. Failures are reported per bracket.
pub fn all_zeros(
    f: Handle<'_>,
    lo: &Ball,
    hi: &Ball,
    scan_step: f64,
    rel_width_log2: i32,
) -> Result<Vec<Result<ZeroBracket>>> {
    let prec = lo.prec().max(hi.prec());
    let a = lo.mid().clone();
    let width = Float::with_val(prec, hi.mid() - &a);
    if width <= 0 || scan_step.is_nan() || scan_step <= 0.0 {
        return Err(Error::InvalidInput(
            "empty interval or nonpositive step".into(),
        ));
    }
    let n_f = (width.to_f64() / scan_step).ceil().max(1.0);
    if n_f > MAX_SCAN_POINTS as f64 {
        return Err(Error::CapExceeded {
            what: "scan points",
            value: n_f as u64,
            cap: MAX_SCAN_POINTS,
        });
    }
    let n = n_f as u64;
    let step = width.to_f64() / n as f64;
    let idx: Vec<u64> = (0..=n).collect();
    let nodes = scan_signs(f, prec, &a, &width, n, &idx);
    let mut brackets = Vec::new();
    let mut prev: Option<(Float, Ordering)> = None;
    for (x, s) in nodes {
        match s {
            None => {
                brackets.push(Err(Error::Undecidable(format!(
                    "sign of f at scan node {}",
                    x.to_f64()
                ))));
                prev = None;
            }
            Some(s) => {
                if let Some((px, ps)) = &prev {
                    if *ps != s {
                        brackets.push(Ok((px.clone(), x.clone(), *ps)));
                    }
                }
                prev = Some((x, s));
            }
        }
    }
    let target = Float::with_val(prec, &width) << rel_width_log2;
    Ok(brackets
        .into_par_iter()
        .map(|b| {
            let (l, h, sl) = b?;
            let (l, h) = bisect(f, prec, l, h, sl, &target)?;
            Ok(ZeroBracket {
                lo: point(prec, &l),
                hi: point(prec, &h),
                zero: Ball::from_endpoints(prec, &l, &h),
                side: Side::Minimal,
                sign_lo: sl,
                scan_step: step,
            })
        })
        .collect())
}

/// Outcome of the zero-gap check for `phi ~ 2cos x`, `psi ~ 2cos 8x`.
#[derive(Clone, Debug)]
pub struct ZeroGapReport {
    pub delta: f64,
    /// Grid sups of `|phi - 2cos x|` and `|psi - 2cos 8x|` on `[0, pi]`.
    pub sup_phi: grid::SupEstimate,
    pub sup_psi: grid::SupEstimate,
    /// Smallest zero of `phi` in `[0, pi]`.
    pub x_upper: Ball,
    /// Largest zero of `psi` in `(0, x_upper)`.
    pub x_lower: Ball,
    /// `(x_upper - x_lower) - pi/16`.
    pub gap_error: Ball,
    pub verdict: Verdict,
}

/// `|(x^* - x_*) - pi/16| <= 2 delta`, with the hypotheses checked on a grid.
pub fn zero_gap_check(
    phi: Handle<'_>,
    psi: Handle<'_>,
    delta: f64,
    prec: u32,
    per_unit: usize,
) -> Result<ZeroGapReport> {
    if !(delta > 0.0 && delta < 0.01) {
        return Err(Error::Precondition("delta must lie in (0, 0.01)".into()));
    }
    let zero = Ball::zero(prec);
    let pi = Ball::pi(prec);
    let n = grid::point_count(std::f64::consts::PI, per_unit, 65);
    let pts = grid::uniform(prec, &zero, &pi, n);
    let sup_phi = grid::sup_abs(&pts, |x| phi(x).sub(&x.cos().mul_2si(1)));
    let sup_psi = grid::sup_abs(&pts, |x| psi(x).sub(&x.mul_i64(8).cos().mul_2si(1)));
    if sup_phi.le(delta) == Verdict::Refuted || sup_psi.le(delta) == Verdict::Refuted {
        return Err(Error::Precondition(
            "sup bound exceeds delta on the grid".into(),
        ));
    }
    let step = std::f64::consts::PI / 1024.0;
    let upper = min_zero(phi, &zero, &pi, step)?;
    let upper_lo = Ball::from_float(prec, upper.lo.mid());
    let lower = max_zero(psi, &zero, &upper_lo, step / 8.0)?;
    let gap_error = upper.zero.sub(&lower.zero).sub(&pi.mul_2si(-4));
    let verdict = gap_error.abs().le(&Ball::from_f64(prec, 2.0 * delta));
    Ok(ZeroGapReport {
        delta,
        sup_phi,
        sup_psi,
        x_upper: upper.zero,
        x_lower: lower.zero,
        gap_error,
        verdict,
    })
}

/// One entry of [`sigma_sample`].
#[derive(Clone, Debug)]
pub struct SigmaZero {
    pub n: u32,
    pub zero: Option<Ball>,
    pub verdict: Verdict,
    pub note: Option<String>,
}

/// Certified zeros of `h_n` on `[lo, hi]` for `1 <= n <= n_max`.
///
/// The scan step is an eighth of the expected spacing `pi / (2^n rho)` with
/// `rho = (1 + 2 lambda^2) sqrt((1 + lambda^2)(2 + lambda^2))`.
pub fn sigma_sample(n_max: u32, lambda: &Ball, lo: &Ball, hi: &Ball) -> Result<Vec<SigmaZero>> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be positive".into()));
    }
    if n_max > SIGMA_CAP {
        return Err(Error::CapExceeded {
            what: "trace index",
            value: n_max as u64,
            cap: SIGMA_CAP as u64,
        });
    }
    let l2 = lambda.sqr();
    let rho = l2
        .mul_i64(2)
        .add_i64(1)
        .mul(&l2.add_i64(1).mul(&l2.add_i64(2)).sqrt()?)
        .mid_f64();
    let mut out = Vec::new();
    for n in 1..=n_max {
        let f = |x: &Ball| trace_eval(n, lambda, x).expect("n >= 1");
        let step = std::f64::consts::PI / (2f64.powi(n as i32) * rho) / 8.0;
        for z in all_zeros(&f, lo, hi, step, -60)? {
            out.push(match z {
                Ok(b) => SigmaZero {
                    n,
                    zero: Some(b.zero),
                    verdict: Verdict::Verified,
                    note: None,
                },
                Err(e) => SigmaZero {
                    n,
                    zero: None,
                    verdict: Verdict::Undecidable,
                    note: Some(e.to_string()),
                },
            });
        }
    }
    Ok(out)
}
