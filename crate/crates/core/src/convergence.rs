//! Quantitative convergence of renormalized iterates toward `2 cos x`:
//! `|Delta_k(x)| <= C~_m alpha^k |x|^3 <= C_m alpha^k` on
//! `[-2^{m-1} pi, 2^{m-1} pi]` for `k >= 2m + 1`.
//!
//! Grid sups are lower estimates of the true sups. [`SupMode::Cover`]
//! evaluates on a cover of closed cells instead and yields rigorous upper
//! bounds at a higher cost.

use crate::ball::Ball;
use crate::constants::convergence_constants;
use crate::dynamics::Germ;
use crate::error::{Error, Result};
use crate::germ::{alpha_pow, check_germ, DEFAULT_ORDER};
use crate::grid;
use crate::verdict::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupMode {
    /// Point evaluation on the grid.
    Grid,
    /// Ball evaluation on grid cells; the sup is a certified upper bound.
    Cover,
}

#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub k: i64,
    /// Sup of `|Delta_k|` over the grid (upper enclosure of the sampled values).
    pub sup: f64,
    /// `C_m alpha^k`.
    pub bound: f64,
    /// Against `C_m alpha^k`.
    pub uniform: Verdict,
    /// Grid points where `|Delta_k(x)| <= C~_m alpha^k |x|^3` is certified.
    pub pointwise_verified: usize,
    /// Grid points where it is refuted.
    pub pointwise_refuted: usize,
    /// Pass when no point is refuted: the bound holds at every point up to
    /// the total ball radius.
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub m: u32,
    pub mode: SupMode,
    pub ctilde: Ball,
    pub c: Ball,
    pub points: usize,
    pub rows: Vec<ConvergenceRow>,
    /// `max_k S_{k+1} / S_k` over consecutive rows with nonzero sups.
    pub decay_ratio: Option<f64>,
}

impl ConvergenceReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// `max S_{k+1}/S_k` restricted to rows with `k >= k_min`.
    pub fn decay_ratio_from(&self, k_min: i64) -> Option<f64> {
        decay_ratio(self.rows.iter().filter(|r| r.k >= k_min))
    }
}

fn decay_ratio<'a>(rows: impl Iterator<Item = &'a ConvergenceRow>) -> Option<f64> {
    let rows: Vec<_> = rows.collect();
    rows.windows(2)
        .filter(|w| w[0].sup > 0.0 && w[1].sup > 0.0)
        .map(|w| w[1].sup / w[0].sup)
        .fold(None, |acc: Option<f64>, r| {
            Some(acc.map_or(r, |a| a.max(r)))
        })
}

/// Grid check of the convergence bound for `k` in `ks`.
///
/// The germ must be certified `(1,1)`-regular.
pub fn convergence_report(
    germ: &Germ,
    m: u32,
    ks: std::ops::RangeInclusive<i64>,
    per_unit: usize,
    mode: SupMode,
) -> Result<ConvergenceReport> {
    let prec = germ.prec();
    if *ks.start() < 2 * m as i64 + 1 {
        return Err(Error::InvalidInput("k must be at least 2m + 1".into()));
    }
    let one = Ball::from_i64(prec, 1);
    let cert = check_germ(germ, &one, &one, DEFAULT_ORDER)?;
    if !cert.is_verified() {
        return Err(Error::Precondition(format!(
            "germ is not (1,1)-regular ({})",
            cert.verdict
        )));
    }
    let (ctilde, c) = convergence_constants(prec, m as usize)?;
    let (ctilde, c) = (ctilde[m as usize].clone(), c[m as usize].clone());
    let half = Ball::pi(prec).mul_2si(m as i32 - 1);
    let n = grid::point_count(2.0 * half.mid_f64(), per_unit, 33);
    let pts = match mode {
        SupMode::Grid => grid::uniform(prec, &half.neg(), &half, n),
        SupMode::Cover => grid::cover(prec, &half.neg(), &half, n),
    };
    let mut rows = Vec::new();
    for k in ks {
        let ak = alpha_pow(prec, k);
        let bound = c.mul(&ak);
        let scale = ctilde.mul(&ak);
        let values: Vec<(Ball, Verdict)> = {
            use rayon::prelude::*;
            pts.par_iter()
                .map(|x| {
                    let d = germ.delta(k, x).abs();
                    let local = scale.mul(&x.abs().powi(3));
                    let v = d.le(&local);
                    (d, v)
                })
                .collect()
        };
        let mut sup = 0.0f64;
        let mut verified = 0;
        let mut refuted = 0;
        for (d, v) in &values {
            let hi = d.upper().to_f64();
            sup = sup.max(if hi.is_nan() { f64::INFINITY } else { hi });
            match v {
                Verdict::Verified => verified += 1,
                Verdict::Refuted => refuted += 1,
                Verdict::Undecidable => {}
            }
        }
        let uniform = Ball::from_f64(prec, sup).le(&bound);
        let pass = match mode {
            SupMode::Grid => refuted == 0,
            SupMode::Cover => uniform == Verdict::Verified,
        };
        rows.push(ConvergenceRow {
            k,
            sup,
            bound: bound.mid_f64(),
            uniform,
            pointwise_verified: verified,
            pointwise_refuted: refuted,
            pass,
        });
    }
    let decay_ratio = decay_ratio(rows.iter());
    Ok(ConvergenceReport {
        m,
        mode,
        ctilde,
        c,
        points: pts.len(),
        rows,
        decay_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::BasePair;

    const P: u32 = 256;

    fn b(x: f64) -> Ball {
        Ball::from_f64(P, x)
    }

    #[test]
    fn cosine_germ_has_zero_sups() {
        let g = Germ::cosine(b(0.0), b(1.0)).unwrap();
        let r = convergence_report(&g, 0, 1..=4, 64, SupMode::Grid).unwrap();
        assert!(r.pass());
        assert!(r.rows.iter().all(|row| row.sup < 1e-60));
    }

    #[test]
    fn lambda_one_trace_germ_decays() {
        let l = b(1.0);
        let rho = b(3.0).mul(&b(6.0).sqrt().unwrap()).mul_i64(16);
        let g = Germ::new(BasePair::trace(l, 4), b(3.0).sqrt().unwrap(), rho).unwrap();
        let r = convergence_report(&g, 0, 5..=10, 64, SupMode::Grid).unwrap();
        assert!(r.pass());
        assert!(r.decay_ratio.unwrap() < 0.76);
    }

    #[test]
    fn cover_mode_is_an_upper_bound() {
        let l = b(1.0);
        let rho = b(3.0).mul(&b(6.0).sqrt().unwrap()).mul_i64(16);
        let g = Germ::new(BasePair::trace(l, 4), b(3.0).sqrt().unwrap(), rho).unwrap();
        let grid = convergence_report(&g, 0, 6..=6, 64, SupMode::Grid).unwrap();
        let cover = convergence_report(&g, 0, 6..=6, 64, SupMode::Cover).unwrap();
        assert!(cover.rows[0].sup >= grid.rows[0].sup);
        assert!(cover.pass());
    }

    #[test]
    fn k_below_two_m_plus_one_rejected() {
        let g = Germ::cosine(b(0.0), b(1.0)).unwrap();
        assert!(convergence_report(&g, 2, 4..=6, 16, SupMode::Grid).is_err());
    }
}
