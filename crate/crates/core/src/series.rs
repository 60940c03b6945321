//! Truncated power series with ball coefficients, and the coefficient-wise
//! majorant order.
//!
//! A [`LocalSeries`] represents `f(x) = sum_n a_n u^n` in the local
//! coordinate `u` defined by `x = center + scale * u`. Products truncate to
//! the smaller order and drop the tail: coefficients up to the order are exact
//! (up to ball radii), nothing is said about higher ones.

use rug::Integer;

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::verdict::Verdict;

#[derive(Clone, Debug)]
pub struct LocalSeries {
    center: Ball,
    scale: Ball,
    coeffs: Vec<Ball>,
}

impl LocalSeries {
    /// Series in `u = x - center`.
    pub fn new(center: Ball, coeffs: Vec<Ball>) -> Self {
        let prec = center.prec();
        Self::with_frame(center, Ball::from_i64(prec, 1), coeffs)
    }

    /// Series in `u` with `x = center + scale * u`.
    pub fn with_frame(center: Ball, scale: Ball, coeffs: Vec<Ball>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a series needs at least one coefficient"
        );
        LocalSeries {
            center,
            scale,
            coeffs,
        }
    }

    pub fn zero(center: Ball, order: usize) -> Self {
        let prec = center.prec();
        Self::new(center, vec![Ball::zero(prec); order + 1])
    }

    pub fn constant(center: Ball, value: Ball, order: usize) -> Self {
        let mut s = Self::zero(center, order);
        s.coeffs[0] = value;
        s
    }

    /// Same coefficients attached to another frame.
    pub fn reframed(&self, center: Ball, scale: Ball) -> Self {
        Self::with_frame(center, scale, self.coeffs.clone())
    }

    /// Constant series sharing this series' frame and order.
    pub fn constant_like(&self, value: Ball) -> Self {
        let prec = value.prec();
        let mut coeffs = vec![Ball::zero(prec); self.coeffs.len()];
        coeffs[0] = value;
        Self::with_frame(self.center.clone(), self.scale.clone(), coeffs)
    }

    pub fn center(&self) -> &Ball {
        &self.center
    }

    pub fn scale(&self) -> &Ball {
        &self.scale
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Ball] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &Ball {
        &self.coeffs[n]
    }

    pub fn prec(&self) -> u32 {
        self.coeffs[0].prec()
    }

    pub fn truncated(&self, order: usize) -> Self {
        let mut out = self.clone();
        let prec = self.prec();
        out.coeffs.resize(order + 1, Ball::zero(prec));
        out
    }

    fn check_frame(&self, other: &LocalSeries) -> Result<()> {
        if self.center.overlaps(&other.center) && self.scale.overlaps(&other.scale) {
            Ok(())
        } else {
            Err(Error::CenterMismatch)
        }
    }

    pub fn add(&self, other: &LocalSeries) -> Result<Self> {
        self.check_frame(other)?;
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.coeffs[i].add(&other.coeffs[i]))
            .collect();
        Ok(Self::with_frame(
            self.center.clone(),
            self.scale.clone(),
            coeffs,
        ))
    }

    pub fn sub(&self, other: &LocalSeries) -> Result<Self> {
        self.check_frame(other)?;
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.coeffs[i].sub(&other.coeffs[i]))
            .collect();
        Ok(Self::with_frame(
            self.center.clone(),
            self.scale.clone(),
            coeffs,
        ))
    }

    /// Cauchy product truncated to the smaller order.
    pub fn mul(&self, other: &LocalSeries) -> Result<Self> {
        self.check_frame(other)?;
        let n = self.coeffs.len().min(other.coeffs.len());
        let prec = self.prec().max(other.prec());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = Ball::zero(prec);
            for i in 0..=k {
                if self.coeffs[i].is_exact() && self.coeffs[i].mid().is_zero() {
                    continue;
                }
                acc = acc.add(&self.coeffs[i].mul(&other.coeffs[k - i]));
            }
            coeffs.push(acc);
        }
        Ok(Self::with_frame(
            self.center.clone(),
            self.scale.clone(),
            coeffs,
        ))
    }

    pub fn sqr(&self) -> Self {
        self.mul(self).expect("a series shares its own frame")
    }

    pub fn scalar_mul(&self, c: &Ball) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.mul(c)).collect();
        Self::with_frame(self.center.clone(), self.scale.clone(), coeffs)
    }

    pub fn add_scalar(&self, c: &Ball) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].add(c);
        out
    }

    /// `|f|^*`: coefficient-wise absolute values.
    pub fn abs_star(&self) -> Self {
        let coeffs = self.coeffs.iter().map(Ball::abs).collect();
        Self::with_frame(self.center.clone(), self.scale.clone(), coeffs)
    }

    /// Horner evaluation at a local coordinate `u`.
    pub fn eval(&self, u: &Ball) -> Ball {
        let mut acc = self.coeffs[self.order()].clone();
        for a in self.coeffs[..self.order()].iter().rev() {
            acc = acc.mul(u).add(a);
        }
        acc
    }

    /// Series of `u -> f(scale * u + shift)`, truncated at the same order.
    ///
    /// With a nonzero shift the result is exact only when `f` is a polynomial
    /// of degree at most its order.
    pub fn affine_arg(&self, scale: &Ball, shift: &Ball) -> Result<Self> {
        if scale.contains_zero() {
            return Err(Error::SingularScale);
        }
        let new_center = self.center.add(&self.scale.mul(shift));
        let new_scale = self.scale.mul(scale);
        let order = self.order();
        let coeffs = if shift.is_exact() && shift.mid().is_zero() {
            let mut pow = Ball::from_i64(self.prec(), 1);
            let mut out = Vec::with_capacity(order + 1);
            for a in &self.coeffs {
                out.push(a.mul(&pow));
                pow = pow.mul(scale);
            }
            out
        } else {
            // Horner in series arithmetic: f(L) with L(u) = shift + scale*u
            let prec = self.prec();
            let frame = |c: Vec<Ball>| Self::with_frame(new_center.clone(), new_scale.clone(), c);
            let mut lin = vec![Ball::zero(prec); order + 1];
            lin[0] = shift.clone();
            if order >= 1 {
                lin[1] = scale.clone();
            }
            let lin = frame(lin);
            let mut acc = frame(vec![Ball::zero(prec); order + 1]);
            acc.coeffs[0] = self.coeffs[order].clone();
            for a in self.coeffs[..order].iter().rev() {
                acc = acc.mul(&lin)?.add_scalar(a);
            }
            acc.coeffs
        };
        Ok(Self::with_frame(new_center, new_scale, coeffs))
    }

    /// Exact rescaling `u -> 2^e u` of the argument.
    pub fn pow2_arg(&self, e: i32) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| a.mul_2si(e * n as i32))
            .collect();
        let scale = self.scale.mul_2si(e);
        Self::with_frame(self.center.clone(), scale, coeffs)
    }
}

/// The series `delta * sum_{n >= start} u^n / beta^n`.
#[derive(Clone, Debug)]
pub struct GeometricMajorant {
    pub delta: Ball,
    pub beta: Ball,
    pub start: usize,
}

impl GeometricMajorant {
    pub fn new(delta: Ball, beta: Ball, start: usize) -> Result<Self> {
        if delta.is_negative() {
            return Err(Error::InvalidInput(
                "majorant delta must be nonnegative".into(),
            ));
        }
        if !beta.is_positive() {
            return Err(Error::InvalidInput("majorant beta must be positive".into()));
        }
        Ok(GeometricMajorant { delta, beta, start })
    }

    pub fn from_f64(prec: u32, delta: f64, beta: f64, start: usize) -> Result<Self> {
        Self::new(
            Ball::from_f64(prec, delta),
            Ball::from_f64(prec, beta),
            start,
        )
    }

    /// Coefficient bound at index `n`.
    pub fn coeff(&self, n: usize) -> Ball {
        if n < self.start {
            Ball::zero(self.delta.prec())
        } else {
            let pow = self.beta.powi(n as u32);
            self.delta.div(&pow).expect("beta is positive")
        }
    }

    pub fn to_series(&self, center: Ball, order: usize) -> LocalSeries {
        LocalSeries::new(center, (0..=order).map(|n| self.coeff(n)).collect())
    }
}

/// Result of comparing a series against a geometric majorant.
#[derive(Clone, Debug)]
pub struct MajorantCheck {
    pub verdict: Verdict,
    /// Largest `upper(|a_n|) / bound_n` over the checked window, for `n >= start`.
    pub worst_ratio: f64,
    /// Largest `upper(|a_n|) * beta^n` over the window, for `n >= start`.
    pub max_scaled_coeff: f64,
    /// First index that was refuted or undecidable.
    pub first_failure: Option<usize>,
}

/// `|f|^* <= M` on the truncation window, as a tri-state verdict.
///
/// Coefficients below `M.start` must be certified zeros: their balls have to
/// contain 0, otherwise the check is refuted.
pub fn majorant_check(f: &LocalSeries, m: &GeometricMajorant) -> MajorantCheck {
    let mut verdict = Verdict::Verified;
    let mut worst_ratio = 0.0f64;
    let mut max_scaled = 0.0f64;
    let mut first_failure = None;
    let mut beta_pow = Ball::from_i64(f.prec(), 1);
    for (n, a) in f.coeffs().iter().enumerate() {
        let v = if n < m.start {
            Verdict::from_bool(a.contains_zero())
        } else {
            let bound = m.delta.div(&beta_pow).expect("beta is positive");
            let mag = a.mag();
            let scaled = Ball::from_float(f.prec(), &mag)
                .mul(&beta_pow)
                .upper()
                .to_f64();
            max_scaled = max_scaled.max(scaled);
            let bmid = bound.mid_f64();
            if bmid > 0.0 {
                worst_ratio = worst_ratio.max(mag.to_f64() / bmid);
            } else if !a.contains_zero() {
                worst_ratio = f64::INFINITY;
            }
            a.abs().le(&bound)
        };
        if n >= m.start {
            beta_pow = beta_pow.mul(&m.beta);
        }
        if v != Verdict::Verified && first_failure.is_none() {
            first_failure = Some(n);
        }
        verdict = verdict.and(v);
    }
    MajorantCheck {
        verdict,
        worst_ratio,
        max_scaled_coeff: max_scaled,
        first_failure,
    }
}

pub fn majorant_le(f: &LocalSeries, m: &GeometricMajorant) -> Verdict {
    majorant_check(f, m).verdict
}

/// Truncated series of `2 cos(u + phase)`; coefficient `n` is
/// `2 cos(phase + n pi/2) / n!`.
pub fn cos_series(order: usize, phase: &Ball, center: Ball) -> LocalSeries {
    let prec = phase.prec().max(center.prec());
    let c = phase.cos().mul_2si(1);
    let s = phase.sin().mul_2si(1);
    let cycle = [c.clone(), s.neg(), c.neg(), s];
    let mut fact = Integer::from(1);
    let mut coeffs = Vec::with_capacity(order + 1);
    for n in 0..=order {
        if n > 0 {
            fact *= n as u32;
        }
        let f = Ball::from_rational(prec, &rug::Rational::from(fact.clone()));
        coeffs.push(cycle[n % 4].div(&f).expect("factorial is positive"));
    }
    LocalSeries::new(center, coeffs)
}

/// `2 cos(u)` in the frame of `like`.
pub fn cos_series_like(like: &LocalSeries) -> LocalSeries {
    let prec = like.prec();
    cos_series(like.order(), &Ball::zero(prec), like.center().clone())
        .reframed(like.center().clone(), like.scale().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    const P: u32 = 256;

    fn b(x: f64) -> Ball {
        Ball::from_f64(P, x)
    }

    fn series(c: &[f64]) -> LocalSeries {
        LocalSeries::new(b(0.0), c.iter().map(|&x| b(x)).collect())
    }

    #[test]
    fn add_small_integers() {
        let s = series(&[1.0, 2.0]).add(&series(&[3.0, 4.0])).unwrap();
        assert_eq!(s.coeff(0).mid_f64(), 4.0);
        assert_eq!(s.coeff(1).mid_f64(), 6.0);
        assert!(s.coeff(1).is_exact());
    }

    #[test]
    fn cos_plus_minus_cos_is_zero() {
        let c = cos_series(8, &b(0.3), b(0.0));
        let z = c.add(&c.scalar_mul(&b(-1.0))).unwrap();
        assert!(z.coeffs().iter().all(Ball::contains_zero));
    }

    #[test]
    fn adding_zero_is_identity() {
        let f = series(&[1.5, -2.0, 0.25]);
        let g = f.add(&LocalSeries::zero(b(0.0), 2)).unwrap();
        for n in 0..=2 {
            assert_eq!(g.coeff(n).mid_f64(), f.coeff(n).mid_f64());
        }
    }

    #[test]
    fn center_mismatch_is_rejected() {
        let f = LocalSeries::new(b(0.0), vec![b(1.0)]);
        let g = LocalSeries::new(b(1.0), vec![b(1.0)]);
        assert_eq!(f.add(&g).unwrap_err(), Error::CenterMismatch);
        assert_eq!(f.mul(&g).unwrap_err(), Error::CenterMismatch);
    }

    #[test]
    fn product_truncates() {
        let p = series(&[1.0, 1.0, 0.0])
            .mul(&series(&[1.0, -1.0, 0.0]))
            .unwrap();
        let mids: Vec<f64> = p.coeffs().iter().map(Ball::mid_f64).collect();
        assert_eq!(mids, vec![1.0, 0.0, -1.0]);
        let u2 = series(&[0.0, 1.0]).mul(&series(&[0.0, 1.0])).unwrap();
        assert!(u2.coeffs().iter().all(|c| c.mid_f64() == 0.0));
        let f = series(&[0.5, 3.0, -1.0]);
        let one = series(&[1.0, 0.0, 0.0]);
        let g = f.mul(&one).unwrap();
        assert_eq!(g.coeff(2).mid_f64(), -1.0);
    }

    #[test]
    fn abs_star_cases() {
        let s = series(&[-1.0, 2.0, -3.0]).abs_star();
        let mids: Vec<f64> = s.coeffs().iter().map(Ball::mid_f64).collect();
        assert_eq!(mids, vec![1.0, 2.0, 3.0]);
        let c = cos_series(6, &b(0.0), b(0.0)).abs_star();
        let expect = [2.0, 0.0, 1.0, 0.0, 1.0 / 12.0, 0.0, 2.0 / 720.0];
        for (n, e) in expect.iter().enumerate() {
            assert!((c.coeff(n).mid_f64() - e).abs() < 1e-15);
        }
    }

    #[test]
    fn cos_series_phase_zero() {
        let c = cos_series(4, &b(0.0), b(0.0));
        let expect = [
            Rational::from(2),
            Rational::from(0),
            Rational::from(-1),
            Rational::from(0),
            Rational::from((1, 12)),
        ];
        for (n, e) in expect.iter().enumerate() {
            assert!(c.coeff(n).contains_rational(e), "n = {n}");
        }
    }

    #[test]
    fn cos_series_quarter_phase() {
        let half_pi = Ball::pi(P).mul_2si(-1);
        let c = cos_series(3, &half_pi, b(0.0));
        assert!(c.coeff(0).contains_zero());
        assert!(c.coeff(1).contains_rational(&Rational::from(-2)));
    }

    #[test]
    fn affine_arg_identity_and_scaling() {
        let f = series(&[0.0, 0.0, 1.0]);
        let same = f.affine_arg(&b(1.0), &b(0.0)).unwrap();
        assert_eq!(same.coeff(2).mid_f64(), 1.0);
        let q = f.affine_arg(&b(0.5), &b(0.0)).unwrap();
        assert_eq!(q.coeff(2).mid_f64(), 0.25);
        let c = cos_series(10, &b(0.0), b(0.0));
        let ch = c.affine_arg(&b(0.5), &b(0.0)).unwrap();
        for n in 0..=10 {
            let expect = c.coeff(n).mid_f64() / 2f64.powi(n as i32);
            assert!((ch.coeff(n).mid_f64() - expect).abs() < 1e-16);
        }
        assert_eq!(
            f.affine_arg(&b(0.0), &b(0.0)).unwrap_err(),
            Error::SingularScale
        );
    }

    #[test]
    fn affine_arg_with_shift_recenters_polynomial() {
        // (u + 1)^2 = 1 + 2u + u^2
        let f = series(&[0.0, 0.0, 1.0]);
        let g = f.affine_arg(&b(1.0), &b(1.0)).unwrap();
        let mids: Vec<f64> = g.coeffs().iter().map(Ball::mid_f64).collect();
        assert_eq!(mids, vec![1.0, 2.0, 1.0]);
        assert_eq!(g.center().mid_f64(), 1.0);
    }

    #[test]
    fn majorant_trivial_cases() {
        let zero = LocalSeries::zero(b(0.0), 10);
        let m = GeometricMajorant::from_f64(P, 1.0, 1.0, 3).unwrap();
        assert_eq!(majorant_le(&zero, &m), Verdict::Verified);
        let mut c = vec![0.0; 6];
        c[3] = 2.0;
        assert_eq!(majorant_le(&series(&c), &m), Verdict::Refuted);
    }

    #[test]
    fn majorant_head_must_vanish() {
        let m = GeometricMajorant::from_f64(P, 1.0, 1.0, 3).unwrap();
        assert_eq!(
            majorant_le(&series(&[0.0, 0.1, 0.0, 0.5]), &m),
            Verdict::Refuted
        );
    }

    #[test]
    fn majorant_straddling_is_undecidable() {
        let m = GeometricMajorant::from_f64(P, 1.0, 1.0, 0).unwrap();
        let fuzzy = Ball::with_radius(
            rug::Float::with_val(P, 1.0),
            &rug::Float::with_val(crate::ball::RAD_PREC, 1e-3),
        );
        let f = LocalSeries::new(b(0.0), vec![fuzzy]);
        assert_eq!(majorant_le(&f, &m), Verdict::Undecidable);
    }

    #[test]
    fn step_bound_fits_geometric_envelope() {
        // 4x^3/2^3 + 4x^4/2^4 + 9 sum_{n>=5} x^n/2^n  vs  9 sum_{n>=3} x^n/2^n
        let order = 40;
        let coeffs = (0..=order)
            .map(|n| match n {
                0..=2 => b(0.0),
                3 | 4 => b(4.0).mul_2si(-n),
                _ => b(9.0).mul_2si(-n),
            })
            .collect();
        let f = LocalSeries::new(b(0.0), coeffs);
        let m = GeometricMajorant::from_f64(P, 9.0, 2.0, 3).unwrap();
        assert_eq!(majorant_le(&f, &m), Verdict::Verified);
    }

    #[test]
    fn pow2_arg_matches_affine_arg() {
        let c = cos_series(12, &b(0.7), b(0.0));
        let a = c.pow2_arg(-2);
        let bq = c.affine_arg(&b(0.25), &b(0.0)).unwrap();
        for n in 0..=12 {
            assert!(a.coeff(n).overlaps(bq.coeff(n)));
        }
    }
}
