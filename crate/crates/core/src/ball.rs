//! Midpoint-radius real balls over MPFR floats.
//!
//! A [`Ball`] `(m, r)` stands for the closed interval `[m - r, m + r]`.
//! Every operation returns a ball that contains the exact result of the
//! operation applied to any members of the input balls. Midpoints carry the
//! working precision; radii are kept at [`RAD_PREC`] bits and always rounded
//! up.

use std::cmp::Ordering;
use std::fmt;

use rug::float::{Constant, Round};
use rug::ops::{AddAssignRound, MulAssignRound, SubAssignRound};
use rug::{Assign, Float, Rational};

use crate::error::{Error, Result};
use crate::verdict::Verdict;

/// Precision of radius arithmetic, in bits.
pub const RAD_PREC: u32 = 64;

/// Default working precision, in bits.
pub const DEFAULT_PREC: u32 = 256;

/// Highest precision the retry ladder will climb to.
pub const MAX_PREC: u32 = 4096;

#[derive(Clone, Debug)]
pub struct Ball {
    mid: Float,
    rad: Float,
}

fn rad_zero() -> Float {
    Float::new(RAD_PREC)
}

fn rad_up(val: &Float) -> Float {
    Float::with_val_round(RAD_PREC, val, Round::Up).0
}

/// Upper bound on the rounding error of a round-to-nearest result.
fn rounding_error(v: &Float, ord: Ordering) -> Float {
    if ord == Ordering::Equal || v.is_zero() {
        return rad_zero();
    }
    let mut e = Float::with_val_round(RAD_PREC, &*v.as_abs(), Round::Up).0;
    // half an ulp is at most |v| * 2^-prec
    e >>= v.prec() as i32;
    e
}

fn add_up(a: &Float, b: &Float) -> Float {
    let mut out = a.clone();
    out.add_assign_round(b, Round::Up);
    out
}

fn mul_up(a: &Float, b: &Float) -> Float {
    let mut out = Float::with_val_round(RAD_PREC, &*a.as_abs(), Round::Up).0;
    out.mul_assign_round(&*b.as_abs(), Round::Up);
    out
}

impl Ball {
    pub fn zero(prec: u32) -> Self {
        Ball {
            mid: Float::new(prec),
            rad: rad_zero(),
        }
    }

    pub fn from_f64(prec: u32, x: f64) -> Self {
        assert!(x.is_finite(), "non-finite ball midpoint");
        let (mid, ord) = Float::with_val_round(prec, x, Round::Nearest);
        let rad = rounding_error(&mid, ord);
        Ball { mid, rad }
    }

    pub fn from_i64(prec: u32, x: i64) -> Self {
        let (mid, ord) = Float::with_val_round(prec, x, Round::Nearest);
        let rad = rounding_error(&mid, ord);
        Ball { mid, rad }
    }

    pub fn from_rational(prec: u32, q: &Rational) -> Self {
        let lo = Float::with_val_round(prec, q, Round::Down).0;
        let hi = Float::with_val_round(prec, q, Round::Up).0;
        Self::from_endpoints(prec, &lo, &hi)
    }

    /// A ball around an exact float; the float is rounded to `prec` if needed.
    pub fn from_float(prec: u32, x: &Float) -> Self {
        let (mid, ord) = Float::with_val_round(prec, x, Round::Nearest);
        let rad = rounding_error(&mid, ord);
        Ball { mid, rad }
    }

    pub fn with_radius(mid: Float, rad: &Float) -> Self {
        assert!(
            rad.is_finite() && *rad >= 0,
            "radius must be finite and nonnegative"
        );
        Ball {
            mid,
            rad: rad_up(rad),
        }
    }

    /// Parses a decimal literal such as `1.7320508` or `-2.5e-3`. The ball
    /// encloses the exact decimal value.
    pub fn parse_decimal(prec: u32, s: &str) -> Result<Self> {
        let parse = || {
            Float::parse(s.trim()).map_err(|e| {
                Error::InvalidInput(format!("cannot parse `{s}` as a real number: {e}"))
            })
        };
        let lo = Float::with_val_round(prec, parse()?, Round::Down).0;
        let hi = Float::with_val_round(prec, parse()?, Round::Up).0;
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInput(format!("`{s}` is not a finite real")));
        }
        Ok(Self::from_endpoints(prec, &lo, &hi))
    }

    /// Smallest ball (at precision `prec`) containing `[lo, hi]`.
    pub fn from_endpoints(prec: u32, lo: &Float, hi: &Float) -> Self {
        debug_assert!(lo <= hi);
        let mut sum = Float::with_val(prec + 2, lo);
        sum += hi;
        sum >>= 1;
        let mid = Float::with_val_round(prec, &sum, Round::Nearest).0;
        let up = Float::with_val_round(RAD_PREC, hi - &mid, Round::Up).0;
        let down = Float::with_val_round(RAD_PREC, &mid - lo, Round::Up).0;
        let rad = if up > down { up } else { down };
        Ball { mid, rad }
    }

    pub fn pi(prec: u32) -> Self {
        let lo = Float::with_val_round(prec, Constant::Pi, Round::Down).0;
        let hi = Float::with_val_round(prec, Constant::Pi, Round::Up).0;
        Self::from_endpoints(prec, &lo, &hi)
    }

    pub fn ln2(prec: u32) -> Self {
        let lo = Float::with_val_round(prec, Constant::Log2, Round::Down).0;
        let hi = Float::with_val_round(prec, Constant::Log2, Round::Up).0;
        Self::from_endpoints(prec, &lo, &hi)
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> &Float {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64_round(Round::Up)
    }

    /// Same value carried at a different working precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, &self.mid, Round::Nearest);
        let rad = add_up(&self.rad, &rounding_error(&mid, ord));
        Ball { mid, rad }
    }

    /// The midpoint as an exact ball.
    pub fn midpoint(&self) -> Self {
        Ball {
            mid: self.mid.clone(),
            rad: rad_zero(),
        }
    }

    pub fn lower(&self) -> Float {
        Float::with_val_round(self.prec(), &self.mid - &self.rad, Round::Down).0
    }

    pub fn upper(&self) -> Float {
        Float::with_val_round(self.prec(), &self.mid + &self.rad, Round::Up).0
    }

    /// Upper bound on `|x|` over the ball.
    pub fn mag(&self) -> Float {
        let mut m = Float::with_val_round(RAD_PREC, &*self.mid.as_abs(), Round::Up).0;
        m.add_assign_round(&self.rad, Round::Up);
        m
    }

    /// Lower bound on `|x|` over the ball (zero when the ball straddles 0).
    pub fn mig(&self) -> Float {
        let mut m = Float::with_val_round(RAD_PREC, &*self.mid.as_abs(), Round::Down).0;
        m.sub_assign_round(&self.rad, Round::Down);
        if m.is_sign_negative() {
            m.assign(0);
        }
        m
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        self.lower() <= 0 && self.upper() >= 0
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        self.lower() <= *q && self.upper() >= *q
    }

    pub fn contains_float(&self, x: &Float) -> bool {
        self.lower() <= *x && self.upper() >= *x
    }

    /// Whether `other` lies inside `self`.
    pub fn contains(&self, other: &Ball) -> bool {
        self.lower() <= other.lower() && self.upper() >= other.upper()
    }

    pub fn overlaps(&self, other: &Ball) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }

    pub fn is_positive(&self) -> bool {
        self.lower() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.upper() < 0
    }

    /// Certified sign, `None` when the ball contains zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.is_positive() {
            Some(Ordering::Greater)
        } else if self.is_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    /// Tri-state `self <= other`.
    pub fn le(&self, other: &Ball) -> Verdict {
        if self.upper() <= other.lower() {
            Verdict::Verified
        } else if self.lower() > other.upper() {
            Verdict::Refuted
        } else {
            Verdict::Undecidable
        }
    }

    /// Tri-state `self < other`.
    pub fn lt(&self, other: &Ball) -> Verdict {
        if self.upper() < other.lower() {
            Verdict::Verified
        } else if self.lower() >= other.upper() {
            Verdict::Refuted
        } else {
            Verdict::Undecidable
        }
    }

    pub fn neg(&self) -> Self {
        Ball {
            mid: Float::with_val(self.prec(), -&self.mid),
            rad: self.rad.clone(),
        }
    }

    /// Ball containing `|x|` for every member `x`.
    pub fn abs(&self) -> Self {
        Ball {
            mid: Float::with_val(self.prec(), &*self.mid.as_abs()),
            rad: self.rad.clone(),
        }
    }

    pub fn add(&self, other: &Ball) -> Self {
        let prec = self.prec().max(other.prec());
        let (mid, ord) = Float::with_val_round(prec, &self.mid + &other.mid, Round::Nearest);
        let rad = add_up(&add_up(&self.rad, &other.rad), &rounding_error(&mid, ord));
        Ball { mid, rad }
    }

    pub fn sub(&self, other: &Ball) -> Self {
        let prec = self.prec().max(other.prec());
        let (mid, ord) = Float::with_val_round(prec, &self.mid - &other.mid, Round::Nearest);
        let rad = add_up(&add_up(&self.rad, &other.rad), &rounding_error(&mid, ord));
        Ball { mid, rad }
    }

    pub fn mul(&self, other: &Ball) -> Self {
        let prec = self.prec().max(other.prec());
        let (mid, ord) = Float::with_val_round(prec, &self.mid * &other.mid, Round::Nearest);
        let mut rad = mul_up(&self.mid, &other.rad);
        rad = add_up(&rad, &mul_up(&other.mid, &self.rad));
        rad = add_up(&rad, &mul_up(&self.rad, &other.rad));
        rad = add_up(&rad, &rounding_error(&mid, ord));
        Ball { mid, rad }
    }

    pub fn sqr(&self) -> Self {
        let prec = self.prec();
        let (mid, ord) = Float::with_val_round(prec, self.mid.square_ref(), Round::Nearest);
        let mut rad = mul_up(&self.mid, &self.rad);
        rad <<= 1;
        rad = add_up(&rad, &mul_up(&self.rad, &self.rad));
        rad = add_up(&rad, &rounding_error(&mid, ord));
        Ball { mid, rad }
    }

    pub fn div(&self, other: &Ball) -> Result<Self> {
        if other.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let prec = self.prec().max(other.prec());
        let (mid, ord) = Float::with_val_round(prec, &self.mid / &other.mid, Round::Nearest);
        let mut num = mul_up(&self.mid, &other.rad);
        num = add_up(&num, &mul_up(&other.mid, &self.rad));
        // |b_m| (|b_m| - b_r), rounded down
        let bm = Float::with_val_round(RAD_PREC, &*other.mid.as_abs(), Round::Down).0;
        let gap = Float::with_val_round(RAD_PREC, &bm - &other.rad, Round::Down).0;
        let den = Float::with_val_round(RAD_PREC, &bm * &gap, Round::Down).0;
        let mut rad = Float::with_val_round(RAD_PREC, &num / &den, Round::Up).0;
        rad = add_up(&rad, &rounding_error(&mid, ord));
        Ok(Ball { mid, rad })
    }

    pub fn recip(&self) -> Result<Self> {
        Ball::from_i64(self.prec(), 1).div(self)
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_2si(&self, k: i32) -> Self {
        let mut mid = self.mid.clone();
        let mut rad = self.rad.clone();
        if k >= 0 {
            mid <<= k;
            rad <<= k;
        } else {
            mid >>= -k;
            rad >>= -k;
        }
        Ball { mid, rad }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self.mul(&Ball::from_i64(self.prec(), k))
    }

    pub fn add_i64(&self, k: i64) -> Self {
        self.add(&Ball::from_i64(self.prec(), k))
    }

    pub fn powi(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Ball::from_i64(self.prec(), 1);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    pub fn sqrt(&self) -> Result<Self> {
        let prec = self.prec();
        let lo = self.lower();
        if lo < 0 {
            if self.upper() < 0 {
                return Err(Error::InvalidInput("square root of a negative ball".into()));
            }
            return Err(Error::Undecidable(
                "square root of a ball straddling zero".into(),
            ));
        }
        let hi = self.upper();
        let slo = Float::with_val_round(prec, lo.sqrt_ref(), Round::Down).0;
        let shi = Float::with_val_round(prec, hi.sqrt_ref(), Round::Up).0;
        Ok(Self::from_endpoints(prec, &slo, &shi))
    }

    pub fn ln(&self) -> Result<Self> {
        let prec = self.prec();
        let lo = self.lower();
        if lo <= 0 {
            return Err(Error::InvalidInput(
                "logarithm of a ball not strictly positive".into(),
            ));
        }
        let hi = self.upper();
        let llo = Float::with_val_round(prec, lo.ln_ref(), Round::Down).0;
        let lhi = Float::with_val_round(prec, hi.ln_ref(), Round::Up).0;
        Ok(Self::from_endpoints(prec, &llo, &lhi))
    }

    /// Cosine; 1-Lipschitz so the input radius carries over unchanged.
    pub fn cos(&self) -> Self {
        let prec = self.prec();
        let (mid, ord) = Float::with_val_round(prec, self.mid.cos_ref(), Round::Nearest);
        let rad = add_up(&self.rad, &rounding_error(&mid, ord));
        Ball { mid, rad }
    }

    pub fn sin(&self) -> Self {
        let prec = self.prec();
        let (mid, ord) = Float::with_val_round(prec, self.mid.sin_ref(), Round::Nearest);
        let rad = add_up(&self.rad, &rounding_error(&mid, ord));
        Ball { mid, rad }
    }

    /// Convex hull of two balls.
    pub fn hull(&self, other: &Ball) -> Self {
        let prec = self.prec().max(other.prec());
        let lo = {
            let (a, b) = (self.lower(), other.lower());
            if a < b {
                a
            } else {
                b
            }
        };
        let hi = {
            let (a, b) = (self.upper(), other.upper());
            if a > b {
                a
            } else {
                b
            }
        };
        Self::from_endpoints(prec, &lo, &hi)
    }

    /// Midpoint and radius as decimal strings. The printed radius also covers
    /// the decimal rounding of the midpoint.
    pub fn to_decimal(&self, digits: usize) -> (String, String) {
        let digits = digits.max(2);
        let mid = self.mid.to_string_radix(10, Some(digits));
        let mut rad = self.rad.clone();
        if !self.mid.is_zero() {
            let printed = Float::parse(&mid).expect("rug prints parseable decimals");
            let printed = Float::with_val(self.prec() + 64, printed);
            let err = Float::with_val_round(RAD_PREC, &printed - &self.mid, Round::Up).0;
            rad = add_up(&rad, &Float::with_val(RAD_PREC, &*err.as_abs()));
        }
        let rad = rad.to_string_radix_round(10, Some(6), Round::Up);
        (mid, rad)
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, r) = self.to_decimal(f.precision().unwrap_or(20));
        write!(f, "[{m} +/- {r}]")
    }
}
