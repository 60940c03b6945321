//! Regular germs: detection, certification and propagation of coefficient
//! bounds along the dynamic.
//!
//! A pair `(P_{-1}, P_0)` is `(delta, beta)`-regular at `x0` with factor
//! `rho` when both deviations `Delta_j = Q_j - 2 cos` of the renormalized
//! pair satisfy `|Delta_j|^* <= delta sum_{n>=3} x^n / beta^n`.

use crate::ball::Ball;
use crate::dynamics::{Germ, SeriesPair};
use crate::error::{Error, Result};
use crate::series::{
    cos_series, cos_series_like, majorant_check, GeometricMajorant, LocalSeries, MajorantCheck,
};
use crate::verdict::Verdict;

/// Default truncation order for germ series.
pub const DEFAULT_ORDER: usize = 64;

/// `alpha^k` with `alpha = 2^{-1/2}`, for any integer `k`.
pub fn alpha_pow(prec: u32, k: i64) -> Ball {
    let one = Ball::from_i64(prec, 1);
    if k % 2 == 0 {
        one.mul_2si(-(k / 2) as i32)
    } else {
        let alpha = Ball::from_i64(prec, 2).sqrt().expect("2 > 0").mul_2si(-1);
        alpha.mul(&one.mul_2si(-((k - 1) / 2) as i32))
    }
}

/// Outcome of a regularity check for the pair `(P_{k-1}, P_k)`.
#[derive(Clone, Debug)]
pub struct GermCertificate {
    pub base: Ball,
    pub rho: Ball,
    pub delta: Ball,
    pub beta: Ball,
    pub order: usize,
    pub precision: u32,
    /// `k` such that the certified pair is `(P_{k-1}, P_k)`; 0 for the base pair.
    pub index: i64,
    pub verdict: Verdict,
    pub prev: MajorantCheck,
    pub curr: MajorantCheck,
}

impl GermCertificate {
    pub fn is_verified(&self) -> bool {
        self.verdict.is_verified()
    }
}

/// The factor `rho = sqrt(2 - f1(x0)) |f0'(x0) f1(x0)|` making
/// `f_k(x) = 2 - (2^{k-3} rho)^2 (x - x0)^2 + O((x - x0)^3)` for `k >= 3`.
///
/// `f0` and `f1` are series centered at the zero `x0` of `f0`.
pub fn germ_from_zero(f0: &LocalSeries, f1: &LocalSeries, x0: &Ball) -> Result<Ball> {
    if !f0.center().overlaps(x0) || !f1.center().overlaps(x0) {
        return Err(Error::CenterMismatch);
    }
    if f0.order() < 1 {
        return Err(Error::InvalidInput("f0 needs a linear coefficient".into()));
    }
    let value0 = f0.coeff(0);
    if !value0.contains_zero() {
        return Err(Error::Refuted("f0(x0) is not zero".into()));
    }
    let deriv0 = f0.coeff(1).div(f0.scale())?;
    let value1 = f1.coeff(0).clone();
    let gap = Ball::from_i64(value1.prec(), 2).sub(&value1);
    if gap.upper() <= 0 {
        return Err(Error::Refuted("f1(x0) >= 2".into()));
    }
    if !gap.is_positive() {
        return Err(Error::Undecidable("sign of 2 - f1(x0)".into()));
    }
    for (what, v) in [("f0'(x0)", &deriv0), ("f1(x0)", &value1)] {
        if v.contains_zero() {
            if v.is_exact() {
                return Err(Error::Refuted(format!("{what} = 0")));
            }
            return Err(Error::Undecidable(format!("{what} may vanish")));
        }
    }
    Ok(gap.sqrt()?.mul(&deriv0.mul(&value1).abs()))
}

#[allow(clippy::too_many_arguments)]
fn certify(
    base: &Ball,
    rho: &Ball,
    index: i64,
    order: usize,
    d_prev: &LocalSeries,
    d_curr: &LocalSeries,
    delta: &Ball,
    beta: &Ball,
) -> Result<GermCertificate> {
    let m = GeometricMajorant::new(delta.clone(), beta.clone(), 3)?;
    let prev = majorant_check(d_prev, &m);
    let curr = majorant_check(d_curr, &m);
    Ok(GermCertificate {
        base: base.clone(),
        rho: rho.clone(),
        delta: delta.clone(),
        beta: beta.clone(),
        order,
        precision: base.prec(),
        index,
        verdict: prev.verdict.and(curr.verdict),
        prev,
        curr,
    })
}

/// `(delta, beta)`-regularity of a pair given as series around `x0`.
///
/// The pair's frame may carry a scale `s` (`x = x0 + s u`); the renormalized
/// series are `Q_{-1}(x) = P_{-1}(x0 + 2x/rho)` and `Q_0(x) = P_0(x0 + x/rho)`.
pub fn check_regularity(
    pair: &SeriesPair,
    x0: &Ball,
    rho: &Ball,
    delta: &Ball,
    beta: &Ball,
) -> Result<GermCertificate> {
    if !pair.curr.center().overlaps(x0) || !pair.prev.center().overlaps(x0) {
        return Err(Error::CenterMismatch);
    }
    let unit = rho.mul(pair.curr.scale()).recip()?;
    let q_prev = pair
        .prev
        .affine_arg(&unit.mul_2si(1), &Ball::zero(x0.prec()))?;
    let q_curr = pair.curr.affine_arg(&unit, &Ball::zero(x0.prec()))?;
    let d_prev = q_prev.sub(&cos_series_like(&q_prev))?;
    let d_curr = q_curr.sub(&cos_series_like(&q_curr))?;
    let order = pair.curr.order().min(pair.prev.order());
    certify(x0, rho, pair.index, order, &d_prev, &d_curr, delta, beta)
}

/// `(delta, beta)`-regularity of a germ's base pair.
pub fn check_germ(germ: &Germ, delta: &Ball, beta: &Ball, order: usize) -> Result<GermCertificate> {
    let tower = germ.delta_tower(0, order)?;
    certify(
        &germ.base, &germ.rho, 0, order, &tower[0], &tower[1], delta, beta,
    )
}

/// Certifies `(P_{k-1}, P_k)` as `(9 alpha^{k-3}, 2)`-regular at the germ's
/// base, with factor `2^k rho`, by a direct majorant check of the iterated
/// series.
pub fn regularity_decay(
    germ: &Germ,
    input: &GermCertificate,
    k: i64,
    order: usize,
) -> Result<GermCertificate> {
    if k < 2 {
        return Err(Error::InvalidInput("regularity decay needs k >= 2".into()));
    }
    let prec = germ.prec();
    let one = Ball::from_i64(prec, 1);
    if !input.is_verified()
        || input.delta.le(&one) != Verdict::Verified
        || input.beta.le(&one) != Verdict::Verified
    {
        return Err(Error::Precondition(
            "input germ must be verified (1,1)-regular".into(),
        ));
    }
    let tower = germ.delta_tower(k, order)?;
    let n = tower.len();
    let delta = alpha_pow(prec, k - 3).mul_i64(9);
    let beta = Ball::from_i64(prec, 2);
    let rho = germ.rho.mul_2si(k as i32);
    certify(
        &germ.base,
        &rho,
        k,
        order,
        &tower[n - 2],
        &tower[n - 1],
        &delta,
        &beta,
    )
}

/// One row of [`coefficient_profile`].
#[derive(Clone, Debug)]
pub struct ProfileRow {
    pub k: i64,
    /// `max_{n >= 3} |Delta_{k,n}| 2^n` (upper bound).
    pub max_scaled: f64,
    /// `9 alpha^{k-2}`.
    pub bound: f64,
    pub verdict: Verdict,
}

/// Measured coefficient decay of `Delta_k` against `9 alpha^{k-2} sum x^n/2^n`.
pub fn coefficient_profile(
    germ: &Germ,
    ks: std::ops::RangeInclusive<i64>,
    order: usize,
) -> Result<Vec<ProfileRow>> {
    let k_max = *ks.end();
    let tower = germ.delta_tower(k_max, order)?;
    let prec = germ.prec();
    ks.map(|k| {
        let d = &tower[(k + 1) as usize];
        let bound = alpha_pow(prec, k - 2).mul_i64(9);
        let m = GeometricMajorant::new(bound.clone(), Ball::from_i64(prec, 2), 3)?;
        let check = majorant_check(d, &m);
        Ok(ProfileRow {
            k,
            max_scaled: check.max_scaled_coeff,
            bound: bound.mid_f64(),
            verdict: check.verdict,
        })
    })
    .collect()
}

/// Bound on `|Delta_{k+1}|^*` from coefficient hypotheses `<= delta`:
/// `delta (4x^3/2^3 + 4x^4/2^4 + 9 sum_{n>=5} x^n/2^n)`.
#[derive(Clone, Debug)]
pub struct StepBound {
    pub delta: Ball,
    /// The geometric envelope `9 delta sum_{n>=3} x^n / 2^n`.
    pub envelope: GeometricMajorant,
}

impl StepBound {
    pub fn coeff(&self, n: usize) -> Ball {
        let prec = self.delta.prec();
        match n {
            0..=2 => Ball::zero(prec),
            3 | 4 => self.delta.mul_2si(2 - n as i32),
            _ => self.delta.mul_i64(9).mul_2si(-(n as i32)),
        }
    }

    /// Largest coefficient of the bound, `delta / 2`.
    pub fn sup_coeff(&self) -> Ball {
        self.delta.mul_2si(-1)
    }

    pub fn to_series(&self, center: Ball, order: usize) -> LocalSeries {
        LocalSeries::new(center, (0..=order).map(|n| self.coeff(n)).collect())
    }

    /// Tri-state `|f|^* <= bound` on `f`'s truncation window.
    pub fn dominates(&self, f: &LocalSeries) -> Verdict {
        Verdict::all(f.coeffs().iter().enumerate().map(|(n, a)| {
            if n < 3 {
                Verdict::from_bool(a.contains_zero())
            } else {
                a.abs().le(&self.coeff(n))
            }
        }))
    }
}

pub fn propagate_bound_step(delta: &Ball) -> Result<StepBound> {
    let one = Ball::from_i64(delta.prec(), 1);
    if delta.is_negative() {
        return Err(Error::Hypothesis("delta must be nonnegative".into()));
    }
    if delta.le(&one) != Verdict::Verified {
        return Err(Error::Hypothesis("the step bound needs delta <= 1".into()));
    }
    let envelope = GeometricMajorant::new(delta.mul_i64(9), Ball::from_i64(delta.prec(), 2), 3)?;
    Ok(StepBound {
        delta: delta.clone(),
        envelope,
    })
}

/// Bound `152 delta sum_{n>=0} x^n / (2 beta)^n` for the shifted deviations,
/// from hypotheses `|coeff_n| <= delta beta^{-n}` with `0 < delta, beta <= 1`.
pub fn propagate_bound_shifted(delta: &Ball, beta: &Ball) -> Result<GeometricMajorant> {
    let prec = delta.prec();
    let one = Ball::from_i64(prec, 1);
    if delta.is_negative() || delta.le(&one) != Verdict::Verified {
        return Err(Error::Hypothesis(
            "shifted step needs 0 <= delta <= 1".into(),
        ));
    }
    if !beta.is_positive() || beta.le(&one) != Verdict::Verified {
        return Err(Error::Hypothesis("shifted step needs 0 < beta <= 1".into()));
    }
    GeometricMajorant::new(delta.mul_i64(152), beta.mul_2si(1), 0)
}

/// Repeated shifted steps starting from `|coeff_n| <= m0_delta beta^{-n}`,
/// keeping the radius `beta` (valid since `(2 beta)^{-n} <= beta^{-n}`).
/// Returns the constants `152^j m0_delta` for `j = 0..=steps`.
pub fn shifted_chain(m0_delta: &Ball, beta: &Ball, steps: usize) -> Result<Vec<Ball>> {
    let mut out = vec![m0_delta.clone()];
    let mut cur = m0_delta.clone();
    for _ in 0..steps {
        cur = propagate_bound_shifted(&cur, beta)?.delta;
        out.push(cur.clone());
    }
    Ok(out)
}

/// Coefficient-bound bookkeeping obtained by iterating [`propagate_bound_step`]
/// from `(1,1)` hypotheses: row `k` holds the sup bound `s_k` and the
/// `2^{-n}`-envelope constant `c_k` with `|Delta_{k,n}| <= min(s_k, c_k 2^{-n})`.
#[derive(Clone, Debug)]
pub struct EnvelopeRow {
    pub k: i64,
    pub sup_bound: Ball,
    pub envelope: Ball,
    /// `9 alpha^{k-2}`.
    pub target: Ball,
    pub verdict: Verdict,
}

pub fn envelope_closure(prec: u32, k_max: i64) -> Result<Vec<EnvelopeRow>> {
    let one = Ball::from_i64(prec, 1);
    let mut sups = vec![one.clone(), one];
    let mut rows = Vec::new();
    for k in 1..=k_max {
        let n = sups.len();
        let hyp = if sups[n - 2].le(&sups[n - 1]) == Verdict::Verified {
            sups[n - 1].clone()
        } else {
            sups[n - 2].clone()
        };
        let b = propagate_bound_step(&hyp)?;
        let target = alpha_pow(prec, k - 2).mul_i64(9);
        let verdict = b.envelope.delta.le(&target);
        rows.push(EnvelopeRow {
            k,
            sup_bound: b.sup_coeff(),
            envelope: b.envelope.delta.clone(),
            target,
            verdict,
        });
        sups.push(b.sup_coeff());
    }
    Ok(rows)
}

/// Series form of the deviation recurrence:
/// `(2 + 2cos(x/2)) D1(x/2) + D2(x/4) (4cos(x/4) + D2(x/4)) (2cos(x/2) - 2 + D1(x/2))`,
/// with `D2 = Delta_{k-2}` and `D1 = Delta_{k-1}` as series in the renormalized variable.
pub fn delta_recurrence_series(d2: &LocalSeries, d1: &LocalSeries) -> Result<LocalSeries> {
    shifted_recurrence_series(d2, d1, &Ball::zero(d1.prec()))
}

/// The recurrence with cosines evaluated at `(x + t0)/2` and `(x + t0)/4`.
pub(crate) fn shifted_recurrence_series(
    d2: &LocalSeries,
    d1: &LocalSeries,
    t0: &Ball,
) -> Result<LocalSeries> {
    let prec = d1.prec();
    let order = d1.order().min(d2.order());
    let zero = Ball::zero(prec);
    let d1h = d1.truncated(order).pow2_arg(-1);
    let frame = |s: LocalSeries| s.reframed(d1h.center().clone(), d1h.scale().clone());
    let c2 = frame(cos_series(order, &t0.mul_2si(-1), zero.clone()).pow2_arg(-1));
    let c4 = frame(cos_series(order, &t0.mul_2si(-2), zero.clone()).pow2_arg(-2));
    let d2q = frame(d2.truncated(order).pow2_arg(-2));
    let two = Ball::from_i64(prec, 2);
    let first = c2.add_scalar(&two).mul(&d1h)?;
    let second = d2q
        .mul(&c4.scalar_mul(&two).add(&d2q)?)?
        .mul(&c2.add_scalar(&two.neg()).add(&d1h)?)?;
    first.add(&second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::BasePair;
    use rug::Rational;

    const P: u32 = 256;

    fn b(x: f64) -> Ball {
        Ball::from_f64(P, x)
    }

    #[test]
    fn alpha_powers() {
        assert!(alpha_pow(P, 2).contains_rational(&Rational::from((1, 2))));
        assert!(alpha_pow(P, -2).contains_rational(&Rational::from(2)));
        assert!((alpha_pow(P, 1).mid_f64() - 0.5f64.sqrt()).abs() < 1e-16);
        assert!((alpha_pow(P, -3).mid_f64() - 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rho_from_linear_zero() {
        // f0 = 2a u, f1 = -2 => rho = sqrt(4) * |2a * (-2)| = 8a
        let a = 1.25;
        let x0 = b(0.7);
        let f0 = LocalSeries::new(x0.clone(), vec![b(0.0), b(2.0 * a), b(0.3)]);
        let f1 = LocalSeries::new(x0.clone(), vec![b(-2.0), b(0.0), b(0.0)]);
        let rho = germ_from_zero(&f0, &f1, &x0).unwrap();
        assert!(rho.contains_rational(&Rational::from(10)));
    }

    #[test]
    fn rho_refuted_at_two() {
        let x0 = b(0.0);
        let f0 = LocalSeries::new(x0.clone(), vec![b(0.0), b(1.0)]);
        let f1 = LocalSeries::new(x0.clone(), vec![b(2.0), b(0.0)]);
        assert!(matches!(
            germ_from_zero(&f0, &f1, &x0),
            Err(Error::Refuted(_))
        ));
        let f0_bad = LocalSeries::new(x0.clone(), vec![b(0.5), b(1.0)]);
        let f1_ok = LocalSeries::new(x0.clone(), vec![b(-1.0), b(0.0)]);
        assert!(matches!(
            germ_from_zero(&f0_bad, &f1_ok, &x0),
            Err(Error::Refuted(_))
        ));
    }

    #[test]
    fn cosine_germ_is_regular_for_any_parameters() {
        let g = Germ::cosine(b(0.4), b(7.0)).unwrap();
        for (d, be) in [(1.0, 1.0), (1e-6, 1.0), (0.3, 5.0)] {
            let c = check_germ(&g, &b(d), &b(be), 32).unwrap();
            assert_eq!(c.verdict, Verdict::Verified, "delta={d} beta={be}");
        }
    }

    #[test]
    fn check_regularity_via_series_pair() {
        let x0 = b(0.2);
        let rho = b(3.0);
        let pair = BasePair::cosine(x0.clone(), rho.clone());
        let (p, c) = pair.series(&x0, &b(1.0), 24).unwrap();
        let sp = SeriesPair {
            prev: p,
            curr: c,
            index: 0,
        };
        let cert = check_regularity(&sp, &x0, &rho, &b(1e-3), &b(1.0)).unwrap();
        assert_eq!(cert.verdict, Verdict::Verified);
    }

    #[test]
    fn oversized_cubic_is_refuted() {
        let x0 = b(0.0);
        let rho = b(2.0);
        let pair = BasePair::Renormalized {
            base: x0.clone(),
            rho: rho.clone(),
            dev_prev: vec![],
            dev_curr: vec![b(0.0), b(0.0), b(0.0), b(0.6)],
        };
        let g = Germ::new(pair, x0, rho).unwrap();
        let c = check_germ(&g, &b(0.5), &b(1.0), 16).unwrap();
        assert_eq!(c.verdict, Verdict::Refuted);
        assert_eq!(c.curr.first_failure, Some(3));
    }

    #[test]
    fn step_bound_values() {
        let s = propagate_bound_step(&b(1.0)).unwrap();
        assert_eq!(s.coeff(3).mid_f64(), 0.5);
        assert_eq!(s.coeff(4).mid_f64(), 0.25);
        assert_eq!(s.coeff(7).mid_f64(), 9.0 / 128.0);
        let z = propagate_bound_step(&b(0.0)).unwrap();
        assert!((0..10).all(|n| z.coeff(n).mid_f64() == 0.0));
        assert!(matches!(
            propagate_bound_step(&b(1.5)),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn shifted_bound_values() {
        let m = propagate_bound_shifted(&b(1e-5), &b(0.419)).unwrap();
        assert!((m.delta.mid_f64() - 152e-5).abs() < 1e-18);
        assert!((m.beta.mid_f64() - 0.838).abs() < 1e-15);
        assert_eq!(m.start, 0);
        let z = propagate_bound_shifted(&b(0.0), &b(0.5)).unwrap();
        assert_eq!(z.delta.mid_f64(), 0.0);
        assert!(propagate_bound_shifted(&b(2.0), &b(0.5)).is_err());
        assert!(propagate_bound_shifted(&b(0.1), &b(1.5)).is_err());
    }

    #[test]
    fn shifted_chain_stays_below_one() {
        // M0 = 10, delta = delta_2 = 1e-10
        let m0d = b(10.0).mul(&b(1e-10));
        let chain = shifted_chain(&m0d, &b(0.419), 3).unwrap();
        assert_eq!(chain.len(), 4);
        assert!(chain.iter().all(|c| c.le(&b(1.0)) == Verdict::Verified));
        assert!((chain[3].mid_f64() - 152f64.powi(3) * 1e-9).abs() < 1e-12);
    }

    #[test]
    fn envelope_halves_every_two_steps() {
        let rows = envelope_closure(P, 12).unwrap();
        let sups: Vec<f64> = rows.iter().map(|r| r.sup_bound.mid_f64()).collect();
        assert_eq!(&sups[..6], &[0.5, 0.5, 0.25, 0.25, 0.125, 0.125]);
        assert!(rows.iter().all(|r| r.verdict == Verdict::Verified));
    }

    #[test]
    fn regularity_decay_on_cosine_germ() {
        let g = Germ::cosine(b(0.0), b(2.0)).unwrap();
        let c0 = check_germ(&g, &b(1.0), &b(1.0), 24).unwrap();
        for k in [2, 3, 6] {
            let c = regularity_decay(&g, &c0, k, 24).unwrap();
            assert_eq!(c.verdict, Verdict::Verified);
            assert_eq!(c.index, k);
        }
        let c3 = regularity_decay(&g, &c0, 3, 24).unwrap();
        assert_eq!(c3.delta.mid_f64(), 9.0);
    }

    fn bounded_poly(coeffs: Vec<f64>, start: usize, bound: impl Fn(usize) -> f64) -> LocalSeries {
        let c = coeffs
            .into_iter()
            .enumerate()
            .map(|(n, u)| if n < start { b(0.0) } else { b(u * bound(n)) })
            .collect();
        LocalSeries::new(b(0.0), c)
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

        #[test]
        fn step_bound_dominates_recurrence(
            delta in 0.0f64..=1.0,
            older in proptest::collection::vec(-1.0f64..=1.0, 24),
            newer in proptest::collection::vec(-1.0f64..=1.0, 24),
        ) {
            let d2 = bounded_poly(older, 3, |_| delta);
            let d1 = bounded_poly(newer, 3, |_| delta);
            let next = delta_recurrence_series(&d2, &d1).unwrap();
            let bound = propagate_bound_step(&b(delta)).unwrap();
            proptest::prop_assert_ne!(bound.dominates(&next), Verdict::Refuted);
        }

        #[test]
        fn shifted_bound_dominates_recurrence(
            delta in 1e-6f64..=1.0,
            beta in 0.05f64..=1.0,
            t0 in -4.0f64..4.0,
            older in proptest::collection::vec(-1.0f64..=1.0, 20),
            newer in proptest::collection::vec(-1.0f64..=1.0, 20),
        ) {
            let d2 = bounded_poly(older, 0, |n| delta * beta.powi(-(n as i32)));
            let d1 = bounded_poly(newer, 0, |n| delta * beta.powi(-(n as i32)));
            let next = shifted_recurrence_series(&d2, &d1, &b(t0)).unwrap();
            let m = propagate_bound_shifted(&b(delta), &b(beta)).unwrap();
            proptest::prop_assert_ne!(crate::series::majorant_le(&next, &m), Verdict::Refuted);
        }

        #[test]
        fn decay_verdict_monotone_in_delta(extra in 1.0f64..100.0, k in 2i64..9) {
            let g = Germ::cosine(b(0.0), b(3.0)).unwrap();
            let tower = g.delta_tower(k, 16).unwrap();
            let n = tower.len();
            let d = alpha_pow(P, k - 3).mul_i64(9);
            let run = |delta: &Ball| certify(&g.base, &g.rho, k, 16, &tower[n - 2], &tower[n - 1], delta, &b(2.0)).unwrap().verdict;
            if run(&d) == Verdict::Verified {
                proptest::prop_assert_eq!(run(&d.mul(&b(extra))), Verdict::Verified);
            }
        }
    }

    #[test]
    fn recurrence_series_matches_tower() {
        let pair = BasePair::Renormalized {
            base: b(0.0),
            rho: b(1.0),
            dev_prev: vec![b(0.0), b(0.0), b(0.0), b(0.3), b(-0.2)],
            dev_curr: vec![b(0.0), b(0.0), b(0.0), b(-0.4), b(0.1), b(0.05)],
        };
        let g = Germ::new(pair, b(0.0), b(1.0)).unwrap();
        let tower = g.delta_tower(3, 30).unwrap();
        for k in 1..=3usize {
            let via = delta_recurrence_series(&tower[k - 1], &tower[k]).unwrap();
            for n in 0..=30 {
                assert!(via.coeff(n).overlaps(tower[k + 1].coeff(n)), "k={k} n={n}");
            }
        }
    }
}
