//! The Thue-Morse dynamic and its trace polynomials.
//!
//! `h_1 = x^2 - lambda^2 - 2`, `h_2 = (x^2 - lambda^2)^2 - 4x^2 + 2` and
//! `h_{n+1} = h_{n-1}^2 (h_n - 2) + 2`. Pairs evolve under
//! `Phi(x, y) = (y^2 (x - 2) + 2, x)`.
//!
//! Point evaluation always goes through the O(n) recurrence. Expanded
//! coefficients are only produced for small `n`, as a test oracle.

use rug::Rational;

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::grid;
use crate::series::{cos_series, cos_series_like, LocalSeries};
use crate::verdict::Verdict;

/// Default cap on `n` for coefficient expansion (degree `2^n`).
pub const EXPAND_CAP: u32 = 10;

/// `Phi(x, y) = (y^2 (x - 2) + 2, x)`.
pub fn phi(x: &Ball, y: &Ball) -> (Ball, Ball) {
    (step(y, x), x.clone())
}

/// One step of the recurrence: `older^2 (newer - 2) + 2`.
#[inline]
pub fn step(older: &Ball, newer: &Ball) -> Ball {
    older.sqr().mul(&newer.add_i64(-2)).add_i64(2)
}

/// `(h_1(x), h_2(x))`.
pub fn trace_initial(lambda: &Ball, x: &Ball) -> (Ball, Ball) {
    let x2 = x.sqr();
    let shifted = x2.sub(&lambda.sqr());
    let h1 = shifted.add_i64(-2);
    let h2 = shifted.sqr().sub(&x2.mul_2si(2)).add_i64(2);
    (h1, h2)
}

/// `h_1(x), ..., h_n(x)`.
pub fn trace_sequence(n: u32, lambda: &Ball, x: &Ball) -> Result<Vec<Ball>> {
    if n < 1 {
        return Err(Error::InvalidInput("trace index must be at least 1".into()));
    }
    let (h1, h2) = trace_initial(lambda, x);
    let mut out = Vec::with_capacity(n as usize);
    out.push(h1);
    if n >= 2 {
        out.push(h2);
    }
    for i in 2..n as usize {
        let next = step(&out[i - 2], &out[i - 1]);
        out.push(next);
    }
    Ok(out)
}

/// `h_n(x)` by the recurrence.
pub fn trace_eval(n: u32, lambda: &Ball, x: &Ball) -> Result<Ball> {
    let mut seq = trace_sequence(n, lambda, x)?;
    Ok(seq.pop().expect("n >= 1"))
}

/// Polynomial with exact rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPoly {
    coeffs: Vec<Rational>,
}

impl ExactPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Rational::new());
        }
        ExactPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &Rational {
        self.coeffs.last().expect("nonempty")
    }

    pub fn mul(&self, other: &ExactPoly) -> ExactPoly {
        let mut out = vec![Rational::new(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        ExactPoly::new(out)
    }

    pub fn add_const(&self, c: i64) -> ExactPoly {
        let mut out = self.coeffs.clone();
        out[0] += c;
        ExactPoly::new(out)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_ball(&self, x: &Ball) -> Ball {
        let prec = x.prec();
        let mut acc = Ball::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(&Ball::from_rational(prec, c));
        }
        acc
    }
}

/// Exact coefficients of `h_1, ..., h_n` for rational `lambda`.
pub fn trace_poly_tower(n: u32, lambda: &Rational, cap: u32) -> Result<Vec<ExactPoly>> {
    if n < 1 {
        return Err(Error::InvalidInput("trace index must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::CapExceeded {
            what: "expansion index",
            value: n as u64,
            cap: cap as u64,
        });
    }
    let l2 = Rational::from(lambda * lambda);
    // h1 = x^2 - l2 - 2
    let h1 = ExactPoly::new(vec![
        Rational::from(-&l2) - 2u32,
        Rational::new(),
        Rational::from(1),
    ]);
    // h2 = x^4 - (2 l2 + 4) x^2 + l2^2 + 2
    let h2 = ExactPoly::new(vec![
        Rational::from(&l2 * &l2) + 2u32,
        Rational::new(),
        -(Rational::from(&l2 * 2u32) + 4u32),
        Rational::new(),
        Rational::from(1),
    ]);
    let mut out = vec![h1, h2];
    while out.len() < n as usize {
        let k = out.len();
        let next = out[k - 2]
            .mul(&out[k - 2])
            .mul(&out[k - 1].add_const(-2))
            .add_const(2);
        out.push(next);
    }
    out.truncate(n as usize);
    Ok(out)
}

/// Exact coefficients of `h_n`, subject to [`EXPAND_CAP`].
pub fn trace_poly_expand(n: u32, lambda: &Rational) -> Result<ExactPoly> {
    let mut tower = trace_poly_tower(n, lambda, EXPAND_CAP)?;
    Ok(tower.pop().expect("n >= 1"))
}

/// `h_n(x)` in exact rational arithmetic by the recurrence.
pub fn trace_eval_exact(n: u32, lambda: &Rational, x: &Rational) -> Result<Rational> {
    if n < 1 {
        return Err(Error::InvalidInput("trace index must be at least 1".into()));
    }
    let x2 = Rational::from(x * x);
    let shifted = &x2 - Rational::from(lambda * lambda);
    let h1 = Rational::from(&shifted - 2u32);
    let h2 = Rational::from(&shifted * &shifted) - Rational::from(&x2 * 4u32) + 2u32;
    if n == 1 {
        return Ok(h1);
    }
    let (mut older, mut newer) = (h1, h2);
    for _ in 2..n {
        let next = Rational::from(&older * &older) * Rational::from(&newer - 2u32) + 2u32;
        older = std::mem::replace(&mut newer, next);
    }
    Ok(newer)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceMode {
    PointRecurrence,
    ExpandedCoefficients,
}

/// Trace polynomials for a fixed coupling.
#[derive(Clone, Debug)]
pub struct TracePair {
    lambda: Ball,
    mode: TraceMode,
    expanded: Vec<ExactPoly>,
}

impl TracePair {
    pub fn point(lambda: Ball) -> Self {
        TracePair {
            lambda,
            mode: TraceMode::PointRecurrence,
            expanded: Vec::new(),
        }
    }

    /// Expanded mode, with `h_1..h_{n_max}` stored exactly.
    pub fn expanded(prec: u32, lambda: &Rational, n_max: u32) -> Result<Self> {
        let expanded = trace_poly_tower(n_max.max(2), lambda, EXPAND_CAP)?;
        Ok(TracePair {
            lambda: Ball::from_rational(prec, lambda),
            mode: TraceMode::ExpandedCoefficients,
            expanded,
        })
    }

    pub fn lambda(&self) -> &Ball {
        &self.lambda
    }

    pub fn mode(&self) -> TraceMode {
        self.mode
    }

    pub fn polys(&self) -> &[ExactPoly] {
        &self.expanded
    }

    pub fn eval(&self, n: u32, x: &Ball) -> Result<Ball> {
        match self.mode {
            TraceMode::PointRecurrence => trace_eval(n, &self.lambda, x),
            TraceMode::ExpandedCoefficients => {
                if n < 1 {
                    return Err(Error::InvalidInput("trace index must be at least 1".into()));
                }
                let poly = self
                    .expanded
                    .get(n as usize - 1)
                    .ok_or(Error::CapExceeded {
                        what: "expanded index",
                        value: n as u64,
                        cap: self.expanded.len() as u64,
                    })?;
                Ok(poly.eval_ball(x))
            }
        }
    }
}

/// Consecutive members `(P_{k-1}, P_k)` of a sequence driven by the
/// dynamic, as series in a common frame.
#[derive(Clone, Debug)]
pub struct SeriesPair {
    pub prev: LocalSeries,
    pub curr: LocalSeries,
    pub index: i64,
}

/// `(P_k, P_{k-1}) -> (P_{k+1}, P_k)` with `P_{k+1} = P_{k-1}^2 (P_k - 2) + 2`.
pub fn phi_step(pair: &SeriesPair) -> Result<SeriesPair> {
    let two = Ball::from_i64(pair.curr.prec(), 2);
    let next = pair
        .prev
        .sqr()
        .mul(&pair.curr.add_scalar(&two.neg()))?
        .add_scalar(&two);
    Ok(SeriesPair {
        prev: pair.curr.clone(),
        curr: next,
        index: pair.index + 1,
    })
}

/// Series of `h_1, ..., h_n` in the frame `x = center + scale * u`.
pub fn trace_series(
    n: u32,
    lambda: &Ball,
    center: &Ball,
    scale: &Ball,
    order: usize,
) -> Result<Vec<LocalSeries>> {
    if n < 1 {
        return Err(Error::InvalidInput("trace index must be at least 1".into()));
    }
    let prec = center.prec();
    let mut xc = vec![Ball::zero(prec); order + 1];
    xc[0] = center.clone();
    if order >= 1 {
        xc[1] = scale.clone();
    }
    let x = LocalSeries::with_frame(center.clone(), scale.clone(), xc);
    let x2 = x.sqr();
    let shifted = x2.add_scalar(&lambda.sqr().neg());
    let h1 = shifted.add_scalar(&Ball::from_i64(prec, -2));
    let h2 = shifted
        .sqr()
        .sub(&x2.scalar_mul(&Ball::from_i64(prec, 4)))?
        .add_scalar(&Ball::from_i64(prec, 2));
    let mut out = vec![h1, h2];
    let mut pair = SeriesPair {
        prev: out[0].clone(),
        curr: out[1].clone(),
        index: 2,
    };
    while out.len() < n as usize {
        pair = phi_step(&pair)?;
        out.push(pair.curr.clone());
    }
    out.truncate(n as usize);
    Ok(out)
}

/// Initial pair `(P_{-1}, P_0)` of a sequence driven by the dynamic.
#[derive(Clone, Debug)]
pub enum BasePair {
    /// `(h_first, h_{first+1})` for the given coupling.
    Trace { lambda: Ball, first: u32 },
    /// `P_{-1}(y) = Q_{-1}(rho (y - base) / 2)`, `P_0(y) = Q_0(rho (y - base))`
    /// with `Q_j = 2 cos + D_j` and `D_j` the given polynomial deviations.
    Renormalized {
        base: Ball,
        rho: Ball,
        dev_prev: Vec<Ball>,
        dev_curr: Vec<Ball>,
    },
}

fn eval_poly(coeffs: &[Ball], t: &Ball) -> Ball {
    let mut acc = Ball::zero(t.prec());
    for c in coeffs.iter().rev() {
        acc = acc.mul(t).add(c);
    }
    acc
}

impl BasePair {
    pub fn trace(lambda: Ball, first: u32) -> Self {
        assert!(first >= 1, "trace pairs start at h_1");
        BasePair::Trace { lambda, first }
    }

    /// The exact cosine pair: every renormalized iterate is `2 cos`.
    pub fn cosine(base: Ball, rho: Ball) -> Self {
        BasePair::Renormalized {
            base,
            rho,
            dev_prev: Vec::new(),
            dev_curr: Vec::new(),
        }
    }

    /// `(P_{-1}(y), P_0(y))`.
    pub fn eval(&self, y: &Ball) -> (Ball, Ball) {
        match self {
            BasePair::Trace { lambda, first } => {
                let seq = trace_sequence(first + 1, lambda, y).expect("first >= 1");
                let n = seq.len();
                (seq[n - 2].clone(), seq[n - 1].clone())
            }
            BasePair::Renormalized {
                base,
                rho,
                dev_prev,
                dev_curr,
            } => {
                let t = rho.mul(&y.sub(base));
                let half = t.mul_2si(-1);
                let prev = half.cos().mul_2si(1).add(&eval_poly(dev_prev, &half));
                let curr = t.cos().mul_2si(1).add(&eval_poly(dev_curr, &t));
                (prev, curr)
            }
        }
    }

    /// Series of `(P_{-1}, P_0)` in the frame `x = center + scale * u`.
    pub fn series(
        &self,
        center: &Ball,
        scale: &Ball,
        order: usize,
    ) -> Result<(LocalSeries, LocalSeries)> {
        match self {
            BasePair::Trace { lambda, first } => {
                let tower = trace_series(first + 1, lambda, center, scale, order)?;
                let n = tower.len();
                Ok((tower[n - 2].clone(), tower[n - 1].clone()))
            }
            BasePair::Renormalized {
                base,
                rho,
                dev_prev,
                dev_curr,
            } => {
                let prec = center.prec();
                let zero = Ball::zero(prec);
                let phase = rho.mul(&center.sub(base));
                let slope = rho.mul(scale);
                let build = |phase: &Ball, slope: &Ball, dev: &[Ball]| -> Result<LocalSeries> {
                    let cos = cos_series(order, phase, zero.clone()).affine_arg(slope, &zero)?;
                    let mut dc = dev.to_vec();
                    if dc.len() > order + 1 {
                        return Err(Error::InvalidInput(
                            "deviation polynomial exceeds the series order".into(),
                        ));
                    }
                    dc.resize(order + 1, zero.clone());
                    let d = LocalSeries::new(zero.clone(), dc).affine_arg(slope, phase)?;
                    let d = d.reframed(zero.clone(), cos.scale().clone());
                    Ok(cos.add(&d)?.reframed(center.clone(), scale.clone()))
                };
                let prev = build(&phase.mul_2si(-1), &slope.mul_2si(-1), dev_prev)?;
                let curr = build(&phase, &slope, dev_curr)?;
                Ok((prev, curr))
            }
        }
    }
}

/// A base pair with a base point and renormalization factor `rho`, so that
/// `Q_k(x) = P_k(x / (2^k rho) + base)`.
#[derive(Clone, Debug)]
pub struct Germ {
    pub pair: BasePair,
    pub base: Ball,
    pub rho: Ball,
}

impl Germ {
    pub fn new(pair: BasePair, base: Ball, rho: Ball) -> Result<Self> {
        if rho.contains_zero() {
            return Err(Error::SingularScale);
        }
        Ok(Germ { pair, base, rho })
    }

    /// Exact cosine germ with `Delta_{-1} = Delta_0 = 0`.
    pub fn cosine(base: Ball, rho: Ball) -> Result<Self> {
        Self::new(BasePair::cosine(base.clone(), rho.clone()), base, rho)
    }

    pub fn prec(&self) -> u32 {
        self.base.prec()
    }

    /// `P_{-1}(y), P_0(y), ..., P_k(y)`.
    pub fn iterates(&self, k: i64, y: &Ball) -> Vec<Ball> {
        let (prev, curr) = self.pair.eval(y);
        let mut out = vec![prev, curr];
        while (out.len() as i64) < k + 2 {
            let n = out.len();
            let next = step(&out[n - 2], &out[n - 1]);
            out.push(next);
        }
        out.truncate((k + 2).max(1) as usize);
        out
    }

    /// `P_k(y)` for `k >= -1`.
    pub fn eval_p(&self, k: i64, y: &Ball) -> Ball {
        assert!(k >= -1, "iterates start at P_{{-1}}");
        self.iterates(k, y).pop().expect("nonempty")
    }

    /// The point `base + x / (2^k rho)`.
    pub fn renormalized_point(&self, k: i64, x: &Ball) -> Ball {
        let u = x.div(&self.rho).expect("rho excludes zero");
        self.base.add(&u.mul_2si(-(k as i32)))
    }

    /// `Q_k(x)`.
    pub fn q(&self, k: i64, x: &Ball) -> Ball {
        self.eval_p(k, &self.renormalized_point(k, x))
    }

    /// `Delta_k(x) = Q_k(x) - 2 cos x`.
    pub fn delta(&self, k: i64, x: &Ball) -> Ball {
        self.q(k, x).sub(&x.cos().mul_2si(1))
    }

    /// `(Q_{-1}, Q_0)` as series in the renormalized variable.
    pub fn q_base_series(&self, order: usize) -> Result<(LocalSeries, LocalSeries)> {
        let scale = self.rho.recip()?;
        let (p_prev, p_curr) = self.pair.series(&self.base, &scale, order)?;
        // P_{-1}(base + u/rho) = Q_{-1}(u/2)
        Ok((p_prev.pow2_arg(1), p_curr))
    }

    /// `Q_{-1}, ..., Q_{k_max}` as series, by the renormalized recurrence
    /// `Q_k(x) = Q_{k-2}(x/4)^2 (Q_{k-1}(x/2) - 2) + 2`.
    pub fn q_tower(&self, k_max: i64, order: usize) -> Result<Vec<LocalSeries>> {
        let (q_prev, q_curr) = self.q_base_series(order)?;
        let two = Ball::from_i64(self.prec(), 2);
        let mut out = vec![q_prev, q_curr];
        while (out.len() as i64) < k_max + 2 {
            let n = out.len();
            let older = out[n - 2].pow2_arg(-2);
            let newer = out[n - 1].pow2_arg(-1);
            let next = older
                .sqr()
                .mul(&newer.add_scalar(&two.neg()))?
                .add_scalar(&two);
            out.push(next);
        }
        Ok(out)
    }

    /// `Delta_{-1}, ..., Delta_{k_max}` as series.
    pub fn delta_tower(&self, k_max: i64, order: usize) -> Result<Vec<LocalSeries>> {
        self.q_tower(k_max, order)?
            .into_iter()
            .map(|q| q.sub(&cos_series_like(&q)))
            .collect()
    }
}

/// `Delta_k(x)` evaluated pointwise through the recurrence tower.
pub fn renormalized_delta(germ: &Germ, k: i64, x: &Ball) -> Result<Ball> {
    if k < -1 {
        return Err(Error::InvalidInput("k must be at least -1".into()));
    }
    Ok(germ.delta(k, x))
}

/// `|Delta_k(x) - R(x)|` where `R` is the right-hand side of the deviation
/// recurrence
/// `(2 + 2cos(x/2)) D_{k-1}(x/2) + D_{k-2}(x/4) (4cos(x/4) + D_{k-2}(x/4)) (2cos(x/2) - 2 + D_{k-1}(x/2))`.
pub fn delta_recurrence_residual(germ: &Germ, k: i64, x: &Ball) -> Result<Ball> {
    if k < 1 {
        return Err(Error::InvalidInput(
            "the deviation recurrence needs k >= 1".into(),
        ));
    }
    let half = x.mul_2si(-1);
    let quarter = x.mul_2si(-2);
    let d1 = germ.delta(k - 1, &half);
    let d2 = germ.delta(k - 2, &quarter);
    let c2 = half.cos().mul_2si(1);
    let c4 = quarter.cos().mul_2si(2);
    let first = c2.add_i64(2).mul(&d1);
    let second = d2.mul(&c4.add(&d2)).mul(&c2.add_i64(-2).add(&d1));
    let rhs = first.add(&second);
    Ok(germ.delta(k, x).sub(&rhs).abs())
}

/// One row of [`ErrorGrowthReport`].
#[derive(Clone, Debug)]
pub struct ErrorGrowthRow {
    pub n: u32,
    /// Grid sup of `|phi_n(x) - 2 cos(2^{n+3} x)|` on `[-pi/2^n, pi/2^n]`.
    pub sup: f64,
    /// `30^{n-1} delta`.
    pub bound: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct ErrorGrowthReport {
    pub delta: f64,
    pub sup_phi0: f64,
    pub sup_phi1: f64,
    pub rows: Vec<ErrorGrowthRow>,
    pub points_per_unit: usize,
}

impl ErrorGrowthReport {
    pub fn verdict(&self) -> Verdict {
        Verdict::all(self.rows.iter().map(|r| r.verdict))
    }
}

/// Evaluation handle for a real function on balls.
pub type Handle<'a> = &'a (dyn Fn(&Ball) -> Ball + Sync);

/// Grid check of the error growth `|phi_n - 2 cos 2^{n+3} x| <= 30^{n-1} delta`
/// for `phi_n = phi_{n-2}^2 (phi_{n-1} - 2) + 2`.
///
/// The hypotheses `|phi_0 - 2 cos 8x| <= delta` on `[-pi, pi]` and
/// `|phi_1 - 2 cos 16x| <= delta` on `[-pi/2, pi/2]` are grid-checked first.
/// Grid sups are lower bounds of the true sups.
pub fn verify_error_growth(
    phi0: Handle<'_>,
    phi1: Handle<'_>,
    delta: f64,
    n_max: u32,
    prec: u32,
    points_per_unit: usize,
) -> Result<ErrorGrowthReport> {
    if n_max < 2 {
        return Err(Error::InvalidInput("n_max must be at least 2".into()));
    }
    let pi = Ball::pi(prec);
    let two_cos = |m: i32, x: &Ball| x.mul_2si(m).cos().mul_2si(1);

    let g0 = grid::symmetric(prec, &pi, points_per_unit);
    let sup0 = grid::sup_abs(&g0, |x| phi0(x).sub(&two_cos(3, x)));
    let g1 = grid::symmetric(prec, &pi.mul_2si(-1), points_per_unit);
    let sup1 = grid::sup_abs(&g1, |x| phi1(x).sub(&two_cos(4, x)));
    if sup0.le(delta) == Verdict::Refuted || sup1.le(delta) == Verdict::Refuted {
        return Err(Error::Precondition(format!(
            "initial sup errors {:e}, {:e} exceed delta = {delta:e}",
            sup0.lower, sup1.lower
        )));
    }

    let mut rows = Vec::new();
    for n in 2..=n_max {
        let half_width = pi.mul_2si(-(n as i32));
        let pts = grid::symmetric(prec, &half_width, points_per_unit);
        let sup = grid::sup_abs(&pts, |x| {
            let mut older = phi0(x);
            let mut newer = phi1(x);
            for _ in 2..=n {
                let next = step(&older, &newer);
                older = std::mem::replace(&mut newer, next);
            }
            newer.sub(&two_cos(n as i32 + 3, x))
        });
        let bound = 30f64.powi(n as i32 - 1) * delta;
        rows.push(ErrorGrowthRow {
            n,
            sup: sup.upper,
            bound,
            verdict: sup.le(bound),
        });
    }
    Ok(ErrorGrowthReport {
        delta,
        sup_phi0: sup0.upper,
        sup_phi1: sup1.upper,
        rows,
        points_per_unit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn b(x: f64) -> Ball {
        Ball::from_f64(P, x)
    }

    #[test]
    fn small_trace_values() {
        assert!(trace_eval(1, &b(0.0), &b(2.0))
            .unwrap()
            .contains_rational(&Rational::from(2)));
        // h1(1) = -1, h2(1) = -1, h3(1) = 1 * (-3) + 2 = -1
        let h3 = trace_eval(3, &b(0.0), &b(1.0)).unwrap();
        assert!(h3.contains_rational(&Rational::from(-1)));
        assert!(h3.is_exact());
        // conjugacy: 1 = 2 cos(pi/3), h3 = 2 cos(8 pi/3) = -1
        let x = Ball::pi(P).div(&b(3.0)).unwrap().cos().mul_2si(1);
        let h3c = trace_eval(3, &b(0.0), &x).unwrap();
        assert!(h3c.contains_rational(&Rational::from(-1)));
        assert!(trace_eval(0, &b(0.0), &b(1.0)).is_err());
    }

    #[test]
    fn h1_vanishes_at_base_point() {
        for lam in [0.0, 0.3, 1.0, 2.5] {
            let l = b(lam);
            let a = l.sqr().add_i64(2).sqrt().unwrap();
            assert!(trace_eval(1, &l, &a).unwrap().contains_zero());
        }
    }

    #[test]
    fn expansion_small_cases() {
        let h2 = trace_poly_expand(2, &Rational::from(0)).unwrap();
        let want: Vec<Rational> = [2, 0, -4, 0, 1]
            .iter()
            .map(|&c| Rational::from(c))
            .collect();
        assert_eq!(h2.coeffs(), &want[..]);
        let h1 = trace_poly_expand(1, &Rational::from(1)).unwrap();
        let want: Vec<Rational> = [-3, 0, 1].iter().map(|&c| Rational::from(c)).collect();
        assert_eq!(h1.coeffs(), &want[..]);
        assert!(matches!(
            trace_poly_expand(11, &Rational::from(0)),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn degree_law() {
        let tower = trace_poly_tower(8, &Rational::from((1, 3)), EXPAND_CAP).unwrap();
        for (i, p) in tower.iter().enumerate() {
            assert_eq!(p.degree(), 1 << (i + 1));
            assert_eq!(*p.leading(), 1);
        }
    }

    #[test]
    fn phi_fixes_two() {
        let (x, y) = phi(&b(2.0), &b(2.0));
        assert_eq!(x.mid_f64(), 2.0);
        assert_eq!(y.mid_f64(), 2.0);
        assert!(x.is_exact());
    }

    #[test]
    fn phi_step_constant_cases() {
        let c = b(0.0);
        let two = LocalSeries::constant(c.clone(), b(2.0), 4);
        let p = phi_step(&SeriesPair {
            prev: two.clone(),
            curr: two.clone(),
            index: 0,
        })
        .unwrap();
        assert_eq!(p.curr.coeff(0).mid_f64(), 2.0);
        assert_eq!(p.index, 1);
        let any = cos_series(4, &b(0.4), c.clone());
        let p = phi_step(&SeriesPair {
            prev: LocalSeries::zero(c, 4),
            curr: any,
            index: 0,
        })
        .unwrap();
        assert_eq!(p.curr.coeff(0).mid_f64(), 2.0);
        assert!(p.curr.coeffs()[1..].iter().all(|a| a.mid_f64() == 0.0));
    }

    #[test]
    fn phi_step_doubles_cosine_frequency() {
        let order = 24;
        let zero = b(0.0);
        let c1 = cos_series(order, &zero, zero.clone());
        let half = c1
            .affine_arg(&b(0.5), &zero)
            .unwrap()
            .reframed(zero.clone(), b(1.0));
        let p = phi_step(&SeriesPair {
            prev: half,
            curr: c1.clone(),
            index: 0,
        })
        .unwrap();
        let doubled = c1.affine_arg(&b(2.0), &zero).unwrap();
        for n in 0..=order {
            assert!(
                (p.curr.coeff(n).mid_f64() - doubled.coeff(n).mid_f64()).abs() < 1e-30,
                "n = {n}"
            );
        }
    }

    #[test]
    fn trace_series_matches_point_values() {
        let lam = b(1.0);
        let c = b(1.7);
        let s = trace_series(5, &lam, &c, &b(1.0), 40).unwrap();
        for u in [-0.01, 0.0, 0.02] {
            let direct = trace_eval(5, &lam, &c.add(&b(u))).unwrap();
            let via = s[4].eval(&b(u));
            assert!(direct.overlaps(&via), "u = {u}");
        }
    }

    #[test]
    fn expanded_mode_matches_point_mode() {
        let pair = TracePair::expanded(P, &Rational::from((1, 2)), 6).unwrap();
        let point = TracePair::point(b(0.5));
        for x in [-1.3, 0.0, 0.77, 2.1] {
            for n in 1..=6 {
                let a = pair.eval(n, &b(x)).unwrap();
                let c = point.eval(n, &b(x)).unwrap();
                assert!(a.overlaps(&c));
            }
        }
    }

    #[test]
    fn cosine_germ_has_zero_deviation() {
        let g = Germ::cosine(b(0.3), b(5.0)).unwrap();
        for k in [-1, 0, 3, 9] {
            for x in [-1.2, 0.0, 0.4, 2.9] {
                let d = g.delta(k, &b(x));
                assert!(d.contains_zero(), "k={k} x={x}");
                assert!(d.rad_f64() < 1e-50);
            }
        }
        let tower = g.delta_tower(6, 20).unwrap();
        for d in &tower {
            assert!(d
                .coeffs()
                .iter()
                .all(|c| c.contains_zero() && c.rad_f64() < 1e-50));
        }
    }

    #[test]
    fn residual_vanishes_for_cosine_germ() {
        let g = Germ::cosine(b(0.0), b(3.0)).unwrap();
        let r = delta_recurrence_residual(&g, 4, &b(1.1)).unwrap();
        assert!(r.contains_zero());
        assert!(delta_recurrence_residual(&g, 0, &b(1.0)).is_err());
    }

    #[test]
    fn renormalized_pair_series_matches_points() {
        let pair = BasePair::Renormalized {
            base: b(0.5),
            rho: b(4.0),
            dev_prev: vec![b(0.0), b(0.0), b(0.0), b(0.01)],
            dev_curr: vec![b(0.0), b(0.0), b(0.0), b(-0.02), b(0.005)],
        };
        let (sp, sc) = pair.series(&b(0.6), &b(0.1), 20).unwrap();
        for u in [-0.3, 0.0, 0.2] {
            let y = b(0.6).add(&b(0.1).mul(&b(u)));
            let (p, c) = pair.eval(&y);
            assert!((p.mid_f64() - sp.eval(&b(u)).mid_f64()).abs() < 1e-12);
            assert!((c.mid_f64() - sc.eval(&b(u)).mid_f64()).abs() < 1e-12);
        }
    }

    #[test]
    fn error_growth_exact_cosines() {
        let p0 = |x: &Ball| x.mul_2si(3).cos().mul_2si(1);
        let p1 = |x: &Ball| x.mul_2si(4).cos().mul_2si(1);
        let rep = verify_error_growth(&p0, &p1, 0.0, 4, P, 64).unwrap();
        assert!(rep.rows.iter().all(|r| r.sup < 1e-60));
        assert_eq!(rep.rows[0].bound, 0.0);
        assert_ne!(rep.verdict(), Verdict::Refuted);
    }

    #[test]
    fn error_growth_rejects_bad_input() {
        let p0 = |x: &Ball| x.mul_2si(3).cos().mul_2si(1).add(&b(0.1));
        let p1 = |x: &Ball| x.mul_2si(4).cos().mul_2si(1);
        assert!(matches!(
            verify_error_growth(&p0, &p1, 1e-3, 3, P, 64),
            Err(Error::Precondition(_))
        ));
    }
}
