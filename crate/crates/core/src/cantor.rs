//! The nested-interval Cantor subset of the spectrum around `a = sqrt(2 + lambda^2)`.
//!
//! With `P_k = h_{k+5}`, the root interval is `[a, b]` where `b` is the first
//! zero of `P_{K-4}` to the right of `a`. A generation-`k` interval `I_w` is
//! split by the smallest zero `b_{w0}` and the largest zero `a_{w1}` of
//! `P_{(k+2)K-4}` in `I_w` into `I_{w0} = [a_w, b_{w0}]` and
//! `I_{w1} = [a_{w1}, b_w]`.

use rayon::prelude::*;
use serde::Serialize;

use crate::ball::Ball;
use crate::dynamics::{phi_step, trace_eval, BasePair, Germ, SeriesPair};
use crate::error::{Error, Result};
use crate::germ::{alpha_pow, check_germ, check_regularity, germ_from_zero, GermCertificate};
use crate::roots::{find_zero, Side, ZeroBracket};
use crate::verdict::Verdict;

/// Feasibility cap on `(depth + 2) K` in [`build_tree`].
pub const TRACE_INDEX_CAP: u32 = 26;
/// Endpoint enclosure width, relative to the searched interval.
pub const ENDPOINT_REL_WIDTH_LOG2: i32 = -80;
/// Scan nodes per expected distance to the nearest zero.
const SCAN_DENSITY: f64 = 32.0;

/// `sqrt(2 + lambda^2)`, the zero of `h_1` to the right of the origin.
pub fn base_point(lambda: &Ball) -> Ball {
    lambda.sqr().add_i64(2).sqrt().expect("2 + lambda^2 > 0")
}

/// `(1 + 2 lambda^2) sqrt((1 + lambda^2)(2 + lambda^2))`.
pub fn rho_lambda(lambda: &Ball) -> Ball {
    let l2 = lambda.sqr();
    let root = l2.add_i64(1).mul(&l2.add_i64(2)).sqrt().expect("positive");
    l2.mul_i64(2).add_i64(1).mul(&root)
}

/// `(h_4, h_5)` at the base point together with its certificate.
#[derive(Clone, Debug)]
pub struct InitialGerm {
    pub lambda: Ball,
    pub germ: Germ,
    pub certificate: GermCertificate,
    /// `(1 + 2 lambda^2) sqrt((1 + lambda^2)(2 + lambda^2))`.
    pub rho: Ball,
    /// The renormalization factor `2^4 rho` of the pair.
    pub factor: Ball,
    /// `2 tau` with `t = 2a`, `tau = t (t^2 - 6) sqrt(t^2 - 4)`.
    pub tau_factor: Ball,
    /// Twice the germ factor of `(h_1, h_2)` at the base point.
    pub zero_factor: Ball,
    /// Both re-derived factors agree with `2^4 rho` to ball width.
    pub cross_check: Verdict,
}

impl InitialGerm {
    pub fn verdict(&self) -> Verdict {
        self.certificate.verdict.and(self.cross_check)
    }
}

/// Certifies that `(h_4, h_5)` is `(1, 1)`-regular at the base point with
/// factor `2^4 rho`, at the precision of `lambda`.
pub fn initial_germ(lambda: &Ball, order: usize) -> Result<InitialGerm> {
    let prec = lambda.prec();
    let a = base_point(lambda);
    let rho = rho_lambda(lambda);
    let factor = rho.mul_2si(4);

    let t = a.mul_2si(1);
    let t2 = t.sqr();
    let tau = t.mul(&t2.add_i64(-6)).mul(&t2.add_i64(-4).sqrt()?);
    let tau_factor = tau.mul_2si(1);

    let one = Ball::from_i64(prec, 1);
    let tower = crate::dynamics::trace_series(2, lambda, &a, &one, 2)?;
    let zero_factor = germ_from_zero(&tower[0], &tower[1], &a)?.mul_2si(1);
    let cross_check =
        Verdict::from_bool(tau_factor.overlaps(&factor) && zero_factor.overlaps(&factor));

    let germ = Germ::new(BasePair::trace(lambda.clone(), 4), a, factor.clone())?;
    let certificate = check_germ(&germ, &one, &one, order)?;
    Ok(InitialGerm {
        lambda: lambda.clone(),
        germ,
        certificate,
        rho,
        factor,
        tau_factor,
        zero_factor,
        cross_check,
    })
}

/// `ln 2 / (K ln 2.1)`.
pub fn dim_lower_bound(k: u64) -> f64 {
    std::f64::consts::LN_2 / (k as f64 * 2.1f64.ln())
}

/// Ball enclosure of `ln 2 / (K ln 2.1)`.
pub fn dim_lower_bound_ball(prec: u32, k: u64) -> Result<Ball> {
    if k == 0 {
        return Err(Error::InvalidInput("K must be positive".into()));
    }
    let r = Ball::from_rational(prec, &rug::Rational::from((21, 10)));
    Ball::ln2(prec).div(&r.ln()?.mul_i64(k as i64))
}

#[derive(Clone, Debug)]
pub struct CantorNode {
    pub word: String,
    pub a: Ball,
    pub b: Ball,
    pub gen: u32,
    /// `n` such that the endpoint created with this node is a zero of `h_n`.
    pub zero_level: u32,
    /// Zero isolation failure while splitting this node.
    pub failure: Option<String>,
}

impl CantorNode {
    pub fn length(&self) -> Ball {
        self.b.sub(&self.a)
    }

    /// The endpoint created together with this node, if any.
    pub fn new_endpoint(&self) -> &Ball {
        if self.word.ends_with('1') {
            &self.a
        } else {
            &self.b
        }
    }
}

#[derive(Clone, Debug)]
pub struct CantorTree {
    pub lambda: Ball,
    pub k_sim: u32,
    pub depth: u32,
    /// Nodes in breadth-first word order.
    pub nodes: Vec<CantorNode>,
}

/// `h` index of `P_{(gen+1) K - 4}`, the polynomial whose zeros bound
/// generation-`gen` intervals.
pub fn level_index(k_sim: u32, gen: u32) -> u32 {
    (gen + 1) * k_sim + 1
}

fn trace_handle(lambda: &Ball, n: u32) -> impl Fn(&Ball) -> Ball + Sync + '_ {
    move |x: &Ball| trace_eval(n, lambda, x).expect("n >= 1")
}

fn split(lambda: &Ball, k_sim: u32, node: &CantorNode) -> Result<(CantorNode, CantorNode)> {
    let n = level_index(k_sim, node.gen + 1);
    let f = trace_handle(lambda, n);
    let len = node.length().mid_f64();
    let step = len * 2.1f64.powi(-(k_sim as i32)) / SCAN_DENSITY;
    let left = find_zero(
        &f,
        &node.a,
        &node.b,
        Side::Minimal,
        step,
        ENDPOINT_REL_WIDTH_LOG2,
    )?;
    let right = find_zero(
        &f,
        &node.a,
        &node.b,
        Side::Maximal,
        step,
        ENDPOINT_REL_WIDTH_LOG2,
    )?;
    if right.zero.le(&left.zero) != Verdict::Refuted {
        return Err(Error::Undecidable("children are not separated".into()));
    }
    let child = |suffix: char, a: Ball, b: Ball| CantorNode {
        word: format!("{}{suffix}", node.word),
        a,
        b,
        gen: node.gen + 1,
        zero_level: n,
        failure: None,
    };
    Ok((
        child('0', node.a.clone(), left.zero),
        child('1', right.zero, node.b.clone()),
    ))
}

/// First zero of `P_{K-4}` to the right of the germ base.
fn first_zero_right(
    germ: &Germ,
    f: &(dyn Fn(&Ball) -> Ball + Sync),
    index: i64,
) -> Result<ZeroBracket> {
    let scale = germ.rho.mul_2si(index as i32).recip()?;
    let reach = scale.mul_i64(4);
    let step = scale.mid_f64() * std::f64::consts::FRAC_PI_2 / SCAN_DENSITY;
    find_zero(
        f,
        &germ.base,
        &germ.base.add(&reach),
        Side::Minimal,
        step,
        ENDPOINT_REL_WIDTH_LOG2,
    )
}

fn last_zero_left(
    germ: &Germ,
    f: &(dyn Fn(&Ball) -> Ball + Sync),
    index: i64,
) -> Result<ZeroBracket> {
    let scale = germ.rho.mul_2si(index as i32).recip()?;
    let reach = scale.mul_i64(4);
    let step = scale.mid_f64() * std::f64::consts::FRAC_PI_2 / SCAN_DENSITY;
    find_zero(
        f,
        &germ.base.sub(&reach),
        &germ.base,
        Side::Maximal,
        step,
        ENDPOINT_REL_WIDTH_LOG2,
    )
}

/// Builds the tree to the given depth. Zero isolation failures are recorded
/// on the affected node, which is then left without children.
pub fn build_tree(lambda: &Ball, k_sim: u32, depth: u32) -> Result<CantorTree> {
    if k_sim < 5 {
        return Err(Error::InvalidInput("K_sim must be at least 5".into()));
    }
    if (depth + 2) * k_sim > TRACE_INDEX_CAP {
        return Err(Error::CapExceeded {
            what: "trace index (depth + 2) K_sim",
            value: ((depth + 2) * k_sim) as u64,
            cap: TRACE_INDEX_CAP as u64,
        });
    }
    let a = base_point(lambda);
    let germ = Germ::new(
        BasePair::trace(lambda.clone(), 4),
        a.clone(),
        rho_lambda(lambda).mul_2si(4),
    )?;
    let n0 = level_index(k_sim, 0);
    let f = trace_handle(lambda, n0);
    let b = first_zero_right(&germ, &f, k_sim as i64 - 4)?;
    let root = CantorNode {
        word: String::new(),
        a,
        b: b.zero,
        gen: 0,
        zero_level: n0,
        failure: None,
    };
    let mut nodes = vec![root];
    let mut frontier = vec![0usize];
    for _ in 0..depth {
        let results: Vec<Result<(CantorNode, CantorNode)>> = frontier
            .par_iter()
            .map(|&i| split(lambda, k_sim, &nodes[i]))
            .collect();
        let mut next = Vec::new();
        for (&i, r) in frontier.iter().zip(results) {
            match r {
                Ok((l, r)) => {
                    next.push(nodes.len());
                    nodes.push(l);
                    next.push(nodes.len());
                    nodes.push(r);
                }
                Err(e) => nodes[i].failure = Some(e.to_string()),
            }
        }
        frontier = next;
    }
    Ok(CantorTree {
        lambda: lambda.clone(),
        k_sim,
        depth,
        nodes,
    })
}

/// Invariant verdicts of a built tree.
#[derive(Clone, Debug, Serialize)]
pub struct TreeInvariants {
    pub complete: bool,
    /// Children lie inside their parent and share its outer endpoints.
    pub nesting: Verdict,
    /// Siblings are disjoint.
    pub disjoint: Verdict,
    /// Every created endpoint is a certified zero of its `h_n`.
    pub endpoint_zeros: Verdict,
    /// `{P_{(k+1)K-4}(a_w), P_{(k+1)K-4}(b_w)} = {0, 2}` at every node.
    pub endpoint_values: Verdict,
}

impl TreeInvariants {
    pub fn verdict(&self) -> Verdict {
        Verdict::from_bool(self.complete)
            .and(self.nesting)
            .and(self.disjoint)
            .and(self.endpoint_zeros)
            .and(self.endpoint_values)
    }
}

impl CantorTree {
    pub fn node(&self, word: &str) -> Option<&CantorNode> {
        self.nodes.iter().find(|n| n.word == word)
    }

    pub fn children(&self, word: &str) -> Option<(&CantorNode, &CantorNode)> {
        Some((
            self.node(&format!("{word}0"))?,
            self.node(&format!("{word}1"))?,
        ))
    }

    pub fn is_complete(&self) -> bool {
        self.nodes.len() == (1usize << (self.depth + 1)) - 1
    }

    pub fn check_invariants(&self) -> TreeInvariants {
        let lam = &self.lambda;
        let mut nesting = Vec::new();
        let mut disjoint = Vec::new();
        for node in &self.nodes {
            if let Some((l, r)) = self.children(&node.word) {
                let shared =
                    Verdict::from_bool(l.a.mid() == node.a.mid() && r.b.mid() == node.b.mid());
                let ends = Verdict::from_bool(
                    node.a.le(&l.a) != Verdict::Refuted && r.b.le(&node.b) != Verdict::Refuted,
                );
                let interior =
                    l.b.lt(&node.b)
                        .and(node.a.lt(&r.a))
                        .and(l.a.lt(&l.b))
                        .and(r.a.lt(&r.b));
                nesting.push(shared.and(ends).and(interior));
                disjoint.push(l.b.lt(&r.a));
            }
        }
        let endpoint_zeros = Verdict::all(self.nodes.iter().map(|n| {
            let e = n.new_endpoint();
            Verdict::from_bool(
                trace_eval(n.zero_level, lam, e)
                    .expect("n >= 1")
                    .contains_zero(),
            )
        }));
        let endpoint_values = Verdict::all(self.nodes.iter().map(|n| {
            let idx = level_index(self.k_sim, n.gen);
            let va = trace_eval(idx, lam, &n.a).expect("n >= 1");
            let vb = trace_eval(idx, lam, &n.b).expect("n >= 1");
            let two = Ball::from_i64(va.prec(), 2);
            let is_two = |v: &Ball| v.overlaps(&two);
            Verdict::from_bool(
                (va.contains_zero() && is_two(&vb)) || (is_two(&va) && vb.contains_zero()),
            )
        }));
        TreeInvariants {
            complete: self.is_complete(),
            nesting: Verdict::all(nesting),
            disjoint: Verdict::all(disjoint),
            endpoint_zeros,
            endpoint_values,
        }
    }

    /// One record per node, in word order.
    pub fn records(&self, digits: usize) -> Vec<NodeRecord> {
        self.nodes
            .iter()
            .map(|n| {
                let (a, a_radius) = n.a.to_decimal(digits);
                let (b, b_radius) = n.b.to_decimal(digits);
                let ratios = self.children(&n.word).map(|(l, r)| {
                    let len = n.length();
                    [
                        l.length()
                            .div(&len)
                            .map(|q| q.mid_f64())
                            .unwrap_or(f64::NAN),
                        r.length()
                            .div(&len)
                            .map(|q| q.mid_f64())
                            .unwrap_or(f64::NAN),
                    ]
                });
                NodeRecord {
                    word: n.word.clone(),
                    a,
                    a_radius,
                    b,
                    b_radius,
                    gen: n.gen,
                    zero_level: n.zero_level,
                    child_ratios: ratios,
                    failure: n.failure.clone(),
                }
            })
            .collect()
    }
}

/// Serialized tree node; the field order is part of the output format.
#[derive(Clone, Debug, Serialize)]
pub struct NodeRecord {
    pub word: String,
    pub a: String,
    pub a_radius: String,
    pub b: String,
    pub b_radius: String,
    pub gen: u32,
    pub zero_level: u32,
    pub child_ratios: Option<[f64; 2]>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    pub k_used: u32,
    pub depth: u32,
    /// Smallest `|I_{wi}| / |I_w|` over the tree.
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `ln 2 / (-ln min_ratio)`.
    pub moran_bound: f64,
    /// `2.1^{-K_sim}`.
    pub contraction_bound: f64,
    /// `min_ratio >= 2.1^{-K_sim}`; an observation at desk scale.
    pub contraction_verdict: Verdict,
    pub k_certified: u64,
    /// `ln 2 / (K ln 2.1)` with the certified `K`.
    pub paper_bound: f64,
}

/// Child-to-parent length ratios and the resulting dimension bounds.
pub fn ratio_report(tree: &CantorTree, k_certified: u64) -> Result<DimensionReport> {
    let mut ratios: Vec<Ball> = Vec::new();
    for n in &tree.nodes {
        if let Some((l, r)) = tree.children(&n.word) {
            let len = n.length();
            ratios.push(l.length().div(&len)?);
            ratios.push(r.length().div(&len)?);
        }
    }
    if ratios.is_empty() {
        return Err(Error::InvalidInput(
            "ratio report needs a tree of depth at least 1".into(),
        ));
    }
    let min = ratios
        .iter()
        .map(|r| r.lower().to_f64())
        .fold(f64::INFINITY, f64::min);
    let max = ratios
        .iter()
        .map(|r| r.upper().to_f64())
        .fold(0.0, f64::max);
    let prec = tree.lambda.prec();
    let bound = Ball::from_rational(prec, &rug::Rational::from((10, 21))).powi(tree.k_sim);
    let contraction_verdict = Verdict::all(ratios.iter().map(|r| bound.le(r)));
    Ok(DimensionReport {
        k_used: tree.k_sim,
        depth: tree.depth,
        min_ratio: min,
        max_ratio: max,
        moran_bound: if min > 0.0 && min < 1.0 {
            std::f64::consts::LN_2 / -min.ln()
        } else {
            0.0
        },
        contraction_bound: bound.mid_f64(),
        contraction_verdict,
        k_certified,
        paper_bound: dim_lower_bound(k_certified),
    })
}

/// Single-step interval ratios around a regular germ.
#[derive(Clone, Debug)]
pub struct RatioCheck {
    /// Smallest zeros of `P_0`, `P_{-1}` to the right of the base.
    pub y_plus: [Ball; 2],
    /// Largest zeros of `P_0`, `P_{-1}` to the left of the base.
    pub y_minus: [Ball; 2],
    /// `|I+_{-1}| / |I+_0|` and `|I-_{-1}| / |I-_0|`.
    pub ratio_plus: Ball,
    pub ratio_minus: Ball,
    /// Both ratios `<= 2.1`.
    pub verdict: Verdict,
}

pub fn ratio_check(germ: &Germ) -> Result<RatioCheck> {
    let prec = germ.prec();
    let p0 = |y: &Ball| germ.eval_p(0, y);
    let pm1 = |y: &Ball| germ.eval_p(-1, y);
    // Q_0(t) = P_0(base + t / rho), Q_{-1}(t) = P_{-1}(base + 2t / rho)
    let u = germ.rho.recip()?;
    let step = u.mid_f64() / 512.0;
    let rel = -60;
    let base = &germ.base;
    let plus0 = find_zero(
        &p0,
        base,
        &base.add(&u.mul_i64(2)),
        Side::Minimal,
        step,
        rel,
    )?;
    let plus1 = find_zero(
        &pm1,
        base,
        &base.add(&u.mul_i64(4)),
        Side::Minimal,
        step,
        rel,
    )?;
    let minus0 = find_zero(
        &p0,
        &base.sub(&u.mul_i64(2)),
        base,
        Side::Maximal,
        step,
        rel,
    )?;
    let minus1 = find_zero(
        &pm1,
        &base.sub(&u.mul_i64(4)),
        base,
        Side::Maximal,
        step,
        rel,
    )?;
    let ratio_plus = plus1.zero.sub(base).div(&plus0.zero.sub(base))?;
    let ratio_minus = base.sub(&minus1.zero).div(&base.sub(&minus0.zero))?;
    let limit = Ball::from_rational(prec, &rug::Rational::from((21, 10)));
    let verdict = ratio_plus.le(&limit).and(ratio_minus.le(&limit));
    Ok(RatioCheck {
        y_plus: [plus0.zero, plus1.zero],
        y_minus: [minus0.zero, minus1.zero],
        ratio_plus,
        ratio_minus,
        verdict,
    })
}

/// Spacing of the zeros used by one splitting step around a germ base.
#[derive(Clone, Debug)]
pub struct KeySpacingReport {
    pub k_sim: u32,
    /// Smallest zero of `P_{K-4}` right of the base.
    pub theta_upper: Ball,
    /// Largest zero of `P_{2K-4}` in `(base, theta_upper)`.
    pub theta_upper_inner: Ball,
    /// `(theta_upper - theta_upper_inner) / (theta_upper - base)`.
    pub ratio_right: Ball,
    /// Largest zero of `P_{K-4}` left of the base.
    pub theta_lower: Ball,
    /// Smallest zero of `P_{2K-4}` in `(theta_lower, base)`.
    pub theta_lower_inner: Ball,
    /// `(theta_lower_inner - theta_lower) / (base - theta_lower)`.
    pub ratio_left: Ball,
    /// `2.1^{-K_sim}`.
    pub bound: Ball,
    pub verdict: Verdict,
    /// `(P_{K-1}, P_K)` at `theta_upper` against `(9 alpha^{K-7}, 2)`.
    pub handoff_relaxed: Verdict,
    /// `(P_{K-1}, P_K)` at `theta_upper` against `(1, 1)`.
    pub handoff_unit: Verdict,
    /// Renormalization factor of `(P_{K-1}, P_K)` at `theta_upper`.
    pub handoff_factor: Ball,
}

fn series_pair_at(
    germ: &Germ,
    center: &Ball,
    scale: &Ball,
    order: usize,
    index: i64,
) -> Result<SeriesPair> {
    let (prev, curr) = germ.pair.series(center, scale, order)?;
    let mut pair = SeriesPair {
        prev,
        curr,
        index: 0,
    };
    while pair.index < index {
        pair = phi_step(&pair)?;
    }
    Ok(pair)
}

pub fn key_spacing_check(germ: &Germ, k_sim: u32, order: usize) -> Result<KeySpacingReport> {
    let prec = germ.prec();
    let one = Ball::from_i64(prec, 1);
    let cert = check_germ(germ, &one, &one, order)?;
    if !cert.is_verified() {
        return Err(Error::Precondition(format!(
            "germ is not (1,1)-regular ({})",
            cert.verdict
        )));
    }
    if k_sim < 5 {
        return Err(Error::InvalidInput("K_sim must be at least 5".into()));
    }
    let k = k_sim as i64;
    let outer = |y: &Ball| germ.eval_p(k - 4, y);
    let inner = |y: &Ball| germ.eval_p(2 * k - 4, y);
    let base = &germ.base;
    let rel = ENDPOINT_REL_WIDTH_LOG2;

    let up = first_zero_right(germ, &outer, k - 4)?;
    let span = up.lo.sub(base).mid_f64();
    let step = span * 2.1f64.powi(-(k_sim as i32)) / SCAN_DENSITY;
    let up_in = find_zero(&inner, base, &up.lo, Side::Maximal, step, rel)?;
    let ratio_right = up.zero.sub(&up_in.zero).div(&up.zero.sub(base))?;

    let down = last_zero_left(germ, &outer, k - 4)?;
    let span = base.sub(&down.hi).mid_f64();
    let step = span * 2.1f64.powi(-(k_sim as i32)) / SCAN_DENSITY;
    let down_in = find_zero(&inner, &down.hi, base, Side::Minimal, step, rel)?;
    let ratio_left = down_in.zero.sub(&down.zero).div(&base.sub(&down.zero))?;

    let bound = Ball::from_rational(prec, &rug::Rational::from((10, 21))).powi(k_sim);
    let verdict = bound.le(&ratio_right).and(bound.le(&ratio_left));

    let theta = &up.zero;
    let scale = germ.rho.mul_2si(k_sim as i32).recip()?;
    let zero_pair = series_pair_at(germ, theta, &scale, order, k - 3)?;
    let rho_zero = germ_from_zero(&zero_pair.prev, &zero_pair.curr, theta)?;
    let handoff_factor = rho_zero.mul_2si(1);
    let mut pair = zero_pair;
    while pair.index < k {
        pair = phi_step(&pair)?;
    }
    let relaxed = check_regularity(
        &pair,
        theta,
        &handoff_factor,
        &alpha_pow(prec, k - 7).mul_i64(9),
        &Ball::from_i64(prec, 2),
    )?;
    let unit = check_regularity(&pair, theta, &handoff_factor, &one, &one)?;
    Ok(KeySpacingReport {
        k_sim,
        theta_upper: up.zero,
        theta_upper_inner: up_in.zero,
        ratio_right,
        theta_lower: down.zero,
        theta_lower_inner: down_in.zero,
        ratio_left,
        bound,
        verdict,
        handoff_relaxed: relaxed.verdict,
        handoff_unit: unit.verdict,
        handoff_factor,
    })
}

/// Deviation polynomial helper: a `(delta, 2)`-regular renormalized pair
/// with the given deviation coefficients (indices below 3 must be zero).
pub fn perturbed_germ(
    base: Ball,
    rho: Ball,
    dev_prev: Vec<Ball>,
    dev_curr: Vec<Ball>,
) -> Result<Germ> {
    let check = |d: &[Ball]| d.iter().take(3).all(Ball::contains_zero);
    if !check(&dev_prev) || !check(&dev_curr) {
        return Err(Error::InvalidInput(
            "deviation coefficients below degree 3 must vanish".into(),
        ));
    }
    let pair = BasePair::Renormalized {
        base: base.clone(),
        rho: rho.clone(),
        dev_prev,
        dev_curr,
    };
    Germ::new(pair, base, rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn b(x: f64) -> Ball {
        Ball::from_f64(P, x)
    }

    #[test]
    fn base_points() {
        assert!(base_point(&b(0.0)).overlaps(&b(2.0).sqrt().unwrap()));
        let a = base_point(&b(1.0));
        assert!((a.mid_f64() - 1.7320508075688772).abs() < 1e-15);
        assert!(trace_eval(1, &b(1.0), &a).unwrap().contains_zero());
    }

    #[test]
    fn initial_germ_lambda_one() {
        let g = initial_germ(&b(1.0), 64).unwrap();
        assert_eq!(g.verdict(), Verdict::Verified);
        // rho = 3 sqrt 6, factor 48 sqrt 6
        let expect = b(6.0).sqrt().unwrap().mul_i64(48);
        assert!(g.factor.overlaps(&expect));
    }

    #[test]
    fn dimension_bound_values() {
        assert!((dim_lower_bound(1) - 0.934_2).abs() < 1e-3);
        assert!((dim_lower_bound(80) - 0.011677).abs() < 1e-6);
        let ball = dim_lower_bound_ball(P, 10).unwrap();
        assert!((ball.mid_f64() - dim_lower_bound(10)).abs() < 1e-16);
        assert!(dim_lower_bound(2) < dim_lower_bound(1));
    }

    #[test]
    fn depth_zero_tree_is_root() {
        let t = build_tree(&b(1.0), 5, 0).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.check_invariants().verdict(), Verdict::Verified);
    }

    #[test]
    fn depth_one_tree_invariants() {
        let t = build_tree(&b(1.0), 5, 1).unwrap();
        assert_eq!(t.nodes.len(), 3);
        assert_eq!(t.check_invariants().verdict(), Verdict::Verified);
        let r = ratio_report(&t, 6897).unwrap();
        assert!(r.min_ratio > 0.0 && r.moran_bound > 0.0);
    }

    #[test]
    fn tree_caps() {
        assert!(build_tree(&b(1.0), 4, 1).is_err());
        assert!(matches!(
            build_tree(&b(1.0), 5, 4),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn cosine_germ_ratios() {
        let g = Germ::cosine(b(0.0), b(1.0)).unwrap();
        let r = ratio_check(&g).unwrap();
        assert!(r.ratio_plus.overlaps(&b(2.0)));
        assert!(r.ratio_minus.overlaps(&b(2.0)));
        assert_eq!(r.verdict, Verdict::Verified);
    }

    #[test]
    fn cosine_germ_key_spacing() {
        // zeros of 2cos(2^k x) on the dyadic lattice
        let g = Germ::cosine(b(0.0), b(1.0)).unwrap();
        let r = key_spacing_check(&g, 5, 32).unwrap();
        // theta+ = pi/2 / 2, theta_+ = theta+ - pi/2^7
        assert!(r.theta_upper.overlaps(&Ball::pi(P).mul_2si(-2)));
        assert!(r.ratio_right.overlaps(&b(1.0 / 32.0)));
        assert_eq!(r.verdict, Verdict::Verified);
    }
}
