use serde::Serialize;
use tmtrace::cantor::{
    build_tree, dim_lower_bound_ball, initial_germ, key_spacing_check, ratio_check, ratio_report,
    NodeRecord,
};
use tmtrace::constants::{constants_table, Residual};
use tmtrace::convergence::{convergence_report, SupMode};
use tmtrace::dynamics::trace_eval;
use tmtrace::roots::sigma_sample;
use tmtrace::series::MajorantCheck;
use tmtrace::verdict::precision_ladder;
use tmtrace::{Ball, DimensionReport, Error, Result, Verdict};

use crate::config::{RunConfig, MAX_PRECISION};
use crate::output::{sci, Dec, Output, Table};

/// Longest `k` range accepted by `converge`.
const MAX_K_ROWS: i64 = 1000;

fn verdict_str(v: Verdict) -> String {
    v.to_string()
}

/// Errors caused by balls that are too wide rather than by a failed check.
fn precision_limited(e: &Error) -> bool {
    matches!(
        e,
        Error::Undecidable(_) | Error::DivisionByZero | Error::SingularScale
    )
}

/// Reruns `attempt` at doubling precision up to the maximum while its result
/// is undecidable or it fails for lack of precision.
fn ladder<T>(
    cfg: &RunConfig,
    mut attempt: impl FnMut(u32) -> Result<(T, Verdict)>,
) -> Result<(T, u32)> {
    let (res, prec) = precision_ladder(cfg.precision_bits, MAX_PRECISION, |p| match attempt(p) {
        Ok((out, v)) => (Ok((out, v)), v),
        Err(e) if precision_limited(&e) => (Err(e), Verdict::Undecidable),
        Err(e) => (Err(e), Verdict::Refuted),
    });
    res.map(|(out, _)| (out, prec))
}

#[derive(Serialize)]
struct TraceRow {
    n: u32,
    x: String,
    value: Dec,
}

#[derive(Serialize)]
struct TraceBody {
    lambda: Dec,
    rows: Vec<TraceRow>,
}

pub fn trace(cfg: &RunConfig, n: u32, xs: &[String]) -> Result<Output> {
    let prec = cfg.precision_bits;
    let digits = cfg.digits();
    let lambda = cfg.lambda_at(prec)?;
    let mut table = Table::new(&["n", "x", "value", "radius"]);
    let mut rows = Vec::with_capacity(xs.len());
    for s in xs {
        let x = Ball::parse_decimal(prec, s)?;
        let value = Dec::new(&trace_eval(n, &lambda, &x)?, digits);
        table.push(vec![
            n.to_string(),
            s.trim().to_string(),
            value.value.clone(),
            value.radius.clone(),
        ]);
        rows.push(TraceRow {
            n,
            x: s.trim().to_string(),
            value,
        });
    }
    let body = TraceBody {
        lambda: Dec::new(&lambda, digits),
        rows,
    };
    Ok(Output::new(cfg, Verdict::Verified, body, table))
}

#[derive(Serialize)]
struct MajorantSummary {
    verdict: Verdict,
    worst_ratio: String,
    first_failure: Option<usize>,
}

impl From<&MajorantCheck> for MajorantSummary {
    fn from(m: &MajorantCheck) -> Self {
        MajorantSummary {
            verdict: m.verdict,
            worst_ratio: sci(m.worst_ratio),
            first_failure: m.first_failure,
        }
    }
}

#[derive(Serialize)]
struct GermBody {
    precision_used: u32,
    order: usize,
    lambda: Dec,
    base: Dec,
    rho: Dec,
    factor: Dec,
    tau_factor: Dec,
    zero_factor: Dec,
    cross_check: Verdict,
    delta: Dec,
    beta: Dec,
    regularity: Verdict,
    prev: MajorantSummary,
    curr: MajorantSummary,
}

pub fn germ(cfg: &RunConfig) -> Result<Output> {
    let (g, prec) = ladder(cfg, |p| {
        let g = initial_germ(&cfg.lambda_at(p)?, cfg.order)?;
        let v = g.verdict();
        Ok((g, v))
    })?;
    let digits = cfg.digits();
    let c = &g.certificate;
    let d = |b: &Ball| Dec::new(b, digits);
    let mut table = Table::new(&["quantity", "value", "radius"]);
    let rows = [
        ("lambda", &g.lambda),
        ("base", &g.germ.base),
        ("rho", &g.rho),
        ("factor", &g.factor),
        ("tau_factor", &g.tau_factor),
        ("zero_factor", &g.zero_factor),
        ("delta", &c.delta),
        ("beta", &c.beta),
    ];
    for (name, b) in rows {
        let v = d(b);
        table.push(vec![name.into(), v.value, v.radius]);
    }
    table.push(vec![
        "cross_check".into(),
        verdict_str(g.cross_check),
        String::new(),
    ]);
    table.push(vec![
        "regularity".into(),
        verdict_str(c.verdict),
        String::new(),
    ]);
    table.push(vec![
        "precision_used".into(),
        prec.to_string(),
        String::new(),
    ]);
    let body = GermBody {
        precision_used: prec,
        order: c.order,
        lambda: d(&g.lambda),
        base: d(&g.germ.base),
        rho: d(&g.rho),
        factor: d(&g.factor),
        tau_factor: d(&g.tau_factor),
        zero_factor: d(&g.zero_factor),
        cross_check: g.cross_check,
        delta: d(&c.delta),
        beta: d(&c.beta),
        regularity: c.verdict,
        prev: (&c.prev).into(),
        curr: (&c.curr).into(),
    };
    Ok(Output::new(cfg, g.verdict(), body, table))
}

#[derive(Serialize)]
struct ConvergeRow {
    k: i64,
    sup_delta: String,
    bound: String,
    uniform: Verdict,
    pointwise_verified: usize,
    pointwise_refuted: usize,
    pass: bool,
}

#[derive(Serialize)]
struct ConvergeBody {
    m: u32,
    mode: &'static str,
    points: usize,
    ctilde: Dec,
    c: Dec,
    decay_ratio: Option<String>,
    rows: Vec<ConvergeRow>,
}

pub fn converge(
    cfg: &RunConfig,
    m: u32,
    k_min: Option<i64>,
    k_max: i64,
    rigorous: bool,
) -> Result<Output> {
    let k_min = k_min.unwrap_or(2 * m as i64 + 1);
    if k_max < k_min || k_max - k_min >= MAX_K_ROWS {
        return Err(Error::InvalidInput(format!(
            "k range {k_min}..={k_max} must be nonempty and hold at most {MAX_K_ROWS} values"
        )));
    }
    let lambda = cfg.lambda_at(cfg.precision_bits)?;
    let g = initial_germ(&lambda, cfg.order)?;
    let mode = if rigorous {
        SupMode::Cover
    } else {
        SupMode::Grid
    };
    let r = convergence_report(&g.germ, m, k_min..=k_max, cfg.grid, mode)?;
    let mut table = Table::new(&["k", "sup_delta", "bound", "pass"]);
    let rows: Vec<ConvergeRow> = r
        .rows
        .iter()
        .map(|row| ConvergeRow {
            k: row.k,
            sup_delta: sci(row.sup),
            bound: sci(row.bound),
            uniform: row.uniform,
            pointwise_verified: row.pointwise_verified,
            pointwise_refuted: row.pointwise_refuted,
            pass: row.pass,
        })
        .collect();
    for row in &rows {
        table.push(vec![
            row.k.to_string(),
            row.sup_delta.clone(),
            row.bound.clone(),
            if row.pass { "pass" } else { "fail" }.into(),
        ]);
    }
    let digits = cfg.digits();
    let body = ConvergeBody {
        m,
        mode: if rigorous { "cover" } else { "grid" },
        points: r.points,
        ctilde: Dec::new(&r.ctilde, digits),
        c: Dec::new(&r.c, digits),
        decay_ratio: r.decay_ratio.map(sci),
        rows,
    };
    Ok(Output::new(cfg, Verdict::from_bool(r.pass()), body, table))
}

#[derive(Serialize)]
struct CantorBody {
    precision_used: u32,
    k_certified: u64,
    dim_lower_bound: Dec,
    complete: bool,
    invariants: tmtrace::cantor::TreeInvariants,
    report: Option<DimensionReport>,
    nodes: Vec<NodeRecord>,
}

pub fn cantor(cfg: &RunConfig) -> Result<Output> {
    let ((tree, invariants), prec) = ladder(cfg, |p| {
        let tree = build_tree(&cfg.lambda_at(p)?, cfg.k_sim, cfg.depth)?;
        let inv = tree.check_invariants();
        let v = inv.verdict();
        Ok(((tree, inv), v))
    })?;
    let k_certified = constants_table(prec, 6)?.k;
    let report = if cfg.depth > 0 && tree.is_complete() {
        Some(ratio_report(&tree, k_certified)?)
    } else {
        None
    };
    let digits = cfg.digits();
    let nodes = tree.records(digits);
    let mut table = Table::new(&[
        "word",
        "a",
        "a_radius",
        "b",
        "b_radius",
        "gen",
        "zero_level",
        "ratio_left",
        "ratio_right",
        "failure",
    ]);
    for n in &nodes {
        let (l, r) = match n.child_ratios {
            Some([l, r]) => (sci(l), sci(r)),
            None => (String::new(), String::new()),
        };
        table.push(vec![
            n.word.clone(),
            n.a.clone(),
            n.a_radius.clone(),
            n.b.clone(),
            n.b_radius.clone(),
            n.gen.to_string(),
            n.zero_level.to_string(),
            l,
            r,
            n.failure.clone().unwrap_or_default(),
        ]);
    }
    let body = CantorBody {
        precision_used: prec,
        k_certified,
        dim_lower_bound: Dec::new(&dim_lower_bound_ball(prec, k_certified)?, digits),
        complete: tree.is_complete(),
        invariants: invariants.clone(),
        report,
        nodes,
    };
    Ok(Output::new(cfg, invariants.verdict(), body, table))
}

#[derive(Serialize)]
struct CheckRow {
    name: &'static str,
    lhs: Dec,
    rhs: Dec,
    residual: Dec,
    verdict: Verdict,
}

impl CheckRow {
    fn new(r: &Residual, digits: usize) -> Self {
        CheckRow {
            name: r.name,
            lhs: Dec::new(&r.lhs, digits),
            rhs: Dec::new(&r.rhs, digits),
            residual: Dec::new(&r.value(), digits),
            verdict: r.verdict,
        }
    }
}

#[derive(Serialize)]
struct ConstantsBody {
    constants: Vec<tmtrace::constants::ConstantRow>,
    n_alpha_check: CheckRow,
    k: u64,
    k_checks: Vec<CheckRow>,
    k_minimal: Verdict,
}

pub fn constants(cfg: &RunConfig, m_max: usize) -> Result<Output> {
    let t = constants_table(cfg.precision_bits, m_max)?;
    let digits = cfg.digits();
    let rows = t.rows(digits);
    let k_verdict = Verdict::all(t.k_residuals.iter().map(|r| r.verdict)).and(t.k_minimal);
    let mut table = Table::new(&["name", "value", "radius", "check"]);
    for r in &rows {
        let check = match r.name.as_str() {
            "n_alpha" => verdict_str(t.n_alpha_check.verdict),
            "K" => verdict_str(k_verdict),
            _ => String::new(),
        };
        table.push(vec![
            r.name.clone(),
            r.value.clone(),
            r.radius.clone(),
            check,
        ]);
    }
    for r in std::iter::once(&t.n_alpha_check).chain(&t.k_residuals) {
        let v = Dec::new(&r.value(), digits);
        table.push(vec![
            format!("residual:{}", r.name),
            v.value,
            v.radius,
            verdict_str(r.verdict),
        ]);
    }
    let body = ConstantsBody {
        constants: rows,
        n_alpha_check: CheckRow::new(&t.n_alpha_check, digits),
        k: t.k,
        k_checks: t
            .k_residuals
            .iter()
            .map(|r| CheckRow::new(r, digits))
            .collect(),
        k_minimal: t.k_minimal,
    };
    Ok(Output::new(cfg, t.verdict(), body, table))
}

#[derive(Serialize)]
struct SigmaRow {
    n: u32,
    zero: Option<Dec>,
    verdict: Verdict,
    note: Option<String>,
}

#[derive(Serialize)]
struct SigmaBody {
    lo: String,
    hi: String,
    zeros: Vec<SigmaRow>,
}

pub fn sigma(cfg: &RunConfig, n_max: u32, lo: &str, hi: &str) -> Result<Output> {
    let prec = cfg.precision_bits;
    let lambda = cfg.lambda_at(prec)?;
    let (blo, bhi) = (
        Ball::parse_decimal(prec, lo)?,
        Ball::parse_decimal(prec, hi)?,
    );
    if blo.upper() >= bhi.lower() {
        return Err(Error::InvalidInput("lo must be below hi".into()));
    }
    let digits = cfg.digits();
    let zeros: Vec<SigmaRow> = sigma_sample(n_max, &lambda, &blo, &bhi)?
        .into_iter()
        .map(|z| SigmaRow {
            n: z.n,
            zero: z.zero.as_ref().map(|b| Dec::new(b, digits)),
            verdict: z.verdict,
            note: z.note,
        })
        .collect();
    let mut table = Table::new(&["n", "zero", "radius", "verdict", "note"]);
    for z in &zeros {
        let (v, r) = z.zero.as_ref().map_or((String::new(), String::new()), |d| {
            (d.value.clone(), d.radius.clone())
        });
        table.push(vec![
            z.n.to_string(),
            v,
            r,
            verdict_str(z.verdict),
            z.note.clone().unwrap_or_default(),
        ]);
    }
    let verdict = Verdict::all(zeros.iter().map(|z| z.verdict));
    let body = SigmaBody {
        lo: lo.trim().into(),
        hi: hi.trim().into(),
        zeros,
    };
    Ok(Output::new(cfg, verdict, body, table))
}

#[derive(Serialize)]
struct RatioBody {
    precision_used: u32,
    germ: Verdict,
    y_plus: [Dec; 2],
    y_minus: [Dec; 2],
    ratio_plus: Dec,
    ratio_minus: Dec,
    ratio_verdict: Verdict,
    theta_upper: Dec,
    theta_upper_inner: Dec,
    ratio_right: Dec,
    theta_lower: Dec,
    theta_lower_inner: Dec,
    ratio_left: Dec,
    spacing_bound: Dec,
    spacing_verdict: Verdict,
    handoff_factor: Dec,
    handoff_relaxed: Verdict,
    handoff_unit: Verdict,
}

pub fn ratio(cfg: &RunConfig) -> Result<Output> {
    let ((g, rc, ks), prec) = ladder(cfg, |p| {
        let g = initial_germ(&cfg.lambda_at(p)?, cfg.order)?;
        let rc = ratio_check(&g.germ)?;
        let ks = key_spacing_check(&g.germ, cfg.k_sim, cfg.order)?;
        let v = g
            .verdict()
            .and(rc.verdict)
            .and(ks.verdict)
            .and(ks.handoff_relaxed);
        Ok(((g, rc, ks), v))
    })?;
    let digits = cfg.digits();
    let d = |b: &Ball| Dec::new(b, digits);
    let mut table = Table::new(&["quantity", "value", "radius", "verdict"]);
    let mut push = |name: &str, b: &Ball, v: Option<Verdict>| {
        let x = d(b);
        table.push(vec![
            name.into(),
            x.value,
            x.radius,
            v.map(verdict_str).unwrap_or_default(),
        ]);
    };
    push("ratio_plus", &rc.ratio_plus, Some(rc.verdict));
    push("ratio_minus", &rc.ratio_minus, Some(rc.verdict));
    push("ratio_right", &ks.ratio_right, Some(ks.verdict));
    push("ratio_left", &ks.ratio_left, Some(ks.verdict));
    push("spacing_bound", &ks.bound, None);
    push(
        "handoff_factor",
        &ks.handoff_factor,
        Some(ks.handoff_relaxed),
    );
    table.push(vec![
        "precision_used".into(),
        prec.to_string(),
        String::new(),
        String::new(),
    ]);
    let verdict = g
        .verdict()
        .and(rc.verdict)
        .and(ks.verdict)
        .and(ks.handoff_relaxed);
    let body = RatioBody {
        precision_used: prec,
        germ: g.verdict(),
        y_plus: [d(&rc.y_plus[0]), d(&rc.y_plus[1])],
        y_minus: [d(&rc.y_minus[0]), d(&rc.y_minus[1])],
        ratio_plus: d(&rc.ratio_plus),
        ratio_minus: d(&rc.ratio_minus),
        ratio_verdict: rc.verdict,
        theta_upper: d(&ks.theta_upper),
        theta_upper_inner: d(&ks.theta_upper_inner),
        ratio_right: d(&ks.ratio_right),
        theta_lower: d(&ks.theta_lower),
        theta_lower_inner: d(&ks.theta_lower_inner),
        ratio_left: d(&ks.ratio_left),
        spacing_bound: d(&ks.bound),
        spacing_verdict: ks.verdict,
        handoff_factor: d(&ks.handoff_factor),
        handoff_relaxed: ks.handoff_relaxed,
        handoff_unit: ks.handoff_unit,
    };
    Ok(Output::new(cfg, verdict, body, table))
}
