//! The absolute constants of the construction and the depth constant `K`.

use rug::Rational;
use serde::Serialize;

use crate::ball::Ball;
use crate::error::{Error, Result};
use crate::germ::alpha_pow;
use crate::verdict::Verdict;

pub const N_ALPHA: u32 = 40;
pub const M0: i64 = 10;

/// Residual `rhs - lhs` of one defining inequality of `K`.
#[derive(Clone, Debug)]
pub struct Residual {
    pub name: &'static str,
    pub lhs: Ball,
    pub rhs: Ball,
    pub verdict: Verdict,
}

impl Residual {
    fn new(name: &'static str, lhs: Ball, rhs: Ball, strict: bool) -> Self {
        let verdict = if strict { lhs.lt(&rhs) } else { lhs.le(&rhs) };
        Residual {
            name,
            lhs,
            rhs,
            verdict,
        }
    }

    pub fn value(&self) -> Ball {
        self.rhs.sub(&self.lhs)
    }
}

#[derive(Clone, Debug)]
pub struct ConstantsTable {
    pub precision: u32,
    pub delta0: Ball,
    pub delta1: Ball,
    pub delta2: Ball,
    pub delta3: Ball,
    pub n_alpha: u32,
    pub alpha: Ball,
    /// `2 - pi/2 - 0.01`.
    pub beta_local: Ball,
    pub m0: i64,
    pub ctilde: Vec<Ball>,
    pub c: Vec<Ball>,
    /// `9 alpha^{n_alpha - 3} <= delta1`.
    pub n_alpha_check: Residual,
    pub k: u64,
    /// The three defining inequalities evaluated at `k`.
    pub k_residuals: [Residual; 3],
    /// Whether `k - 1` is certified to violate one of them.
    pub k_minimal: Verdict,
}

fn rational(prec: u32, num: i64, den: i64) -> Ball {
    Ball::from_rational(prec, &Rational::from((num, den)))
}

/// `(K >= n_alpha + 4, 9 alpha^{K-7} < delta2, C6 alpha^{K-4} <= delta3)`.
fn k_residuals(prec: u32, k: u64, c6: &Ball, delta2: &Ball, delta3: &Ball) -> [Residual; 3] {
    let k = k as i64;
    [
        Residual::new(
            "K >= n_alpha + 4",
            Ball::from_i64(prec, N_ALPHA as i64 + 4),
            Ball::from_i64(prec, k),
            false,
        ),
        Residual::new(
            "9 alpha^(K-7) < delta2",
            alpha_pow(prec, k - 7).mul_i64(9),
            delta2.clone(),
            true,
        ),
        Residual::new(
            "C6 alpha^(K-4) <= delta3",
            c6.mul(&alpha_pow(prec, k - 4)),
            delta3.clone(),
            false,
        ),
    ]
}

/// `(C~_m, C_m)` for `m <= m_max`: `C~_0 = 9/(4 - pi)`, `C_m = C~_m (2^{m-1} pi)^3`,
/// `C~_{m+1} = C~_m (1/(2 alpha) + (4 + C_m)^2 / (64 alpha^2))`.
pub fn convergence_constants(prec: u32, m_max: usize) -> Result<(Vec<Ball>, Vec<Ball>)> {
    let pi = Ball::pi(prec);
    let alpha = alpha_pow(prec, 1);
    let inv_2a = alpha.mul_2si(1).recip()?;
    let inv_64a2 = alpha.sqr().mul_i64(64).recip()?;
    let mut ctilde = vec![Ball::from_i64(prec, 9).div(&Ball::from_i64(prec, 4).sub(&pi))?];
    let mut c = Vec::new();
    for m in 0..=m_max {
        let r = pi.mul_2si(m as i32 - 1);
        c.push(ctilde[m].mul(&r.powi(3)));
        if m < m_max {
            let g = c[m].add_i64(4).sqr();
            ctilde.push(ctilde[m].mul(&inv_2a.add(&g.mul(&inv_64a2))));
        }
    }
    Ok((ctilde, c))
}

/// `C~_m`, `C_m` for `m <= m_max` and the certified minimal `K`.
pub fn constants_table(prec: u32, m_max: usize) -> Result<ConstantsTable> {
    if m_max < 6 {
        return Err(Error::InvalidInput("m_max must be at least 6".into()));
    }
    let pi = Ball::pi(prec);
    let alpha = alpha_pow(prec, 1);
    let delta0 = rational(prec, 1, 100);
    let delta1 = rational(prec, 5, 10_000);
    let delta2 = rational(prec, 1, 10_000_000_000);
    let thirty = Ball::from_i64(prec, 30).powi(N_ALPHA);
    let delta3 = thirty.mul_i64(4000).recip()?;
    let beta_local = Ball::from_i64(prec, 2).sub(&pi.mul_2si(-1)).sub(&delta0);

    let (ctilde, c) = convergence_constants(prec, m_max)?;

    let n_alpha_check = Residual::new(
        "9 alpha^(n_alpha-3) <= delta1",
        alpha_pow(prec, N_ALPHA as i64 - 3).mul_i64(9),
        delta1.clone(),
        false,
    );

    let c6 = &c[6];
    // alpha^{K-4} <= delta3 / C6  <=>  K >= 4 + 2 log2(C6 / delta3)
    let log2 = c6.div(&delta3)?.ln()?.div(&Ball::ln2(prec))?;
    let estimate = log2.mul_2si(1).add_i64(4).upper().to_f64().ceil();
    if !estimate.is_finite() || estimate < 0.0 {
        return Err(Error::Undecidable("K estimate".into()));
    }
    let mut k = (estimate as u64).max(N_ALPHA as u64 + 4);
    let holds = |k: u64| {
        Verdict::all(
            k_residuals(prec, k, c6, &delta2, &delta3)
                .iter()
                .map(|r| r.verdict),
        )
    };
    while k > N_ALPHA as u64 + 4 && holds(k - 1) == Verdict::Verified {
        k -= 1;
    }
    let mut guard = 0;
    while holds(k) != Verdict::Verified {
        k += 1;
        guard += 1;
        if guard > 64 {
            return Err(Error::Undecidable("K constraints at this precision".into()));
        }
    }
    let k_minimal = if k == N_ALPHA as u64 + 4 {
        Verdict::Verified
    } else {
        let below = k_residuals(prec, k - 1, c6, &delta2, &delta3);
        if below.iter().any(|r| r.verdict == Verdict::Refuted) {
            Verdict::Verified
        } else {
            Verdict::Undecidable
        }
    };
    let k_residuals = k_residuals(prec, k, c6, &delta2, &delta3);

    Ok(ConstantsTable {
        precision: prec,
        delta0,
        delta1,
        delta2,
        delta3,
        n_alpha: N_ALPHA,
        alpha,
        beta_local,
        m0: M0,
        ctilde,
        c,
        n_alpha_check,
        k,
        k_residuals,
        k_minimal,
    })
}

impl ConstantsTable {
    pub fn verdict(&self) -> Verdict {
        Verdict::all(
            std::iter::once(self.n_alpha_check.verdict)
                .chain(self.k_residuals.iter().map(|r| r.verdict))
                .chain(std::iter::once(self.k_minimal)),
        )
    }
}

/// Plain-data view for serialization.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantRow {
    pub name: String,
    pub value: String,
    pub radius: String,
}

impl ConstantsTable {
    pub fn rows(&self, digits: usize) -> Vec<ConstantRow> {
        let row = |name: String, b: &Ball| {
            let (value, radius) = b.to_decimal(digits);
            ConstantRow {
                name,
                value,
                radius,
            }
        };
        let mut out = vec![
            row("delta0".into(), &self.delta0),
            row("delta1".into(), &self.delta1),
            row("delta2".into(), &self.delta2),
            row("delta3".into(), &self.delta3),
            row(
                "n_alpha".into(),
                &Ball::from_i64(self.precision, self.n_alpha as i64),
            ),
            row("alpha".into(), &self.alpha),
            row("beta_local".into(), &self.beta_local),
            row("M0".into(), &Ball::from_i64(self.precision, self.m0)),
        ];
        for (m, b) in self.ctilde.iter().enumerate() {
            out.push(row(format!("Ctilde_{m}"), b));
        }
        for (m, b) in self.c.iter().enumerate() {
            out.push(row(format!("C_{m}"), b));
        }
        out.push(row(
            "K".into(),
            &Ball::from_i64(self.precision, self.k as i64),
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_constants() {
        let t = constants_table(256, 6).unwrap();
        assert!(t.delta0.contains_rational(&Rational::from((1, 100))));
        assert!(t
            .delta2
            .contains_rational(&Rational::from((1, 10_000_000_000i64))));
        let d3 = Rational::from((
            1,
            rug::Integer::from(rug::Integer::u_pow_u(30, 40)) * 4000u32,
        ));
        assert!(t.delta3.contains_rational(&d3));
        assert!((t.beta_local.mid_f64() - 0.419203673).abs() < 1e-8);
        assert_eq!(t.n_alpha_check.verdict, Verdict::Verified);
        assert!((t.ctilde[0].mid_f64() - 10.484532824).abs() < 1e-9);
    }

    #[test]
    fn ctilde_recurrence_and_growth() {
        let t = constants_table(256, 7).unwrap();
        assert_eq!(t.ctilde.len(), 8);
        assert_eq!(t.c.len(), 8);
        let c0 = t.ctilde[0].mid_f64() * (std::f64::consts::PI / 2.0).powi(3);
        assert!((t.c[0].mid_f64() / c0 - 1.0).abs() < 1e-14);
        for m in 0..7 {
            assert_eq!(t.ctilde[m].lt(&t.ctilde[m + 1]), Verdict::Verified);
            assert!(t.c[m].is_positive());
        }
    }

    #[test]
    fn k_is_certified_minimal() {
        let t = constants_table(256, 6).unwrap();
        assert_eq!(t.verdict(), Verdict::Verified);
        assert!(t.k >= 44);
        assert!(t
            .k_residuals
            .iter()
            .all(|r| r.value().is_positive() || r.value().contains_zero()));
    }

    #[test]
    fn m_max_below_six_rejected() {
        assert!(constants_table(128, 5).is_err());
    }
}
