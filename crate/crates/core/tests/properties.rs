use proptest::prelude::*;
use rug::{Float, Rational};

use tmtrace::cantor::{base_point, build_tree, dim_lower_bound};
use tmtrace::constants::constants_table;
use tmtrace::dynamics::{trace_eval, trace_eval_exact};
use tmtrace::roots::{find_zero, sigma_sample, Side};
use tmtrace::series::{cos_series, majorant_le, GeometricMajorant};
use tmtrace::{Ball, LocalSeries, Verdict};

const P: u32 = 256;

fn b(x: f64) -> Ball {
    Ball::from_f64(P, x)
}

fn exact(x: f64) -> Rational {
    Rational::from_f64(x).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ball_arithmetic_contains_exact_results(x in -1e6f64..1e6, y in -1e6f64..1e6) {
        let (bx, by) = (Ball::with_radius(Float::with_val(64, x), &Float::with_val(64, 1e-3)), Ball::from_f64(64, y));
        let (qx, qy) = (exact(x), exact(y));
        prop_assert!(bx.add(&by).contains_rational(&Rational::from(&qx + &qy)));
        prop_assert!(bx.sub(&by).contains_rational(&Rational::from(&qx - &qy)));
        prop_assert!(bx.mul(&by).contains_rational(&Rational::from(&qx * &qy)));
        if y != 0.0 {
            prop_assert!(bx.div(&by).unwrap().contains_rational(&Rational::from(&qx / &qy)));
        }
    }

    #[test]
    fn ball_trace_values_enclose_exact_values(n in 1u32..=9, num in -300i64..300, lam in 0i64..4) {
        let x = Rational::from((num, 97));
        let lambda = Rational::from((lam, 2));
        let v = trace_eval(n, &Ball::from_rational(128, &lambda), &Ball::from_rational(128, &x)).unwrap();
        prop_assert!(v.contains_rational(&trace_eval_exact(n, &lambda, &x).unwrap()));
    }

    #[test]
    fn base_point_is_a_zero_of_h1(lam in 0.0f64..20.0) {
        let l = b(lam);
        prop_assert!(trace_eval(1, &l, &base_point(&l)).unwrap().contains_zero());
    }

    #[test]
    fn majorant_is_monotone_in_delta(d in 0.01f64..1.0, extra in 1.0f64..10.0, phase in -3.0f64..3.0) {
        // 2cos(u + phase) has |coeff_n| <= 2/n!
        let f = cos_series(20, &b(phase), b(0.0)).scalar_mul(&b(d * 1e-3));
        let m = GeometricMajorant::from_f64(P, d, 1.0, 0).unwrap();
        let bigger = GeometricMajorant::from_f64(P, d * extra, 1.0, 0).unwrap();
        if majorant_le(&f, &m) == Verdict::Verified {
            prop_assert_eq!(majorant_le(&f, &bigger), Verdict::Verified);
        }
    }

    #[test]
    fn pow2_rescaling_commutes_with_evaluation(e in -6i32..6, u in -0.5f64..0.5) {
        let s = LocalSeries::new(b(0.0), (0..12).map(|n| b(1.0 / (n as f64 + 1.0))).collect());
        let lhs = s.pow2_arg(e).eval(&b(u));
        let rhs = s.eval(&b(u).mul_2si(e));
        prop_assert!(lhs.overlaps(&rhs));
    }

    #[test]
    fn zero_refinement_is_monotone(freq in 1i64..6, shift in 0.05f64..0.5, coarse in -30i32..-10) {
        let f = |x: &Ball| x.mul_i64(freq).add(&b(shift)).cos();
        let pi = Ball::pi(P);
        let a = find_zero(&f, &b(0.0), &pi, Side::Minimal, 1e-3, coarse).unwrap();
        let fine = find_zero(&f, &b(0.0), &pi, Side::Minimal, 1e-3, coarse - 30).unwrap();
        prop_assert!(a.zero.contains(&fine.zero));
        prop_assert!(f(&fine.lo).sign() != f(&fine.hi).sign());
        prop_assert!(f(&fine.zero).contains_zero());
    }

    #[test]
    fn dimension_bound_decreases(k in 1u64..10_000) {
        prop_assert!(dim_lower_bound(k + 1) < dim_lower_bound(k));
        prop_assert!(dim_lower_bound(k) > 0.0);
    }
}

#[test]
fn sigma_sample_matches_cosine_lattice() {
    // at lambda = 0 the zeros of h_n are 2cos((2j+1) pi / 2^{n+1})
    let zeros = sigma_sample(6, &b(0.0), &b(-2.0), &b(2.0)).unwrap();
    for n in 1..=6u32 {
        let found: Vec<f64> = zeros
            .iter()
            .filter(|z| z.n == n)
            .map(|z| z.zero.as_ref().expect("certified").mid_f64())
            .collect();
        let mut expect: Vec<f64> = (0..(1u32 << n))
            .map(|j| {
                2.0 * ((2 * j + 1) as f64 * std::f64::consts::PI / 2f64.powi(n as i32 + 1)).cos()
            })
            .collect();
        expect.sort_by(f64::total_cmp);
        assert_eq!(found.len(), expect.len(), "n = {n}");
        for (f, e) in found.iter().zip(&expect) {
            assert!((f - e).abs() < 1e-12, "n = {n}: {f} vs {e}");
        }
    }
}

#[test]
fn every_sigma_zero_is_certified() {
    let lambda = b(1.0);
    for z in sigma_sample(5, &lambda, &b(-3.0), &b(3.0)).unwrap() {
        let zero = z.zero.expect("certified");
        assert!(trace_eval(z.n, &lambda, &zero).unwrap().contains_zero());
    }
}

#[test]
fn constants_grow() {
    let t = constants_table(P, 8).unwrap();
    for m in 0..8 {
        assert_eq!(t.ctilde[m].lt(&t.ctilde[m + 1]), Verdict::Verified);
        assert!(t.c[m].is_positive());
    }
}

#[test]
fn trees_are_deterministic() {
    let a = build_tree(&b(0.5), 5, 2).unwrap().records(30);
    let c = build_tree(&b(0.5), 5, 2).unwrap().records(30);
    let key = |r: &tmtrace::cantor::NodeRecord| (r.word.clone(), r.a.clone(), r.b.clone());
    assert_eq!(
        a.iter().map(key).collect::<Vec<_>>(),
        c.iter().map(key).collect::<Vec<_>>()
    );
}

#[test]
fn tree_nesting_for_several_couplings() {
    for lam in [0.25, 1.5, 3.0] {
        let t = build_tree(&b(lam), 6, 1).unwrap();
        let inv = t.check_invariants();
        assert_eq!(inv.verdict(), Verdict::Verified, "lambda = {lam}: {inv:?}");
    }
}
