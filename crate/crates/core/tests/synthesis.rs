mod common;

use std::sync::Arc;

use betaifs_core::algebraic::AlgebraicReal;
use betaifs_core::cfrac::convergents;
use betaifs_core::epsilon::EpsilonSequence;
use betaifs_core::ifs::{delta_n_allpairs, IFSParams};
use betaifs_core::num::Dyadic;
use betaifs_core::poly::IntPolynomial;
use betaifs_core::synthesis::*;
use betaifs_core::Error;
use common::{cf_value, exact_at, rat, QSqrt2};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn eps(text: &str) -> EpsilonSequence {
    text.parse().unwrap()
}

fn cert(b: Arc<AlgebraicReal>, e: &str, k: usize) -> SynthesisCertificate {
    synthesize(b, &eps(e), k).unwrap()
}

fn q(d: &Dyadic) -> BigRational {
    d.to_rational().unwrap()
}

/// All polynomials of degree ≤ n with coefficients in [-h, h].
fn class(n: usize, h: i64) -> Vec<IntPolynomial> {
    let mut out = vec![vec![]];
    for _ in 0..=n {
        out = out.into_iter().flat_map(|v: Vec<i64>| (-h..=h).map(move |c| [v.clone(), vec![c]].concat())).collect();
    }
    out.into_iter().map(IntPolynomial::from_coeffs).collect()
}

fn assert_level_invariants(c: &SynthesisCertificate) {
    for w in c.levels.windows(2) {
        assert!(w[1].n > w[0].m, "N_(k+1) > M_k");
    }
    for lv in &c.levels {
        assert!(lv.m >= 2 * lv.n, "M_k ≥ 2 N_k");
    }
    let s = convergents(&c.s_cf()).unwrap();
    let t = convergents(&c.t_cf()).unwrap();
    for lv in &c.levels {
        for p in [&s[lv.k].p, &s[lv.k].q] {
            assert!(p.is_in_beta_base(lv.n), "s-side convergent {} outside ℬ_N", lv.k);
        }
        for p in [&t[lv.k].p, &t[lv.k].q] {
            assert!(p.is_in_beta_base(lv.m), "t-side convergent {} outside ℬ_M", lv.k);
        }
    }
}

#[test]
fn geometric_base_two_depth_two() {
    let c = cert(common::two(), "geom:1/2", 2);
    assert_eq!(c.depth(), 2);
    let e2 = c.s_exponents[1];
    assert!(e2 >= 2, "2^e_2 ≥ 1/ε_2 = 4");
    // Independent re-check of the consumed ε and level inequalities with exact rationals.
    let pow2 = |e: u128| BigRational::new(BigInt::one(), BigInt::one() << e as usize);
    for rec in &c.checks {
        assert!(rec.holds(), "{}", rec.label());
        match rec.kind {
            CheckKind::SEps | CheckKind::TEps => {
                let e = if rec.kind == CheckKind::SEps { c.s_exponents[rec.k] } else { c.t_exponents[rec.k] };
                let n = rec.n.unwrap();
                assert!(q(&rec.lhs) >= pow2(e));
                assert!(q(&rec.rhs) <= pow2(n));
                assert!(pow2(e) <= pow2(n));
            }
            CheckKind::Coverage => {
                let n = rec.n.unwrap();
                // The only range at depth two is [1, N_2], bounded through t.
                assert_eq!(n, 1);
                assert!(q(&rec.lhs) >= pow2(1 + c.t_exponents[1]));
            }
            _ => {}
        }
    }
    let report = verify_certificate(&c, &VerifyOptions { brute_n_max: 6 }).unwrap();
    assert!(report.pass, "{:?}", report.failure);
    let brute: Vec<_> = report.rows.iter().filter(|r| r.source == RowSource::Brute).collect();
    assert_eq!(brute.len(), 6);
    assert!(brute.iter().all(|r| r.holds()));
}

#[test]
fn determinism() {
    let a = cert(common::two(), "superexp:1/2", 3);
    let b = cert(common::two(), "superexp:1/2", 3);
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn super_exponential_depth_three() {
    let c = cert(common::two(), "superexp:1/2", 3);
    let n: Vec<u128> = c.levels.iter().map(|l| l.n).collect();
    let m: Vec<u128> = c.levels.iter().map(|l| l.m).collect();
    assert!(n[1] < m[1] && m[1] < n[2]);
    assert_level_invariants(&c);
    let report = verify_certificate(&c, &VerifyOptions { brute_n_max: 8 }).unwrap();
    assert!(report.pass, "{:?}", report.failure);
}

#[test]
fn silver_base_depth_two() {
    let c = cert(common::silver(), "geom:1/2", 2);
    assert_level_invariants(&c);
    for cf in [c.s_cf(), c.t_cf()] {
        for pair in convergents(&cf).unwrap() {
            for p in [&pair.p, &pair.q] {
                assert!(p.poly().terms().iter().all(|(_, c)| c.is_one()));
            }
        }
    }
    let report = verify_certificate(&c, &VerifyOptions::default()).unwrap();
    assert!(report.pass, "{:?}", report.failure);
}

#[test]
fn tampered_separation_constant_fails_replay() {
    let mut c = cert(common::two(), "geom:1/2", 2);
    let sep = &mut c.separations[0];
    sep.c = Dyadic::new(sep.c.mantissa().clone(), sep.c.exponent() + 1);
    let report = verify_certificate(&c, &VerifyOptions::default()).unwrap();
    assert!(!report.pass);
    assert!(report.failure.unwrap().starts_with("separation k=1"));

    let mut c = cert(common::two(), "geom:1/2", 2);
    c.t_exponents[1] -= 1;
    assert!(!verify_certificate(&c, &VerifyOptions::default()).unwrap().pass);

    let mut c = cert(common::two(), "geom:1/2", 2);
    c.levels.pop();
    assert!(matches!(verify_certificate(&c, &VerifyOptions::default()), Err(Error::Input(_))));
}

#[test]
fn budget_and_input_errors() {
    let err = synthesize(common::two(), &eps("geom:1/2"), 1).unwrap_err();
    assert!(matches!(err.error, Error::Input(_)));
    let err = synthesize(common::two(), &eps("geom:1/2"), 7).unwrap_err();
    assert!(matches!(err.error, Error::Resource(_)));
    // ε_n = 2^(-n²) at n ≈ 10^33 needs an exponent beyond u128.
    let err = synthesize(common::two(), &eps("superexp:1/2"), 5).unwrap_err();
    assert!(matches!(err.error, Error::Resource(_)));
    assert_eq!(err.partial.levels.len(), 4);
    assert!(err.partial.checks.iter().all(|c| c.holds()));
    let low = common::base("x^2-2", 1, 2);
    assert_eq!(
        synthesize(low, &eps("geom:1/2"), 2).unwrap_err().error,
        Error::input("base must be ≥ 2")
    );
}

#[test]
fn extracted_parameters() {
    let c = cert(common::two(), "geom:1/2", 2);
    let params = extract_params(&c, 2).unwrap();
    let one = BigRational::one();
    for p in [params.s(), params.t()] {
        let iv = p.interval(128).unwrap();
        assert!(iv.lo() > &BigRational::zero() && iv.hi() <= &one);
    }
    // Both ends of the tail set: the convergent p_2/q_2 and the continuation by 1.
    let s_iv = params.s().interval(128).unwrap();
    for tail in [vec![0u32, 10], vec![0, 10, 0]] {
        assert!(s_iv.contains(&cf_value(&c.base, &tail).a));
    }
    assert!(matches!(extract_params(&c, 3), Err(Error::Input(_))));
    assert!(matches!(extract_params(&c, 0), Err(Error::Input(_))));
}

#[test]
fn delta_bounded_on_exact_points_of_the_cylinders() {
    let c = cert(common::two(), "geom:1/2", 2);
    let e = |x: &[u32]| cf_value(&c.base, x).a;
    let (s_exps, t_exps): (Vec<u32>, Vec<u32>) =
        (c.s_exponents.iter().map(|&x| x as u32).collect(), c.t_exponents.iter().map(|&x| x as u32).collect());
    for (ss, tt) in [(vec![], vec![]), (vec![0], vec![3]), (vec![5, 1], vec![0])] {
        let s = e(&[s_exps.clone(), ss.clone()].concat());
        let t = e(&[t_exps.clone(), tt.clone()].concat());
        let params = IFSParams::rational(c.base.clone(), &s, &t).unwrap();
        for n in 1..=5u32 {
            let d = delta_n_allpairs(&params, n).unwrap();
            let bound = BigRational::new(BigInt::one(), BigInt::one() << n as usize);
            assert!(d.value.hi() <= &bound, "n={n}");
        }
    }
}

fn check_separation_exhaustively(c: &SynthesisCertificate, tails: &[Vec<u32>]) {
    let sep = &c.separations[0];
    let cval = QSqrt2::from_rational(q(&sep.c));
    let s_exps: Vec<u32> = c.s_exponents.iter().map(|&x| x as u32).collect();
    let polys = class(1, 1);
    let vals: Vec<QSqrt2> = polys.iter().map(|p| exact_at(&c.base, p)).collect();
    for tail in tails {
        let s = cf_value(&c.base, &[s_exps.clone(), tail.clone()].concat());
        for g in &vals {
            if g.is_zero() {
                continue;
            }
            for f in &vals {
                for h in &vals {
                    // |s g − f − h| ≥ c |g|
                    let d = (s.clone() * g.clone() - f.clone() - h.clone()).abs() - cval.clone() * g.abs();
                    assert!(d.signum() >= 0);
                }
            }
        }
    }
}

#[test]
fn first_separation_constant_against_field_oracle() {
    let tails = vec![vec![], vec![0], vec![1], vec![0, 0, 0], vec![4, 2]];
    check_separation_exhaustively(&cert(common::two(), "geom:1/2", 2), &tails);
    check_separation_exhaustively(&cert(common::silver(), "geom:1/2", 2), &tails);
    check_separation_exhaustively(&cert(common::five_halves(), "geom:1/3", 2), &tails);
}

#[test]
fn t_stays_within_the_chain_bound() {
    let c = cert(common::two(), "geom:1/2", 4);
    let t = convergents(&c.t_cf()).unwrap();
    let prec = 1 << 16;
    let t_iv = extract_params(&c, 4).unwrap().t().enclosure(prec).unwrap();
    for sep in &c.separations {
        let k = sep.k;
        let approx = t[k].value(prec);
        let dist = t_iv.sub(&approx, prec).abs().hi().clone();
        assert!(q(&dist) <= q(&sep.c) / BigRational::from_integer(BigInt::from(k)), "k={k}");
    }
}

#[test]
fn coverage_rows_chain_to_the_last_level() {
    let c = cert(common::two(), "geom:1/2", 4);
    let report = verify_certificate(&c, &VerifyOptions::default()).unwrap();
    assert!(report.pass);
    let mut reached = 1u128;
    let mut ranges: Vec<(RowSource, u128, u128)> = vec![];
    for r in &report.rows {
        match ranges.last_mut() {
            Some((s, _, hi)) if *s == r.source && r.n >= *hi => *hi = r.n,
            _ => ranges.push((r.source, r.n, r.n)),
        }
    }
    for &(_, lo, hi) in &ranges {
        assert!(lo <= reached);
        reached = reached.max(hi);
    }
    assert_eq!(reached, c.levels.last().unwrap().n);
    assert_eq!(ranges[0].0, RowSource::Initial);
}

#[test]
fn refutation_examples() {
    let c = cert(common::two(), "superexp:1/2", 4);
    let one = IntPolynomial::one();
    let zero = IntPolynomial::zero();
    let r = refute_relation(&c, &one, &one, &zero).unwrap();
    assert_eq!(r.verdict, Verdict::Contradiction);
    assert_eq!(r.k_used, Some(2));
    assert!(r.lhs_bound.unwrap() < r.rhs_bound.unwrap());

    let ten = IntPolynomial::constant(10);
    let r = refute_relation(&c, &ten, &one, &zero).unwrap();
    assert_eq!(r.verdict, Verdict::Undecided);
    assert_eq!(r.k_used, None);

    let h = IntPolynomial::from_coeffs([2, -1]);
    let r2 = refute_relation(&c, &one, &one, &h).unwrap();
    assert_eq!(r2.verdict, Verdict::Contradiction);

    let g = IntPolynomial::from_coeffs([-2, 1]);
    assert!(matches!(refute_relation(&c, &one, &g, &zero), Err(Error::Input(_))));
}

#[test]
fn refutation_sweep_over_a_small_class() {
    let c = cert(common::two(), "superexp:1/2", 4);
    let polys = class(1, 2);
    let zero = IntPolynomial::zero();
    for f in &polys {
        for g in &polys {
            if exact_at(&c.base, g).is_zero() {
                continue;
            }
            let r = refute_relation(&c, f, g, &zero).unwrap();
            if q(&r.ratio_bound) < rat(3, 1) {
                assert_eq!(r.verdict, Verdict::Contradiction, "f={f} g={g}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn synthesized_certificates_verify(num in 1i64..8, den in 2i64..9, depth in 2usize..4, which in 0usize..3) {
        prop_assume!(num < den);
        let b = [common::two(), common::five_halves(), common::silver()][which].clone();
        let e = EpsilonSequence::Geometric(rat(num, den));
        let c = synthesize(b, &e, depth).unwrap();
        assert_level_invariants(&c);
        let report = verify_certificate(&c, &VerifyOptions::default()).unwrap();
        prop_assert!(report.pass, "{:?}", report.failure);
        prop_assert!(report.rows.iter().all(|r| r.holds()));
    }

    #[test]
    fn table_sequences_are_normalized(entries in proptest::collection::vec(1i64..100, 1..6)) {
        let table = EpsilonSequence::Table(entries.iter().map(|&x| rat(x, 128)).collect());
        let c = synthesize(common::two(), &table, 2).unwrap();
        let report = verify_certificate(&c, &VerifyOptions { brute_n_max: 3 }).unwrap();
        prop_assert!(report.pass, "{:?}", report.failure);
    }
}
