//! One PASS/FAIL line per acceptance criterion; exits nonzero when any fails.

use std::collections::HashSet;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use betaifs::cert::to_json;
use betaifs::inputs::{parse_base, parse_epsilon};
use betaifs::parallel::verify_par;
use betaifs_core::algebraic::{AlgebraicReal, BetaPolynomial};
use betaifs_core::cfrac::{convergents, limit_enclosure, CFExponents};
use betaifs_core::garsia::{garsia_constant, lower_bound, sharp_lower_bound};
use betaifs_core::ifs::{
    beta_base_set, delta_n, delta_n_allpairs, find_exact_overlaps, lemma_upper_bound, overlap_relation, IFSParams,
    Limits,
};
use betaifs_core::num::{Dyadic, Enclosure};
use betaifs_core::poly::{IntPolynomial, PolyClass};
use betaifs_core::synthesis::{refute_relation, synthesize, VerifyOptions, Verdict};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;

/// Name, time limit in seconds, check.
type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

fn two() -> Arc<AlgebraicReal> {
    parse_base("x-2", None).unwrap()
}

fn five_halves() -> Arc<AlgebraicReal> {
    parse_base("2x-5", None).unwrap()
}

fn silver() -> Arc<AlgebraicReal> {
    parse_base("x^2-2x-1", Some("2,3")).unwrap()
}

fn bases() -> [(&'static str, Arc<AlgebraicReal>); 3] {
    [("2", two()), ("5/2", five_halves()), ("1+sqrt2", silver())]
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn end_to_end_two() -> Outcome {
    let eps = parse_epsilon("superexp:1/2").map_err(err)?;
    let cert = synthesize(two(), &eps, 3).map_err(|f| err(f.error))?;
    let n3 = cert.levels[2].n;
    let brute = n3.min(8) as u32;
    let report = verify_par(&cert, &VerifyOptions { brute_n_max: brute }, &Limits::default()).map_err(err)?;
    ensure(report.pass, || format!("verify failed: {:?}", report.failure))?;
    let brute_rows = report.rows.iter().filter(|r| r.source.as_str() == "brute").count();
    ensure(brute_rows == brute as usize, || format!("{brute_rows} brute rows, expected {brute}"))?;
    ensure(report.rows.iter().all(|r| r.holds()), || "a coverage row exceeds epsilon".into())?;
    Ok(format!("N_3={n3}, {} records replayed, brute n<={brute}", report.records_checked))
}

fn end_to_end_silver() -> Outcome {
    let eps = parse_epsilon("geom:1/2").map_err(err)?;
    let cert = synthesize(silver(), &eps, 2).map_err(|f| err(f.error))?;
    let report = verify_par(&cert, &VerifyOptions::default(), &Limits::default()).map_err(err)?;
    ensure(report.pass, || format!("verify failed: {:?}", report.failure))?;
    let s = convergents(&cert.s_cf()).map_err(err)?;
    let t = convergents(&cert.t_cf()).map_err(err)?;
    for lv in &cert.levels {
        let k = lv.k;
        for (pair, level, side) in [(&s[k], lv.n, "s"), (&t[k], lv.m, "t")] {
            for p in [pair.p.poly(), pair.q.poly()] {
                ensure(p.terms().iter().all(|(_, c)| c.is_one()), || format!("{side} convergent {k} has a coefficient outside {{0,1}}"))?;
                ensure(p.is_binary_below(level), || format!("{side} convergent {k} not in B_{level}"))?;
            }
        }
    }
    Ok(format!("s={:?}, t={:?}", cert.s_exponents, cert.t_exponents))
}

fn random_poly(rng: &mut ChaCha8Rng, n: u128, h: i64) -> IntPolynomial {
    IntPolynomial::from_coeffs((0..=n).map(|_| rng.gen_range(-h..=h)))
}

/// Certified `|f(β)| ≥ bound`, refining until decided.
fn at_least(f: &BetaPolynomial, bound: &BigRational) -> Result<bool, String> {
    let mut prec = 128;
    loop {
        let v = f.enclosure(prec).abs().to_rational_interval().map_err(err)?;
        if v.lo() >= bound {
            return Ok(true);
        }
        if v.hi() < bound {
            return Ok(false);
        }
        if prec >= 1 << 14 {
            return Err(format!("could not decide |f(β)| against the bound for {:?}", f.poly()));
        }
        prec *= 2;
    }
}

fn garsia_sampling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cls = PolyClass::new(6, 50u32);
    let mut notes = Vec::new();
    for (name, b) in bases() {
        let start = Instant::now();
        let gc = garsia_constant(&b).map_err(err)?;
        let lb = lower_bound(&gc, &cls).map_err(err)?;
        let sharp = sharp_lower_bound(&b, &cls).map_err(err)?;
        let (mut tested, mut zeros) = (0, 0);
        while tested < 10_000 {
            let f = BetaPolynomial::new(b.clone(), random_poly(&mut rng, 6, 50));
            if f.is_value_zero().map_err(err)? {
                zeros += 1;
                continue;
            }
            tested += 1;
            ensure(at_least(&f, &lb)?, || format!("base {name}: {:?} below M^-6 50^-M", f.poly()))?;
            ensure(at_least(&f, &sharp)?, || format!("base {name}: {:?} below the sharp bound", f.poly()))?;
        }
        let secs = start.elapsed().as_secs_f64();
        ensure(secs <= 30.0, || format!("base {name} took {secs:.1}s"))?;
        notes.push(format!("{name}: M={} ({zeros} zero draws)", gc.m));
    }
    Ok(notes.join(", "))
}

/// `[a_1, a_2, …]` evaluated from the back, without convergents.
fn backward_value(base: &AlgebraicReal, exps: &[u128], prec: u64) -> Enclosure {
    let b = base.enclosure(prec);
    let mut v = Enclosure::zero();
    for &e in exps.iter().rev() {
        v = b.pow(e, prec).add(&v, prec).recip(prec).expect("positive");
    }
    v
}

fn diophantine_sandwich() -> Outcome {
    const PREC: u64 = 1024;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut cases, mut strict) = (0usize, 0usize);
    for (name, b) in bases() {
        for _ in 0..50 {
            let len = rng.gen_range(1..=10);
            let mut exps: Vec<u128> = (0..len).map(|_| rng.gen_range(0..=6)).collect();
            let head = exps.clone();
            exps.extend((0..20).map(|_| rng.gen_range(0..=6u128)));
            let long = CFExponents::new(b.clone(), exps.clone());
            let conv = convergents(&long).map_err(err)?;
            let x = backward_value(&b, &exps, PREC);
            let tol = limit_enclosure(&long, PREC).map_err(err)?.width(PREC);
            let tol = Enclosure::point(tol);
            for k in 1..=head.len() {
                let (qk, qk1) = (conv[k].q.enclosure(PREC), conv[k + 1].q.enclosure(PREC));
                let dist = x.sub(&conv[k].value(PREC), PREC).abs();
                let upper = qk.mul(&qk1, PREC).recip(PREC).expect("positive");
                let lower = qk.mul(&qk1.add(&qk, PREC), PREC).recip(PREC).expect("positive");
                let below = lower.hi() < dist.add(&tol, PREC).lo();
                let above = dist.sub(&tol, PREC).hi() < upper.lo();
                ensure(below && above, || format!("base {name}, cf {head:?}, k={k}: sandwich fails"))?;
                if lower.hi() < dist.lo() && dist.hi() < upper.lo() {
                    strict += 1;
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (cf, k) cases, {strict} strict without tolerance"))
}

fn periodic_cf() -> Outcome {
    let cf = CFExponents::new(two(), vec![1; 12]);
    let e = limit_enclosure(&cf, 256).map_err(err)?.to_rational_interval().map_err(err)?;
    let (lo, hi) = (e.lo() + rat(1, 1), e.hi() + rat(1, 1));
    let two_r = rat(2, 1);
    ensure(lo.is_positive() && &lo * &lo <= two_r && two_r <= &hi * &hi, || "sqrt2-1 not enclosed".into())?;
    let w = e.width();
    ensure(w < rat(1, 1_000_000), || format!("width {w} too large"))?;
    Ok(format!("width {:.3e}", w_to_f64(&w)))
}

fn w_to_f64(r: &BigRational) -> f64 {
    Dyadic::from_rational(r, 64, betaifs_core::num::Round::Up).log2_estimate().exp2()
}

fn random_params(seed: u64) -> Vec<(BigRational, BigRational)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..20)
        .map(|_| {
            let mut r = || {
                let q = rng.gen_range(1..=12i64);
                rat(rng.gen_range(0..=q), q)
            };
            (r(), r())
        })
        .collect()
}

fn delta_equivalence() -> Outcome {
    let lim = Limits::default();
    let mut chains = 0;
    for (s, t) in random_params(6) {
        let p = IFSParams::rational(two(), &s, &t).map_err(err)?;
        let mut last: Option<BigRational> = None;
        for n in 1..=6 {
            let fast = delta_n(&p, n, &lim).map_err(err)?;
            let slow = delta_n_allpairs(&p, n).map_err(err)?;
            ensure(fast.value == slow.value, || format!("s={s}, t={t}, n={n}: {:?} vs {:?}", fast.value, slow.value))?;
            if let Some(prev) = &last {
                ensure(fast.value.hi() <= prev, || format!("s={s}, t={t}: delta increases at n={n}"))?;
            }
            last = Some(fast.value.hi().clone());
        }
        chains += 1;
    }
    Ok(format!("{chains} parameter pairs, n<=6"))
}

fn lemma_inequality() -> Outcome {
    let lim = Limits::default();
    let b = two();
    let mut checked = 0;
    for (s, t) in random_params(6) {
        let p = IFSParams::rational(b.clone(), &s, &t).map_err(err)?;
        for n in 1..=6 {
            let d = delta_n(&p, n, &lim).map_err(err)?;
            let ls = lemma_upper_bound(&b, p.s(), n, &lim).map_err(err)?;
            let lt = lemma_upper_bound(&b, p.t(), n, &lim).map_err(err)?;
            let bound = ls.scaled.min(lt.scaled);
            ensure(d.value.hi() <= &bound, || format!("s={s}, t={t}, n={n}: delta above {bound}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (s, t, n) cases"))
}

fn overlap_detection() -> Outcome {
    let lim = Limits::default();
    let p = IFSParams::rational(two(), &rat(3, 1), &rat(5, 1)).map_err(err)?;
    let hits = find_exact_overlaps(&p, 2, &lim).map_err(err)?;
    ensure(hits.iter().all(|c| c.level == 2), || "unexpected collision before n=2".into())?;
    let mut found = None;
    for c in &hits {
        let rel = overlap_relation(&p, (&c.first, &c.second)).map_err(err)?;
        let c_val = rel.c.enclosure(64).to_rational_interval().map_err(err)?;
        if rel.a.poly() == &IntPolynomial::one() && rel.b.poly().is_zero() && c_val == betaifs_core::num::RationalInterval::point(rat(3, 1)) {
            found = Some(format!("{} ~ {}", c.first, c.second));
        }
    }
    let found = found.ok_or("no collision with A=1, B=0, C=3 at n=2")?;
    let q = IFSParams::rational(two(), &rat(1, 1), &rat(1, 1)).map_err(err)?;
    let d1 = delta_n(&q, 1, &lim).map_err(err)?;
    ensure(d1.value.hi().is_zero(), || "Delta_1 is not 0 for s=t=1".into())?;
    let hits1 = find_exact_overlaps(&q, 1, &lim).map_err(err)?;
    ensure(hits1.iter().any(|c| c.level == 1), || "no collision at n=1 for s=t=1".into())?;
    Ok(format!("s=3,t=5: {} collisions at n=2 ({found}); s=t=1: Delta_1=0", hits.len()))
}

fn class_2_2() -> Vec<IntPolynomial> {
    let mut out = Vec::new();
    for a in -2..=2i64 {
        for b in -2..=2i64 {
            for c in -2..=2i64 {
                out.push(IntPolynomial::from_coeffs([c, b, a]));
            }
        }
    }
    out
}

fn refutation_sweep() -> Outcome {
    let eps = parse_epsilon("superexp:1/2").map_err(err)?;
    let cert = synthesize(two(), &eps, 4).map_err(|f| err(f.error))?;
    let b = cert.base.clone();
    let polys = class_2_2();
    let three = Dyadic::from_int(3);
    let pairs: Vec<(usize, usize)> = (0..polys.len())
        .flat_map(|i| (0..polys.len()).map(move |j| (i, j)))
        .filter(|&(_, j)| !BetaPolynomial::new(b.clone(), polys[j].clone()).is_value_zero().unwrap())
        .collect();
    let results: Vec<Result<(usize, usize), String>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (mut swept, mut skipped) = (0, 0);
            for h in &polys {
                let r = refute_relation(&cert, &polys[i], &polys[j], h).map_err(err)?;
                if r.ratio_bound >= three {
                    skipped += 1;
                    continue;
                }
                if r.verdict != Verdict::Contradiction {
                    return Err(format!("f={:?} g={:?} h={:?}: {}", polys[i], polys[j], h, r.verdict.as_str()));
                }
                swept += 1;
            }
            Ok((swept, skipped))
        })
        .collect();
    let (mut swept, mut skipped) = (0, 0);
    for r in results {
        let (a, b) = r?;
        swept += a;
        skipped += b;
    }
    Ok(format!("{swept} triples refuted, {skipped} with ratio >= 3 skipped"))
}

fn base_set_uniqueness() -> Outcome {
    let lim = Limits::default();
    for (name, b) in bases() {
        for n in 1..=14u32 {
            let set = beta_base_set(b.clone(), n, &lim).map_err(err)?;
            let keys: HashSet<_> = set.value_keys().into_iter().collect();
            ensure(keys.len() == 1 << n, || format!("base {name}, n={n}: {} distinct keys", keys.len()))?;
        }
    }
    Ok("2^n distinct keys for n<=14 on all three bases".into())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let bin = env!("CARGO_BIN_EXE_betaifs");
    let mut bytes = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("cert{i}.json"));
        let status = Command::new(bin)
            .args(["synthesize", "--minpoly", "x-2", "--epsilon", "superexp:1/2", "--depth", "3", "--out"])
            .arg(&out)
            .output()
            .map_err(err)?;
        ensure(status.status.success(), || format!("synthesize exited {:?}", status.status.code()))?;
        bytes.push(std::fs::read(&out).map_err(err)?);
    }
    ensure(bytes[0] == bytes[1], || "certificate files differ".into())?;
    let eps = parse_epsilon("superexp:1/2").map_err(err)?;
    let lib = to_json(&synthesize(two(), &eps, 3).map_err(|f| err(f.error))?);
    ensure(lib.as_bytes() == bytes[0].as_slice(), || "library and CLI certificates differ".into())?;
    let status = Command::new(bin).args(["verify", "--cert"]).arg(dir.path().join("cert0.json")).output().map_err(err)?;
    ensure(status.status.code() == Some(0), || format!("verify exited {:?}", status.status.code()))?;
    Ok(format!("{} identical bytes, verify exit 0", bytes[0].len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("end-to-end synthesis, beta=2", Some(60), end_to_end_two),
        ("end-to-end synthesis, beta=1+sqrt2", Some(120), end_to_end_silver),
        ("Garsia sampling", Some(90), garsia_sampling),
        ("Diophantine sandwich", None, diophantine_sandwich),
        ("periodic continued fraction", None, periodic_cf),
        ("delta oracle equivalence", None, delta_equivalence),
        ("lemma upper bound", None, lemma_inequality),
        ("overlap detection", None, overlap_detection),
        ("no-overlap refutation sweep", Some(600), refutation_sweep),
        ("digit-set uniqueness", Some(60), base_set_uniqueness),
        ("determinism and verify round trip", None, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let took = start.elapsed();
        if let (Ok(_), Some(secs)) = (&outcome, limit) {
            if took > Duration::from_secs(secs) {
                outcome = Err(format!("took {:.1}s, limit {secs}s", took.as_secs_f64()));
            }
        }
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {:>2} {tag} {name}: {detail} [{:.1}s]", i + 1, took.as_secs_f64());
        if outcome.is_err() {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 11 criteria passed");
}
