//! Continued fractions `[a_1, a_2, …] = 1/(a_1 + 1/(a_2 + …))` whose
//! elements are powers of β.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::algebraic::{bits_u128, AlgebraicReal, BetaPolynomial, BetaRational};
use crate::error::{Error, Result};
use crate::garsia::GarsiaConstant;
use crate::num::{Dyadic, Enclosure, RationalInterval};
use crate::poly::{IntPolynomial, PolyClass};

/// Exponent list `e_1, …, e_k` of the elements `a_i = β^(e_i)`.
#[derive(Clone, Debug)]
pub struct CFExponents {
    base: Arc<AlgebraicReal>,
    exps: Vec<u128>,
}

impl CFExponents {
    pub fn new(base: Arc<AlgebraicReal>, exps: Vec<u128>) -> Self {
        CFExponents { base, exps }
    }

    pub fn base(&self) -> &Arc<AlgebraicReal> {
        &self.base
    }

    pub fn exps(&self) -> &[u128] {
        &self.exps
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    /// The first `k` elements.
    pub fn prefix(&self, k: usize) -> Result<CFExponents> {
        if k > self.exps.len() {
            return Err(Error::input("prefix longer than the continued fraction"));
        }
        Ok(CFExponents { base: self.base.clone(), exps: self.exps[..k].to_vec() })
    }

    pub fn extended(&self, e: u128) -> CFExponents {
        let mut exps = self.exps.clone();
        exps.push(e);
        CFExponents { base: self.base.clone(), exps }
    }
}

/// `p_k / q_k` with both kept as unreduced polynomials in β.
#[derive(Clone, Debug)]
pub struct ConvergentPair {
    pub k: usize,
    pub p: BetaPolynomial,
    pub q: BetaPolynomial,
}

impl ConvergentPair {
    /// Enclosure of the value `p_k / q_k`.
    pub fn value(&self, prec: u64) -> Enclosure {
        let q = self.q.enclosure(prec);
        self.p.enclosure(prec).div(&q, prec).expect("q_k is positive")
    }

    /// Exact value, when β is rational and the degrees are moderate.
    pub fn exact_value(&self) -> Option<BigRational> {
        let b = self.p.base().as_rational()?;
        if max_degree(&self.p, &self.q) > 4096 {
            return None;
        }
        Some(self.p.poly().eval_rational(b) / self.q.poly().eval_rational(b))
    }

    pub fn as_beta_rational(&self) -> BetaRational {
        BetaRational::new(self.p.clone(), self.q.clone()).expect("q_k is nonzero")
    }

    /// Smallest D with both p_k and q_k in 𝒫(D, D).
    pub fn joint_class_parameter(&self) -> Result<u128> {
        joint_class_parameter(self.p.poly(), self.q.poly())
    }
}

pub fn joint_class_parameter(p: &IntPolynomial, q: &IntPolynomial) -> Result<u128> {
    let h = core::cmp::max(p.height(), q.height());
    let h = h.to_u128().ok_or_else(|| Error::resource("convergent height exceeds u128"))?;
    let d = core::cmp::max(p.degree().unwrap_or(0), q.degree().unwrap_or(0));
    Ok(d.max(h))
}

fn max_degree(p: &BetaPolynomial, q: &BetaPolynomial) -> u128 {
    core::cmp::max(p.poly().degree().unwrap_or(0), q.poly().degree().unwrap_or(0))
}

/// The next pair from the two previous ones and the new element `β^e`.
pub fn next_convergent(before: &ConvergentPair, last: &ConvergentPair, e: u128) -> Result<ConvergentPair> {
    Ok(ConvergentPair {
        k: last.k + 1,
        p: last.p.shift(e)?.add(&before.p)?,
        q: last.q.shift(e)?.add(&before.q)?,
    })
}

/// Pairs for k = 0..=len, starting from `p_0 = 0, q_0 = 1`.
pub fn convergents(cf: &CFExponents) -> Result<Vec<ConvergentPair>> {
    let b = cf.base.clone();
    let mut out = Vec::with_capacity(cf.len() + 1);
    let mut before = ConvergentPair {
        k: 0,
        p: BetaPolynomial::constant(b.clone(), 1),
        q: BetaPolynomial::constant(b.clone(), 0),
    };
    let mut last = ConvergentPair { k: 0, p: BetaPolynomial::constant(b.clone(), 0), q: BetaPolynomial::constant(b, 1) };
    out.push(last.clone());
    for &e in &cf.exps {
        let next = next_convergent(&before, &last, e)?;
        before = core::mem::replace(&mut last, next);
        out.push(last.clone());
    }
    Ok(out)
}

fn value_interval(pair: &ConvergentPair, prec: u64) -> Result<RationalInterval> {
    match pair.exact_value() {
        Some(v) => Ok(RationalInterval::point(v)),
        None => pair.value(prec).to_rational_interval(),
    }
}

/// Hull of the last two convergent values; contains every infinite continuation.
pub fn limit_enclosure(cf: &CFExponents, prec: u64) -> Result<Enclosure> {
    if cf.len() < 2 {
        return Err(Error::input("limit enclosure needs at least two elements"));
    }
    let conv = convergents(cf)?;
    let n = conv.len();
    Ok(conv[n - 2].value(prec).hull(&conv[n - 1].value(prec)))
}

/// Rational version of [`limit_enclosure`]; exact endpoints when β is rational.
pub fn limit_interval(cf: &CFExponents, prec: u64) -> Result<RationalInterval> {
    if cf.len() < 2 {
        return Err(Error::input("limit enclosure needs at least two elements"));
    }
    let conv = convergents(cf)?;
    let n = conv.len();
    Ok(value_interval(&conv[n - 2], prec)?.hull(&value_interval(&conv[n - 1], prec)?))
}

/// Enclosure of 𝒞[a_1, …, a_k]: between `p_k/q_k` and the mediant
/// `(p_k + p_(k-1)) / (q_k + q_(k-1))`.
pub fn tail_hull(cf: &CFExponents, prec: u64) -> Result<Enclosure> {
    if cf.is_empty() {
        return Err(Error::input("tail hull of an empty continued fraction"));
    }
    let conv = convergents(cf)?;
    let n = conv.len();
    let (prev, last) = (&conv[n - 2], &conv[n - 1]);
    let mediant = ConvergentPair { k: last.k, p: last.p.add(&prev.p)?, q: last.q.add(&prev.q)? };
    Ok(last.value(prec).hull(&mediant.value(prec)))
}

/// Rational version of [`tail_hull`].
pub fn tail_interval(cf: &CFExponents, prec: u64) -> Result<RationalInterval> {
    if cf.is_empty() {
        return Err(Error::input("tail hull of an empty continued fraction"));
    }
    let conv = convergents(cf)?;
    let n = conv.len();
    let (prev, last) = (&conv[n - 2], &conv[n - 1]);
    let mediant = ConvergentPair { k: last.k, p: last.p.add(&prev.p)?, q: last.q.add(&prev.q)? };
    Ok(value_interval(last, prec)?.hull(&value_interval(&mediant, prec)?))
}

/// Certified `(l, u)` with `l <= 1/(q_k (q_(k+1) + q_k))` and `u >= 1/(q_k q_(k+1))`.
pub fn diophantine_bounds(cf: &CFExponents, k: usize, prec: u64) -> Result<(Dyadic, Dyadic)> {
    if k + 1 > cf.len() {
        return Err(Error::input("index out of range for the Diophantine bounds"));
    }
    let conv = convergents(&cf.prefix(k + 1)?)?;
    let qk = conv[k].q.enclosure(prec);
    let qk1 = conv[k + 1].q.enclosure(prec);
    let l = qk.mul(&qk1.add(&qk, prec), prec).recip(prec).expect("positive").lo().clone();
    let u = qk.mul(&qk1, prec).recip(prec).expect("positive").hi().clone();
    Ok((l, u))
}

/// Certified lower bound on `1/(q_k (q_(k+1) + q_k))` for the pair `(q_k, q_(k+1))`.
pub fn diophantine_lower(qk: &BetaPolynomial, qk1: &BetaPolynomial, prec: u64) -> Dyadic {
    let a = qk.enclosure(prec);
    let b = qk1.enclosure(prec);
    a.mul(&b.add(&a, prec), prec).recip(prec).expect("positive").lo().clone()
}

/// Enclosure of `β^e`.
pub fn beta_power(base: &AlgebraicReal, e: u128, prec: u64) -> Enclosure {
    base.enclosure(prec + bits_u128(e) + 8).pow(e, prec)
}

/// Upper bound on `M^(k d) d^M`.
pub fn growth_rhs(gc: &GarsiaConstant, k: usize, d: u128, prec: u64) -> Result<Dyadic> {
    let kd = (k as u128).checked_mul(d).ok_or_else(|| Error::resource("growth exponent overflow"))?;
    let m = Enclosure::from_int(gc.m);
    let dd = Enclosure::point(Dyadic::from_int(BigInt::from(d)));
    Ok(m.pow(kd, prec).mul(&dd.pow(gc.m as u128, prec), prec).hi().clone())
}

/// One row of the growth check: `β^(e_(k+1)) >= M^(k d_k) d_k^M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthRow {
    pub k: usize,
    pub d_k: u128,
    pub exponent: u128,
    pub lhs: Dyadic,
    pub rhs: Dyadic,
    pub pass: bool,
}

pub fn growth_row(base: &AlgebraicReal, gc: &GarsiaConstant, pair: &ConvergentPair, e: u128, prec: u64) -> Result<GrowthRow> {
    let d_k = pair.joint_class_parameter()?;
    let rhs = growth_rhs(gc, pair.k, d_k, prec)?;
    let lhs = beta_power(base, e, prec).lo().clone();
    Ok(GrowthRow { k: pair.k, d_k, exponent: e, pass: lhs >= rhs, lhs, rhs })
}

/// Growth rows for k = 1..len-1. All rows passing certifies the limit is outside ℚ_β.
pub fn check_irrationality_growth(cf: &CFExponents, gc: &GarsiaConstant, prec: u64) -> Result<Vec<GrowthRow>> {
    let conv = convergents(cf)?;
    (1..cf.len()).map(|k| growth_row(&cf.base, gc, &conv[k], cf.exps[k], prec)).collect()
}

/// Smallest `e >= floor` with `pred(e)`, for a predicate that is monotone in `e`.
pub fn min_exponent(floor: u128, mut pred: impl FnMut(u128) -> Result<bool>) -> Result<u128> {
    if pred(floor)? {
        return Ok(floor);
    }
    let overflow = || Error::resource("exponent search overflow");
    let mut bad = floor;
    let mut step: u128 = 1;
    let good = loop {
        let cand = floor.checked_add(step).ok_or_else(overflow)?;
        if pred(cand)? {
            break cand;
        }
        bad = cand;
        step = step.checked_mul(2).ok_or_else(overflow)?;
    };
    let (mut bad, mut good) = (bad, good);
    while good - bad > 1 {
        let mid = bad + (good - bad) / 2;
        if pred(mid)? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(good)
}

/// Class, threshold and `M1` for one separation step; independent of the next element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationData {
    /// Class of the numerator `p_k g den - q_k (f num + h den)`.
    pub class: PolyClass,
    pub l: u128,
    /// Upper bound on `q_k g(β) den(β)` over the class.
    pub m1: Dyadic,
    /// Upper bound on `2 M^L L^M M1`; the next element must exceed it.
    pub threshold: Dyadic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationResult {
    pub next_exponent: u128,
    pub c: Dyadic,
    pub data: SeparationData,
}

fn multiplier_parts(base: &Arc<AlgebraicReal>, multiplier: Option<&BetaRational>) -> (BetaPolynomial, BetaPolynomial) {
    match multiplier {
        Some(m) => (m.num().clone(), m.den().clone()),
        None => (BetaPolynomial::constant(base.clone(), 1), BetaPolynomial::constant(base.clone(), 1)),
    }
}

pub fn separation_data(
    prefix: &CFExponents,
    cls: &PolyClass,
    multiplier: Option<&BetaRational>,
    gc: &GarsiaConstant,
    prec: u64,
) -> Result<SeparationData> {
    if prefix.is_empty() {
        return Err(Error::input("separation needs a nonempty prefix"));
    }
    if num_traits::Zero::is_zero(&cls.h) {
        return Err(Error::input("separation class must have a positive height bound"));
    }
    let conv = convergents(prefix)?;
    let last = conv.last().unwrap();
    let (num, den) = multiplier_parts(&prefix.base, multiplier);
    let (pc, qc) = (PolyClass::of(last.p.poly()), PolyClass::of(last.q.poly()));
    let (numc, denc) = (PolyClass::of(num.poly()), PolyClass::of(den.poly()));

    let left = pc.product(&cls.product(&denc)?)?;
    let inner = cls.product(&numc)?.sum(&cls.product(&denc)?);
    let right = qc.product(&inner)?;
    let class = left.sum(&right);
    let l = class.square_hull()?;

    let beta = prefix.base.enclosure(prec + bits_u128(cls.n) + 8);
    let g_max = Enclosure::point(Dyadic::from_int(BigInt::from(&cls.h * (BigUint::from(cls.n) + 1u32))))
        .mul(&beta.pow(cls.n, prec), prec);
    let qden = last.q.mul(&den)?.enclosure(prec).abs();
    let m1 = qden.mul(&g_max, prec).hi().clone();

    let m = Enclosure::from_int(gc.m);
    let ll = Enclosure::point(Dyadic::from_int(BigInt::from(l)));
    let threshold = m
        .pow(l, prec)
        .mul(&ll.pow(gc.m as u128, prec), prec)
        .mul(&Enclosure::point(m1.clone()), prec)
        .scale_pow2(1)
        .hi()
        .clone();
    Ok(SeparationData { class, l, m1, threshold })
}

/// The element `β^e` clears the separation threshold.
pub fn separation_admits(base: &AlgebraicReal, data: &SeparationData, e: u128, prec: u64) -> bool {
    beta_power(base, e, prec).lo() > &data.threshold
}

/// `c = min(1/threshold, 1/(q_k (q_(k+1) + q_k)))` for the element `β^e`, rounded down.
pub fn separation_constant(prefix: &CFExponents, data: &SeparationData, e: u128, prec: u64) -> Result<Dyadic> {
    let conv = convergents(prefix)?;
    let n = conv.len();
    let (prev, last) = (&conv[n - 2], &conv[n - 1]);
    let next = next_convergent(prev, last, e)?;
    let dio = diophantine_lower(&last.q, &next.q, prec);
    let lemma = Enclosure::point(data.threshold.clone()).recip(prec).expect("positive").lo().clone();
    Ok(core::cmp::min(dio, lemma))
}

/// Smallest admissible next exponent and its separation constant: every
/// s ∈ 𝒞[a_1, …, a_k, β^e] stays at distance at least `c` from
/// `(f/g)·multiplier + h/g` for all f, g, h in the class with g(β) ≠ 0.
pub fn separation_choose(
    prefix: &CFExponents,
    cls: &PolyClass,
    multiplier: Option<&BetaRational>,
    gc: &GarsiaConstant,
    prec: u64,
) -> Result<SeparationResult> {
    let data = separation_data(prefix, cls, multiplier, gc, prec)?;
    let e = min_exponent(0, |e| Ok(separation_admits(&prefix.base, &data, e, prec)))?;
    let c = separation_constant(prefix, &data, e, prec)?;
    Ok(SeparationResult { next_exponent: e, c, data })
}
