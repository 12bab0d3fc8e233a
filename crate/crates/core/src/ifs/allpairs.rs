//! Exhaustive O(16^n) pair scan, used to cross-check the sorting engine.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{DeltaResult, IFSParams, Word};
use crate::algebraic::BetaPolynomial;
use crate::error::{Error, Result};
use crate::num::{Dyadic, Enclosure, RationalInterval};

const MAX_N: u32 = 6;
const PREC: u64 = 256;

fn better(cur: &Option<(usize, usize)>, cand: (usize, usize), cmp: Ordering) -> bool {
    match cur {
        None => true,
        Some(p) => cmp == Ordering::Less || (cmp == Ordering::Equal && cand < *p),
    }
}

fn result(n: u32, value: RationalInterval, (u, v): (usize, usize), exact: bool) -> DeltaResult {
    DeltaResult { n, value, witness: (Word::from_index(u as u64, n), Word::from_index(v as u64, n)), exact }
}

/// Same contract as [`super::delta_n`], by comparing every pair of words.
pub fn delta_n_allpairs(params: &IFSParams, n: u32) -> Result<DeltaResult> {
    if n == 0 || n > MAX_N {
        return Err(Error::input("the all-pairs scan supports 1 ≤ n ≤ 6"));
    }
    let count = 1usize << (2 * n);
    let words: Vec<Word> = (0..count as u64).map(|i| Word::from_index(i, n)).collect();
    let base = params.base();
    let s = params.s().as_exact().and_then(|r| r.as_rational());
    let t = params.t().as_exact().and_then(|r| r.as_rational());
    if let (Some(b), Some(s), Some(t)) = (base.as_rational(), s, t) {
        // Points as integers over a common denominator.
        let digits = [BigRational::zero(), BigRational::one(), s, t];
        let pts: Vec<BigRational> = words
            .iter()
            .map(|w| {
                let mut x = BigRational::zero();
                let mut scale = BigRational::one();
                for &l in w.letters() {
                    scale /= b;
                    x += &digits[(l - 1) as usize] * &scale;
                }
                x
            })
            .collect();
        let den = pts.iter().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
        let ints: Vec<BigInt> = pts.iter().map(|p| p.numer() * (&den / p.denom())).collect();
        let mut best: Option<(usize, usize)> = None;
        let mut best_d = BigInt::zero();
        for u in 0..count {
            for v in u + 1..count {
                let d = (&ints[u] - &ints[v]).abs();
                let cmp = if best.is_none() { Ordering::Less } else { d.cmp(&best_d) };
                if better(&best, (u, v), cmp) {
                    best = Some((u, v));
                    best_d = d;
                }
            }
        }
        let value = RationalInterval::point(BigRational::new(best_d, den));
        return Ok(result(n, value, best.expect("pairs"), true));
    }
    let wp = PREC;
    let digits = [Enclosure::zero(), Enclosure::one(), params.s().enclosure(wp)?, params.t().enclosure(wp)?];
    let binv = base.enclosure(wp + 8).recip(wp).ok_or_else(|| Error::input("base encloses zero"))?;
    let pts: Vec<Enclosure> = words
        .iter()
        .map(|w| {
            let mut x = Enclosure::zero();
            let mut scale = Enclosure::one();
            for &l in w.letters() {
                scale = scale.mul(&binv, wp);
                x = x.add(&digits[(l - 1) as usize].mul(&scale, wp), wp);
            }
            x
        })
        .collect();
    let dist = |u: usize, v: usize| pts[u].sub(&pts[v], wp).abs();
    let mut lower: Option<Dyadic> = None;
    let mut best: Option<(usize, usize)> = None;
    let mut best_hi = Dyadic::zero();
    for u in 0..count {
        for v in u + 1..count {
            let d = dist(u, v);
            if lower.as_ref().is_none_or(|l| d.lo() < l) {
                lower = Some(d.lo().clone());
            }
            let cmp = if best.is_none() { Ordering::Less } else { d.hi().cmp(&best_hi) };
            if better(&best, (u, v), cmp) {
                best = Some((u, v));
                best_hi = d.hi().clone();
            }
        }
    }
    if !params.is_exact() {
        let lo = lower.expect("pairs").max(Dyadic::zero());
        let value = Enclosure::new(lo, best_hi).to_rational_interval()?;
        return Ok(result(n, value, best.expect("pairs"), false));
    }
    // Exact parameters over an irrational base: settle the candidates by exact signs of
    // numerators over the common denominator β^n den(s) den(t).
    let (s, t) = (params.s().as_exact().expect("exact"), params.t().as_exact().expect("exact"));
    let sd_td = s.den().mul(t.den())?;
    let letter = [
        BetaPolynomial::constant(base.clone(), 0),
        sd_td.clone(),
        s.num().mul(t.den())?,
        t.num().mul(s.den())?,
    ];
    let numer = |w: &Word| -> Result<BetaPolynomial> {
        let mut k = BetaPolynomial::constant(base.clone(), 0);
        for (j, &l) in w.letters().iter().enumerate() {
            k = k.add(&letter[(l - 1) as usize].shift((n as usize - 1 - j) as u128)?)?;
        }
        Ok(k)
    };
    let mut chosen: Option<((usize, usize), BetaPolynomial)> = None;
    for u in 0..count {
        for v in u + 1..count {
            if dist(u, v).lo() > &best_hi {
                continue;
            }
            let mut g = numer(&words[u])?.sub(&numer(&words[v])?)?;
            if g.sign()? == Ordering::Less {
                g = g.neg();
            }
            let take = match &chosen {
                None => true,
                Some((p, h)) => better(&Some(*p), (u, v), g.sub(h)?.sign()?),
            };
            if take {
                chosen = Some(((u, v), g));
            }
        }
    }
    let (pair, g) = chosen.expect("the best pair is a candidate");
    let den = BetaPolynomial::new(base.clone(), sd_td.poly().shift(n as u128)?);
    let den_sign = den.sign()?;
    let value = if g.is_value_zero()? {
        RationalInterval::point(BigRational::zero())
    } else {
        let q = g.enclosure(PREC).div(&den.enclosure(PREC), PREC).ok_or_else(|| Error::input("zero denominator"))?;
        let q = if den_sign == Ordering::Less { q.neg() } else { q };
        q.to_rational_interval()?
    };
    Ok(result(n, value, pair, true))
}
