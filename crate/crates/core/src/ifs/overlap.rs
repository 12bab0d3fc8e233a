//! Exact overlaps `φ_u = φ_v` and the linear relations they force on s and t.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;

use super::fixed::Fixed;
use super::{IFSParams, Limits, Word};
use crate::algebraic::{integer_keys, BetaPolynomial, Reducer};
use crate::error::{Error, Result};
use crate::poly::qpoly::QPoly;
use crate::poly::IntPolynomial;

const MAX_OVERLAP_N: u32 = 10;

/// Two distinct words of the same length with the same image of 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Collision {
    pub level: u32,
    pub first: Word,
    pub second: Word,
}

/// `A s + B t = C`, and when A is nonzero the solved form `s = (f/g) t + h/g`.
#[derive(Clone, Debug)]
pub struct OverlapRelation {
    pub a: BetaPolynomial,
    pub b: BetaPolynomial,
    pub c: BetaPolynomial,
    pub solved: Option<(BetaPolynomial, BetaPolynomial, BetaPolynomial)>,
}

fn exact_parts(params: &IFSParams) -> Result<[BetaPolynomial; 4]> {
    let (Some(s), Some(t)) = (params.s().as_exact(), params.t().as_exact()) else {
        return Err(Error::input("overlap detection requires exact parameters"));
    };
    Ok([s.num().clone(), s.den().clone(), t.num().clone(), t.den().clone()])
}

fn group_pairs<T: Fixed>(keys: &[T], d: usize, n: u32, limits: &Limits, out: &mut Vec<Collision>) -> Result<()> {
    let count = keys.len() / d;
    let mut order: Vec<u32> = (0..count as u32).collect();
    let key = |i: u32| &keys[i as usize * d..(i as usize + 1) * d];
    order.sort_unstable_by(|&a, &b| key(a).cmp(key(b)).then(a.cmp(&b)));
    let mut start = 0;
    let mut found = Vec::new();
    while start < count {
        let mut end = start + 1;
        while end < count && key(order[end]) == key(order[start]) {
            end += 1;
        }
        for i in start..end {
            for j in i + 1..end {
                if out.len() + found.len() >= limits.max_pairs {
                    return Err(Error::resource("too many colliding pairs"));
                }
                found.push(Collision {
                    level: n,
                    first: Word::from_index(order[i] as u64, n),
                    second: Word::from_index(order[j] as u64, n),
                });
            }
        }
        start = end;
    }
    found.sort();
    out.extend(found);
    Ok(())
}

fn level_keys<T: Fixed>(terms: &[Vec<BigInt>], n: u32, d: usize) -> Vec<T> {
    let terms: Vec<Vec<T>> = terms.iter().map(|v| v.iter().map(T::from_big).collect()).collect();
    let count = 1usize << (2 * n);
    let mut keys = Vec::with_capacity(count * d);
    for idx in 0..count {
        let mut acc = alloc::vec![T::zero(); d];
        for j in 0..n as usize {
            let c = (idx >> (2 * (n as usize - 1 - j))) & 3;
            for (a, t) in acc.iter_mut().zip(&terms[4 * j + c]) {
                *a = a.plus(t);
            }
        }
        keys.extend(acc);
    }
    keys
}

/// All colliding pairs of words of each length up to `max_n`, by level and then word order.
pub fn find_exact_overlaps(params: &IFSParams, max_n: u32, limits: &Limits) -> Result<Vec<Collision>> {
    let [sn, sd, tn, td] = exact_parts(params)?;
    if max_n > MAX_OVERLAP_N {
        return Err(Error::input("overlap search supports max_n ≤ 10"));
    }
    let base = params.base();
    let letters = [IntPolynomial::zero(), sd.mul(&td)?.poly().clone(), sn.mul(&td)?.poly().clone(), tn.mul(&sd)?.poly().clone()];
    let mut red = Reducer::new(base);
    let d = red.degree();
    let mut out = Vec::new();
    for n in 1..=max_n {
        limits.check_enumeration(n)?;
        let mut qkeys: Vec<QPoly> = Vec::with_capacity(4 * n as usize);
        for j in 0..n {
            for l in &letters {
                qkeys.push(red.key(&l.shift((n - 1 - j) as u128)?));
            }
        }
        let (ints, _) = integer_keys(&qkeys, d);
        let max_bits = ints.iter().flatten().map(|c| c.bits()).max().unwrap_or(0);
        if max_bits + 8 < 120 {
            group_pairs(&level_keys::<i128>(&ints, n, d), d, n, limits, &mut out)?;
        } else {
            group_pairs(&level_keys::<BigInt>(&ints, n, d), d, n, limits, &mut out)?;
        }
    }
    Ok(out)
}

/// `(L_1, L_2, L_3)`: sums of `β^(n-j)` over the positions j holding letters 2, 3, 4.
fn letter_sums(w: &Word) -> [IntPolynomial; 3] {
    let n = w.len();
    let mut out = [IntPolynomial::zero(), IntPolynomial::zero(), IntPolynomial::zero()];
    for (j, &l) in w.letters().iter().enumerate() {
        if l >= 2 {
            let m = IntPolynomial::monomial((n - 1 - j) as u128, 1);
            out[(l - 2) as usize] = out[(l - 2) as usize].add(&m);
        }
    }
    out
}

pub fn overlap_relation(params: &IFSParams, collision: (&Word, &Word)) -> Result<OverlapRelation> {
    let [sn, sd, tn, td] = exact_parts(params)?;
    let (u, v) = collision;
    if u.len() != v.len() || u == v {
        return Err(Error::input("a collision needs two distinct words of the same length"));
    }
    let base = params.base().clone();
    let bp = |p: IntPolynomial| BetaPolynomial::new(base.clone(), p);
    let [l1, l2, l3] = letter_sums(u);
    let [m1, m2, m3] = letter_sums(v);
    let mut a = bp(l2.sub(&m2));
    let mut b = bp(l3.sub(&m3));
    let mut c = bp(m1.sub(&l1));
    // A sn/sd + B tn/td = C  ⇔  A sn td + B tn sd − C sd td = 0
    let check = a.mul(&sn)?.mul(&td)?.add(&b.mul(&tn)?.mul(&sd)?)?.sub(&c.mul(&sd)?.mul(&td)?)?;
    if !check.is_value_zero()? {
        return Err(Error::input("the words do not collide"));
    }
    let lead = match a.sign()? {
        Ordering::Equal => b.sign()?,
        s => s,
    };
    if lead == Ordering::Less {
        a = a.neg();
        b = b.neg();
        c = c.neg();
    }
    let solved = if a.is_value_zero()? { None } else { Some((b.neg(), a.clone(), c.clone())) };
    Ok(OverlapRelation { a, b, c, solved })
}
