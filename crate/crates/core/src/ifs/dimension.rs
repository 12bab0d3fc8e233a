//! Similarity dimension `log N / log β` of N maps with ratio 1/β.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebraic::AlgebraicReal;
use crate::error::{Error, Result};
use crate::num::{Dyadic, RationalInterval, Round};

const BITS: u64 = 96;

/// `(r, a)` with `x = r^a` and `a` as large as possible.
fn perfect_power(x: &BigInt) -> (BigInt, u32) {
    for k in (2..=x.bits() as u32).rev() {
        let r = x.nth_root(k);
        if num_traits::pow(r.clone(), k as usize) == *x {
            return (r, k);
        }
    }
    (x.clone(), 1)
}

/// `Some(a)` when `x = r^a`.
fn log_exact(x: &BigInt, r: &BigInt) -> Option<u32> {
    let mut acc = BigInt::one();
    for a in 0..=x.bits() as u32 {
        match acc.cmp(x) {
            core::cmp::Ordering::Equal => return Some(a),
            core::cmp::Ordering::Greater => return None,
            core::cmp::Ordering::Less => acc *= r,
        }
    }
    None
}

/// Lower and upper bounds on `2 atanh(y) = ln((1+y)/(1-y))` for rational `0 ≤ y ≤ 1/3`.
fn two_atanh(y: &BigRational) -> (BigRational, BigRational) {
    let y2 = y * y;
    let mut term = y.clone();
    let mut sum = BigRational::zero();
    let mut k = 0u64;
    let eps = BigRational::new(BigInt::one(), BigInt::one() << (BITS + 8));
    loop {
        sum += &term / BigRational::from_integer(BigInt::from(2 * k + 1));
        term *= &y2;
        k += 1;
        // The tail is at most term / ((2k+1)(1 − y²)).
        let tail = &term / (BigRational::from_integer(BigInt::from(2 * k + 1)) * (BigRational::one() - &y2));
        if tail < eps {
            let two = BigRational::from_integer(BigInt::from(2));
            return (&sum * &two, (sum + tail) * two);
        }
    }
}

fn round(x: &BigRational, dir: Round) -> BigRational {
    Dyadic::from_rational(x, BITS, dir).to_rational().expect("moderate exponent")
}

/// Bounds on ln x for a rational x ≥ 1.
fn ln_bounds(x: &BigRational) -> (BigRational, BigRational) {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut m = x.clone();
    let mut k = 0i64;
    while m >= two {
        m /= &two;
        k += 1;
    }
    let one = BigRational::one();
    let y = (&m - &one) / (&m + &one);
    let (ml, mh) = two_atanh(&y);
    let (l2l, l2h) = two_atanh(&BigRational::new(BigInt::one(), BigInt::from(3)));
    let kk = BigRational::from_integer(BigInt::from(k));
    (round(&(&kk * l2l + ml), Round::Down), round(&(&kk * l2h + mh), Round::Up))
}

/// Certified enclosure of `log(branch_count) / log(β)`; exact when both are powers of one integer.
pub fn similarity_dimension(beta: &AlgebraicReal, branch_count: u32) -> Result<RationalInterval> {
    if branch_count < 2 {
        return Err(Error::input("branch count must be at least 2"));
    }
    beta.require_ifs_base()?;
    let n = BigInt::from(branch_count);
    if let Some(b) = beta.as_rational().filter(|b| b.is_integer()) {
        let b = b.to_integer();
        let (r, k) = perfect_power(&b);
        // r^k = β; if also N = r^a the dimension is a/k.
        for d in (1..=k).filter(|d| k % d == 0) {
            let root = num_traits::pow(r.clone(), (k / d) as usize);
            if let Some(a) = log_exact(&n, &root) {
                return Ok(RationalInterval::point(BigRational::new(BigInt::from(a), BigInt::from(d))));
            }
        }
    }
    let iv = beta.refine(&BigRational::new(BigInt::one(), BigInt::one() << BITS));
    let (nl, nh) = ln_bounds(&BigRational::from_integer(n));
    let (bl, _) = ln_bounds(iv.lo());
    let (_, bh) = ln_bounds(iv.hi());
    let lo = round(&(nl / bh), Round::Down);
    let hi = round(&(nh / bl), Round::Up);
    RationalInterval::new(lo, hi)
}
