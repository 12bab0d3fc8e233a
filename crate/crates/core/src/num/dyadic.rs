//! Exact binary fractions `m * 2^e` with an unbounded exponent.
//!
//! Every rounding operation takes an explicit mantissa precision and a
//! direction, so results are reproducible bit for bit.

use alloc::format;
use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest binary exponent that is still printed as a plain `p/q` fraction.
const PLAIN_EXPONENT_LIMIT: i64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// The value `mant * 2^exp`; normalized so that `mant` is odd (or zero with `exp == 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: BigInt,
}

fn shr_floor(m: &BigInt, s: u64) -> BigInt {
    // BigInt >> rounds toward negative infinity.
    m >> s
}

fn shr_ceil(m: &BigInt, s: u64) -> BigInt {
    -((-m) >> s)
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: BigInt) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = BigInt::zero();
            return;
        }
        if let Some(tz) = self.mant.trailing_zeros() {
            if tz > 0 {
                self.mant >>= tz;
                self.exp += tz;
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: BigInt::zero() }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::one(), exp: BigInt::zero() }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic::new(n.into(), BigInt::zero())
    }

    /// `2^e`.
    pub fn pow2(e: impl Into<BigInt>) -> Self {
        Dyadic { mant: BigInt::one(), exp: e.into() }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> &BigInt {
        &self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.mant.sign()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    /// Magnitude exponent `g` with `2^(g-1) <= |x| < 2^g`; `None` for zero.
    pub fn magnitude(&self) -> Option<BigInt> {
        if self.is_zero() {
            None
        } else {
            Some(&self.exp + BigInt::from(self.mant.bits()))
        }
    }

    pub fn neg(&self) -> Self {
        Dyadic { mant: -&self.mant, exp: self.exp.clone() }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp.clone() }
    }

    /// Rounds to at most `prec` mantissa bits in the given direction.
    pub fn round(&self, prec: u64, dir: Round) -> Self {
        let bits = self.mant.bits();
        if bits <= prec {
            return self.clone();
        }
        let shift = bits - prec;
        let mant = match dir {
            Round::Down => shr_floor(&self.mant, shift),
            Round::Up => shr_ceil(&self.mant, shift),
        };
        Dyadic::new(mant, &self.exp + BigInt::from(shift))
    }

    /// Exact sum; only call when exponents are close (callers go through `add`).
    fn add_exact(&self, other: &Self) -> Self {
        let (lo, hi) = if self.exp <= other.exp { (self, other) } else { (other, self) };
        let shift = (&hi.exp - &lo.exp).to_u64().expect("aligned exact addition");
        let mant = &lo.mant + (&hi.mant << shift);
        Dyadic::new(mant, lo.exp.clone())
    }

    /// Sum rounded to `prec` bits.
    pub fn add(&self, other: &Self, prec: u64, dir: Round) -> Self {
        if self.is_zero() {
            return other.round(prec, dir);
        }
        if other.is_zero() {
            return self.round(prec, dir);
        }
        let ma = self.magnitude().unwrap();
        let mb = other.magnitude().unwrap();
        let (big, small, mbig, msmall) =
            if ma >= mb { (self, other, ma, mb) } else { (other, self, mb, ma) };
        let gap = &mbig - &msmall;
        if gap > BigInt::from(prec + 4) {
            // |small| < 2^(mbig - prec - 2): it can only move the result by that much.
            let r = big.round(prec, dir);
            let ulp = Dyadic::pow2(&mbig - BigInt::from(prec + 2));
            let nudged = match (dir, small.is_negative()) {
                (Round::Down, true) => r.add_exact(&ulp.neg()),
                (Round::Up, false) => r.add_exact(&ulp),
                _ => r,
            };
            return nudged.round(prec, dir);
        }
        self.add_exact(other).round(prec, dir)
    }

    pub fn sub(&self, other: &Self, prec: u64, dir: Round) -> Self {
        self.add(&other.neg(), prec, dir)
    }

    pub fn mul_exact(&self, other: &Self) -> Self {
        Dyadic::new(&self.mant * &other.mant, &self.exp + &other.exp)
    }

    pub fn mul(&self, other: &Self, prec: u64, dir: Round) -> Self {
        self.mul_exact(other).round(prec, dir)
    }

    /// Quotient rounded to `prec` bits. Panics on division by zero.
    pub fn div(&self, other: &Self, prec: u64, dir: Round) -> Self {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let want = prec as i64 + other.mant.bits() as i64 - self.mant.bits() as i64 + 2;
        let k = want.max(0) as u64;
        let num = &self.mant << k;
        let q = match dir {
            Round::Down => num.div_floor(&other.mant),
            Round::Up => -((-num).div_floor(&other.mant)),
        };
        Dyadic::new(q, &self.exp - &other.exp - BigInt::from(k)).round(prec, dir)
    }

    /// Rational `p/q` rounded to `prec` bits (exact when the rational is dyadic and short).
    pub fn from_rational(r: &BigRational, prec: u64, dir: Round) -> Self {
        let num = Dyadic::from_int(r.numer().clone());
        let den = Dyadic::from_int(r.denom().clone());
        if den.mant.is_one() {
            // power-of-two denominator: exact up to rounding of the numerator
            return Dyadic::new(r.numer().clone(), -den.exp).round(prec, dir);
        }
        num.div(&den, prec, dir)
    }

    /// `floor(x * 2^p)`.
    pub fn floor_scaled(&self, p: i64) -> BigInt {
        let e = &self.exp + BigInt::from(p);
        if e.is_negative() {
            match (-e).to_u64() {
                Some(s) => shr_floor(&self.mant, s),
                None if self.mant.is_negative() => -BigInt::one(),
                None => BigInt::zero(),
            }
        } else {
            &self.mant << e.to_u64().expect("scaled value too large")
        }
    }

    /// `ceil(x * 2^p)`.
    pub fn ceil_scaled(&self, p: i64) -> BigInt {
        -self.neg().floor_scaled(p)
    }

    /// Exact conversion; fails when the exponent is too large to materialize.
    pub fn to_rational(&self) -> Result<BigRational> {
        let e = self
            .exp
            .to_i64()
            .filter(|e| e.abs() <= 1 << 24)
            .ok_or_else(|| Error::resource("dyadic exponent too large for a plain rational"))?;
        Ok(if e >= 0 {
            BigRational::from_integer(&self.mant << (e as u64))
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << ((-e) as u64))
        })
    }

    /// Approximate base-2 logarithm of `|x|` (for search starting points only).
    pub fn log2_estimate(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mant.bits();
        let top = if bits > 53 { shr_floor(&self.mant.abs(), bits - 53) } else { self.mant.abs() };
        let topf = top.to_f64().unwrap_or(1.0);
        let topbits = if bits > 53 { 53 } else { bits };
        // topf in [2^(topbits-1), 2^topbits); linear interpolation of log2 on the mantissa
        let frac = topf / pow2_f64(topbits as i32 - 1) - 1.0;
        self.exp.to_f64().unwrap_or(f64::INFINITY) + (bits - topbits) as f64 + (topbits - 1) as f64 + frac
    }

    /// Integer power with directed rounding; requires `self >= 0`.
    pub fn pow(&self, mut e: u128, prec: u64, dir: Round) -> Self {
        debug_assert!(!self.is_negative());
        let mut base = self.clone();
        let mut acc = Dyadic::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, prec, dir);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, prec, dir);
            }
        }
        acc
    }
}

fn pow2_f64(k: i32) -> f64 {
    let mut v = 1.0;
    for _ in 0..k {
        v *= 2.0;
    }
    v
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.mant.sign(), other.mant.sign());
        let rank = |s: Sign| match s {
            Sign::Minus => 0,
            Sign::NoSign => 1,
            Sign::Plus => 2,
        };
        if sa != sb {
            return rank(sa).cmp(&rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        let by_mag = self.magnitude().unwrap().cmp(&other.magnitude().unwrap());
        let mag_order = if by_mag != Ordering::Equal {
            by_mag
        } else {
            let d = self.abs().add_exact(&other.abs().neg());
            d.mant.sign().cmp(&Sign::NoSign)
        };
        if sa == Sign::Plus {
            mag_order
        } else {
            mag_order.reverse()
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exp.to_i64() {
            Some(e) if (0..=PLAIN_EXPONENT_LIMIT).contains(&e) => {
                write!(f, "{}", &self.mant << (e as u64))
            }
            Some(e) if (-PLAIN_EXPONENT_LIMIT..0).contains(&e) => {
                write!(f, "{}/{}", self.mant, BigInt::one() << ((-e) as u64))
            }
            _ => write!(f, "{}*2^{}", self.mant, self.exp),
        }
    }
}

impl core::str::FromStr for Dyadic {
    type Err = Error;

    /// Accepts `m`, `p/2^k` written out, or `m*2^E`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((m, e)) = s.split_once("*2^") {
            let mant: BigInt = m.trim().parse().map_err(|_| Error::input(format!("bad mantissa in {s:?}")))?;
            let exp: BigInt = e.trim().parse().map_err(|_| Error::input(format!("bad exponent in {s:?}")))?;
            return Ok(Dyadic::new(mant, exp));
        }
        let r = crate::num::parse_rational(s)?;
        let den = r.denom();
        let tz = den.trailing_zeros().unwrap_or(0);
        if (den >> tz) != BigInt::one() {
            return Err(Error::input(format!("{s:?} is not a dyadic rational")));
        }
        Ok(Dyadic::new(r.numer().clone(), -BigInt::from(tz)))
    }
}

impl Dyadic {
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}
