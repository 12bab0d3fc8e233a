use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::dyadic::{Dyadic, Round};
use super::interval::RationalInterval;
use crate::error::Result;

/// A closed interval `[lo, hi]` with dyadic endpoints. All arithmetic rounds outward.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Enclosure {
    lo: Dyadic,
    hi: Dyadic,
}

impl Enclosure {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        assert!(lo <= hi, "enclosure endpoints out of order");
        Enclosure { lo, hi }
    }

    pub fn point(x: Dyadic) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Enclosure::point(Dyadic::zero())
    }

    pub fn one() -> Self {
        Enclosure::point(Dyadic::one())
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Enclosure::point(Dyadic::from_int(n))
    }

    pub fn from_rational(r: &BigRational, prec: u64) -> Self {
        Enclosure {
            lo: Dyadic::from_rational(r, prec, Round::Down),
            hi: Dyadic::from_rational(r, prec, Round::Up),
        }
    }

    pub fn from_rational_interval(iv: &RationalInterval, prec: u64) -> Self {
        Enclosure {
            lo: Dyadic::from_rational(iv.lo(), prec, Round::Down),
            hi: Dyadic::from_rational(iv.hi(), prec, Round::Up),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Upper bound on the width.
    pub fn width(&self, prec: u64) -> Dyadic {
        self.hi.sub(&self.lo, prec, Round::Up)
    }

    /// Midpoint, rounded down (used only for ordering heuristics).
    pub fn mid(&self, prec: u64) -> Dyadic {
        self.lo.add(&self.hi, prec + 1, Round::Down).mul_exact(&Dyadic::pow2(-1))
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        let lo = Dyadic::from_rational(r, 256, Round::Down);
        let hi = Dyadic::from_rational(r, 256, Round::Up);
        // r itself lies in [lo, hi]; if that bracket sits inside, r does too; otherwise decide exactly.
        if self.lo <= lo && hi <= self.hi {
            return true;
        }
        match (self.lo.to_rational(), self.hi.to_rational()) {
            (Ok(a), Ok(b)) => &a <= r && r <= &b,
            _ => false,
        }
    }

    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn excludes_zero(&self) -> bool {
        self.is_positive() || self.is_negative()
    }

    /// Certified comparison: `Some` only when the intervals are disjoint or identical points.
    pub fn certified_cmp(&self, other: &Enclosure) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if other.hi < self.lo {
            Some(Ordering::Greater)
        } else if self.is_point() && other.is_point() && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn neg(&self) -> Self {
        Enclosure { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let m = core::cmp::max(self.lo.abs(), self.hi.abs());
            Enclosure { lo: Dyadic::zero(), hi: m }
        }
    }

    pub fn add(&self, other: &Enclosure, prec: u64) -> Self {
        Enclosure {
            lo: self.lo.add(&other.lo, prec, Round::Down),
            hi: self.hi.add(&other.hi, prec, Round::Up),
        }
    }

    pub fn sub(&self, other: &Enclosure, prec: u64) -> Self {
        Enclosure {
            lo: self.lo.sub(&other.hi, prec, Round::Down),
            hi: self.hi.sub(&other.lo, prec, Round::Up),
        }
    }

    pub fn mul(&self, other: &Enclosure, prec: u64) -> Self {
        if !self.lo.is_negative() && !other.lo.is_negative() {
            return Enclosure {
                lo: self.lo.mul(&other.lo, prec, Round::Down),
                hi: self.hi.mul(&other.hi, prec, Round::Up),
            };
        }
        let cands = [
            self.lo.mul_exact(&other.lo),
            self.lo.mul_exact(&other.hi),
            self.hi.mul_exact(&other.lo),
            self.hi.mul_exact(&other.hi),
        ];
        let lo = cands.iter().min().unwrap().round(prec, Round::Down);
        let hi = cands.iter().max().unwrap().round(prec, Round::Up);
        Enclosure { lo, hi }
    }

    pub fn scale_pow2(&self, e: impl Into<BigInt>) -> Self {
        let f = Dyadic::pow2(e);
        Enclosure { lo: self.lo.mul_exact(&f), hi: self.hi.mul_exact(&f) }
    }

    /// Reciprocal; `None` if the interval touches zero.
    pub fn recip(&self, prec: u64) -> Option<Self> {
        if !self.excludes_zero() {
            return None;
        }
        let one = Dyadic::one();
        Some(Enclosure { lo: one.div(&self.hi, prec, Round::Down), hi: one.div(&self.lo, prec, Round::Up) })
    }

    pub fn div(&self, other: &Enclosure, prec: u64) -> Option<Self> {
        if !other.excludes_zero() {
            return None;
        }
        if !self.lo.is_negative() && other.is_positive() {
            return Some(Enclosure {
                lo: self.lo.div(&other.hi, prec, Round::Down),
                hi: self.hi.div(&other.lo, prec, Round::Up),
            });
        }
        Some(self.mul(&other.recip(prec + 2)?, prec))
    }

    /// Integer power.
    pub fn pow(&self, e: u128, prec: u64) -> Self {
        if e == 0 {
            return Enclosure::one();
        }
        if !self.lo.is_negative() {
            return Enclosure { lo: self.lo.pow(e, prec, Round::Down), hi: self.hi.pow(e, prec, Round::Up) };
        }
        let a = self.abs();
        let mag = Enclosure { lo: a.lo.pow(e, prec, Round::Down), hi: a.hi.pow(e, prec, Round::Up) };
        if self.hi.is_negative() {
            if e % 2 == 0 { mag } else { mag.neg() }
        } else if e % 2 == 0 {
            Enclosure { lo: Dyadic::zero(), hi: mag.hi }
        } else {
            Enclosure {
                lo: self.lo.neg().pow(e, prec, Round::Up).neg(),
                hi: self.hi.pow(e, prec, Round::Up),
            }
        }
    }

    pub fn hull(&self, other: &Enclosure) -> Self {
        Enclosure {
            lo: core::cmp::min(&self.lo, &other.lo).clone(),
            hi: core::cmp::max(&self.hi, &other.hi).clone(),
        }
    }

    pub fn to_rational_interval(&self) -> Result<RationalInterval> {
        RationalInterval::new(self.lo.to_rational()?, self.hi.to_rational()?)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
