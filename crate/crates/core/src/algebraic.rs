//! The algebraic base β and exact arithmetic in ℤ[β] / ℚ_β.
//!
//! Elements of ℤ[β] keep their unreduced integer polynomial (the monomial
//! structure matters for β-base digit bookkeeping); reduction modulo the
//! minimal polynomial happens only inside value-level predicates.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::garsia;
use crate::num::{Enclosure, RationalInterval};
use crate::poly::qpoly::{self, QPoly};
use crate::poly::{IntPolynomial, PolyClass};

/// A real algebraic number: primitive square-free defining polynomial and an
/// isolating interval containing exactly one of its real roots.
///
/// Minimality of the polynomial is assumed, not checked; zero tests and
/// Garsia-type constants rely on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicReal {
    minpoly: IntPolynomial,
    dense: QPoly,
    isolating: RationalInterval,
}

impl AlgebraicReal {
    /// Validates and normalizes; see [`make_algebraic_real`].
    pub fn new(minpoly: IntPolynomial, isolating: RationalInterval) -> Result<Self> {
        let deg = minpoly.degree().unwrap_or(0);
        if deg == 0 {
            return Err(Error::input("defining polynomial must be nonconstant"));
        }
        if deg > 64 {
            return Err(Error::input("defining polynomial degree above 64 is not supported"));
        }
        let minpoly = minpoly.primitive();
        let dense = minpoly.to_rational_dense()?;
        let deriv = minpoly.derivative().to_rational_dense()?;
        let g = qpoly::gcd(&dense, &deriv);
        if qpoly::degree(&g).unwrap_or(0) > 0 {
            return Err(Error::input(format!("polynomial {minpoly} is not square-free")));
        }

        let (lo, hi) = (isolating.lo().clone(), isolating.hi().clone());
        let f_lo = qpoly::eval(&dense, &lo);
        let f_hi = qpoly::eval(&dense, &hi);
        let sturm = sturm_sequence(&dense);
        let open_count = sign_variations(&sturm, &lo) - sign_variations(&sturm, &hi);
        let closed_count = open_count + usize::from(f_lo.is_zero());
        if closed_count == 0 {
            return Err(Error::input("interval does not isolate a root (no sign change)"));
        }
        if closed_count > 1 {
            return Err(Error::input(format!("interval contains {closed_count} roots; it must isolate one")));
        }
        let isolating = if f_lo.is_zero() {
            RationalInterval::point(lo)
        } else if f_hi.is_zero() {
            RationalInterval::point(hi)
        } else if deg == 1 {
            let c = minpoly.dense()?;
            RationalInterval::point(BigRational::new(-c[0].clone(), c[1].clone()))
        } else {
            isolating
        };
        Ok(AlgebraicReal { minpoly, dense, isolating })
    }

    pub fn minpoly(&self) -> &IntPolynomial {
        &self.minpoly
    }

    pub fn degree(&self) -> u128 {
        self.minpoly.degree().unwrap_or(0)
    }

    pub fn isolating(&self) -> &RationalInterval {
        &self.isolating
    }

    /// The exact value when β is rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.isolating.is_point().then(|| self.isolating.lo())
    }

    /// Bisection refinement to width `<= target_width`; successive calls are nested.
    pub fn refine(&self, target_width: &BigRational) -> RationalInterval {
        let mut lo = self.isolating.lo().clone();
        let mut hi = self.isolating.hi().clone();
        if lo == hi {
            return self.isolating.clone();
        }
        let lo_sign = qpoly::eval(&self.dense, &lo).is_positive();
        let two = BigRational::from_integer(BigInt::from(2));
        while &(&hi - &lo) > target_width {
            let mid = (&lo + &hi) / &two;
            let v = qpoly::eval(&self.dense, &mid);
            if v.is_zero() {
                return RationalInterval::point(mid);
            }
            if v.is_positive() == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        RationalInterval::new(lo, hi).expect("bisection keeps order")
    }

    /// Dyadic enclosure of β with roughly `prec` significant bits.
    pub fn enclosure(&self, prec: u64) -> Enclosure {
        if let Some(r) = self.as_rational() {
            return Enclosure::from_rational(r, prec);
        }
        let scale = {
            let m = core::cmp::max(self.isolating.lo().abs(), self.isolating.hi().abs());
            let mut k = 0u64;
            let mut v = m.to_integer();
            while v > BigInt::one() {
                v >>= 1u32;
                k += 1;
            }
            k
        };
        let width = BigRational::new(BigInt::one() << scale, BigInt::one() << prec);
        let iv = self.newton_refine(&width).unwrap_or_else(|| self.refine(&width));
        Enclosure::from_rational_interval(&iv, prec + 4)
    }

    /// Newton steps from a coarse bisection, accepted only after an exact sign-change check.
    fn newton_refine(&self, target_width: &BigRational) -> Option<RationalInterval> {
        const COARSE_BITS: u64 = 32;
        let coarse_width = BigRational::new(BigInt::one(), BigInt::one() << COARSE_BITS);
        if target_width >= &coarse_width {
            return None;
        }
        let coarse = self.refine(&coarse_width);
        if coarse.is_point() {
            return Some(coarse);
        }
        let deriv: QPoly = self.dense.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
        let two = BigRational::from_integer(BigInt::from(2));
        let mut x = (coarse.lo() + coarse.hi()) / &two;
        let mut bits = COARSE_BITS;
        let goal = target_width / BigRational::from_integer(BigInt::from(8));
        loop {
            let d = qpoly::eval(&deriv, &x);
            if d.is_zero() {
                return None;
            }
            x = &x - qpoly::eval(&self.dense, &x) / d;
            bits = bits.checked_mul(2)?;
            let den = BigInt::one() << (bits + 8);
            x = BigRational::new((&x * BigRational::from_integer(den.clone())).floor().to_integer(), den);
            if BigRational::new(BigInt::one(), BigInt::one() << bits) <= goal {
                break;
            }
        }
        let half = target_width / &two;
        let lo = core::cmp::max(&x - &half, coarse.lo().clone());
        let hi = core::cmp::min(&x + &half, coarse.hi().clone());
        if lo > hi {
            return None;
        }
        let (fl, fh) = (qpoly::eval(&self.dense, &lo), qpoly::eval(&self.dense, &hi));
        if fl.is_zero() {
            return Some(RationalInterval::point(lo));
        }
        if fh.is_zero() {
            return Some(RationalInterval::point(hi));
        }
        (fl.is_positive() != fh.is_positive()).then(|| RationalInterval::new(lo, hi).expect("ordered"))
    }

    /// β is at least 2 (decided exactly).
    pub fn is_at_least_two(&self) -> bool {
        let two = BigRational::from_integer(BigInt::from(2));
        if qpoly::eval(&self.dense, &two).is_zero() && self.isolating.contains(&two) {
            return true;
        }
        let mut width = self.isolating.width();
        loop {
            let iv = self.refine(&width);
            if iv.lo() >= &two {
                return true;
            }
            if iv.hi() < &two {
                return false;
            }
            width /= BigRational::from_integer(BigInt::from(4));
            if width.is_zero() {
                return iv.lo() >= &two;
            }
        }
    }

    /// Rejects bases below 2 (the β-base digit sets lose uniqueness there).
    pub fn require_ifs_base(&self) -> Result<()> {
        if self.is_at_least_two() {
            Ok(())
        } else {
            Err(Error::input("base must be ≥ 2"))
        }
    }

    /// Same defining polynomial and overlapping isolating intervals.
    pub fn same_number(&self, other: &AlgebraicReal) -> bool {
        self.minpoly == other.minpoly && self.isolating.intersects(&other.isolating)
    }
}

/// Builds a validated [`AlgebraicReal`].
pub fn make_algebraic_real(minpoly: IntPolynomial, isolating: RationalInterval) -> Result<AlgebraicReal> {
    AlgebraicReal::new(minpoly, isolating)
}

fn sturm_sequence(p: &QPoly) -> Vec<QPoly> {
    let mut seq = alloc::vec![p.clone()];
    let mut d: QPoly = p.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect();
    qpoly::trim(&mut d);
    seq.push(d);
    while qpoly::degree(seq.last().unwrap()).is_some_and(|d| d > 0) {
        let n = seq.len();
        let r = qpoly::neg(&qpoly::rem(&seq[n - 2], &seq[n - 1]));
        if qpoly::degree(&r).is_none() {
            break;
        }
        seq.push(r);
    }
    seq
}

fn sign_variations(seq: &[QPoly], x: &BigRational) -> usize {
    let signs: Vec<bool> = seq
        .iter()
        .map(|p| qpoly::eval(p, x))
        .filter(|v| !v.is_zero())
        .map(|v| v.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Reduction of integer polynomials modulo the minimal polynomial, with a
/// cache of monomial residues.
#[derive(Clone, Debug)]
pub struct Reducer {
    modulus: QPoly,
    cache: BTreeMap<u128, QPoly>,
}

impl Reducer {
    pub fn new(beta: &AlgebraicReal) -> Self {
        let lc = beta.dense.last().unwrap().clone();
        let modulus = beta.dense.iter().map(|c| c / &lc).collect();
        Reducer { modulus, cache: BTreeMap::new() }
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Residue of `x^e`.
    pub fn monomial(&mut self, e: u128) -> QPoly {
        if let Some(r) = self.cache.get(&e) {
            return r.clone();
        }
        let d = self.degree() as u128;
        let r = if e < d {
            let mut v = alloc::vec![BigRational::zero(); e as usize + 1];
            v[e as usize] = BigRational::one();
            v
        } else if e < 64 {
            let prev = self.monomial(e - 1);
            let mut shifted = alloc::vec![BigRational::zero()];
            shifted.extend(prev);
            qpoly::rem(&shifted, &self.modulus)
        } else {
            let half = self.monomial(e / 2);
            let mut sq = qpoly::rem(&qpoly::mul(&half, &half), &self.modulus);
            if e % 2 == 1 {
                sq.insert(0, BigRational::zero());
                sq = qpoly::rem(&sq, &self.modulus);
            }
            sq
        };
        self.cache.insert(e, r.clone());
        r
    }

    /// Canonical residue of `p`: rational coefficients, constant first, no trailing zeros.
    pub fn key(&mut self, p: &IntPolynomial) -> QPoly {
        let mut acc: QPoly = Vec::new();
        for (e, c) in p.terms() {
            let m = self.monomial(*e);
            if acc.len() < m.len() {
                acc.resize(m.len(), BigRational::zero());
            }
            let c = BigRational::from_integer(c.clone());
            for (i, v) in m.iter().enumerate() {
                acc[i] += &c * v;
            }
        }
        qpoly::trim(&mut acc);
        acc
    }
}

/// An element f(β) of ℤ[β], kept as the unreduced polynomial f.
#[derive(Clone, Debug)]
pub struct BetaPolynomial {
    base: Arc<AlgebraicReal>,
    poly: IntPolynomial,
}

impl PartialEq for BetaPolynomial {
    /// Representation-level equality (same base, same polynomial).
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly && (Arc::ptr_eq(&self.base, &other.base) || self.base.same_number(&other.base))
    }
}

impl BetaPolynomial {
    pub fn new(base: Arc<AlgebraicReal>, poly: IntPolynomial) -> Self {
        BetaPolynomial { base, poly }
    }

    pub fn constant(base: Arc<AlgebraicReal>, c: impl Into<BigInt>) -> Self {
        Self::new(base, IntPolynomial::constant(c))
    }

    pub fn base(&self) -> &Arc<AlgebraicReal> {
        &self.base
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.poly
    }

    fn check_base(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.base, &other.base) || self.base.same_number(&other.base) {
            Ok(())
        } else {
            Err(Error::input("operands have different bases"))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        Ok(Self::new(self.base.clone(), self.poly.add(&other.poly)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        Ok(Self::new(self.base.clone(), self.poly.sub(&other.poly)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        Ok(Self::new(self.base.clone(), self.poly.mul(&other.poly)?))
    }

    /// Multiplication by β^e.
    pub fn shift(&self, e: u128) -> Result<Self> {
        Ok(Self::new(self.base.clone(), self.poly.shift(e)?))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.base.clone(), self.poly.neg())
    }

    /// Enclosure of the real value with about `prec` significant bits of β.
    pub fn enclosure(&self, prec: u64) -> Enclosure {
        let deg_bits = bits_u128(self.poly.degree().unwrap_or(0));
        let beta = self.base.enclosure(prec + deg_bits + 8);
        self.poly.eval_enclosure(&beta, prec + 8)
    }

    fn exact_degree_ok(&self) -> Result<()> {
        let deg = self.poly.degree().unwrap_or(0);
        if deg <= EXACT_DEGREE_LIMIT {
            Ok(())
        } else {
            Err(Error::resource(format!("degree {deg} too large for exact reduction")))
        }
    }

    /// Exact test: the value is zero iff the minimal polynomial divides f.
    ///
    /// A certified enclosure away from zero settles it at any degree; otherwise
    /// the polynomial is reduced, which needs a moderate degree.
    pub fn is_value_zero(&self) -> Result<bool> {
        if self.poly.is_zero() {
            return Ok(true);
        }
        if self.enclosure(64).excludes_zero() {
            return Ok(false);
        }
        self.exact_degree_ok()?;
        if let Some(r) = self.base.as_rational() {
            return Ok(self.poly.eval_rational(r).is_zero());
        }
        Ok(Reducer::new(&self.base).key(&self.poly).is_empty())
    }

    /// Exact sign. Terminates because a nonzero value is bounded below by the
    /// Garsia-type bound for the polynomial's class.
    pub fn sign(&self) -> Result<Ordering> {
        if self.poly.is_zero() {
            return Ok(Ordering::Equal);
        }
        let first = self.enclosure(64);
        if first.excludes_zero() {
            return Ok(if first.is_positive() { Ordering::Greater } else { Ordering::Less });
        }
        if self.is_value_zero()? {
            return Ok(Ordering::Equal);
        }
        if let Some(r) = self.base.as_rational() {
            return Ok(self.poly.eval_rational(r).cmp(&BigRational::zero()));
        }
        let needed = garsia::sharp_lower_bound_bits(&self.base, &PolyClass::of(&self.poly));
        let mut prec = 128u64;
        loop {
            let e = self.enclosure(prec);
            if e.is_positive() {
                return Ok(Ordering::Greater);
            }
            if e.is_negative() {
                return Ok(Ordering::Less);
            }
            // Once the enclosure is narrower than the lower bound it excludes zero.
            assert!(prec <= needed.saturating_mul(4).saturating_add(1 << 14), "sign refinement failed to terminate");
            prec = prec.saturating_mul(2);
        }
    }

    /// Residue modulo the minimal polynomial; equal keys ⇔ equal values.
    pub fn value_key(&self) -> Result<QPoly> {
        self.exact_degree_ok()?;
        Ok(Reducer::new(&self.base).key(&self.poly))
    }

    pub fn is_in_beta_base(&self, n: u128) -> bool {
        is_in_beta_base(&self.poly, n)
    }
}

pub fn bits_u128(x: u128) -> u64 {
    (128 - x.leading_zeros()) as u64
}

/// Representation-level membership in ℬ_n: coefficients in {0,1}, degree ≤ n−1.
pub fn is_in_beta_base(p: &IntPolynomial, n: u128) -> bool {
    p.is_binary_below(n)
}

pub fn sign_of(a: &BetaPolynomial) -> Result<i32> {
    Ok(match a.sign()? {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    })
}

/// Largest degree for which values are reduced exactly modulo the minimal polynomial.
pub const EXACT_DEGREE_LIMIT: u128 = 1 << 14;

/// An element f/g of ℚ_β with g(β) ≠ 0.
#[derive(Clone, Debug)]
pub struct BetaRational {
    num: BetaPolynomial,
    den: BetaPolynomial,
}

impl BetaRational {
    pub fn new(num: BetaPolynomial, den: BetaPolynomial) -> Result<Self> {
        num.check_base(&den)?;
        if den.is_value_zero()? {
            return Err(Error::input("denominator vanishes at the base"));
        }
        Ok(BetaRational { num, den })
    }

    /// Rational number p/q viewed in ℚ_β.
    pub fn from_rational(base: Arc<AlgebraicReal>, r: &BigRational) -> Self {
        BetaRational {
            num: BetaPolynomial::constant(base.clone(), r.numer().clone()),
            den: BetaPolynomial::constant(base, r.denom().clone()),
        }
    }

    pub fn num(&self) -> &BetaPolynomial {
        &self.num
    }

    pub fn den(&self) -> &BetaPolynomial {
        &self.den
    }

    pub fn base(&self) -> &Arc<AlgebraicReal> {
        self.num.base()
    }

    pub fn enclosure(&self, prec: u64) -> Enclosure {
        let mut p = prec;
        loop {
            let d = self.den.enclosure(p);
            if let Some(q) = self.num.enclosure(p).div(&d, prec) {
                return q;
            }
            p *= 2;
        }
    }

    /// The exact value when β is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        let b = self.base().as_rational()?;
        Some(self.num.poly().eval_rational(b) / self.den.poly().eval_rational(b))
    }

    /// Value-level equality, decided exactly.
    pub fn value_eq(&self, other: &BetaRational) -> Result<bool> {
        let lhs = self.num.mul(&other.den)?;
        let rhs = other.num.mul(&self.den)?;
        lhs.sub(&rhs)?.is_value_zero()
    }

    /// Exact comparison of values.
    pub fn cmp_value(&self, other: &BetaRational) -> Result<Ordering> {
        let lhs = self.num.mul(&other.den)?;
        let rhs = other.num.mul(&self.den)?;
        let s = lhs.sub(&rhs)?.sign()?;
        let dens = self.den.mul(&other.den)?.sign()?;
        Ok(if dens == Ordering::Less { s.reverse() } else { s })
    }
}

/// Multiplies rational key vectors by the least common denominator so they become integers.
pub(crate) fn integer_keys(keys: &[QPoly], width: usize) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut lcm = BigInt::one();
    for k in keys {
        for c in k {
            lcm = lcm.lcm(c.denom());
        }
    }
    let out = keys
        .iter()
        .map(|k| {
            let mut v: Vec<BigInt> = k.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
            v.resize(width, BigInt::zero());
            v
        })
        .collect();
    (out, lcm)
}
