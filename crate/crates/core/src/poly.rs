//! Integer polynomials in one indeterminate, stored sparsely.
//!
//! Continued-fraction convergents over beta-powers have a handful of terms
//! but astronomically large degrees, so terms are kept as sorted
//! `(exponent, coefficient)` pairs.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::num::{Dyadic, Enclosure};

/// An integer polynomial; terms sorted by ascending exponent, no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPolynomial {
    terms: Vec<(u128, BigInt)>,
}

/// The class 𝒫(n, H): degree at most `n`, coefficients bounded by `H` in absolute value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyClass {
    pub n: u128,
    pub h: BigUint,
}

impl PolyClass {
    pub fn new(n: u128, h: impl Into<BigUint>) -> Self {
        PolyClass { n, h: h.into() }
    }

    /// 𝒫(n, n).
    pub fn square(n: u128) -> Self {
        PolyClass { n, h: BigUint::from(n) }
    }

    pub fn contains(&self, f: &IntPolynomial) -> bool {
        match f.degree() {
            None => true,
            Some(d) => d <= self.n && f.height() <= self.h,
        }
    }

    /// Class of a product, using `height(fg) <= (min(deg f, deg g) + 1) * height(f) * height(g)`.
    pub fn product(&self, other: &PolyClass) -> Result<PolyClass> {
        let n = self.n.checked_add(other.n).ok_or_else(|| Error::resource("degree bound overflow"))?;
        let terms = BigUint::from(self.n.min(other.n)) + 1u32;
        Ok(PolyClass { n, h: terms * &self.h * &other.h })
    }

    /// Class of a sum or difference.
    pub fn sum(&self, other: &PolyClass) -> PolyClass {
        PolyClass { n: self.n.max(other.n), h: &self.h + &other.h }
    }

    /// Smallest `L` with this class inside 𝒫(L, L).
    pub fn square_hull(&self) -> Result<u128> {
        let h = self.h.to_u128().ok_or_else(|| Error::resource("height bound exceeds u128"))?;
        Ok(self.n.max(h))
    }

    pub fn of(f: &IntPolynomial) -> PolyClass {
        PolyClass { n: f.degree().unwrap_or(0), h: f.height() }
    }
}

impl IntPolynomial {
    pub fn zero() -> Self {
        IntPolynomial { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(0, c)
    }

    /// `c * x^e`.
    pub fn monomial(e: u128, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        if c.is_zero() {
            Self::zero()
        } else {
            IntPolynomial { terms: alloc::vec![(e, c)] }
        }
    }

    /// From coefficients, constant term first.
    pub fn from_coeffs<I, T>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let terms = coeffs
            .into_iter()
            .enumerate()
            .map(|(i, c)| (i as u128, c.into()))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        IntPolynomial { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u128, BigInt)>) -> Self {
        let mut acc: BTreeMap<u128, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            *acc.entry(e).or_insert_with(BigInt::zero) += c;
        }
        IntPolynomial { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn terms(&self) -> &[(u128, BigInt)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `None` for the zero polynomial (degree −1 by convention).
    pub fn degree(&self) -> Option<u128> {
        self.terms.last().map(|t| t.0)
    }

    /// Degree with the −1 convention for zero.
    pub fn signed_degree(&self) -> i128 {
        self.degree().map_or(-1, |d| d as i128)
    }

    pub fn height(&self) -> BigUint {
        self.terms.iter().map(|(_, c)| c.magnitude().clone()).max().unwrap_or_default()
    }

    pub fn leading_coefficient(&self) -> Option<&BigInt> {
        self.terms.last().map(|t| &t.1)
    }

    pub fn coefficient(&self, e: u128) -> BigInt {
        match self.terms.binary_search_by_key(&e, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    /// Dense coefficient vector (constant first); only sensible for small degrees.
    pub fn dense(&self) -> Result<Vec<BigInt>> {
        let deg = match self.degree() {
            None => return Ok(Vec::new()),
            Some(d) => d,
        };
        if deg > 1 << 20 {
            return Err(Error::resource(format!("degree {deg} too large for a dense coefficient vector")));
        }
        let mut out = alloc::vec![BigInt::zero(); deg as usize + 1];
        for (e, c) in &self.terms {
            out[*e as usize] = c.clone();
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        IntPolynomial { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let take_left = j >= other.terms.len()
                || (i < self.terms.len() && self.terms[i].0 < other.terms[j].0);
            let take_right = i >= self.terms.len()
                || (j < other.terms.len() && other.terms[j].0 < self.terms[i].0);
            if take_left {
                out.push(self.terms[i].clone());
                i += 1;
            } else if take_right {
                out.push(other.terms[j].clone());
                j += 1;
            } else {
                let c = &self.terms[i].1 + &other.terms[j].1;
                if !c.is_zero() {
                    out.push((self.terms[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        IntPolynomial { terms: out }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut acc: BTreeMap<u128, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.checked_add(*eb).ok_or_else(|| Error::resource("exponent overflow"))?;
                *acc.entry(e).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        Ok(IntPolynomial { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() })
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        IntPolynomial { terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect() }
    }

    /// Multiplication by `x^e`.
    pub fn shift(&self, e: u128) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| k.checked_add(e).map(|k| (k, c.clone())))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::resource("exponent overflow in shift"))?;
        Ok(IntPolynomial { terms })
    }

    /// True when every coefficient is 0 or 1 and the degree is at most `n - 1`.
    pub fn is_binary_below(&self, n: u128) -> bool {
        self.terms.iter().all(|(e, c)| *e < n && c.is_one())
    }

    /// Exact value at a rational point (Horner over the sparse terms).
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        let mut prev: Option<u128> = None;
        for (e, c) in self.terms.iter().rev() {
            if let Some(p) = prev {
                acc *= pow_rational(x, p - e);
            }
            acc += BigRational::from_integer(c.clone());
            prev = Some(*e);
        }
        if let Some(p) = prev {
            acc *= pow_rational(x, p);
        }
        acc
    }

    /// Certified enclosure of the value at any point of `x`.
    pub fn eval_enclosure(&self, x: &Enclosure, prec: u64) -> Enclosure {
        let mut acc = Enclosure::zero();
        let mut prev: Option<u128> = None;
        for (e, c) in self.terms.iter().rev() {
            if let Some(p) = prev {
                acc = acc.mul(&x.pow(p - e, prec), prec);
            }
            acc = acc.add(&Enclosure::point(Dyadic::from_int(c.clone())), prec);
            prev = Some(*e);
        }
        if let Some(p) = prev {
            acc = acc.mul(&x.pow(p, prec), prec);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        IntPolynomial {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| *e > 0)
                .map(|(e, c)| (e - 1, c * BigInt::from(*e)))
                .collect(),
        }
    }

    pub fn content(&self) -> BigInt {
        use num_integer::Integer;
        self.terms.iter().fold(BigInt::zero(), |g, (_, c)| g.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive(&self) -> Self {
        let mut g = self.content();
        if g.is_zero() {
            return Self::zero();
        }
        if self.leading_coefficient().is_some_and(|c| c.is_negative()) {
            g = -g;
        }
        IntPolynomial { terms: self.terms.iter().map(|(e, c)| (*e, c / &g)).collect() }
    }

    pub fn to_rational_dense(&self) -> Result<Vec<BigRational>> {
        Ok(self.dense()?.into_iter().map(BigRational::from_integer).collect())
    }
}

pub(crate) fn pow_rational(x: &BigRational, e: u128) -> BigRational {
    let mut base = x.clone();
    let mut acc = BigRational::one();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

impl fmt::Display for IntPolynomial {
    /// Descending terms, e.g. `x^2-2x-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            match *e {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}")?;
                    }
                    if *e == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl FromStr for IntPolynomial {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse_polynomial(text)
    }
}

/// Parses an integer polynomial in `x`, e.g. `x^2-2x-1`, `3`, `-x^3 + 2*x`.
pub fn parse_polynomial(text: &str) -> Result<IntPolynomial> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::input("empty polynomial"));
    }
    let bytes = s.as_bytes();
    let mut terms = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = BigInt::one();
        if bytes[i] == b'+' || bytes[i] == b'-' {
            if bytes[i] == b'-' {
                sign = -sign;
            }
            i += 1;
        } else if i > 0 {
            return Err(Error::input(format!("unexpected character at {i} in {text:?}")));
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let coeff = if i > start { Some(s[start..i].parse::<BigInt>().unwrap()) } else { None };
        if i < bytes.len() && (bytes[i] == b'.' || bytes[i] == b'/') {
            return Err(Error::input(format!("non-integer coefficient in {text:?}")));
        }
        if i < bytes.len() && bytes[i] == b'*' {
            if coeff.is_none() {
                return Err(Error::input(format!("dangling '*' in {text:?}")));
            }
            i += 1;
            if i >= bytes.len() || bytes[i] != b'x' {
                return Err(Error::input(format!("expected 'x' after '*' in {text:?}")));
            }
        }
        let exp = if i < bytes.len() && bytes[i] == b'x' {
            i += 1;
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                let es = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if es == i {
                    return Err(Error::input(format!("missing exponent in {text:?}")));
                }
                s[es..i].parse::<u128>().map_err(|_| Error::input(format!("bad exponent in {text:?}")))?
            } else {
                1
            }
        } else {
            if coeff.is_none() {
                return Err(Error::input(format!("syntax error in polynomial {text:?}")));
            }
            0
        };
        terms.push((exp, sign * coeff.unwrap_or_else(BigInt::one)));
    }
    Ok(IntPolynomial::from_terms(terms))
}

/// Dense polynomials with rational coefficients (constant first), used for
/// reductions modulo a minimal polynomial and root isolation.
pub(crate) mod qpoly {
    use super::*;

    pub type QPoly = Vec<BigRational>;

    pub fn trim(p: &mut QPoly) {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
    }

    pub fn degree(p: &QPoly) -> Option<usize> {
        p.iter().rposition(|c| !c.is_zero())
    }

    /// Remainder of `a` by `b` (`b` nonzero).
    pub fn rem(a: &QPoly, b: &QPoly) -> QPoly {
        let db = degree(b).expect("division by zero polynomial");
        let lb = &b[db];
        let mut r = a.clone();
        trim(&mut r);
        while let Some(dr) = degree(&r) {
            if dr < db {
                break;
            }
            let q = &r[dr] / lb;
            let shift = dr - db;
            for (i, c) in b.iter().enumerate().take(db + 1) {
                let t = &q * c;
                r[i + shift] -= t;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul(a: &QPoly, b: &QPoly) -> QPoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = alloc::vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(&mut out);
        out
    }

    pub fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
        let (mut x, mut y) = (a.clone(), b.clone());
        trim(&mut x);
        trim(&mut y);
        while degree(&y).is_some() {
            let r = rem(&x, &y);
            x = y;
            y = r;
        }
        x
    }

    pub fn eval(p: &QPoly, x: &BigRational) -> BigRational {
        p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn neg(p: &QPoly) -> QPoly {
        p.iter().map(|c| -c).collect()
    }
}
