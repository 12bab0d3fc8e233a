#![allow(dead_code)]

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use betaifs_core::algebraic::{AlgebraicReal, BetaPolynomial};
use betaifs_core::num::RationalInterval;
use betaifs_core::poly::{parse_polynomial, IntPolynomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn base(minpoly: &str, lo: i64, hi: i64) -> Arc<AlgebraicReal> {
    let iv = RationalInterval::new(rat(lo, 1), rat(hi, 1)).unwrap();
    Arc::new(AlgebraicReal::new(parse_polynomial(minpoly).unwrap(), iv).unwrap())
}

pub fn two() -> Arc<AlgebraicReal> {
    base("x-2", 1, 3)
}

pub fn five_halves() -> Arc<AlgebraicReal> {
    base("2x-5", 2, 3)
}

pub fn silver() -> Arc<AlgebraicReal> {
    base("x^2-2x-1", 2, 3)
}

pub fn bp(b: &Arc<AlgebraicReal>, coeffs: &[i64]) -> BetaPolynomial {
    BetaPolynomial::new(b.clone(), IntPolynomial::from_coeffs(coeffs.iter().copied()))
}

/// Exact arithmetic in ℚ(√2): `a + b√2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSqrt2 {
    pub a: BigRational,
    pub b: BigRational,
}

impl QSqrt2 {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QSqrt2 { a, b }
    }

    pub fn from_rational(a: BigRational) -> Self {
        QSqrt2 { a, b: BigRational::zero() }
    }

    pub fn silver() -> Self {
        QSqrt2::new(BigRational::one(), BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Sign of a + b√2 from the signs of a, b and the comparison a² vs 2b².
    pub fn signum(&self) -> i32 {
        let sa = sgn(&self.a);
        let sb = sgn(&self.b);
        if sa >= 0 && sb >= 0 {
            return if self.is_zero() { 0 } else { 1 };
        }
        if sa <= 0 && sb <= 0 {
            return -1;
        }
        let a2 = &self.a * &self.a;
        let b2 = &self.b * &self.b * rat(2, 1);
        if a2 > b2 {
            sa
        } else {
            sb
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        let n = &self.a * &self.a - &self.b * &self.b * rat(2, 1);
        QSqrt2::new(&self.a / &n, -&self.b / &n)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = QSqrt2::from_rational(BigRational::one());
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }

    /// Lower and upper rational bounds from a rational bracket of √2.
    pub fn bounds(&self) -> (BigRational, BigRational) {
        let lo = BigRational::new(BigInt::from(14142135623730950488u128), BigInt::from(10u128.pow(19)));
        let hi = lo.clone() + BigRational::new(BigInt::one(), BigInt::from(10u128.pow(19)));
        let (x, y) = (&self.a + &self.b * &lo, &self.a + &self.b * &hi);
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    }

    pub fn eval(poly: &IntPolynomial) -> Self {
        let beta = QSqrt2::silver();
        let mut acc = QSqrt2::from_rational(BigRational::zero());
        for (e, c) in poly.terms() {
            acc = acc + beta.pow(*e as u32) * QSqrt2::from_rational(BigRational::from_integer(c.clone()));
        }
        acc
    }
}

fn sgn(x: &BigRational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl Add for QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: QSqrt2) -> QSqrt2 {
        QSqrt2::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: QSqrt2) -> QSqrt2 {
        QSqrt2::new(self.a - o.a, self.b - o.b)
    }
}

impl Mul for QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.a * &o.a + &self.b * &o.b * rat(2, 1), &self.a * &o.b + &self.b * &o.a)
    }
}

impl Div for QSqrt2 {
    type Output = QSqrt2;
    fn div(self, o: QSqrt2) -> QSqrt2 {
        self * o.recip()
    }
}

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2::new(-self.a, -self.b)
    }
}

/// Exact value of a polynomial at one of the shipped bases, in ℚ(√2).
pub fn exact_at(b: &AlgebraicReal, poly: &IntPolynomial) -> QSqrt2 {
    match b.as_rational() {
        Some(r) => {
            let mut acc = BigRational::zero();
            for (e, c) in poly.terms() {
                acc += num_traits::pow(r.clone(), *e as usize) * BigRational::from_integer(c.clone());
            }
            QSqrt2::from_rational(acc)
        }
        None => QSqrt2::eval(poly),
    }
}

/// The base itself in ℚ(√2).
pub fn base_value(b: &AlgebraicReal) -> QSqrt2 {
    match b.as_rational() {
        Some(r) => QSqrt2::from_rational(r.clone()),
        None => QSqrt2::silver(),
    }
}

/// `[β^e1, β^e2, …]` evaluated backwards with exact field arithmetic.
pub fn cf_value(b: &AlgebraicReal, exps: &[u32]) -> QSqrt2 {
    let beta = base_value(b);
    let mut acc = QSqrt2::from_rational(BigRational::zero());
    for &e in exps.iter().rev() {
        acc = (beta.pow(e) + acc).recip();
    }
    acc
}
