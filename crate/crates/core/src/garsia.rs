//! Explicit lower bounds for nonzero values f(β) of integer polynomials.
//!
//! For f ∈ 𝒫(n, H) with f(β) ≠ 0 the resultant of the minimal polynomial
//! and f is a nonzero integer, which yields
//! `|f(β)| ≥ 1 / (((n+1)H)^(d-1) (landau/β)^n) ≥ M^-n H^-M`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::algebraic::{bits_u128, AlgebraicReal};
use crate::error::{Error, Result};
use crate::num::{Dyadic, Enclosure, Round};
use crate::poly::{pow_rational, IntPolynomial, PolyClass};

/// The constant M of the bound, with the data it was derived from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GarsiaConstant {
    pub m: u64,
    pub d: u128,
    pub landau: BigRational,
    pub beta_low: BigRational,
}

/// Rational upper bound on the coefficient 2-norm, rounded up to a multiple of 1/1000.
pub fn landau_mahler_bound(m: &IntPolynomial) -> Result<BigRational> {
    if m.is_zero() {
        return Err(Error::input("Landau bound of the zero polynomial"));
    }
    let sum_sq: BigInt = m.terms().iter().map(|(_, c)| c * c).sum();
    let scaled = sum_sq * BigInt::from(1_000_000);
    let mut r = scaled.sqrt();
    if &r * &r < scaled {
        r += 1;
    }
    Ok(BigRational::new(r, BigInt::from(1000)))
}

/// Lower endpoint of the isolating interval after refinement to width 1/4,
/// refined further while that endpoint is still below 2.
fn beta_lower(beta: &AlgebraicReal) -> Result<BigRational> {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut width = BigRational::new(BigInt::one(), BigInt::from(4));
    for _ in 0..256 {
        let iv = beta.refine(&width);
        if iv.lo() >= &two {
            return Ok(iv.lo().clone());
        }
        if iv.hi() < &two {
            break;
        }
        width /= BigRational::from_integer(BigInt::from(2));
    }
    Err(Error::input("base must be ≥ 2"))
}

pub fn garsia_constant(beta: &AlgebraicReal) -> Result<GarsiaConstant> {
    let d = beta.degree();
    let landau = landau_mahler_bound(beta.minpoly())?;
    let beta_low = beta_lower(beta)?;
    let ratio = &landau / &beta_low * BigRational::from_integer(BigInt::one() << (d - 1) as usize);
    let ceil = ratio.ceil().to_integer().to_u64().ok_or_else(|| Error::resource("Garsia constant overflow"))?;
    let m = ceil.max(1).max(d.saturating_sub(1) as u64);
    Ok(GarsiaConstant { m, d, landau, beta_low })
}

fn pow_big(base: &BigUint, e: u128) -> Result<BigUint> {
    let e = u32::try_from(e).map_err(|_| Error::resource("exponent too large for an exact bound"))?;
    Ok(num_traits::pow(base.clone(), e as usize))
}

fn check_height(cls: &PolyClass) -> Result<()> {
    if cls.h.is_zero() {
        Err(Error::input("class height bound must be positive"))
    } else {
        Ok(())
    }
}

/// `M^-n H^-M` as an exact rational.
pub fn lower_bound(gc: &GarsiaConstant, cls: &PolyClass) -> Result<BigRational> {
    check_height(cls)?;
    if cls.n > 1 << 16 {
        return Err(Error::resource("class too large for an exact bound; use lower_bound_enclosure"));
    }
    let den = pow_big(&BigUint::from(gc.m), cls.n)? * pow_big(&cls.h, gc.m as u128)?;
    Ok(BigRational::new(BigInt::one(), BigInt::from(den)))
}

/// Enclosure of `M^-n H^-M` for classes of any size.
pub fn lower_bound_enclosure(gc: &GarsiaConstant, cls: &PolyClass, prec: u64) -> Result<Enclosure> {
    check_height(cls)?;
    let m = Enclosure::from_int(gc.m);
    let h = Enclosure::point(Dyadic::from_int(BigInt::from(cls.h.clone())));
    let den = m.pow(cls.n, prec).mul(&h.pow(gc.m as u128, prec), prec);
    Ok(den.recip(prec).expect("positive"))
}

/// `1 / (((n+1)H)^(d-1) (landau/beta_low)^n)` as an exact rational.
pub fn sharp_lower_bound_with(gc: &GarsiaConstant, cls: &PolyClass) -> Result<BigRational> {
    check_height(cls)?;
    if cls.n > 1 << 16 {
        return Err(Error::resource("class too large for an exact bound"));
    }
    let nh = BigRational::from_integer(BigInt::from((BigUint::from(cls.n) + 1u32) * &cls.h));
    let a = pow_rational(&nh, gc.d - 1);
    let b = pow_rational(&(&gc.landau / &gc.beta_low), cls.n);
    Ok((a * b).recip())
}

pub fn sharp_lower_bound(beta: &AlgebraicReal, cls: &PolyClass) -> Result<BigRational> {
    sharp_lower_bound_with(&garsia_constant(beta)?, cls)
}

/// Rough number of bits `b` with the sharp bound above `2^-b` (saturating).
pub(crate) fn sharp_lower_bound_bits(beta: &AlgebraicReal, cls: &PolyClass) -> u64 {
    let landau = landau_mahler_bound(beta.minpoly()).unwrap_or_else(|_| BigRational::one());
    let lb = Dyadic::from_rational(&landau, 64, Round::Up);
    let per_n = lb.magnitude().map_or(1, |m| m.to_u64().unwrap_or(u64::MAX)).max(1);
    let nh_bits = bits_u128(cls.n.saturating_add(1)).saturating_add(cls.h.bits());
    let d = u64::try_from(beta.degree()).unwrap_or(u64::MAX);
    let n = u64::try_from(cls.n).unwrap_or(u64::MAX);
    nh_bits.saturating_mul(d.saturating_sub(1)).saturating_add(per_n.saturating_mul(n))
}
