//! Rules out a putative overlap relation `s = (f/g) t + h/g` against a certificate.

use alloc::format;

use super::{int, SynthesisCertificate};
use crate::algebraic::BetaPolynomial;
use crate::error::{Error, Result};
use crate::num::{Dyadic, Enclosure, Round};
use crate::poly::{IntPolynomial, PolyClass};

const MAX_PREC: u64 = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The relation contradicts the recorded separation constant.
    Contradiction,
    /// No recorded level is deep enough; the certificate must be extended.
    Undecided,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Contradiction => "contradiction",
            Verdict::Undecided => "undecided",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RefutationReport {
    pub f: IntPolynomial,
    pub g: IntPolynomial,
    pub h: IntPolynomial,
    pub k_used: Option<usize>,
    /// Upper bound on `c_k |f(β)| / (k |g(β)|)`.
    pub lhs_bound: Option<Dyadic>,
    /// The recorded `c_k`.
    pub rhs_bound: Option<Dyadic>,
    /// Upper bound on `|f(β)/g(β)|`.
    pub ratio_bound: Dyadic,
    pub verdict: Verdict,
}

/// Enclosure of `|f(β)| / |g(β)|`, refined until `g` is bounded away from zero.
fn ratio(f: &BetaPolynomial, g: &BetaPolynomial) -> Result<Enclosure> {
    let mut prec = 128;
    loop {
        let ge = g.enclosure(prec);
        if ge.excludes_zero() {
            return Ok(f.enclosure(prec).abs().div(&ge.abs(), prec).expect("nonzero"));
        }
        if prec >= MAX_PREC {
            return Err(Error::resource("could not bound g(β) away from zero"));
        }
        prec *= 2;
    }
}

pub fn refute_relation(
    cert: &SynthesisCertificate,
    f: &IntPolynomial,
    g: &IntPolynomial,
    h: &IntPolynomial,
) -> Result<RefutationReport> {
    let base = cert.base.clone();
    let (fb, gb) = (BetaPolynomial::new(base.clone(), f.clone()), BetaPolynomial::new(base, g.clone()));
    if gb.is_value_zero()? {
        return Err(Error::input("g(β) must be nonzero"));
    }
    let prec = cert.precision;
    let q = ratio(&fb, &gb)?;
    let mut report = RefutationReport {
        f: f.clone(),
        g: g.clone(),
        h: h.clone(),
        k_used: None,
        lhs_bound: None,
        rhs_bound: None,
        ratio_bound: q.hi().clone(),
        verdict: Verdict::Undecided,
    };
    let found = cert.separations.iter().find(|sep| {
        let cls = PolyClass::square(sep.k as u128);
        cls.contains(f) && cls.contains(g) && cls.contains(h) && int(sep.k as u64) > *q.hi()
    });
    let Some(sep) = found else {
        return Ok(report);
    };
    if !sep.c.is_positive() {
        return Err(Error::input(format!("recorded c_{} is not positive", sep.k)));
    }
    let lhs = Enclosure::point(sep.c.clone())
        .mul(&q, prec)
        .hi()
        .div(&int(sep.k as u64), prec, Round::Up);
    report.verdict = if lhs < sep.c { Verdict::Contradiction } else { Verdict::Undecided };
    report.k_used = Some(sep.k);
    report.lhs_bound = Some(lhs);
    report.rhs_bound = Some(sep.c.clone());
    Ok(report)
}
