//! Text forms of bases, parameters, ε sequences and caps accepted on the command line.

use std::path::Path;
use std::sync::Arc;

use betaifs_core::algebraic::{AlgebraicReal, BetaPolynomial, BetaRational};
use betaifs_core::cfrac::CFExponents;
use betaifs_core::epsilon::{parse_epsilon_table, EpsilonSequence};
use betaifs_core::ifs::{Limits, ParamValue};
use betaifs_core::num::{parse_rational, RationalInterval};
use betaifs_core::poly::parse_polynomial;
use betaifs_core::{Error, Result};
use num_rational::BigRational;

/// Environment variable overriding the word-length cap for 4^n enumerations.
pub const ENUM_CAP_VAR: &str = "OVERLAP_ENUM_CAP";

/// `lo,hi`.
pub fn parse_interval(text: &str) -> Result<RationalInterval> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| Error::input(format!("interval {text:?} must be written lo,hi")))?;
    RationalInterval::new(parse_rational(lo)?, parse_rational(hi)?)
}

/// The base from its defining polynomial; a linear polynomial needs no interval.
pub fn parse_base(minpoly: &str, interval: Option<&str>) -> Result<Arc<AlgebraicReal>> {
    let poly = parse_polynomial(minpoly)?;
    let iv = match interval {
        Some(text) => parse_interval(text)?,
        None if poly.degree() == Some(1) => {
            let (b, a) = (poly.coefficient(0), poly.coefficient(1));
            RationalInterval::point(BigRational::new(-b, a))
        }
        None => return Err(Error::input("--interval is required for a nonlinear minimal polynomial")),
    };
    Ok(Arc::new(AlgebraicReal::new(poly, iv)?))
}

/// `p/q`, `poly:NUM/DEN` (polynomials in x = β) or `cf:e1,e2,…`.
pub fn parse_param(base: &Arc<AlgebraicReal>, text: &str) -> Result<ParamValue> {
    let text = text.trim();
    if let Some(list) = text.strip_prefix("cf:") {
        let exps = list
            .split(',')
            .map(|e| e.trim().parse::<u128>().map_err(|_| Error::input(format!("bad exponent {e:?} in {text:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if exps.is_empty() {
            return Err(Error::input("cf: needs at least one exponent"));
        }
        return Ok(ParamValue::Enclosed(CFExponents::new(base.clone(), exps)));
    }
    if let Some(frac) = text.strip_prefix("poly:") {
        let (num, den) = frac.split_once('/').unwrap_or((frac, "1"));
        let num = BetaPolynomial::new(base.clone(), parse_polynomial(num)?);
        let den = BetaPolynomial::new(base.clone(), parse_polynomial(den)?);
        return Ok(ParamValue::Exact(BetaRational::new(num, den)?));
    }
    Ok(ParamValue::Exact(BetaRational::from_rational(base.clone(), &parse_rational(text)?)))
}

/// `geom:r`, `superexp:r`, `factorial`, `table:a,b,…` or `file:PATH`.
pub fn parse_epsilon(text: &str) -> Result<EpsilonSequence> {
    match text.strip_prefix("file:") {
        Some(path) => {
            let body = std::fs::read_to_string(Path::new(path))
                .map_err(|e| Error::input(format!("cannot read epsilon file {path}: {e}")))?;
            parse_epsilon_table(&body)
        }
        None => text.parse(),
    }
}

/// Default caps, with the enumeration cap taken from the environment when set.
pub fn limits_from_env() -> Result<Limits> {
    let mut limits = Limits::default();
    if let Ok(v) = std::env::var(ENUM_CAP_VAR) {
        let cap: u32 = v
            .trim()
            .parse()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| Error::input(format!("{ENUM_CAP_VAR} must be a positive integer, got {v:?}")))?;
        limits.enumeration = cap;
    }
    Ok(limits)
}
