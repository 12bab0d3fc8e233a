//! Target sequences ε_n for the cylinder distances.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::num::{format_rational, parse_rational, Dyadic, Enclosure, Round};
use crate::poly::pow_rational;

/// Largest n for which n! is evaluated exactly.
const FACTORIAL_EXACT_LIMIT: u128 = 2000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EpsilonSequence {
    /// ε_n = r^n.
    Geometric(BigRational),
    /// ε_n = r^(n²).
    SuperExponential(BigRational),
    /// ε_n = 1/n!.
    Factorial,
    /// ε_n read from the table; the last entry repeats.
    Table(Vec<BigRational>),
}

impl EpsilonSequence {
    fn check_positive(&self) -> Result<()> {
        let ok = match self {
            EpsilonSequence::Geometric(r) | EpsilonSequence::SuperExponential(r) => r.is_positive(),
            EpsilonSequence::Factorial => true,
            EpsilonSequence::Table(v) => !v.is_empty() && v.iter().all(|x| x.is_positive()),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::input("epsilon sequence entries must be positive"))
        }
    }

    /// Exact ε_n (n ≥ 1); fails for indices whose value is too large to write out.
    pub fn value(&self, n: u128) -> Result<BigRational> {
        if n == 0 {
            return Err(Error::input("epsilon index starts at 1"));
        }
        let too_big = || Error::resource(format!("epsilon_{n} too large to evaluate exactly"));
        match self {
            EpsilonSequence::Geometric(r) => {
                if n > 1 << 16 {
                    return Err(too_big());
                }
                Ok(pow_rational(r, n))
            }
            EpsilonSequence::SuperExponential(r) => {
                if n > 1 << 8 {
                    return Err(too_big());
                }
                Ok(pow_rational(r, n * n))
            }
            EpsilonSequence::Factorial => {
                if n > FACTORIAL_EXACT_LIMIT {
                    return Err(too_big());
                }
                let f: BigInt = (1..=n).map(BigInt::from).product();
                Ok(BigRational::new(BigInt::one(), f))
            }
            EpsilonSequence::Table(v) => Ok(v[core::cmp::min(n as usize, v.len()) - 1].clone()),
        }
    }

    /// Certified lower bound on ε_n for any n ≥ 1.
    pub fn lower(&self, n: u128, prec: u64) -> Result<Dyadic> {
        if n == 0 {
            return Err(Error::input("epsilon index starts at 1"));
        }
        let pow_lower = |r: &BigRational, e: u128| Enclosure::from_rational(r, prec).pow(e, prec).lo().clone();
        Ok(match self {
            EpsilonSequence::Geometric(r) => pow_lower(r, n),
            EpsilonSequence::SuperExponential(r) => {
                let e = n.checked_mul(n).ok_or_else(|| Error::resource("epsilon index overflow"))?;
                pow_lower(r, e)
            }
            EpsilonSequence::Factorial if n <= FACTORIAL_EXACT_LIMIT => {
                Dyadic::from_rational(&self.value(n)?, prec, Round::Down)
            }
            // n! ≤ n^n
            EpsilonSequence::Factorial => pow_lower(&BigRational::new(BigInt::one(), BigInt::from(n)), n),
            EpsilonSequence::Table(_) => Dyadic::from_rational(&self.value(n)?, prec, Round::Down),
        })
    }

    pub fn is_normalized(&self) -> bool {
        match self {
            EpsilonSequence::Geometric(r) | EpsilonSequence::SuperExponential(r) => r < &BigRational::one(),
            EpsilonSequence::Factorial => true,
            EpsilonSequence::Table(v) => v.windows(2).all(|w| w[1] <= w[0]),
        }
    }
}

/// Running-minimum view `ε'_n = min_{i ≤ n} ε_i`; idempotent.
pub fn normalize_epsilon(seq: &EpsilonSequence) -> Result<EpsilonSequence> {
    seq.check_positive()?;
    Ok(match seq {
        EpsilonSequence::Geometric(r) | EpsilonSequence::SuperExponential(r) if r >= &BigRational::one() => {
            EpsilonSequence::Table(alloc::vec![r.clone()])
        }
        EpsilonSequence::Table(v) => {
            let mut out: Vec<BigRational> = Vec::with_capacity(v.len());
            for x in v {
                let next = match out.last() {
                    Some(m) if m < x => m.clone(),
                    _ => x.clone(),
                };
                out.push(next);
            }
            EpsilonSequence::Table(out)
        }
        other => other.clone(),
    })
}

impl fmt::Display for EpsilonSequence {
    /// The text form accepted by `FromStr`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsilonSequence::Geometric(r) => write!(f, "geom:{}", format_rational(r)),
            EpsilonSequence::SuperExponential(r) => write!(f, "superexp:{}", format_rational(r)),
            EpsilonSequence::Factorial => write!(f, "factorial"),
            EpsilonSequence::Table(v) => {
                let parts: Vec<String> = v.iter().map(format_rational).collect();
                write!(f, "table:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for EpsilonSequence {
    type Err = Error;

    /// `geom:r`, `superexp:r`, `factorial` or `table:a,b,…`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::input(format!("malformed epsilon sequence {s:?}"));
        let seq = if s == "factorial" {
            EpsilonSequence::Factorial
        } else if let Some(r) = s.strip_prefix("geom:") {
            EpsilonSequence::Geometric(parse_rational(r).map_err(|_| bad())?)
        } else if let Some(r) = s.strip_prefix("superexp:") {
            EpsilonSequence::SuperExponential(parse_rational(r).map_err(|_| bad())?)
        } else if let Some(list) = s.strip_prefix("table:") {
            let v = list
                .split(',')
                .map(|x| parse_rational(x).map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            EpsilonSequence::Table(v)
        } else {
            return Err(bad());
        };
        seq.check_positive()?;
        Ok(seq)
    }
}

/// Parses a table file: one positive rational per line or comma separated; `#` starts a comment.
pub fn parse_epsilon_table(text: &str) -> Result<EpsilonSequence> {
    let mut v = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for item in line.split([',', ' ', '\t']).filter(|x| !x.is_empty()) {
            v.push(parse_rational(item)?);
        }
    }
    let seq = EpsilonSequence::Table(v);
    seq.check_positive()?;
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;
    use alloc::string::ToString;

    #[test]
    fn running_minimum() {
        let t = EpsilonSequence::Table(alloc::vec![rat(1, 2), rat(7, 10), rat(3, 10)]);
        let n = normalize_epsilon(&t).unwrap();
        assert_eq!(n, EpsilonSequence::Table(alloc::vec![rat(1, 2), rat(1, 2), rat(3, 10)]));
        assert_eq!(normalize_epsilon(&n).unwrap(), n);
        let g = EpsilonSequence::Geometric(rat(1, 2));
        assert_eq!(normalize_epsilon(&g).unwrap(), g);
        let one = EpsilonSequence::Table(alloc::vec![rat(1, 1)]);
        let n1 = normalize_epsilon(&one).unwrap();
        assert_eq!(n1.value(1).unwrap(), rat(1, 1));
        assert_eq!(n1.value(1000).unwrap(), rat(1, 1));
        assert!(normalize_epsilon(&EpsilonSequence::Table(alloc::vec![rat(1, 2), rat(0, 1)])).is_err());
        let grow = normalize_epsilon(&EpsilonSequence::Geometric(rat(3, 1))).unwrap();
        assert_eq!(grow.value(5).unwrap(), rat(3, 1));
    }

    #[test]
    fn values_and_lower_bounds() {
        let s = EpsilonSequence::SuperExponential(rat(1, 2));
        assert_eq!(s.value(3).unwrap(), rat(1, 512));
        assert_eq!(s.lower(3, 64).unwrap(), Dyadic::pow2(-9));
        let huge = s.lower(1u128 << 40, 64).unwrap();
        assert_eq!(huge, Dyadic::new(BigInt::one(), -(BigInt::one() << 80u32)));
        let f = EpsilonSequence::Factorial;
        assert_eq!(f.value(4).unwrap(), rat(1, 24));
        let lo = f.lower(4, 64).unwrap().to_rational().unwrap();
        assert!(lo <= rat(1, 24) && lo > rat(1, 25));
        assert!(f.lower(5000, 64).unwrap().is_positive());
    }

    #[test]
    fn spec_strings() {
        for text in ["geom:1/2", "superexp:1/2", "factorial", "table:1/2,1/3"] {
            let e: EpsilonSequence = text.parse().unwrap();
            assert_eq!(e.to_string(), text);
        }
        for bad in ["geom:", "geom:x", "superexp:-1", "table:", "cubic:2", "geom:0"] {
            assert!(bad.parse::<EpsilonSequence>().is_err(), "{bad}");
        }
        let t = parse_epsilon_table("# targets\n1/2, 1/4\n1/8\n").unwrap();
        assert_eq!(t.to_string(), "table:1/2,1/4,1/8");
    }
}
