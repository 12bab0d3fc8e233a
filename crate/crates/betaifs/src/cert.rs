//! JSON form of synthesis certificates.
//!
//! Every number is a string: `p/q` (or `p`) for ordinary rationals and
//! `m*2^E` for dyadics with a huge binary exponent.

use std::path::Path;
use std::sync::Arc;

use betaifs_core::algebraic::AlgebraicReal;
use betaifs_core::garsia::GarsiaConstant;
use betaifs_core::num::{format_rational, parse_rational, Dyadic, RationalInterval};
use betaifs_core::poly::parse_polynomial;
use betaifs_core::synthesis::{
    CheckKind, CheckRecord, LevelRecord, SeparationRecord, SynthesisCertificate, SCHEMA_VERSION,
};
use betaifs_core::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertFile {
    schema_version: u32,
    base: BaseJson,
    epsilon: String,
    precision: u64,
    garsia: GarsiaJson,
    s_exponents: Vec<String>,
    t_exponents: Vec<String>,
    levels: Vec<LevelJson>,
    separations: Vec<SeparationJson>,
    checks: Vec<CheckJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BaseJson {
    minpoly: String,
    interval: [String; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GarsiaJson {
    #[serde(rename = "M")]
    m: String,
    d: String,
    landau: String,
    beta_low: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelJson {
    k: usize,
    #[serde(rename = "N")]
    n: String,
    #[serde(rename = "M")]
    m: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeparationJson {
    k: usize,
    c: String,
    #[serde(rename = "L")]
    l: String,
    #[serde(rename = "M1")]
    m1: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckJson {
    kind: String,
    k: usize,
    n: Option<String>,
    lhs: String,
    rhs: String,
}

fn int<T: std::str::FromStr>(field: &str, text: &str) -> Result<T> {
    text.trim().parse().map_err(|_| Error::input(format!("{field}: {text:?} is not a nonnegative integer")))
}

fn dyadic(field: &str, text: &str) -> Result<Dyadic> {
    text.parse().map_err(|e: Error| Error::input(format!("{field}: {}", e.message())))
}

pub fn to_json(cert: &SynthesisCertificate) -> String {
    let iv = cert.base.isolating();
    let file = CertFile {
        schema_version: SCHEMA_VERSION,
        base: BaseJson {
            minpoly: cert.base.minpoly().to_string(),
            interval: [format_rational(iv.lo()), format_rational(iv.hi())],
        },
        epsilon: cert.epsilon.to_string(),
        precision: cert.precision,
        garsia: GarsiaJson {
            m: cert.garsia.m.to_string(),
            d: cert.garsia.d.to_string(),
            landau: format_rational(&cert.garsia.landau),
            beta_low: format_rational(&cert.garsia.beta_low),
        },
        s_exponents: cert.s_exponents.iter().map(u128::to_string).collect(),
        t_exponents: cert.t_exponents.iter().map(u128::to_string).collect(),
        levels: cert.levels.iter().map(|l| LevelJson { k: l.k, n: l.n.to_string(), m: l.m.to_string() }).collect(),
        separations: cert
            .separations
            .iter()
            .map(|s| SeparationJson { k: s.k, c: s.c.to_string(), l: s.l.to_string(), m1: s.m1.to_string() })
            .collect(),
        checks: cert
            .checks
            .iter()
            .map(|c| CheckJson {
                kind: c.kind.as_str().to_string(),
                k: c.k,
                n: c.n.map(|n| n.to_string()),
                lhs: c.lhs.to_string(),
                rhs: c.rhs.to_string(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("certificate serializes");
    out.push('\n');
    out
}

pub fn from_json(text: &str) -> Result<SynthesisCertificate> {
    let file: CertFile =
        serde_json::from_str(text).map_err(|e| Error::input(format!("malformed certificate: {e}")))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::input(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            file.schema_version
        )));
    }
    let minpoly = parse_polynomial(&file.base.minpoly)?;
    let interval = RationalInterval::new(parse_rational(&file.base.interval[0])?, parse_rational(&file.base.interval[1])?)?;
    let base = Arc::new(AlgebraicReal::new(minpoly, interval)?);
    let exps = |field: &str, v: &[String]| v.iter().map(|e| int::<u128>(field, e)).collect::<Result<Vec<_>>>();
    Ok(SynthesisCertificate {
        base,
        epsilon: file.epsilon.parse()?,
        precision: file.precision,
        garsia: GarsiaConstant {
            m: int("garsia.M", &file.garsia.m)?,
            d: int("garsia.d", &file.garsia.d)?,
            landau: parse_rational(&file.garsia.landau)?,
            beta_low: parse_rational(&file.garsia.beta_low)?,
        },
        s_exponents: exps("s_exponents", &file.s_exponents)?,
        t_exponents: exps("t_exponents", &file.t_exponents)?,
        levels: file
            .levels
            .iter()
            .map(|l| Ok(LevelRecord { k: l.k, n: int("levels.N", &l.n)?, m: int("levels.M", &l.m)? }))
            .collect::<Result<_>>()?,
        separations: file
            .separations
            .iter()
            .map(|s| {
                Ok(SeparationRecord {
                    k: s.k,
                    c: dyadic("separations.c", &s.c)?,
                    l: int("separations.L", &s.l)?,
                    m1: dyadic("separations.M1", &s.m1)?,
                })
            })
            .collect::<Result<_>>()?,
        checks: file
            .checks
            .iter()
            .map(|c| {
                Ok(CheckRecord {
                    kind: CheckKind::parse(&c.kind)?,
                    k: c.k,
                    n: c.n.as_deref().map(|n| int("checks.n", n)).transpose()?,
                    lhs: dyadic("checks.lhs", &c.lhs)?,
                    rhs: dyadic("checks.rhs", &c.rhs)?,
                })
            })
            .collect::<Result<_>>()?,
    })
}

/// Reads a certificate; a missing or unreadable file is an input error.
pub fn read_certificate(path: &Path) -> Result<SynthesisCertificate> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    from_json(&text)
}

pub fn write_certificate(path: &Path, cert: &SynthesisCertificate) -> Result<()> {
    std::fs::write(path, to_json(cert)).map_err(|e| Error::resource(format!("cannot write {}: {e}", path.display())))
}
