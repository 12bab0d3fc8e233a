//! Stage-by-stage choice of continued-fraction exponents for s and t so that
//! Δ_n(β, s, t) ≤ ε_n up to the last level while s keeps a positive distance
//! from every ℚ_β-affine image of t in the recorded classes.

mod refute;
mod verify;

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use crate::algebraic::AlgebraicReal;
use crate::cfrac::{
    beta_power, convergents, growth_row, min_exponent, separation_admits, separation_constant, separation_data,
    CFExponents, ConvergentPair,
};
use crate::epsilon::{normalize_epsilon, EpsilonSequence};
use crate::error::{Error, Result};
use crate::garsia::{garsia_constant, GarsiaConstant};
use crate::ifs::{convergent_witness_bound, IFSParams, ParamValue};
use crate::num::{Dyadic, Round};
use crate::poly::PolyClass;

pub use refute::{refute_relation, RefutationReport, Verdict};
pub use verify::{verify_certificate, verify_certificate_with, CoverageRow, RowSource, VerifyOptions, VerifyReport};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_PRECISION: u64 = 128;
/// Level marker N_1.
pub const FIRST_LEVEL: u128 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CheckKind {
    SEps,
    SGrowth,
    SSeparation,
    SDisjoint,
    TEps,
    TSeparation,
    TGrowth,
    TDisjoint,
    LevelOrder,
    LevelRatio,
    Membership,
    Coverage,
}

impl CheckKind {
    pub const ALL: [CheckKind; 12] = [
        CheckKind::SEps,
        CheckKind::SGrowth,
        CheckKind::SSeparation,
        CheckKind::SDisjoint,
        CheckKind::TEps,
        CheckKind::TSeparation,
        CheckKind::TGrowth,
        CheckKind::TDisjoint,
        CheckKind::LevelOrder,
        CheckKind::LevelRatio,
        CheckKind::Membership,
        CheckKind::Coverage,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckKind::SEps => "s_eps",
            CheckKind::SGrowth => "s_growth",
            CheckKind::SSeparation => "s_separation",
            CheckKind::SDisjoint => "s_disjoint",
            CheckKind::TEps => "t_eps",
            CheckKind::TSeparation => "t_separation",
            CheckKind::TGrowth => "t_growth",
            CheckKind::TDisjoint => "t_disjoint",
            CheckKind::LevelOrder => "level_order",
            CheckKind::LevelRatio => "level_ratio",
            CheckKind::Membership => "membership",
            CheckKind::Coverage => "coverage",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == text)
            .ok_or_else(|| Error::input(format!("unknown check kind {text:?}")))
    }

    /// Checks that need `lhs < rhs` rather than `lhs ≤ rhs`.
    pub fn is_strict(self) -> bool {
        matches!(self, CheckKind::SSeparation | CheckKind::LevelOrder)
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One consumed inequality `lhs ≤ rhs` (or `<` for strict kinds).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckRecord {
    pub kind: CheckKind,
    pub k: usize,
    pub n: Option<u128>,
    pub lhs: Dyadic,
    pub rhs: Dyadic,
}

impl CheckRecord {
    pub fn holds(&self) -> bool {
        if self.kind.is_strict() {
            self.lhs < self.rhs
        } else {
            self.lhs <= self.rhs
        }
    }

    pub fn label(&self) -> String {
        match self.n {
            Some(n) => format!("{} k={} n={}", self.kind, self.k, n),
            None => format!("{} k={}", self.kind, self.k),
        }
    }
}

/// Level markers: `p_k, q_k ∈ ℬ_(N_k)` and `p_k′, q_k′ ∈ ℬ_(M_k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelRecord {
    pub k: usize,
    pub n: u128,
    pub m: u128,
}

/// Separation constant c_k with the class parameter L and the bound M1 behind it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationRecord {
    pub k: usize,
    pub c: Dyadic,
    pub l: u128,
    pub m1: Dyadic,
}

#[derive(Clone, Debug)]
pub struct SynthesisCertificate {
    pub base: Arc<AlgebraicReal>,
    pub epsilon: EpsilonSequence,
    pub precision: u64,
    pub garsia: GarsiaConstant,
    pub s_exponents: Vec<u128>,
    pub t_exponents: Vec<u128>,
    pub levels: Vec<LevelRecord>,
    pub separations: Vec<SeparationRecord>,
    pub checks: Vec<CheckRecord>,
}

impl SynthesisCertificate {
    pub fn depth(&self) -> usize {
        self.s_exponents.len()
    }

    pub fn s_cf(&self) -> CFExponents {
        CFExponents::new(self.base.clone(), self.s_exponents.clone())
    }

    pub fn t_cf(&self) -> CFExponents {
        CFExponents::new(self.base.clone(), self.t_exponents.clone())
    }
}

/// A failed synthesis together with the stages completed before the failure.
#[derive(Clone, Debug)]
pub struct SynthesisFailure {
    pub error: Error,
    pub partial: SynthesisCertificate,
}

impl From<SynthesisFailure> for Error {
    fn from(f: SynthesisFailure) -> Error {
        f.error
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisBudget {
    pub max_depth: usize,
    pub max_exponent: u128,
    pub precision: u64,
}

impl Default for SynthesisBudget {
    fn default() -> Self {
        SynthesisBudget { max_depth: 6, max_exponent: 1 << 120, precision: DEFAULT_PRECISION }
    }
}

pub(crate) fn max_degree(pair: &ConvergentPair) -> i128 {
    core::cmp::max(pair.p.poly().signed_degree(), pair.q.poly().signed_degree())
}

/// `min{n : p, q ∈ ℬ_n}` when both have {0,1} coefficients.
pub(crate) fn level_of(pair: &ConvergentPair) -> Result<u128> {
    let n = (max_degree(pair) + 1).max(1) as u128;
    if pair.p.is_in_beta_base(n) && pair.q.is_in_beta_base(n) {
        Ok(n)
    } else {
        Err(Error::input(format!("convergent {} has coefficients outside {{0,1}}", pair.k)))
    }
}

/// Certified upper bound on `β^-e`.
pub(crate) fn inverse_power_hi(base: &AlgebraicReal, e: u128, prec: u64) -> Dyadic {
    beta_power(base, e, prec).recip(prec).expect("positive").hi().clone()
}

pub(crate) fn int(x: impl Into<BigInt>) -> Dyadic {
    Dyadic::from_int(x)
}

fn as_exponent(x: i128) -> u128 {
    x.max(0) as u128
}

struct Builder {
    cert: SynthesisCertificate,
    eps: EpsilonSequence,
    budget: SynthesisBudget,
}

impl Builder {
    fn prec(&self) -> u64 {
        self.budget.precision
    }

    fn base(&self) -> &Arc<AlgebraicReal> {
        &self.cert.base
    }

    fn push(&mut self, kind: CheckKind, k: usize, n: Option<u128>, lhs: Dyadic, rhs: Dyadic) -> Result<()> {
        let rec = CheckRecord { kind, k, n, lhs, rhs };
        if !rec.holds() {
            return Err(Error::resource(format!("certified check {} failed at precision {}", rec.label(), self.prec())));
        }
        self.cert.checks.push(rec);
        Ok(())
    }

    fn choose(&self, floor: u128, pred: impl FnMut(u128) -> Result<bool>) -> Result<u128> {
        let e = min_exponent(floor, pred)?;
        if e > self.budget.max_exponent {
            return Err(Error::resource(format!("exponent {e} exceeds the budget {}", self.budget.max_exponent)));
        }
        Ok(e)
    }

    fn first_level(&mut self) -> Result<()> {
        self.cert.s_exponents.push(0);
        self.cert.t_exponents.push(0);
        self.cert.levels.push(LevelRecord { k: 1, n: FIRST_LEVEL, m: 2 * FIRST_LEVEL });
        self.membership(1)
    }

    fn membership(&mut self, k: usize) -> Result<()> {
        let s = convergents(&self.cert.s_cf())?;
        let t = convergents(&self.cert.t_cf())?;
        let lv = self.cert.levels[k - 1].clone();
        for (pair, level) in [(&s[k], lv.n), (&t[k], lv.m)] {
            let need = level_of(pair)?;
            self.push(CheckKind::Membership, k, Some(level), int(need), int(level))?;
        }
        Ok(())
    }

    /// Chooses `a_(k+1)` and records `c_k` and `N_(k+1)`.
    fn s_stage(&mut self, k: usize) -> Result<u128> {
        let prec = self.prec();
        let base = self.base().clone();
        let gc = self.cert.garsia.clone();
        let prefix = self.cert.s_cf();
        let conv = convergents(&prefix)?;
        let t_conv = convergents(&self.cert.t_cf())?;
        let lv = self.cert.levels[k - 1].clone();
        let eps_index = if k == 1 { lv.n } else { lv.m };
        let eps_lo = self.eps.lower(eps_index, prec)?;
        let multiplier = t_conv[k].as_beta_rational();
        let sep = separation_data(&prefix, &PolyClass::square(k as u128), Some(&multiplier), &gc, prec)?;
        let disjoint = as_exponent(max_degree(&conv[k - 1]) + 1);
        let order = as_exponent(lv.m as i128 - max_degree(&conv[k]));
        let e = self.choose(disjoint.max(order), |e| {
            Ok(inverse_power_hi(&base, e, prec) <= eps_lo
                && separation_admits(&base, &sep, e, prec)
                && growth_row(&base, &gc, &conv[k], e, prec)?.pass)
        })?;
        let c = separation_constant(&prefix, &sep, e, prec)?;
        let growth = growth_row(&base, &gc, &conv[k], e, prec)?;
        self.push(CheckKind::SEps, k, Some(eps_index), inverse_power_hi(&base, e, prec), eps_lo)?;
        self.push(CheckKind::SSeparation, k, None, sep.threshold.clone(), beta_power(&base, e, prec).lo().clone())?;
        self.push(CheckKind::SGrowth, k, None, growth.rhs, growth.lhs)?;
        self.push(CheckKind::SDisjoint, k, None, int(disjoint), int(e))?;
        self.cert.separations.push(SeparationRecord { k, c, l: sep.l, m1: sep.m1 });
        self.cert.s_exponents.push(e);
        let next = convergents(&self.cert.s_cf())?;
        let n_next = level_of(&next[k + 1])?;
        self.push(CheckKind::LevelOrder, k, Some(n_next), int(lv.m), int(n_next))?;
        Ok(n_next)
    }

    /// Chooses `a_(k+1)′` and records `M_(k+1)`.
    fn t_stage(&mut self, k: usize, n_next: u128) -> Result<()> {
        let prec = self.prec();
        let base = self.base().clone();
        let gc = self.cert.garsia.clone();
        let conv = convergents(&self.cert.t_cf())?;
        let eps_lo = self.eps.lower(n_next, prec)?;
        let c = self.cert.separations[k - 1].c.clone();
        let c_over_k = c.div(&int(k as u64), prec, Round::Down);
        let disjoint = as_exponent(max_degree(&conv[k - 1]) + 1);
        let ratio = as_exponent(2 * n_next as i128 - 1 - max_degree(&conv[k]));
        let e = self.choose(disjoint.max(ratio), |e| {
            let inv = inverse_power_hi(&base, e, prec);
            Ok(inv <= eps_lo && inv <= c_over_k && growth_row(&base, &gc, &conv[k], e, prec)?.pass)
        })?;
        let inv = inverse_power_hi(&base, e, prec);
        let growth = growth_row(&base, &gc, &conv[k], e, prec)?;
        self.push(CheckKind::TEps, k, Some(n_next), inv.clone(), eps_lo)?;
        self.push(CheckKind::TSeparation, k, None, inv, c_over_k)?;
        self.push(CheckKind::TGrowth, k, None, growth.rhs, growth.lhs)?;
        self.push(CheckKind::TDisjoint, k, None, int(disjoint), int(e))?;
        self.cert.t_exponents.push(e);
        let next = convergents(&self.cert.t_cf())?;
        let m_next = level_of(&next[k + 1])?;
        self.push(CheckKind::LevelRatio, k + 1, Some(m_next), int(2 * n_next), int(m_next))?;
        self.cert.levels.push(LevelRecord { k: k + 1, n: n_next, m: m_next });
        self.membership(k + 1)
    }

    /// Level coverage rows completed by stage k.
    fn coverage(&mut self, k: usize) -> Result<()> {
        let prec = self.prec();
        let (s, t) = (self.cert.s_cf(), self.cert.t_cf());
        let lv = self.cert.levels[k - 1].clone();
        let n_next = self.cert.levels[k].n;
        if k == 1 {
            let bound = convergent_witness_bound(&t, 1, 1)?;
            let eps = self.eps.lower(n_next, prec)?;
            return self.push(CheckKind::Coverage, 1, Some(1), bound, eps);
        }
        let bound = convergent_witness_bound(&s, k, lv.n)?;
        let eps = self.eps.lower(lv.m, prec)?;
        self.push(CheckKind::Coverage, k, Some(lv.n), bound, eps)?;
        let bound = convergent_witness_bound(&t, k, lv.m)?;
        let eps = self.eps.lower(n_next, prec)?;
        self.push(CheckKind::Coverage, k, Some(lv.m), bound, eps)
    }
}

/// [`synthesize_with`] under the default budget.
pub fn synthesize(
    beta: Arc<AlgebraicReal>,
    eps: &EpsilonSequence,
    depth: usize,
) -> core::result::Result<SynthesisCertificate, SynthesisFailure> {
    synthesize_with(beta, eps, depth, &SynthesisBudget::default())
}

/// Runs stages 1..depth-1, choosing every exponent as the smallest one
/// meeting all the stage's conditions. Deterministic.
pub fn synthesize_with(
    beta: Arc<AlgebraicReal>,
    eps: &EpsilonSequence,
    depth: usize,
    budget: &SynthesisBudget,
) -> core::result::Result<SynthesisCertificate, SynthesisFailure> {
    let garsia = GarsiaConstant { m: 0, d: 0, landau: Default::default(), beta_low: Default::default() };
    let empty = SynthesisCertificate {
        base: beta.clone(),
        epsilon: eps.clone(),
        precision: budget.precision,
        garsia,
        s_exponents: Vec::new(),
        t_exponents: Vec::new(),
        levels: Vec::new(),
        separations: Vec::new(),
        checks: Vec::new(),
    };
    let fail = |error: Error, partial: SynthesisCertificate| SynthesisFailure { error, partial };
    if depth < 2 {
        return Err(fail(Error::input("depth must be at least 2"), empty));
    }
    if depth > budget.max_depth {
        return Err(fail(Error::resource(format!("depth {depth} exceeds the budget {}", budget.max_depth)), empty));
    }
    let setup = beta.require_ifs_base().and_then(|_| Ok((normalize_epsilon(eps)?, garsia_constant(&beta)?)));
    let (normalized, garsia) = match setup {
        Ok(x) => x,
        Err(e) => return Err(fail(e, empty)),
    };
    let mut b = Builder { cert: SynthesisCertificate { garsia, ..empty }, eps: normalized, budget: budget.clone() };
    let run = |b: &mut Builder| -> Result<()> {
        b.first_level()?;
        for k in 1..depth {
            let n_next = b.s_stage(k)?;
            b.t_stage(k, n_next)?;
            b.coverage(k)?;
        }
        Ok(())
    };
    match run(&mut b) {
        Ok(()) => Ok(b.cert),
        Err(e) => Err(fail(e, b.cert)),
    }
}

/// Parameters whose s and t range over the depth-k cylinders of the certificate.
pub fn extract_params(cert: &SynthesisCertificate, k: usize) -> Result<IFSParams> {
    if k == 0 || k > cert.depth() || k > cert.t_exponents.len() {
        return Err(Error::input(format!("depth {k} is outside 1..={}", cert.depth())));
    }
    let s = ParamValue::Enclosed(cert.s_cf().prefix(k)?);
    let t = ParamValue::Enclosed(cert.t_cf().prefix(k)?);
    IFSParams::new(cert.base.clone(), s, t)
}
