//! Replays a certificate from its exponent lists alone.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{
    extract_params, int, inverse_power_hi, level_of, max_degree, CheckKind, CheckRecord, LevelRecord, SeparationRecord,
    SynthesisCertificate, FIRST_LEVEL,
};
use crate::cfrac::{beta_power, convergents, growth_row, separation_constant, separation_data, ConvergentPair};
use crate::epsilon::{normalize_epsilon, EpsilonSequence};
use crate::error::{Error, Result};
use crate::garsia::garsia_constant;
use crate::ifs::{convergent_witness_bound, delta_n, DeltaResult, IFSParams, Limits};
use crate::num::{Dyadic, Round};
use crate::poly::PolyClass;

/// Explicit rows per coverage range before only the far end is listed.
const ROWS_PER_RANGE: u128 = 32;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Also bound Δ_n directly for n ≤ this level (0 disables).
    pub brute_n_max: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSource {
    Initial,
    SSide,
    TSide,
    Brute,
}

impl RowSource {
    pub fn as_str(self) -> &'static str {
        match self {
            RowSource::Initial => "initial",
            RowSource::SSide => "s-side",
            RowSource::TSide => "t-side",
            RowSource::Brute => "brute",
        }
    }
}

/// `Δ_n ≤ delta_upper` against the certified lower bound `epsilon` on ε′_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageRow {
    pub n: u128,
    pub delta_upper: Dyadic,
    pub epsilon: Dyadic,
    pub source: RowSource,
}

impl CoverageRow {
    pub fn holds(&self) -> bool {
        self.delta_upper <= self.epsilon
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub pass: bool,
    /// The first record that did not replay.
    pub failure: Option<String>,
    pub records_checked: usize,
    pub rows: Vec<CoverageRow>,
}

struct Replay<'a> {
    cert: &'a SynthesisCertificate,
    eps: EpsilonSequence,
    s: Vec<ConvergentPair>,
    t: Vec<ConvergentPair>,
    failure: Option<String>,
    checked: usize,
}

impl Replay<'_> {
    fn fail(&mut self, what: String) {
        if self.failure.is_none() {
            self.failure = Some(what);
        }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(what());
        }
    }

    fn level(&self, k: usize) -> Result<u128> {
        if k == 1 {
            Ok(FIRST_LEVEL)
        } else {
            level_of(&self.s[k])
        }
    }

    fn t_level(&self, k: usize) -> Result<u128> {
        if k == 1 {
            Ok(2 * FIRST_LEVEL)
        } else {
            level_of(&self.t[k])
        }
    }

    fn levels(&mut self) -> Result<Vec<LevelRecord>> {
        let depth = self.cert.depth();
        let mut out = Vec::with_capacity(depth);
        for k in 1..=depth {
            match (self.level(k), self.t_level(k)) {
                (Ok(n), Ok(m)) => out.push(LevelRecord { k, n, m }),
                _ => {
                    self.fail(format!("membership k={k}: convergent coefficients outside {{0,1}}"));
                    return Ok(out);
                }
            }
        }
        for (want, got) in out.iter().zip(&self.cert.levels) {
            self.expect(want == got, || format!("level k={}: recorded N, M differ from the convergents", want.k));
        }
        for w in out.windows(2) {
            self.expect(w[1].n > w[0].m, || format!("level k={}: N_(k+1) > M_k fails", w[1].k));
        }
        for lv in &out {
            self.expect(lv.m >= 2 * lv.n, || format!("level k={}: M_k ≥ 2 N_k fails", lv.k));
        }
        Ok(out)
    }

    fn separations(&mut self) -> Result<Vec<SeparationRecord>> {
        let cert = self.cert;
        let prec = cert.precision;
        let mut out = Vec::new();
        for k in 1..cert.depth() {
            let prefix = cert.s_cf().prefix(k)?;
            let multiplier = self.t[k].as_beta_rational();
            let data = separation_data(&prefix, &PolyClass::square(k as u128), Some(&multiplier), &cert.garsia, prec)?;
            let c = separation_constant(&prefix, &data, cert.s_exponents[k], prec)?;
            let rec = SeparationRecord { k, c, l: data.l, m1: data.m1 };
            let got = &cert.separations[k - 1];
            self.expect(&rec == got, || format!("separation k={k}: recorded c_k, L or M1 differs from the replay"));
            out.push(rec);
        }
        Ok(out)
    }

    fn checks(&mut self, levels: &[LevelRecord], seps: &[SeparationRecord]) -> Result<Vec<CheckRecord>> {
        let cert = self.cert;
        let prec = cert.precision;
        let base = &cert.base;
        let gc = &cert.garsia;
        let (s_cf, t_cf) = (cert.s_cf(), cert.t_cf());
        let mut out = Vec::new();
        let mut rec = |kind, k, n, lhs, rhs| out.push(CheckRecord { kind, k, n, lhs, rhs });
        let membership = |rec: &mut dyn FnMut(CheckKind, usize, Option<u128>, Dyadic, Dyadic), k: usize| {
            let lv = &levels[k - 1];
            for (pair, level) in [(&self.s[k], lv.n), (&self.t[k], lv.m)] {
                let need = (max_degree(pair) + 1).max(1);
                rec(CheckKind::Membership, k, Some(level), int(need), int(level));
            }
        };
        membership(&mut rec, 1);
        for k in 1..cert.depth() {
            let lv = &levels[k - 1];
            let next = &levels[k];
            let e = cert.s_exponents[k];
            let eps_index = if k == 1 { lv.n } else { lv.m };
            rec(CheckKind::SEps, k, Some(eps_index), inverse_power_hi(base, e, prec), self.eps.lower(eps_index, prec)?);
            let prefix = s_cf.prefix(k)?;
            let multiplier = self.t[k].as_beta_rational();
            let data = separation_data(&prefix, &PolyClass::square(k as u128), Some(&multiplier), gc, prec)?;
            rec(CheckKind::SSeparation, k, None, data.threshold, beta_power(base, e, prec).lo().clone());
            let g = growth_row(base, gc, &self.s[k], e, prec)?;
            rec(CheckKind::SGrowth, k, None, g.rhs, g.lhs);
            rec(CheckKind::SDisjoint, k, None, int((max_degree(&self.s[k - 1]) + 1).max(0)), int(e));
            rec(CheckKind::LevelOrder, k, Some(next.n), int(lv.m), int(next.n));

            let e = cert.t_exponents[k];
            let inv = inverse_power_hi(base, e, prec);
            rec(CheckKind::TEps, k, Some(next.n), inv.clone(), self.eps.lower(next.n, prec)?);
            rec(CheckKind::TSeparation, k, None, inv, seps[k - 1].c.div(&int(k as u64), prec, Round::Down));
            let g = growth_row(base, gc, &self.t[k], e, prec)?;
            rec(CheckKind::TGrowth, k, None, g.rhs, g.lhs);
            rec(CheckKind::TDisjoint, k, None, int((max_degree(&self.t[k - 1]) + 1).max(0)), int(e));
            rec(CheckKind::LevelRatio, k + 1, Some(next.m), int(2 * next.n), int(next.m));
            membership(&mut rec, k + 1);

            if k == 1 {
                rec(CheckKind::Coverage, 1, Some(1), convergent_witness_bound(&t_cf, 1, 1)?, self.eps.lower(next.n, prec)?);
            } else {
                let b = convergent_witness_bound(&s_cf, k, lv.n)?;
                rec(CheckKind::Coverage, k, Some(lv.n), b, self.eps.lower(lv.m, prec)?);
                let b = convergent_witness_bound(&t_cf, k, lv.m)?;
                rec(CheckKind::Coverage, k, Some(lv.m), b, self.eps.lower(next.n, prec)?);
            }
        }
        if out.len() != cert.checks.len() {
            self.fail(format!("checks: {} recorded, {} replayed", cert.checks.len(), out.len()));
        }
        for (want, got) in out.iter().zip(&cert.checks) {
            self.expect(want == got, || format!("{}: recorded values differ from the replay", got.label()));
            self.expect(want.holds(), || format!("{}: inequality fails", want.label()));
        }
        Ok(out)
    }

    /// Rows for `[lo, hi]` from the convergent pair k of one side.
    fn range_rows(&mut self, source: RowSource, k: usize, lo: u128, hi: u128, rows: &mut Vec<CoverageRow>) -> Result<()> {
        let cf = if source == RowSource::SSide { self.cert.s_cf() } else { self.cert.t_cf() };
        let prec = self.cert.precision;
        let explicit = lo..=hi.min(lo.saturating_add(ROWS_PER_RANGE - 1));
        let tail = (hi > *explicit.end()).then_some(hi);
        for n in explicit.chain(tail) {
            let row = CoverageRow { n, delta_upper: convergent_witness_bound(&cf, k, n)?, epsilon: self.eps.lower(n, prec)?, source };
            self.expect(row.holds(), || format!("coverage n={n} ({}): bound exceeds epsilon", source.as_str()));
            rows.push(row);
        }
        Ok(())
    }

    fn coverage(&mut self, levels: &[LevelRecord]) -> Result<Vec<CoverageRow>> {
        let mut rows = Vec::new();
        let mut ranges = Vec::new();
        ranges.push((RowSource::Initial, 1usize, 1u128, levels[1].n));
        for k in 2..levels.len() {
            ranges.push((RowSource::SSide, k, levels[k - 1].n, levels[k - 1].m));
            ranges.push((RowSource::TSide, k, levels[k - 1].m, levels[k].n));
        }
        let mut reached = 1u128;
        for &(source, k, lo, hi) in &ranges {
            self.expect(lo <= reached && hi >= lo, || format!("coverage: gap before level {lo}"));
            reached = reached.max(hi);
            let source_cf = if source == RowSource::Initial { RowSource::TSide } else { source };
            let start = rows.len();
            self.range_rows(source_cf, k, lo, hi, &mut rows)?;
            for r in &mut rows[start..] {
                r.source = source;
            }
        }
        let last = levels.last().map(|l| l.n).unwrap_or(0);
        self.expect(reached >= last, || format!("coverage stops at {reached} below N_K = {last}"));
        Ok(rows)
    }
}

fn well_formed(cert: &SynthesisCertificate) -> Result<()> {
    let depth = cert.depth();
    let bad = |m: &str| Err(Error::input(format!("malformed certificate: {m}")));
    if depth < 2 {
        return bad("depth must be at least 2");
    }
    if cert.t_exponents.len() != depth {
        return bad("s and t exponent lists differ in length");
    }
    if cert.s_exponents[0] != 0 || cert.t_exponents[0] != 0 {
        return bad("the first elements must be β^0");
    }
    if cert.levels.len() != depth || cert.separations.len() != depth - 1 {
        return bad("level or separation records do not match the depth");
    }
    if cert.levels.iter().enumerate().any(|(i, l)| l.k != i + 1) || cert.separations.iter().enumerate().any(|(i, s)| s.k != i + 1) {
        return bad("records are not indexed 1, 2, …");
    }
    if !(32..=1 << 16).contains(&cert.precision) {
        return bad("precision outside 32..=65536");
    }
    cert.base.require_ifs_base()
}

pub fn verify_certificate(cert: &SynthesisCertificate, opts: &VerifyOptions) -> Result<VerifyReport> {
    let limits = Limits::default();
    verify_certificate_with(cert, opts, |p, n| delta_n(p, n, &limits))
}

/// [`verify_certificate`] with a caller-supplied Δ_n evaluator for the brute-force rows.
pub fn verify_certificate_with<F>(cert: &SynthesisCertificate, opts: &VerifyOptions, delta: F) -> Result<VerifyReport>
where
    F: Fn(&IFSParams, u32) -> Result<DeltaResult>,
{
    well_formed(cert)?;
    let mut r = Replay {
        cert,
        eps: normalize_epsilon(&cert.epsilon)?,
        s: convergents(&cert.s_cf())?,
        t: convergents(&cert.t_cf())?,
        failure: None,
        checked: 0,
    };
    let gc = garsia_constant(&cert.base)?;
    r.expect(gc == cert.garsia, || String::from("garsia: recorded constant differs from the replay"));
    let levels = r.levels()?;
    if levels.len() != cert.depth() {
        return Ok(VerifyReport { pass: false, failure: r.failure, records_checked: r.checked, rows: Vec::new() });
    }
    let seps = r.separations()?;
    r.checks(&levels, &seps)?;
    let mut rows = r.coverage(&levels)?;
    if opts.brute_n_max > 0 {
        let params = extract_params(cert, cert.depth())?;
        for n in 1..=opts.brute_n_max {
            let d = delta(&params, n)?;
            let row = CoverageRow {
                n: n as u128,
                delta_upper: Dyadic::from_rational(d.value.hi(), cert.precision, Round::Up),
                epsilon: r.eps.lower(n as u128, cert.precision)?,
                source: RowSource::Brute,
            };
            r.expect(row.holds(), || format!("brute n={n}: certified Δ_n upper bound exceeds epsilon"));
            rows.push(row);
        }
    }
    Ok(VerifyReport { pass: r.failure.is_none(), failure: r.failure, records_checked: r.checked, rows })
}
