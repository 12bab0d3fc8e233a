//! `betaifs` subcommands. Results go to stdout as JSON lines, human summaries to stderr.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 resource error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use betaifs_core::algebraic::{AlgebraicReal, BetaPolynomial};
use betaifs_core::cfrac::{convergents, tail_interval, CFExponents};
use betaifs_core::epsilon::normalize_epsilon;
use betaifs_core::garsia::garsia_constant;
use betaifs_core::ifs::{find_exact_overlaps, lemma_upper_bound, overlap_relation, IFSParams, Limits};
use betaifs_core::num::{format_rational, Dyadic, RationalInterval};
use betaifs_core::synthesis::{synthesize_with, SynthesisBudget, SynthesisCertificate, VerifyOptions};
use betaifs_core::{Error, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::cert::{read_certificate, to_json, write_certificate};
use crate::inputs::{limits_from_env, parse_base, parse_epsilon, parse_param};
use crate::parallel::{delta_n_par, verify_par};
use crate::report::{write_delta_csv, write_verify_csv, DeltaRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

const PREC: u64 = 128;

#[derive(Parser, Debug)]
#[command(name = "betaifs", version, about = "Four-map IFS with algebraic base: certificates, gaps, overlaps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a certificate of super-close cylinders without exact overlaps.
    Synthesize(SynthesizeArgs),
    /// Replay a certificate.
    Verify(VerifyArgs),
    /// Certified minimal distance Δ_n between level-n cylinder anchors.
    Delta(DeltaArgs),
    /// Exact overlaps up to a word length and the relations they force.
    Overlaps(OverlapArgs),
    /// The constant M of the lower bound for nonzero polynomial values at β.
    Garsia(BaseArgs),
    /// Convergents and tail hull of a continued fraction with elements β^e.
    Cf(CfArgs),
}

#[derive(Args, Debug)]
struct BaseArgs {
    /// Defining polynomial of β, e.g. "x^2-2x-1".
    #[arg(long, default_value = "x-2")]
    minpoly: String,
    /// Isolating interval "lo,hi"; optional for linear polynomials.
    #[arg(long, allow_hyphen_values = true)]
    interval: Option<String>,
}

impl BaseArgs {
    fn base(&self) -> Result<Arc<AlgebraicReal>> {
        parse_base(&self.minpoly, self.interval.as_deref())
    }
}

#[derive(Args, Debug)]
struct SynthesizeArgs {
    #[command(flatten)]
    base: BaseArgs,
    /// geom:r, superexp:r, factorial, table:a,b,… or file:PATH.
    #[arg(long)]
    epsilon: String,
    #[arg(long)]
    depth: usize,
    #[arg(long)]
    out: PathBuf,
    /// Largest depth accepted.
    #[arg(long, default_value_t = 6)]
    max_depth: usize,
    /// Exponents must stay below 2^this.
    #[arg(long, default_value_t = 120)]
    max_exponent_bits: u32,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    cert: PathBuf,
    /// Also bound Δ_n directly for n up to this level.
    #[arg(long, default_value_t = 0)]
    brute_max: u32,
    /// Write the coverage rows here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DeltaArgs {
    #[command(flatten)]
    base: BaseArgs,
    /// p/q, poly:NUM/DEN or cf:e1,e2,….
    #[arg(long, allow_hyphen_values = true)]
    s: String,
    #[arg(long, allow_hyphen_values = true)]
    t: String,
    /// A single level.
    #[arg(long, conflicts_with = "max_n")]
    n: Option<u32>,
    /// All levels 1..=max-n.
    #[arg(long)]
    max_n: Option<u32>,
    /// Compare against this ε sequence.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OverlapArgs {
    #[command(flatten)]
    base: BaseArgs,
    #[arg(long, allow_hyphen_values = true)]
    s: String,
    #[arg(long, allow_hyphen_values = true)]
    t: String,
    #[arg(long, default_value_t = 4)]
    max_n: u32,
}

#[derive(Args, Debug)]
struct CfArgs {
    #[command(flatten)]
    base: BaseArgs,
    /// Exponent list "e1,e2,…" (a leading "cf:" is accepted).
    #[arg(long)]
    exps: String,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Input(_) => EXIT_INPUT,
            Error::Resource(_) => EXIT_RESOURCE,
        };
        Failure { code, message: e.message().to_string() }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

fn emit(v: Value) {
    println!("{v}");
}

fn interval_json(iv: &RationalInterval) -> Value {
    json!([format_rational(iv.lo()), format_rational(iv.hi())])
}

/// Exact value when β is rational, otherwise a narrow rational enclosure.
fn value_json(p: &BetaPolynomial) -> Result<Value> {
    match p.base().as_rational() {
        Some(b) => Ok(json!(format_rational(&p.poly().eval_rational(b)))),
        None => Ok(interval_json(&p.enclosure(PREC).to_rational_interval()?)),
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Synthesize(a) => cmd_synthesize(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Delta(a) => cmd_delta(&a),
        Command::Overlaps(a) => cmd_overlaps(&a),
        Command::Garsia(a) => cmd_garsia(&a),
        Command::Cf(a) => cmd_cf(&a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn summary_table(cert: &SynthesisCertificate) {
    eprintln!("{:>3} {:>24} {:>24} {:>24} {:>24} {:>14}", "k", "e_k", "e'_k", "N_k", "M_k", "log2 c_k");
    for lv in &cert.levels {
        let c = cert
            .separations
            .get(lv.k - 1)
            .map(|s| format!("{:.3}", s.c.log2_estimate()))
            .unwrap_or_else(|| "-".into());
        eprintln!(
            "{:>3} {:>24} {:>24} {:>24} {:>24} {:>14}",
            lv.k,
            cert.s_exponents[lv.k - 1],
            cert.t_exponents[lv.k - 1],
            lv.n,
            lv.m,
            c
        );
    }
}

fn partial_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".partial");
    PathBuf::from(name)
}

fn cmd_synthesize(a: &SynthesizeArgs) -> CmdResult {
    let base = a.base.base()?;
    let eps = parse_epsilon(&a.epsilon)?;
    if a.max_exponent_bits == 0 || a.max_exponent_bits > 127 {
        return Err(Error::input("--max-exponent-bits must be in 1..=127").into());
    }
    let budget = SynthesisBudget { max_depth: a.max_depth, max_exponent: 1u128 << a.max_exponent_bits, ..Default::default() };
    let cert = match synthesize_with(base, &eps, a.depth, &budget) {
        Ok(c) => c,
        Err(f) => {
            if !f.partial.levels.is_empty() {
                let path = partial_path(&a.out);
                std::fs::write(&path, to_json(&f.partial))
                    .map_err(|e| Error::resource(format!("cannot write {}: {e}", path.display())))?;
                eprintln!("stages completed before the failure (transcript in {}):", path.display());
                summary_table(&f.partial);
            }
            return Err(f.error.into());
        }
    };
    write_certificate(&a.out, &cert)?;
    for lv in &cert.levels {
        emit(json!({
            "k": lv.k,
            "s_exponent": cert.s_exponents[lv.k - 1].to_string(),
            "t_exponent": cert.t_exponents[lv.k - 1].to_string(),
            "N": lv.n.to_string(),
            "M": lv.m.to_string(),
            "c": cert.separations.get(lv.k - 1).map(|s| s.c.to_string()),
        }));
    }
    emit(json!({ "certificate": a.out.display().to_string(), "depth": cert.depth(), "checks": cert.checks.len() }));
    summary_table(&cert);
    eprintln!("wrote {} ({} checks)", a.out.display(), cert.checks.len());
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let cert = read_certificate(&a.cert)?;
    let limits = limits_from_env()?;
    let report = verify_par(&cert, &VerifyOptions { brute_n_max: a.brute_max }, &limits)?;
    if let Some(path) = &a.csv {
        write_verify_csv(path, &report.rows)?;
    }
    emit(json!({
        "pass": report.pass,
        "records": report.records_checked,
        "rows": report.rows.len(),
        "failure": report.failure,
    }));
    if report.pass {
        eprintln!("pass: {} records replayed, {} coverage rows", report.records_checked, report.rows.len());
        Ok(EXIT_OK)
    } else {
        eprintln!("FAIL at {}", report.failure.as_deref().unwrap_or("?"));
        Ok(EXIT_VERIFY_FAILED)
    }
}

fn cmd_delta(a: &DeltaArgs) -> CmdResult {
    let base = a.base.base()?;
    let params = IFSParams::new(base.clone(), parse_param(&base, &a.s)?, parse_param(&base, &a.t)?)?;
    let limits = limits_from_env()?;
    let eps = a.epsilon.as_deref().map(parse_epsilon).transpose()?.map(|e| normalize_epsilon(&e)).transpose()?;
    let levels: Vec<u32> = match (a.n, a.max_n) {
        (Some(n), None) => vec![n],
        (None, Some(m)) => (1..=m).collect(),
        _ => return Err(Error::input("give --n or --max-n").into()),
    };
    let mut rows = Vec::new();
    for n in levels {
        let d = delta_n_par(&params, n, &limits)?;
        let lemma_s = lemma_upper_bound(&base, params.s(), n, &limits)?;
        let lemma_t = lemma_upper_bound(&base, params.t(), n, &limits)?;
        let lemma = std::cmp::min(lemma_s.scaled, lemma_t.scaled);
        let eps_n = eps.as_ref().map(|e| e.lower(n as u128, PREC)).transpose()?;
        let mut line = json!({
            "n": n,
            "delta_lower": format_rational(d.value.lo()),
            "delta_upper": format_rational(d.value.hi()),
            "exact": d.exact,
            "witness": [d.witness.0.to_string(), d.witness.1.to_string()],
            "lemma_upper": format_rational(&lemma),
        });
        if d.value.is_point() {
            line["delta"] = json!(format_rational(d.value.lo()));
        }
        if let Some(e) = &eps_n {
            line["epsilon_n"] = json!(e.to_string());
            line["within_epsilon"] = json!(Dyadic::from_rational(d.value.hi(), PREC, betaifs_core::num::Round::Up) <= *e);
        }
        emit(line);
        eprintln!("n={n}: Δ ∈ {} (witness {} {})", d.value, d.witness.0, d.witness.1);
        rows.push(DeltaRow {
            n,
            delta_lower: format_rational(d.value.lo()),
            delta_upper: format_rational(d.value.hi()),
            lemma_upper: Some(format_rational(&lemma)),
            epsilon_n: eps_n.map(|e| e.to_string()),
        });
    }
    if let Some(path) = &a.csv {
        write_delta_csv(path, &rows)?;
    }
    Ok(EXIT_OK)
}

fn cmd_overlaps(a: &OverlapArgs) -> CmdResult {
    let base = a.base.base()?;
    let params = IFSParams::new(base.clone(), parse_param(&base, &a.s)?, parse_param(&base, &a.t)?)?;
    let limits: Limits = limits_from_env()?;
    let found = find_exact_overlaps(&params, a.max_n, &limits)?;
    for c in &found {
        let rel = overlap_relation(&params, (&c.first, &c.second))?;
        emit(json!({
            "level": c.level,
            "first": c.first.to_string(),
            "second": c.second.to_string(),
            "A": rel.a.poly().to_string(),
            "B": rel.b.poly().to_string(),
            "C": rel.c.poly().to_string(),
            "A_value": value_json(&rel.a)?,
            "B_value": value_json(&rel.b)?,
            "C_value": value_json(&rel.c)?,
        }));
    }
    eprintln!("{} colliding pair(s) up to length {}", found.len(), a.max_n);
    Ok(EXIT_OK)
}

fn cmd_garsia(a: &BaseArgs) -> CmdResult {
    let gc = garsia_constant(&*a.base()?)?;
    emit(json!({
        "M": gc.m.to_string(),
        "d": gc.d.to_string(),
        "landau": format_rational(&gc.landau),
        "beta_low": format_rational(&gc.beta_low),
    }));
    eprintln!("M = {}", gc.m);
    Ok(EXIT_OK)
}

fn cmd_cf(a: &CfArgs) -> CmdResult {
    let base = a.base.base()?;
    let list = a.exps.strip_prefix("cf:").unwrap_or(&a.exps);
    let exps = list
        .split(',')
        .map(|e| e.trim().parse::<u128>().map_err(|_| Error::input(format!("bad exponent {e:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let cf = CFExponents::new(base, exps);
    for pair in convergents(&cf)?.iter().skip(1) {
        let value = pair.value(PREC).to_rational_interval()?;
        let exact = pair.exact_value().map(|v| format_rational(&v));
        emit(json!({
            "k": pair.k,
            "p": pair.p.poly().to_string(),
            "q": pair.q.poly().to_string(),
            "value": exact.map(Value::from).unwrap_or_else(|| interval_json(&value)),
        }));
    }
    let tail = tail_interval(&cf, PREC)?;
    emit(json!({ "tail": interval_json(&tail) }));
    eprintln!("tail hull of length {}: {}", cf.len(), tail);
    Ok(EXIT_OK)
}
