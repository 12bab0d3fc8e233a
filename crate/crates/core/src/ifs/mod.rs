//! The four-map system `x/β, (x+1)/β, (x+s)/β, (x+t)/β` and its cylinder gaps.

mod allpairs;
mod baseset;
mod delta;
mod dimension;
mod fixed;
mod overlap;

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_rational::BigRational;

use crate::algebraic::{AlgebraicReal, BetaRational};
use crate::cfrac::{tail_hull, CFExponents};
use crate::error::{Error, Result};
use crate::num::{Enclosure, RationalInterval};

pub use allpairs::delta_n_allpairs;
pub use baseset::{beta_base_set, convergent_witness_bound, lemma_upper_bound, BetaBaseSet, LemmaBound};
pub use delta::{cylinder_points, delta_n, delta_n_with, Block, DeltaEngine};
pub use dimension::similarity_dimension;
pub use overlap::{find_exact_overlaps, overlap_relation, Collision, OverlapRelation};

/// Enumeration budgets; exceeding one is a resource error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest word length for 4^n enumerations.
    pub enumeration: u32,
    /// Largest level for β-base digit sets.
    pub base_set: u32,
    /// Largest number of colliding pairs reported.
    pub max_pairs: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { enumeration: 12, base_set: 24, max_pairs: 1_000_000 }
    }
}

/// Word lengths beyond this do not fit the 32-bit word indices.
pub const MAX_WORD_LENGTH: u32 = 15;

impl Limits {
    pub(crate) fn check_enumeration(&self, n: u32) -> Result<()> {
        if n == 0 {
            return Err(Error::input("word length must be at least 1"));
        }
        if n > self.enumeration || n > MAX_WORD_LENGTH {
            return Err(Error::resource(alloc::format!(
                "word length {n} exceeds the enumeration cap {}",
                self.enumeration.min(MAX_WORD_LENGTH)
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub enum ParamValue {
    Exact(BetaRational),
    /// Any point of the cylinder 𝒞[β^(e_1), …, β^(e_k)].
    Enclosed(CFExponents),
}

impl ParamValue {
    pub fn is_exact(&self) -> bool {
        matches!(self, ParamValue::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BetaRational> {
        match self {
            ParamValue::Exact(r) => Some(r),
            ParamValue::Enclosed(_) => None,
        }
    }

    pub fn base(&self) -> &Arc<AlgebraicReal> {
        match self {
            ParamValue::Exact(r) => r.base(),
            ParamValue::Enclosed(cf) => cf.base(),
        }
    }

    pub fn enclosure(&self, prec: u64) -> Result<Enclosure> {
        match self {
            ParamValue::Exact(r) => Ok(r.enclosure(prec)),
            ParamValue::Enclosed(cf) => tail_hull(cf, prec),
        }
    }

    /// Rational enclosure; a point for exact values over a rational base.
    pub fn interval(&self, prec: u64) -> Result<RationalInterval> {
        if let ParamValue::Exact(r) = self {
            if let Some(v) = r.as_rational() {
                return Ok(RationalInterval::point(v));
            }
        }
        self.enclosure(prec)?.to_rational_interval()
    }
}

#[derive(Clone, Debug)]
pub struct IFSParams {
    base: Arc<AlgebraicReal>,
    s: ParamValue,
    t: ParamValue,
}

impl IFSParams {
    pub fn new(base: Arc<AlgebraicReal>, s: ParamValue, t: ParamValue) -> Result<Self> {
        base.require_ifs_base()?;
        for p in [&s, &t] {
            if !p.base().same_number(&base) {
                return Err(Error::input("parameter uses a different base"));
            }
        }
        Ok(IFSParams { base, s, t })
    }

    pub fn rational(base: Arc<AlgebraicReal>, s: &BigRational, t: &BigRational) -> Result<Self> {
        let s = ParamValue::Exact(BetaRational::from_rational(base.clone(), s));
        let t = ParamValue::Exact(BetaRational::from_rational(base.clone(), t));
        IFSParams::new(base, s, t)
    }

    pub fn base(&self) -> &Arc<AlgebraicReal> {
        &self.base
    }

    pub fn s(&self) -> &ParamValue {
        &self.s
    }

    pub fn t(&self) -> &ParamValue {
        &self.t
    }

    pub fn is_exact(&self) -> bool {
        self.s.is_exact() && self.t.is_exact()
    }
}

/// A word `i_1 … i_n` over the letters 1..=4; `φ_w(0) = Σ_j c(i_j) β^(-j)`
/// with digits `c = 0, 1, s, t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<u8>,
}

impl Word {
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if letters.is_empty() || letters.iter().any(|&l| !(1..=4).contains(&l)) {
            return Err(Error::input("words are nonempty sequences over 1..=4"));
        }
        Ok(Word { letters })
    }

    /// The word with lexicographic rank `idx` among words of length `n`.
    pub fn from_index(idx: u64, n: u32) -> Self {
        let letters = (0..n).rev().map(|j| ((idx >> (2 * j)) & 3) as u8 + 1).collect();
        Word { letters }
    }

    pub fn index(&self) -> u64 {
        self.letters.iter().fold(0, |acc, &l| (acc << 2) | (l - 1) as u64)
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.letters.iter().map(|&l| (b'0' + l) as char).collect();
        f.write_str(&s)
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .trim()
            .bytes()
            .map(|b| if (b'1'..=b'4').contains(&b) { Ok(b - b'0') } else { Err(Error::input("word letters are 1..4")) })
            .collect::<Result<Vec<u8>>>()?;
        Word::new(letters)
    }
}

/// Certified enclosure of Δ_n with a pair of words at (or near) the minimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaResult {
    pub n: u32,
    pub value: RationalInterval,
    pub witness: (Word, Word),
    /// All comparisons were settled exactly.
    pub exact: bool,
}
