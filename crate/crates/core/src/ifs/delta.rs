//! Δ_n by sorting fixed-point approximations of the cylinder points and
//! settling near ties exactly.
//!
//! Every point is approximated by an integer `a` in units of `2^-(P+1)` with a
//! per-word error bound, accumulated letter by letter. For exact parameters the
//! scaled value `K_w = β^n · den(s) · den(t) · φ_w(0)` is an integer polynomial
//! in β, so ambiguous neighbours are ordered by exact sign tests on `K_u - K_v`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::fixed::Fixed;
use super::{DeltaResult, IFSParams, Limits, ParamValue, Word};
use crate::algebraic::{AlgebraicReal, BetaPolynomial};
use crate::error::{Error, Result};
use crate::num::{Dyadic, Enclosure, RationalInterval};
use crate::poly::IntPolynomial;

/// Precision used for the reported enclosure of an exactly located gap.
const REPORT_PREC: u64 = 128;
/// Fixed-point precisions tried for enclosed parameters.
const ENCLOSED_PRECS: [u64; 4] = [64, 128, 256, 512];

/// Per-position, per-letter approximations and their error bounds.
#[derive(Debug)]
struct Terms<T> {
    a: Vec<[T; 4]>,
    err: Vec<[T; 4]>,
    max_err: T,
}

impl<T: Fixed> Terms<T> {
    fn new(raw: &[[(BigInt, BigInt); 4]]) -> Self {
        let mut max_err = T::zero();
        let mut a = Vec::with_capacity(raw.len());
        let mut err = Vec::with_capacity(raw.len());
        for row in raw {
            let ar: [T; 4] = core::array::from_fn(|c| T::from_big(&(&row[c].0 + &row[c].1)));
            let er: [T; 4] = core::array::from_fn(|c| T::from_big(&(&row[c].1 - &row[c].0)));
            max_err = max_err.plus(er.iter().max().expect("four letters"));
            a.push(ar);
            err.push(er);
        }
        Terms { a, err, max_err }
    }

    fn word_err(&self, idx: u32) -> T {
        let n = self.a.len();
        let mut e = T::zero();
        for j in 0..n {
            let c = ((idx >> (2 * (n - 1 - j))) & 3) as usize;
            e = e.plus(&self.err[j][c]);
        }
        e
    }

    /// All words starting with the `depth`-letter prefix `prefix`, sorted by (approximation, index).
    fn block(&self, prefix: u32, depth: u32) -> Vec<(T, u32)> {
        let n = self.a.len();
        let m = depth as usize;
        let mut letters = vec![0usize; n];
        for (j, l) in letters.iter_mut().enumerate().take(m) {
            *l = ((prefix >> (2 * (m - 1 - j))) & 3) as usize;
        }
        let mut partial = vec![T::zero(); n + 1];
        for j in 0..n {
            partial[j + 1] = partial[j].plus(&self.a[j][letters[j]]);
        }
        let count = 1usize << (2 * (n - m));
        let mut out = Vec::with_capacity(count);
        let mut idx = prefix << (2 * (n - m));
        loop {
            out.push((partial[n].clone(), idx));
            let mut d = n;
            loop {
                if d == m {
                    out.sort_unstable();
                    return out;
                }
                d -= 1;
                if letters[d] < 3 {
                    letters[d] += 1;
                    break;
                }
                letters[d] = 0;
            }
            for j in d..n {
                partial[j + 1] = partial[j].plus(&self.a[j][letters[j]]);
            }
            idx += 1;
        }
    }
}

#[derive(Debug)]
enum Inner {
    Small(Terms<i128>),
    Big(Terms<BigInt>),
}

/// Sorted approximations for one prefix block of words.
#[derive(Debug)]
pub struct Block(BlockInner);

#[derive(Debug)]
enum BlockInner {
    Small(Vec<(i128, u32)>),
    Big(Vec<(BigInt, u32)>),
}

#[derive(Debug)]
enum Mode {
    /// Integer polynomials `L_c` with `K_w = Σ_j β^(n-j) L_(c_j)`, and `den(s) den(t)`.
    Exact { letters: [IntPolynomial; 4], scale: IntPolynomial },
    Enclosed,
}

/// One fixed-point pass of the Δ_n computation; blocks may be produced in parallel.
#[derive(Debug)]
pub struct DeltaEngine {
    base: Arc<AlgebraicReal>,
    n: u32,
    frac_bits: i64,
    mode: Mode,
    inner: Inner,
}

fn positive_fraction(p: &ParamValue) -> Result<(BetaPolynomial, BetaPolynomial)> {
    let r = p.as_exact().expect("exact parameter");
    match r.den().sign()? {
        Ordering::Less => Ok((r.num().neg(), r.den().neg())),
        _ => Ok((r.num().clone(), r.den().clone())),
    }
}

fn magnitude_bits(e: &Enclosure) -> i64 {
    let m = core::cmp::max(e.lo().abs(), e.hi().abs());
    m.magnitude().and_then(|g| g.to_i64()).unwrap_or(i64::MIN / 4)
}

/// `(floor(lo 2^P), ceil(hi 2^P))`.
fn fixed_bounds(e: &Enclosure, p: i64) -> (BigInt, BigInt) {
    (e.lo().floor_scaled(p), e.hi().ceil_scaled(p))
}

fn bits_of(n: u32) -> i64 {
    (32 - n.leading_zeros()) as i64
}

impl DeltaEngine {
    /// Builds the per-letter terms; `prec` is the fixed-point precision for enclosed parameters.
    pub fn new(params: &IFSParams, n: u32, limits: &Limits, prec: u64) -> Result<Self> {
        limits.check_enumeration(n)?;
        let base = params.base().clone();
        if params.is_exact() {
            let (sn, sd) = positive_fraction(params.s())?;
            let (tn, td) = positive_fraction(params.t())?;
            let letters = [
                IntPolynomial::zero(),
                sd.mul(&td)?.poly().clone(),
                sn.mul(&td)?.poly().clone(),
                tn.mul(&sd)?.poly().clone(),
            ];
            let scale = sd.mul(&td)?.poly().clone();
            let term_polys: Vec<[BetaPolynomial; 4]> = (0..n)
                .map(|j| {
                    let shift = (n - 1 - j) as u128;
                    letters
                        .iter()
                        .map(|l| Ok(BetaPolynomial::new(base.clone(), l.shift(shift)?)))
                        .collect::<Result<Vec<_>>>()
                        .map(|v| <[BetaPolynomial; 4]>::try_from(v).expect("four letters"))
                })
                .collect::<Result<_>>()?;
            let mag = term_polys.iter().flatten().map(|t| magnitude_bits(&t.enclosure(64))).max().unwrap_or(0);
            let s_bits = mag.max(0) + bits_of(n) + 2;
            let (frac_bits, small) = if s_bits <= 100 { (122 - s_bits, true) } else { (64, false) };
            let raw: Vec<[(BigInt, BigInt); 4]> = term_polys
                .iter()
                .map(|row| {
                    core::array::from_fn(|c| {
                        let tp = (frac_bits + magnitude_bits(&row[c].enclosure(64)).max(0) + 16) as u64;
                        fixed_bounds(&row[c].enclosure(tp), frac_bits)
                    })
                })
                .collect();
            let inner = if small { Inner::Small(Terms::new(&raw)) } else { Inner::Big(Terms::new(&raw)) };
            return Ok(DeltaEngine { base, n, frac_bits, mode: Mode::Exact { letters, scale }, inner });
        }
        let frac_bits = prec as i64;
        let wp = prec + 16;
        let s = params.s().enclosure(wp)?;
        let t = params.t().enclosure(wp)?;
        let binv = base.enclosure(wp + 8).recip(wp).ok_or_else(|| Error::input("base encloses zero"))?;
        let digits = [Enclosure::zero(), Enclosure::one(), s, t];
        let mut scale = Enclosure::one();
        let mut raw = Vec::with_capacity(n as usize);
        let mut mag = i64::MIN;
        for _ in 0..n {
            scale = scale.mul(&binv, wp + bits_of(n) as u64);
            let row: [(BigInt, BigInt); 4] = core::array::from_fn(|c| {
                let v = scale.mul(&digits[c], wp);
                mag = mag.max(magnitude_bits(&v));
                fixed_bounds(&v, frac_bits)
            });
            raw.push(row);
        }
        let small = frac_bits + mag.max(0) + bits_of(n) + 4 <= 122;
        let inner = if small { Inner::Small(Terms::new(&raw)) } else { Inner::Big(Terms::new(&raw)) };
        Ok(DeltaEngine { base, n, frac_bits, mode: Mode::Enclosed, inner })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    fn block_depth(&self) -> u32 {
        self.n.min(3)
    }

    /// Prefixes of the blocks that together cover all words.
    pub fn block_prefixes(&self) -> Vec<u32> {
        (0..1u32 << (2 * self.block_depth())).collect()
    }

    pub fn block(&self, prefix: u32) -> Block {
        let d = self.block_depth();
        Block(match &self.inner {
            Inner::Small(t) => BlockInner::Small(t.block(prefix, d)),
            Inner::Big(t) => BlockInner::Big(t.block(prefix, d)),
        })
    }

    /// Merges the blocks (in any order) and settles the minimal gap.
    pub fn finish(&self, blocks: Vec<Block>) -> Result<DeltaResult> {
        match &self.inner {
            Inner::Small(t) => {
                let v = blocks
                    .into_iter()
                    .flat_map(|b| match b.0 {
                        BlockInner::Small(v) => v,
                        BlockInner::Big(_) => panic!("block from a different engine"),
                    })
                    .collect();
                self.finish_typed(t, v)
            }
            Inner::Big(t) => {
                let v = blocks
                    .into_iter()
                    .flat_map(|b| match b.0 {
                        BlockInner::Big(v) => v,
                        BlockInner::Small(_) => panic!("block from a different engine"),
                    })
                    .collect();
                self.finish_typed(t, v)
            }
        }
    }

    fn word(&self, idx: u32) -> Word {
        Word::from_index(idx as u64, self.n)
    }

    fn witness(&self, u: u32, v: u32) -> (Word, Word) {
        (self.word(u.min(v)), self.word(u.max(v)))
    }

    fn unit_interval(&self, lo: &BigInt, hi: &BigInt) -> Result<RationalInterval> {
        let unit = Dyadic::pow2(-(self.frac_bits + 1));
        let lo = Dyadic::from_int(lo.clone()).mul_exact(&unit).to_rational()?;
        let hi = Dyadic::from_int(hi.clone()).mul_exact(&unit).to_rational()?;
        RationalInterval::new(lo, hi)
    }

    fn finish_typed<T: Fixed>(&self, terms: &Terms<T>, mut v: Vec<(T, u32)>) -> Result<DeltaResult> {
        let total = 1usize << (2 * self.n);
        if v.len() != total {
            return Err(Error::input("blocks do not cover every word exactly once"));
        }
        v.sort_unstable();
        match &self.mode {
            Mode::Exact { letters, scale } => self.finish_exact(terms, v, letters, scale),
            Mode::Enclosed => self.finish_enclosed(terms, &v),
        }
    }

    fn finish_enclosed<T: Fixed>(&self, terms: &Terms<T>, v: &[(T, u32)]) -> Result<DeltaResult> {
        let two_e = terms.max_err.plus(&terms.max_err);
        let mut min_gap: Option<T> = None;
        let mut best: Option<(T, (u32, u32))> = None;
        let mut errs: Vec<T> = v.iter().map(|(_, i)| terms.word_err(*i)).collect();
        for i in 0..v.len() - 1 {
            let gap = v[i + 1].0.minus(&v[i].0);
            if min_gap.as_ref().is_none_or(|g| &gap < g) {
                min_gap = Some(gap.clone());
            }
            let upper = gap.plus(&errs[i]).plus(&errs[i + 1]);
            let (u, w) = (v[i].1.min(v[i + 1].1), v[i].1.max(v[i + 1].1));
            let better = match &best {
                None => true,
                Some((b, pair)) => upper < *b || (upper == *b && (u, w) < *pair),
            };
            if better {
                best = Some((upper, (u, w)));
            }
        }
        errs.clear();
        let (upper, (u, w)) = best.expect("at least two words");
        let lower = min_gap.expect("at least two words").minus(&two_e).to_big().max(<BigInt as Zero>::zero());
        Ok(DeltaResult {
            n: self.n,
            value: self.unit_interval(&lower, &upper.to_big())?,
            witness: self.witness(u, w),
            exact: false,
        })
    }

    fn key(&self, letters: &[IntPolynomial; 4], idx: u32) -> Result<BetaPolynomial> {
        let n = self.n as usize;
        let mut k = IntPolynomial::zero();
        for j in 0..n {
            let c = ((idx >> (2 * (n - 1 - j))) & 3) as usize;
            k = k.shift(1)?.add(&letters[c]);
        }
        Ok(BetaPolynomial::new(self.base.clone(), k))
    }

    fn finish_exact<T: Fixed>(
        &self,
        terms: &Terms<T>,
        mut v: Vec<(T, u32)>,
        letters: &[IntPolynomial; 4],
        scale: &IntPolynomial,
    ) -> Result<DeltaResult> {
        let e = terms.max_err.clone();
        let two_e = e.plus(&e);
        let exact_grid = e == T::zero();
        if !exact_grid {
            // Neighbours closer than 2E may be out of order; sort each such run exactly.
            let mut start = 0;
            while start < v.len() {
                let mut end = start + 1;
                while end < v.len() && v[end].0.minus(&v[end - 1].0) <= two_e {
                    end += 1;
                }
                if end - start > 1 {
                    let mut run: Vec<(BetaPolynomial, u32)> =
                        v[start..end].iter().map(|(_, i)| Ok((self.key(letters, *i)?, *i))).collect::<Result<_>>()?;
                    try_merge_sort(&mut run, &mut |x, y| {
                        Ok(x.0.sub(&y.0)?.sign()?.then(x.1.cmp(&y.1)))
                    })?;
                    for (slot, (_, i)) in v[start..end].iter_mut().zip(run) {
                        slot.1 = i;
                    }
                }
                start = end;
            }
        }
        // Adjacent approximate gaps; the true minimum lies within 4E of the smallest.
        let gaps: Vec<T> = v.windows(2).map(|w| w[1].0.minus(&w[0].0)).collect();
        let mut approx_min = gaps[0].clone();
        for g in &gaps {
            if g < &approx_min {
                approx_min = g.clone();
            }
        }
        let bound = approx_min.plus(&two_e).plus(&two_e);
        let pair = |i: usize| (v[i].1.min(v[i + 1].1), v[i].1.max(v[i + 1].1));
        let mut best: Option<(usize, BetaPolynomial)> = None;
        for (i, g) in gaps.iter().enumerate() {
            if exact_grid {
                if g != &approx_min {
                    continue;
                }
            } else if g > &bound {
                continue;
            }
            let gi = self.key(letters, v[i + 1].1)?.sub(&self.key(letters, v[i].1)?)?;
            let better = match &best {
                None => true,
                Some((j, _)) if exact_grid => pair(i) < pair(*j),
                Some((j, gj)) => match gi.sub(gj)?.sign()? {
                    Ordering::Less => true,
                    Ordering::Equal => pair(i) < pair(*j),
                    Ordering::Greater => false,
                },
            };
            if better {
                best = Some((i, gi));
            }
        }
        let (i, gap) = best.expect("at least two words");
        let (u, w) = pair(i);
        let value = self.gap_value(&gap, scale)?;
        Ok(DeltaResult { n: self.n, value, witness: self.witness(u, w), exact: true })
    }

    /// `G(β) β^-n / (den(s) den(t))` as an exact point or a tight interval.
    fn gap_value(&self, gap: &BetaPolynomial, scale: &IntPolynomial) -> Result<RationalInterval> {
        if gap.is_value_zero()? {
            return Ok(RationalInterval::point(BigRational::zero()));
        }
        if let Some(b) = self.base.as_rational() {
            let num = gap.poly().eval_rational(b);
            let den = scale.eval_rational(b) * crate::poly::pow_rational(b, self.n as u128);
            return Ok(RationalInterval::point((num / den).abs()));
        }
        let p = REPORT_PREC;
        let g = gap.enclosure(p).abs();
        let d = BetaPolynomial::new(self.base.clone(), scale.shift(self.n as u128)?).enclosure(p);
        let q = g.div(&d, p).ok_or_else(|| Error::input("scale encloses zero"))?;
        let lo = if q.lo().is_negative() { Enclosure::new(Dyadic::zero(), q.hi().clone()) } else { q };
        lo.to_rational_interval()
    }
}

fn try_merge_sort<X: Clone>(v: &mut [X], cmp: &mut impl FnMut(&X, &X) -> Result<Ordering>) -> Result<()> {
    let n = v.len();
    if n <= 1 {
        return Ok(());
    }
    let mid = n / 2;
    try_merge_sort(&mut v[..mid], cmp)?;
    try_merge_sort(&mut v[mid..], cmp)?;
    let mut merged = Vec::with_capacity(n);
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if cmp(&v[j], &v[i])? == Ordering::Less {
            merged.push(v[j].clone());
            j += 1;
        } else {
            merged.push(v[i].clone());
            i += 1;
        }
    }
    merged.extend_from_slice(&v[i..mid]);
    merged.extend_from_slice(&v[j..n]);
    v.clone_from_slice(&merged);
    Ok(())
}

/// Runs the engine with a caller-supplied block producer (for example a parallel map).
pub fn delta_n_with<F>(params: &IFSParams, n: u32, limits: &Limits, produce: F) -> Result<DeltaResult>
where
    F: Fn(&DeltaEngine) -> Vec<Block>,
{
    if params.is_exact() {
        let engine = DeltaEngine::new(params, n, limits, 0)?;
        return engine.finish(produce(&engine));
    }
    let mut last = None;
    for prec in ENCLOSED_PRECS {
        let engine = DeltaEngine::new(params, n, limits, prec)?;
        let r = engine.finish(produce(&engine))?;
        let width = r.value.width();
        let settled = width.is_zero() || width * BigRational::from_integer(BigInt::from(1u32 << 20)) <= *r.value.hi();
        if settled {
            return Ok(r);
        }
        last = Some(r);
    }
    Ok(last.expect("at least one precision"))
}

/// Certified Δ_n = min over distinct words of |φ_u(0) − φ_v(0)|.
pub fn delta_n(params: &IFSParams, n: u32, limits: &Limits) -> Result<DeltaResult> {
    delta_n_with(params, n, limits, |e| e.block_prefixes().into_iter().map(|p| e.block(p)).collect())
}

/// Every φ_w(0) for words of length n in index order, each within `width`.
pub fn cylinder_points(params: &IFSParams, n: u32, width: &BigRational, limits: &Limits) -> Result<Vec<(Word, RationalInterval)>> {
    limits.check_enumeration(n)?;
    if !width.is_positive() {
        return Err(Error::input("width must be positive"));
    }
    let base = params.base();
    let count = 1u64 << (2 * n);
    if let (Some(b), Some(s), Some(t)) = (
        base.as_rational(),
        params.s().as_exact().and_then(|r| r.as_rational()),
        params.t().as_exact().and_then(|r| r.as_rational()),
    ) {
        let digits = [BigRational::zero(), BigRational::from_integer(1.into()), s, t];
        return Ok((0..count)
            .map(|idx| {
                let w = Word::from_index(idx, n);
                let mut x = BigRational::zero();
                for &l in w.letters().iter().rev() {
                    x = (&digits[(l - 1) as usize] + x) / b;
                }
                (w, RationalInterval::point(x))
            })
            .collect());
    }
    let target = Dyadic::from_rational(width, 64, crate::num::Round::Down);
    let mut prec = 64u64;
    loop {
        let s = params.s().enclosure(prec)?;
        let t = params.t().enclosure(prec)?;
        let binv = base.enclosure(prec + 8).recip(prec).ok_or_else(|| Error::input("base encloses zero"))?;
        let digits = [Enclosure::zero(), Enclosure::one(), s, t];
        let mut out = Vec::with_capacity(count as usize);
        let mut ok = true;
        for idx in 0..count {
            let w = Word::from_index(idx, n);
            let mut x = Enclosure::zero();
            for &l in w.letters().iter().rev() {
                x = digits[(l - 1) as usize].add(&x, prec).mul(&binv, prec);
            }
            if x.width(prec + 8) > target {
                ok = false;
                break;
            }
            out.push((w, x.to_rational_interval()?));
        }
        if ok {
            return Ok(out);
        }
        if prec >= 4096 {
            return Err(Error::resource("cannot reach the requested width; the parameter enclosures are too wide"));
        }
        prec *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;
    use crate::poly::parse_polynomial;

    fn two() -> Arc<AlgebraicReal> {
        Arc::new(
            AlgebraicReal::new(parse_polynomial("x-2").unwrap(), RationalInterval::new(rat(1, 1), rat(3, 1)).unwrap())
                .unwrap(),
        )
    }

    #[test]
    fn merge_sort_is_stable_and_total() {
        let mut v = vec![5, 3, 9, 1, 3, 0];
        try_merge_sort(&mut v, &mut |a: &i32, b: &i32| Ok(a.cmp(b))).unwrap();
        assert_eq!(v, vec![0, 1, 3, 3, 5, 9]);
    }

    #[test]
    fn block_enumeration_covers_words() {
        let p = IFSParams::rational(two(), &rat(3, 10), &rat(4, 5)).unwrap();
        let e = DeltaEngine::new(&p, 4, &Limits::default(), 0).unwrap();
        let mut seen: Vec<u32> = e
            .block_prefixes()
            .into_iter()
            .flat_map(|pre| match e.block(pre).0 {
                BlockInner::Small(v) => v.into_iter().map(|(_, i)| i).collect::<Vec<_>>(),
                BlockInner::Big(v) => v.into_iter().map(|(_, i)| i).collect(),
            })
            .collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..256).collect::<Vec<u32>>());
    }
}
