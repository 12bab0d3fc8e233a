//! β-base digit sets ℬ_n and the upper bounds on Δ_n they provide.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Limits, ParamValue};
use crate::algebraic::{AlgebraicReal, BetaPolynomial, Reducer};
use crate::cfrac::{beta_power, convergents, CFExponents};
use crate::error::{Error, Result};
use crate::num::{Dyadic, Enclosure};
use crate::poly::qpoly::QPoly;
use crate::poly::IntPolynomial;

/// Levels up to which construction re-checks that the 2^n values are distinct.
const DISTINCT_CHECK_LIMIT: u32 = 16;
const PREC: u64 = 192;

/// `ℬ_n = {Σ_(j<n) ω_j β^j : ω_j ∈ {0,1}}`; element `mask` has `ω_j` = bit j.
#[derive(Clone, Debug)]
pub struct BetaBaseSet {
    base: Arc<AlgebraicReal>,
    n: u32,
}

impl BetaBaseSet {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        1usize << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn element(&self, mask: u64) -> BetaPolynomial {
        let terms = (0..self.n).filter(|j| mask >> j & 1 == 1).map(|j| (j as u128, BigInt::one()));
        BetaPolynomial::new(self.base.clone(), IntPolynomial::from_terms(terms))
    }

    pub fn elements(&self) -> Vec<BetaPolynomial> {
        (0..self.len() as u64).map(|m| self.element(m)).collect()
    }

    /// Value keys of all elements, in mask order.
    pub fn value_keys(&self) -> Vec<QPoly> {
        let mut red = Reducer::new(&self.base);
        let monos: Vec<QPoly> = (0..self.n).map(|j| red.monomial(j as u128)).collect();
        let mut keys: Vec<QPoly> = Vec::with_capacity(self.len());
        keys.push(QPoly::new());
        for mask in 1..self.len() {
            let top = (usize::BITS - 1 - mask.leading_zeros()) as usize;
            let mut k = keys[mask ^ (1 << top)].clone();
            let m = &monos[top];
            if k.len() < m.len() {
                k.resize(m.len(), BigRational::zero());
            }
            for (a, b) in k.iter_mut().zip(m) {
                *a += b;
            }
            while k.last().is_some_and(|c| c.is_zero()) {
                k.pop();
            }
            keys.push(k);
        }
        keys
    }

    /// True when the 2^n value keys are pairwise different.
    pub fn values_distinct(&self) -> bool {
        let mut keys = self.value_keys();
        keys.sort();
        keys.windows(2).all(|w| w[0] != w[1])
    }

    fn enclosures(&self, prec: u64) -> Vec<Enclosure> {
        let powers: Vec<Enclosure> = (0..self.n).map(|j| beta_power(&self.base, j as u128, prec)).collect();
        let mut out: Vec<Enclosure> = Vec::with_capacity(self.len());
        out.push(Enclosure::zero());
        for mask in 1..self.len() {
            let top = (usize::BITS - 1 - mask.leading_zeros()) as usize;
            let v = out[mask ^ (1 << top)].add(&powers[top], prec);
            out.push(v);
        }
        out
    }
}

pub fn beta_base_set(beta: Arc<AlgebraicReal>, n: u32, limits: &Limits) -> Result<BetaBaseSet> {
    if n == 0 {
        return Err(Error::input("level must be at least 1"));
    }
    if n > limits.base_set || n >= usize::BITS {
        return Err(Error::resource(alloc::format!("level {n} exceeds the digit-set cap {}", limits.base_set)));
    }
    beta.require_ifs_base()?;
    let set = BetaBaseSet { base: beta, n };
    if n <= DISTINCT_CHECK_LIMIT && !set.values_distinct() {
        return Err(Error::input("digit expansions are not unique for this base"));
    }
    Ok(set)
}

/// Certified upper bound on `min |q x − p|` over `p, q ∈ ℬ_n`, `(p, q) ≠ (0, 0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaBound {
    pub value: BigRational,
    /// Upper bound on `β^-n |q x − p|` for the same pair.
    pub scaled: BigRational,
    /// Digit masks of the witnessing pair.
    pub p: u64,
    pub q: u64,
}

pub fn lemma_upper_bound(beta: &Arc<AlgebraicReal>, param: &ParamValue, n: u32, limits: &Limits) -> Result<LemmaBound> {
    limits.check_enumeration(n)?;
    if !param.base().same_number(beta) {
        return Err(Error::input("parameter uses a different base"));
    }
    let set = BetaBaseSet { base: beta.clone(), n };
    let vals = set.enclosures(PREC);
    let x = param.enclosure(PREC)?;
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].mid(PREC).cmp(&vals[b].mid(PREC)).then(a.cmp(&b)));
    let mids: Vec<Dyadic> = order.iter().map(|&i| vals[i].mid(PREC)).collect();
    let mut best: Option<(Dyadic, u64, u64)> = None;
    for (q, qv) in vals.iter().enumerate() {
        let target = qv.mul(&x, PREC);
        let pos = mids.partition_point(|m| m < &target.mid(PREC));
        for k in pos.saturating_sub(1)..(pos + 1).min(mids.len()) {
            let p = order[k];
            if p == 0 && q == 0 {
                continue;
            }
            let d = target.sub(&vals[p], PREC).abs().hi().clone();
            let cand = (d, q as u64, p as u64);
            let take = match &best {
                None => true,
                Some(b) => (&cand.0, cand.1, cand.2) < (&b.0, b.1, b.2),
            };
            if take {
                best = Some(cand);
            }
        }
    }
    let (d, q, p) = best.expect("ℬ_n has at least two elements");
    let binv_n = beta_power(beta, n as u128, PREC).recip(PREC).expect("positive");
    let scaled = Enclosure::point(d.clone()).mul(&binv_n, PREC).hi().clone();
    Ok(LemmaBound { value: d.to_rational()?, scaled: scaled.to_rational()?, p, q })
}

/// Upper bound `≥ β^-n / a_(k+1)` on Δ_n, valid for every parameter in 𝒞[a_1, …, a_(k+1)]
/// once `p_k, q_k ∈ ℬ_n`.
pub fn convergent_witness_bound(cf: &CFExponents, k: usize, n: u128) -> Result<Dyadic> {
    if k + 1 > cf.len() {
        return Err(Error::input("the bound needs the element a_(k+1)"));
    }
    let conv = convergents(&cf.prefix(k)?)?;
    let pair = &conv[k];
    if !pair.p.is_in_beta_base(n) || !pair.q.is_in_beta_base(n) {
        return Err(Error::input("p_k and q_k are not in the digit set of this level"));
    }
    let e = n
        .checked_add(cf.exps()[k])
        .ok_or_else(|| Error::resource("exponent overflow in the witness bound"))?;
    let pow = beta_power(cf.base(), e, PREC);
    Ok(pow.recip(PREC).expect("positive").hi().clone())
}
