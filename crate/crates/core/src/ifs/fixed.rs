//! Fixed-point accumulators: `i128` when the magnitudes allow, big integers otherwise.

use core::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

pub(crate) trait Fixed: Clone + Ord + Send + Sync + Debug {
    fn from_big(b: &BigInt) -> Self;
    fn to_big(&self) -> BigInt;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn zero() -> Self;
}

impl Fixed for i128 {
    fn from_big(b: &BigInt) -> Self {
        b.to_i128().expect("fixed-point value exceeds i128")
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn zero() -> Self {
        0
    }
}

impl Fixed for BigInt {
    fn from_big(b: &BigInt) -> Self {
        b.clone()
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
}
