#![no_std]

extern crate alloc;

pub mod algebraic;
pub mod cfrac;
pub mod epsilon;
pub mod error;
pub mod garsia;
pub mod ifs;
pub mod num;
pub mod poly;
pub mod synthesis;

pub use error::{Error, Result};
