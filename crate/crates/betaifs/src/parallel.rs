//! Multi-threaded drivers for the enumeration-heavy operations.

use betaifs_core::ifs::{delta_n_with, DeltaResult, IFSParams, Limits};
use betaifs_core::synthesis::{verify_certificate_with, SynthesisCertificate, VerifyOptions, VerifyReport};
use betaifs_core::Result;
use rayon::prelude::*;

/// Δ_n with the prefix blocks sorted on the rayon pool; same result as the sequential version.
pub fn delta_n_par(params: &IFSParams, n: u32, limits: &Limits) -> Result<DeltaResult> {
    delta_n_with(params, n, limits, |engine| {
        engine.block_prefixes().into_par_iter().map(|p| engine.block(p)).collect()
    })
}

pub fn verify_par(cert: &SynthesisCertificate, opts: &VerifyOptions, limits: &Limits) -> Result<VerifyReport> {
    verify_certificate_with(cert, opts, |p, n| delta_n_par(p, n, limits))
}
