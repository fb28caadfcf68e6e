//! Convergence diagnostics: marginal total variation, autocorrelation,
//! acceptance statistics and the ergodicity bounds.

mod acf;
mod bounds;
mod curve;
pub mod csv;
mod pmf;
mod probe;

pub use acf::{acf, DEFAULT_ACF_SAMPLES};
pub use bounds::{ergodicity_delta, inexact_alg_bound, isotropic_gaussian_z_over_k, uniform_ergodicity_bound};
pub use curve::{tvd_m_curve, TVDMCurve, TvdMOptions, DEFAULT_REPLICAS};
pub use pmf::{exact_marginal_isotropic, exact_marginals_truncated, marginals_from_samples, tvd, MarginalPMF};
pub use probe::appendix_a_degeneracy_probe;

use crate::error::{Error, Result};
use crate::samplers::ChainState;

/// Fraction of accepted proposals.
pub fn average_acceptance(state: &ChainState) -> Result<f64> {
    if state.steps() == 0 {
        return Err(Error::InvalidInput("no steps taken".into()));
    }
    Ok(state.accepts() as f64 / state.steps() as f64)
}

/// `max_i sqrt(S_i / replicas)` for oracle supports of size `S_i`.
pub fn noise_floor(oracle: &[MarginalPMF], replicas: usize) -> f64 {
    oracle
        .iter()
        .map(|m| (m.len() as f64 / replicas as f64).sqrt())
        .fold(0.0, f64::max)
}
