//! Markov-chain and direct samplers.
//!
//! The independence sampler in [`imhr`] draws proposals from a
//! [`ProposalBackend`] that (ideally) samples the continuous density
//! `pi ∝ exp(-phi)`; accepted states are rounded to give lattice samples.

mod discrete_gaussian;
mod gaussian;
mod hmc;
mod imhr;
pub mod io;
mod klein;
mod radial;
mod rwm;

pub use discrete_gaussian::{discrete_gaussian_1d, DiscreteGaussian1d, DiscreteGaussianSampler, TAIL_CUT};
pub use gaussian::ExactGaussianBackend;
pub use hmc::{hmc_backend, leapfrog, perfect_security_backend, HmcBackend, HmcParams, DIVERGENCE_THRESHOLD};
pub use imhr::{imhr_run, imhr_step, ChainState, StepOutcome};
pub use klein::{klein_sample, KleinParams, MIN_CONDITIONAL_SIGMA};
pub use radial::RadialRejectionBackend;
pub use rwm::{rwm_marginal_oracle, RwmOracle, DEFAULT_RWM_ITERATIONS, DEFAULT_RWM_SAMPLES};

use rand::SeedableRng;

/// Generator used by every chain. Streams are reproducible across platforms.
pub type ChainRng = rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replica `index` under master seed `seed`: the `index`-th output
/// of a SplitMix64 generator started at `seed`.
#[inline]
pub fn replica_seed(seed: u64, index: u64) -> u64 {
    mix64(seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

pub fn chain_rng(seed: u64) -> ChainRng {
    ChainRng::seed_from_u64(seed)
}

pub fn replica_rng(seed: u64, index: u64) -> ChainRng {
    chain_rng(replica_seed(seed, index))
}

/// Which family of algorithm produces the proposals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BackendKind {
    ExactGaussian,
    Hmc,
    RejectionRadial,
    Custom,
}

/// Outcome of a single proposal draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrawStatus {
    Ok,
    /// The backend hit a numerical problem it could not recover from; the
    /// returned point is still finite but may not follow the intended law.
    Flagged,
}

/// A sampler for the proposal density `pi`, independent of the chain state.
pub trait ProposalBackend: Send + Sync {
    fn dim(&self) -> usize;

    fn kind(&self) -> BackendKind;

    fn draw(&self, rng: &mut ChainRng, out: &mut [f64]) -> DrawStatus;
}

impl<B: ProposalBackend + ?Sized> ProposalBackend for &B {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn kind(&self) -> BackendKind {
        (**self).kind()
    }
    fn draw(&self, rng: &mut ChainRng, out: &mut [f64]) -> DrawStatus {
        (**self).draw(rng, out)
    }
}

impl<B: ProposalBackend + ?Sized> ProposalBackend for Box<B> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn kind(&self) -> BackendKind {
        (**self).kind()
    }
    fn draw(&self, rng: &mut ChainRng, out: &mut [f64]) -> DrawStatus {
        (**self).draw(rng, out)
    }
}
