//! Sampling lattice distributions with independent Metropolis-Hastings and
//! rounding.
//!
//! ```
//! use lattice_sampler::densities::{IsotropicGaussianPotential, SigmoidTarget};
//! use lattice_sampler::samplers::{imhr_run, ChainState, ExactGaussianBackend};
//!
//! let phi = IsotropicGaussianPotential::centered(2, 1.0).unwrap();
//! let backend = ExactGaussianBackend::for_isotropic(&phi).unwrap();
//! let target = SigmoidTarget::new(phi);
//! let mut chain = ChainState::new(&target, vec![0.0; 2], 0).unwrap();
//! let z = imhr_run(&target, &backend, &mut chain, 10, 5, 1).unwrap();
//! assert_eq!(z[0].dim(), 2);
//! ```

pub mod densities;
pub mod diagnostics;
pub mod error;
pub mod lattice;
pub mod samplers;
pub mod special;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lattices.md")]
    mod lattices {}
    #[doc = include_str!("../../../book/src/targets.md")]
    mod targets {}
    #[doc = include_str!("../../../book/src/imhr.md")]
    mod imhr {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
    #[doc = include_str!("../../../book/src/perfect-security.md")]
    mod perfect_security {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
