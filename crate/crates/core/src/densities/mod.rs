//! Potentials `phi` (with `pi ∝ exp(-phi)`) and the lattice targets built
//! from them. Everything is unnormalized and in log-domain; normalizers
//! cancel in every Metropolis ratio.

mod gaussian;
mod perfect_security;
mod target;

pub use gaussian::{IsotropicGaussianPotential, PullbackGaussianPotential};
pub use perfect_security::{perfect_security_log_density, perfect_security_rho_for_unit_variance, PerfectSecurityPotential};
pub use target::{
    log_pi_bar_unnorm, piecewise_constant_log_target, LatticeTarget, PiecewiseConstantTarget, SigmoidTarget,
    TargetScratch,
};

use crate::error::{Error, Result};

/// `|a|` beyond which softplus switches to its asymptotic forms.
pub const SOFTPLUS_CUTOFF: f64 = 35.0;

/// A differentiable potential on `R^d`.
///
/// `value` may return `+inf` where the density vanishes or where the
/// potential is undefined; callers that need a hard error use
/// [`log_pi_unnorm`].
pub trait Potential: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64], grad: &mut [f64]);

    /// Lipschitz constant of the gradient, when known.
    fn smoothness(&self) -> Option<f64> {
        None
    }

    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        self.gradient(x, grad);
        self.value(x)
    }
}

impl<P: Potential + ?Sized> Potential for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        (**self).gradient(x, grad)
    }
    fn smoothness(&self) -> Option<f64> {
        (**self).smoothness()
    }
    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        (**self).value_and_gradient(x, grad)
    }
}

impl<P: Potential + ?Sized> Potential for Box<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        (**self).gradient(x, grad)
    }
    fn smoothness(&self) -> Option<f64> {
        (**self).smoothness()
    }
    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        (**self).value_and_gradient(x, grad)
    }
}

/// `log(1 + e^a)` without overflow.
#[inline]
pub fn softplus(a: f64) -> f64 {
    if a > SOFTPLUS_CUTOFF {
        a
    } else if a < -SOFTPLUS_CUTOFF {
        a.exp()
    } else {
        a.exp().ln_1p()
    }
}

/// `-phi(x)`, the unnormalized log proposal density.
pub fn log_pi_unnorm<P: Potential + ?Sized>(p: &P, x: &[f64]) -> Result<f64> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: x.len() });
    }
    let v = p.value(x);
    if v.is_finite() {
        Ok(-v)
    } else {
        Err(Error::NonFinite("potential"))
    }
}

pub(crate) fn squared_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}
