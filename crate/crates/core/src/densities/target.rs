use super::{softplus, Potential};
use crate::error::{Error, Result};
use crate::lattice::{check_finite, round_into};

const LN_2: f64 = std::f64::consts::LN_2;

/// Reusable buffers for target evaluation.
#[derive(Debug, Clone)]
pub struct TargetScratch {
    rounded: Vec<f64>,
    grad: Vec<f64>,
}

impl TargetScratch {
    pub fn new(dim: usize) -> Self {
        TargetScratch { rounded: vec![0.0; dim], grad: vec![0.0; dim] }
    }
}

/// A density on `R^d` whose mass on the unit cube around each integer point
/// is proportional to `exp(-phi(z))`, so rounding a draw gives a lattice
/// sample.
pub trait LatticeTarget: Send + Sync {
    type Potential: Potential;

    fn potential(&self) -> &Self::Potential;

    fn dim(&self) -> usize {
        self.potential().dim()
    }

    /// Unnormalized log-density. May be `-inf` or NaN where the potential is
    /// undefined.
    fn log_density(&self, x: &[f64], scratch: &mut TargetScratch) -> f64;
}

/// Piecewise-sigmoidal target
///
/// ```text
/// pibar(x) ∝ 2 exp(-phi(xbar)) / (1 + exp(2 (x - xbar)^T grad phi(xbar)))
/// ```
///
/// with `xbar` the coordinate-wise rounding of `x`. On each unit cube it
/// matches the value and gradient direction of `exp(-phi)` at the centre,
/// and the antisymmetry of the sigmoid about the centre makes the cube mass
/// exactly `exp(-phi(z))`.
#[derive(Debug, Clone)]
pub struct SigmoidTarget<P> {
    potential: P,
}

impl<P: Potential> SigmoidTarget<P> {
    pub fn new(potential: P) -> Self {
        SigmoidTarget { potential }
    }

    pub fn into_inner(self) -> P {
        self.potential
    }
}

impl<P: Potential> LatticeTarget for SigmoidTarget<P> {
    type Potential = P;

    fn potential(&self) -> &P {
        &self.potential
    }

    #[inline]
    fn log_density(&self, x: &[f64], scratch: &mut TargetScratch) -> f64 {
        let TargetScratch { rounded, grad } = scratch;
        round_into(x, rounded);
        let phi = self.potential.value_and_gradient(rounded, grad);
        let mut a = 0.0;
        for ((xi, ri), gi) in x.iter().zip(rounded.iter()).zip(grad.iter()) {
            a += (xi - ri) * gi;
        }
        LN_2 - phi - softplus(2.0 * a)
    }
}

/// `pibar(x) = pi([x])`: constant on every unit cube. Rounding still yields
/// the lattice distribution, but an independence sampler against this
/// target is not geometrically ergodic even for Gaussians.
#[derive(Debug, Clone)]
pub struct PiecewiseConstantTarget<P> {
    potential: P,
}

impl<P: Potential> PiecewiseConstantTarget<P> {
    pub fn new(potential: P) -> Self {
        PiecewiseConstantTarget { potential }
    }
}

impl<P: Potential> LatticeTarget for PiecewiseConstantTarget<P> {
    type Potential = P;

    fn potential(&self) -> &P {
        &self.potential
    }

    fn log_density(&self, x: &[f64], scratch: &mut TargetScratch) -> f64 {
        round_into(x, &mut scratch.rounded);
        -self.potential.value(&scratch.rounded)
    }
}

fn checked_eval<T: LatticeTarget>(t: &T, x: &[f64]) -> Result<f64> {
    if x.len() != t.dim() {
        return Err(Error::DimensionMismatch { expected: t.dim(), got: x.len() });
    }
    check_finite(x)?;
    let v = t.log_density(x, &mut TargetScratch::new(x.len()));
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("target log-density"))
    }
}

/// `log 2 - phi(xbar) - softplus(2 (x - xbar)^T grad phi(xbar))`.
pub fn log_pi_bar_unnorm<P: Potential>(t: &SigmoidTarget<P>, x: &[f64]) -> Result<f64> {
    checked_eval(t, x)
}

/// `-phi([x])`.
pub fn piecewise_constant_log_target<P: Potential>(p: &P, x: &[f64]) -> Result<f64> {
    checked_eval(&PiecewiseConstantTarget::new(p), x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::IsotropicGaussianPotential;

    fn gauss1() -> IsotropicGaussianPotential {
        IsotropicGaussianPotential::centered(1, 1.0).unwrap()
    }

    #[test]
    fn integer_points_recover_potential() {
        let t = SigmoidTarget::new(IsotropicGaussianPotential::centered(2, 1.0).unwrap());
        let v = log_pi_bar_unnorm(&t, &[2.0, -1.0]).unwrap();
        assert!((v + 2.5).abs() < 1e-15);
    }

    #[test]
    fn flat_on_central_cube() {
        let t = SigmoidTarget::new(gauss1());
        assert_eq!(log_pi_bar_unnorm(&t, &[0.3]).unwrap(), 0.0);
    }

    #[test]
    fn one_dimensional_value() {
        let t = SigmoidTarget::new(gauss1());
        let got = log_pi_bar_unnorm(&t, &[1.3]).unwrap();
        let naive = (2.0 * (-0.5f64).exp() / (1.0 + (2.0 * 0.3f64 * 1.0).exp())).ln();
        let closed = 2f64.ln() - 0.5 - (1.0 + 0.6f64.exp()).ln();
        assert!((got - closed).abs() < 1e-14);
        assert!((got - naive).abs() < 1e-14);
    }

    #[test]
    fn piecewise_constant_examples() {
        let p = gauss1();
        assert_eq!(piecewise_constant_log_target(&p, &[0.49]).unwrap(), 0.0);
        assert_eq!(piecewise_constant_log_target(&p, &[0.51]).unwrap(), -0.5);
        assert_eq!(
            piecewise_constant_log_target(&p, &[2.1]).unwrap(),
            piecewise_constant_log_target(&p, &[2.4]).unwrap()
        );
    }

    #[test]
    fn rejects_bad_input() {
        let t = SigmoidTarget::new(gauss1());
        assert!(log_pi_bar_unnorm(&t, &[f64::NAN]).is_err());
        assert!(log_pi_bar_unnorm(&t, &[0.0, 0.0]).is_err());
    }
}
