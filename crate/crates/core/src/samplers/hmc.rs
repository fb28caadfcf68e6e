//! Hamiltonian Monte Carlo used as an approximate proposal sampler.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{BackendKind, ChainRng, DrawStatus, ProposalBackend};
use crate::densities::{PerfectSecurityPotential, Potential};
use crate::error::{Error, Result};

/// Energy error above which a trajectory is treated as divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HmcParams {
    pub leapfrog_steps: usize,
    pub step_size: f64,
    pub momentum_variance: f64,
    /// HMC transitions per proposal draw, each chain restarted at `start`.
    pub inner_iterations: usize,
}

impl HmcParams {
    /// `L = floor(5 (2/d)^{1/4})` (at least one step), `eps = 1.2 (2/d)^{1/4}`,
    /// momentum variance 9, five transitions per draw.
    pub fn for_dimension(d: usize) -> Self {
        let s = (2.0 / d as f64).powf(0.25);
        HmcParams {
            leapfrog_steps: ((5.0 * s).floor() as usize).max(1),
            step_size: 1.2 * s,
            momentum_variance: 9.0,
            inner_iterations: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.leapfrog_steps == 0 || self.inner_iterations == 0 {
            return Err(Error::InvalidInput("HMC step counts must be positive".into()));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidInput(format!("bad HMC step size {}", self.step_size)));
        }
        if !(self.momentum_variance > 0.0 && self.momentum_variance.is_finite()) {
            return Err(Error::InvalidInput(format!("bad momentum variance {}", self.momentum_variance)));
        }
        Ok(())
    }
}

/// `steps` leapfrog steps for `H = phi(x) + |p|^2 / (2 m)`, in place.
/// `grad` must hold `grad phi(x)` on entry and holds it for the final `x` on exit.
pub fn leapfrog<P: Potential + ?Sized>(
    potential: &P,
    x: &mut [f64],
    p: &mut [f64],
    grad: &mut [f64],
    step_size: f64,
    steps: usize,
    momentum_variance: f64,
) {
    let half = 0.5 * step_size;
    let inv_m = 1.0 / momentum_variance;
    for _ in 0..steps {
        for (pi, g) in p.iter_mut().zip(grad.iter()) {
            *pi -= half * g;
        }
        for (xi, pi) in x.iter_mut().zip(p.iter()) {
            *xi += step_size * inv_m * pi;
        }
        potential.gradient(x, grad);
        for (pi, g) in p.iter_mut().zip(grad.iter()) {
            *pi -= half * g;
        }
    }
}

pub struct HmcBackend<P> {
    potential: P,
    params: HmcParams,
    start: Vec<f64>,
}

pub fn hmc_backend<P: Potential>(potential: P, params: HmcParams) -> Result<HmcBackend<P>> {
    HmcBackend::new(potential, params)
}

/// HMC proposals for the compact-spectrum density with the default tuning.
pub fn perfect_security_backend(d: usize) -> Result<HmcBackend<PerfectSecurityPotential>> {
    HmcBackend::new(PerfectSecurityPotential::unit_variance(d)?, HmcParams::for_dimension(d))
}

struct Buffers {
    x: Vec<f64>,
    p: Vec<f64>,
    grad: Vec<f64>,
    x_new: Vec<f64>,
    grad_new: Vec<f64>,
}

impl<P: Potential> HmcBackend<P> {
    pub fn new(potential: P, params: HmcParams) -> Result<Self> {
        params.validate()?;
        let start = vec![0.0; potential.dim()];
        if !potential.value(&start).is_finite() {
            return Err(Error::NonFinite("HMC start point has zero density"));
        }
        Ok(HmcBackend { potential, params, start })
    }

    pub fn with_start(mut self, start: Vec<f64>) -> Result<Self> {
        if start.len() != self.potential.dim() {
            return Err(Error::DimensionMismatch { expected: self.potential.dim(), got: start.len() });
        }
        if !self.potential.value(&start).is_finite() {
            return Err(Error::NonFinite("HMC start point has zero density"));
        }
        self.start = start;
        Ok(self)
    }

    pub fn params(&self) -> &HmcParams {
        &self.params
    }

    pub fn potential(&self) -> &P {
        &self.potential
    }

    /// Runs the inner chain once; returns false if any trajectory diverged.
    fn attempt(&self, rng: &mut ChainRng, b: &mut Buffers) -> bool {
        let m = self.params.momentum_variance;
        let sd = m.sqrt();
        b.x.copy_from_slice(&self.start);
        let mut phi = self.potential.value_and_gradient(&b.x, &mut b.grad);
        let mut clean = true;
        for _ in 0..self.params.inner_iterations {
            for pi in b.p.iter_mut() {
                let g: f64 = StandardNormal.sample(rng);
                *pi = sd * g;
            }
            let h0 = phi + kinetic(&b.p, m);
            b.x_new.copy_from_slice(&b.x);
            b.grad_new.copy_from_slice(&b.grad);
            leapfrog(
                &self.potential,
                &mut b.x_new,
                &mut b.p,
                &mut b.grad_new,
                self.params.step_size,
                self.params.leapfrog_steps,
                m,
            );
            let phi_new = self.potential.value(&b.x_new);
            let dh = phi_new + kinetic(&b.p, m) - h0;
            let u: f64 = rng.random();
            if !dh.is_finite() || dh.abs() > DIVERGENCE_THRESHOLD {
                clean = false;
                continue;
            }
            if u.ln() <= -dh {
                std::mem::swap(&mut b.x, &mut b.x_new);
                std::mem::swap(&mut b.grad, &mut b.grad_new);
                phi = phi_new;
            }
        }
        clean
    }
}

fn kinetic(p: &[f64], m: f64) -> f64 {
    p.iter().map(|v| v * v).sum::<f64>() / (2.0 * m)
}

impl<P: Potential> ProposalBackend for HmcBackend<P> {
    fn dim(&self) -> usize {
        self.start.len()
    }

    fn kind(&self) -> BackendKind {
        BackendKind::Hmc
    }

    fn draw(&self, rng: &mut ChainRng, out: &mut [f64]) -> DrawStatus {
        let d = self.start.len();
        let mut b = Buffers {
            x: vec![0.0; d],
            p: vec![0.0; d],
            grad: vec![0.0; d],
            x_new: vec![0.0; d],
            grad_new: vec![0.0; d],
        };
        let ok = self.attempt(rng, &mut b) || self.attempt(rng, &mut b);
        out.copy_from_slice(&b.x);
        if ok {
            DrawStatus::Ok
        } else {
            DrawStatus::Flagged
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::IsotropicGaussianPotential;
    use crate::samplers::chain_rng;

    #[test]
    fn default_tuning() {
        let p = HmcParams::for_dimension(2);
        assert_eq!(p.leapfrog_steps, 5);
        assert!((p.step_size - 1.2).abs() < 1e-15);
        let p = HmcParams::for_dimension(32);
        assert_eq!(p.leapfrog_steps, 2);
        assert!((p.step_size - 0.6).abs() < 1e-12);
        assert_eq!(HmcParams::for_dimension(100_000).leapfrog_steps, 1);
    }

    #[test]
    fn leapfrog_is_reversible() {
        let pot = PerfectSecurityPotential::unit_variance(3).unwrap();
        let mut x = vec![0.3, -0.2, 0.5];
        let x0 = x.clone();
        let mut p = vec![1.0, 2.0, -0.5];
        let p0 = p.clone();
        let mut g = vec![0.0; 3];
        pot.gradient(&x, &mut g);
        leapfrog(&pot, &mut x, &mut p, &mut g, 0.1, 20, 9.0);
        p.iter_mut().for_each(|v| *v = -*v);
        leapfrog(&pot, &mut x, &mut p, &mut g, 0.1, 20, 9.0);
        for i in 0..3 {
            assert!((x[i] - x0[i]).abs() < 1e-10);
            assert!((p[i] + p0[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn gaussian_marginal_is_close() {
        let pot = IsotropicGaussianPotential::centered(2, 1.0).unwrap();
        let b = HmcBackend::new(pot, HmcParams::for_dimension(2)).unwrap();
        let mut rng = chain_rng(8);
        let n = 40_000;
        let mut out = [0.0; 2];
        let mut s2 = 0.0;
        for _ in 0..n {
            assert_eq!(b.draw(&mut rng, &mut out), DrawStatus::Ok);
            s2 += out[0] * out[0];
        }
        let var = s2 / n as f64;
        assert!((var - 1.0).abs() < 0.05, "{var}");
    }

    struct Cliff;

    impl Potential for Cliff {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &[f64]) -> f64 {
            if x[0].abs() < 1e-3 {
                0.0
            } else {
                1e6 * x[0].abs()
            }
        }
        fn gradient(&self, x: &[f64], g: &mut [f64]) {
            g[0] = 1e6 * x[0].signum();
        }
        fn smoothness(&self) -> Option<f64> {
            None
        }
    }

    #[test]
    fn divergent_trajectories_are_flagged() {
        let b = HmcBackend::new(Cliff, HmcParams::for_dimension(1)).unwrap();
        let mut out = [1.0];
        assert_eq!(b.draw(&mut chain_rng(0), &mut out), DrawStatus::Flagged);
        assert!(out[0].is_finite());
    }
}
