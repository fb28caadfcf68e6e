//! Exact sampler for the compact-spectrum density by rejection on the radius.
//!
//! With `x = 2 rho u theta`, the radius has density `f(u) ∝ u^{d-1} g(u)^2`
//! on `[0, guard]` and `theta` is uniform on the sphere. The envelope is
//! constant up to the second Bessel zero and proportional to `u^{-4}` beyond.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{BackendKind, ChainRng, DrawStatus, ProposalBackend};
use crate::densities::{PerfectSecurityPotential, Potential};
use crate::error::{Error, Result};
use crate::special::second_zero;

const ENVELOPE_MARGIN: f64 = 1.05;
const GRID_STEP: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct RadialRejectionBackend {
    potential: PerfectSecurityPotential,
    split: f64,
    inner_height: f64,
    tail_constant: f64,
    inner_mass: f64,
    tail_mass: f64,
}

impl RadialRejectionBackend {
    pub fn new(potential: PerfectSecurityPotential) -> Result<Self> {
        let split = second_zero(potential.order())?;
        let guard = potential.guard();
        if split >= guard {
            return Err(Error::InvalidInput("second zero lies beyond the density guard".into()));
        }
        let log_f = |u: f64| Self::log_radial(&potential, u);

        let n_inner = (split / GRID_STEP).ceil() as usize;
        let mut inner_max = f64::NEG_INFINITY;
        for k in 0..=n_inner {
            inner_max = inner_max.max(log_f(split * k as f64 / n_inner as f64)?);
        }
        let n_tail = ((guard - split) / GRID_STEP).ceil() as usize;
        let mut tail_max = f64::NEG_INFINITY;
        for k in 0..=n_tail {
            let u = split + (guard - split) * k as f64 / n_tail as f64;
            tail_max = tail_max.max(log_f(u)? + 4.0 * u.ln());
        }
        if !(inner_max.is_finite() && tail_max.is_finite()) {
            return Err(Error::NonFinite("radial envelope"));
        }
        let inner_height = ENVELOPE_MARGIN * inner_max.exp();
        let tail_constant = ENVELOPE_MARGIN * tail_max.exp();
        Ok(RadialRejectionBackend {
            inner_mass: inner_height * split,
            tail_mass: tail_constant * (split.powi(-3) - guard.powi(-3)) / 3.0,
            potential,
            split,
            inner_height,
            tail_constant,
        })
    }

    pub fn unit_variance(d: usize) -> Result<Self> {
        Self::new(PerfectSecurityPotential::unit_variance(d)?)
    }

    pub fn potential(&self) -> &PerfectSecurityPotential {
        &self.potential
    }

    /// `log f(u) = (d-1) log u + 2 log |g(u)|`.
    pub fn log_radial(p: &PerfectSecurityPotential, u: f64) -> Result<f64> {
        let jac = (p.dim() - 1) as f64 * u.ln();
        Ok(jac + p.log_radial_profile(u)?)
    }

    fn envelope(&self, u: f64) -> f64 {
        if u <= self.split {
            self.inner_height
        } else {
            self.tail_constant * u.powi(-4)
        }
    }

    pub fn sample_radius(&self, rng: &mut ChainRng) -> f64 {
        let guard = self.potential.guard();
        let total = self.inner_mass + self.tail_mass;
        loop {
            let pick: f64 = rng.random::<f64>() * total;
            let v: f64 = rng.random();
            let u = if pick < self.inner_mass {
                v * self.split
            } else {
                let a = self.split.powi(-3);
                (a - v * (a - guard.powi(-3))).powf(-1.0 / 3.0)
            };
            let f = match Self::log_radial(&self.potential, u) {
                Ok(l) => l.exp(),
                Err(_) => continue,
            };
            let env = self.envelope(u);
            debug_assert!(f <= env, "envelope violated at u = {u}");
            if rng.random::<f64>() * env < f {
                return u;
            }
        }
    }
}

impl ProposalBackend for RadialRejectionBackend {
    fn dim(&self) -> usize {
        self.potential.dim()
    }

    fn kind(&self) -> BackendKind {
        BackendKind::RejectionRadial
    }

    fn draw(&self, rng: &mut ChainRng, out: &mut [f64]) -> DrawStatus {
        let u = self.sample_radius(rng);
        let mut norm2 = 0.0;
        while norm2 == 0.0 {
            for o in out.iter_mut() {
                *o = StandardNormal.sample(rng);
            }
            norm2 = out.iter().map(|v| v * v).sum::<f64>();
        }
        let scale = 2.0 * self.potential.rho() * u / norm2.sqrt();
        out.iter_mut().for_each(|o| *o *= scale);
        DrawStatus::Ok
    }
}
