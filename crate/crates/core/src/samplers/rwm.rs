//! Random-walk Metropolis on the piecewise-constant density `exp(-phi([x]))`,
//! used to estimate lattice marginals when no closed form exists.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{replica_rng, ChainRng};
use crate::densities::Potential;
use crate::error::{Error, Result};
use crate::lattice::{check_finite, round_into, round_nearest, IntegerPoint};

pub const DEFAULT_RWM_ITERATIONS: usize = 500;
pub const DEFAULT_RWM_SAMPLES: usize = 200_000;

#[derive(Debug, Clone)]
pub struct RwmOracle {
    factor: DMatrix<f64>,
    iterations: usize,
}

impl RwmOracle {
    /// `cov` is the increment covariance; it must be symmetric positive definite.
    pub fn new(cov: DMatrix<f64>) -> Result<Self> {
        if !cov.is_square() {
            return Err(Error::InvalidInput("covariance must be square".into()));
        }
        if cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("covariance"));
        }
        let asym = (&cov - cov.transpose()).amax();
        if asym > 1e-12 * cov.amax().max(1.0) {
            return Err(Error::InvalidInput("covariance is not symmetric".into()));
        }
        let chol = cov
            .cholesky()
            .ok_or_else(|| Error::InvalidInput("covariance is not positive definite".into()))?;
        Ok(RwmOracle { factor: chol.l(), iterations: DEFAULT_RWM_ITERATIONS })
    }

    pub fn isotropic(dim: usize, variance: f64) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim) * variance)
    }

    pub fn with_iterations(mut self, iterations: usize) -> Result<Self> {
        if iterations == 0 {
            return Err(Error::InvalidInput("iterations must be positive".into()));
        }
        self.iterations = iterations;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// One restarted chain; returns the rounded final state and the accept count.
    pub(crate) fn run_chain<P: Potential + ?Sized>(&self, p: &P, x0: &[f64], rng: &mut ChainRng) -> (IntegerPoint, usize) {
        let d = x0.len();
        let mut x = x0.to_vec();
        let mut y = vec![0.0; d];
        let mut rx = vec![0.0; d];
        let mut ry = vec![0.0; d];
        round_into(&x, &mut rx);
        let mut phi_x = p.value(&rx);
        let mut accepts = 0;
        let mut g = DVector::zeros(d);
        for _ in 0..self.iterations {
            for gi in g.iter_mut() {
                *gi = StandardNormal.sample(rng);
            }
            let w = &self.factor * &g;
            for i in 0..d {
                y[i] = x[i] + w[i];
            }
            round_into(&y, &mut ry);
            let phi_y = p.value(&ry);
            let u: f64 = rng.random();
            if phi_y.is_finite() && u.ln() <= phi_x - phi_y {
                std::mem::swap(&mut x, &mut y);
                std::mem::swap(&mut rx, &mut ry);
                phi_x = phi_y;
                accepts += 1;
            }
        }
        (round_nearest(&x).expect("finite chain"), accepts)
    }

    /// `n_samples` independent restarts from `x0`; sample `k` uses replica seed `k`.
    pub fn sample<P: Potential + ?Sized>(&self, p: &P, x0: &[f64], n_samples: usize, seed: u64) -> Result<Vec<IntegerPoint>> {
        if x0.len() != self.dim() || p.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x0.len().min(p.dim()) });
        }
        check_finite(x0)?;
        let r0 = round_nearest(x0)?;
        if !p.value(&r0.to_real()).is_finite() {
            return Err(Error::NonFinite("potential at the rounded start point"));
        }
        Ok((0..n_samples)
            .into_par_iter()
            .map(|k| self.run_chain(p, x0, &mut replica_rng(seed, k as u64)).0)
            .collect())
    }
}

pub fn rwm_marginal_oracle<P: Potential + ?Sized>(
    p: &P,
    cov: DMatrix<f64>,
    x0: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<IntegerPoint>> {
    RwmOracle::new(cov)?.sample(p, x0, n_samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::IsotropicGaussianPotential;
    use crate::samplers::{chain_rng, DiscreteGaussian1d};

    struct Flat(usize);

    impl Potential for Flat {
        fn dim(&self) -> usize {
            self.0
        }
        fn value(&self, _: &[f64]) -> f64 {
            0.0
        }
        fn gradient(&self, _: &[f64], g: &mut [f64]) {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
    }

    #[test]
    fn zero_increment_never_moves() {
        let o = RwmOracle { factor: DMatrix::zeros(2, 2), iterations: 50 };
        let p = IsotropicGaussianPotential::centered(2, 1.0).unwrap();
        for s in 0..5 {
            let (z, _) = o.run_chain(&p, &[1.6, -0.2], &mut chain_rng(s));
            assert_eq!(z, IntegerPoint(vec![2, 0]));
        }
    }

    #[test]
    fn flat_potential_accepts_everything() {
        let o = RwmOracle::isotropic(3, 2.0).unwrap();
        let (_, acc) = o.run_chain(&Flat(3), &[0.0; 3], &mut chain_rng(1));
        assert_eq!(acc, DEFAULT_RWM_ITERATIONS);
    }

    #[test]
    fn rejects_non_pd() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(RwmOracle::new(m).is_err());
        assert!(RwmOracle::new(DMatrix::zeros(2, 2)).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(RwmOracle::new(m).is_err());
    }

    #[test]
    fn gaussian_marginal_matches_exact_pmf() {
        let p = IsotropicGaussianPotential::centered(1, 1.0).unwrap();
        let samples = rwm_marginal_oracle(&p, DMatrix::identity(1, 1) * 1.0, &[0.0], DEFAULT_RWM_SAMPLES, 9).unwrap();
        let exact = DiscreteGaussian1d::new(0.0, 1.0).unwrap();
        let mut counts = std::collections::BTreeMap::new();
        for s in &samples {
            *counts.entry(s.0[0]).or_insert(0usize) += 1;
        }
        let (lo, hi) = exact.support();
        let mut tvd = 0.0;
        for z in lo..=hi {
            let f = *counts.get(&z).unwrap_or(&0) as f64 / samples.len() as f64;
            tvd += 0.5 * (f - exact.pmf(z)).abs();
        }
        assert!(tvd < 0.01, "{tvd}");
    }
}
