use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use super::{BackendKind, ChainRng, DrawStatus, ProposalBackend};
use crate::densities::{IsotropicGaussianPotential, PullbackGaussianPotential};
use crate::error::{Error, Result};

/// Exact sampler for `N(c, sigma^2 I)` or its pullback `B^{-1} N(c, sigma^2 I)`.
#[derive(Debug, Clone)]
pub struct ExactGaussianBackend {
    dim: usize,
    sigma: f64,
    center: Vec<f64>,
    inverse: Option<DMatrix<f64>>,
}

impl ExactGaussianBackend {
    pub fn isotropic(dim: usize, variance: f64) -> Result<Self> {
        Self::for_isotropic(&IsotropicGaussianPotential::centered(dim, variance)?)
    }

    pub fn for_isotropic(p: &IsotropicGaussianPotential) -> Result<Self> {
        Ok(ExactGaussianBackend { dim: p.center().len(), sigma: p.sigma(), center: p.center().to_vec(), inverse: None })
    }

    pub fn for_pullback(p: &PullbackGaussianPotential) -> Result<Self> {
        let b = p.basis();
        let inverse = b
            .matrix()
            .clone()
            .try_inverse()
            .ok_or(Error::SingularMatrix { abs_det: b.abs_det(), ratio: 0.0 })?;
        Ok(ExactGaussianBackend {
            dim: b.dim(),
            sigma: p.variance().sqrt(),
            center: p.center().to_vec(),
            inverse: Some(inverse),
        })
    }
}

impl ProposalBackend for ExactGaussianBackend {
    fn dim(&self) -> usize {
        self.dim
    }

    fn kind(&self) -> BackendKind {
        BackendKind::ExactGaussian
    }

    fn draw(&self, rng: &mut ChainRng, out: &mut [f64]) -> DrawStatus {
        for (o, c) in out.iter_mut().zip(&self.center) {
            let g: f64 = StandardNormal.sample(rng);
            *o = c + self.sigma * g;
        }
        if let Some(inv) = &self.inverse {
            let y = inv * DVector::from_column_slice(out);
            out.copy_from_slice(y.as_slice());
        }
        DrawStatus::Ok
    }
}
