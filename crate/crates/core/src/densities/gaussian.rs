use nalgebra::{DMatrix, DVector};

use super::{squared_norm, Potential};
use crate::error::{Error, Result};
use crate::lattice::GeneratorMatrix;

/// `phi(x) = ||x - c||^2 / (2 sigma^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropicGaussianPotential {
    variance: f64,
    center: Vec<f64>,
}

impl IsotropicGaussianPotential {
    pub fn new(variance: f64, center: Vec<f64>) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::InvalidInput(format!("variance must be positive, got {variance}")));
        }
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("center must be a non-empty finite vector".into()));
        }
        Ok(IsotropicGaussianPotential { variance, center })
    }

    /// Zero-centred potential in dimension `dim`.
    pub fn centered(dim: usize, variance: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        Self::new(variance, vec![0.0; dim])
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn sigma(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }
}

impl Potential for IsotropicGaussianPotential {
    fn dim(&self) -> usize {
        self.center.len()
    }

    #[inline]
    fn value(&self, x: &[f64]) -> f64 {
        let s: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        s / (2.0 * self.variance)
    }

    #[inline]
    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        let inv = 1.0 / self.variance;
        for ((g, a), c) in grad.iter_mut().zip(x).zip(&self.center) {
            *g = (a - c) * inv;
        }
    }

    fn smoothness(&self) -> Option<f64> {
        Some(1.0 / self.variance)
    }
}

/// Pullback of a lattice Gaussian: `phi(x) = ||B x - c||^2 / (2 sigma^2)`.
#[derive(Debug, Clone)]
pub struct PullbackGaussianPotential {
    basis: GeneratorMatrix,
    variance: f64,
    center: DVector<f64>,
    smoothness: f64,
}

impl PullbackGaussianPotential {
    pub fn new(basis: GeneratorMatrix, variance: f64) -> Result<Self> {
        let d = basis.dim();
        Self::with_center(basis, variance, vec![0.0; d])
    }

    pub fn with_center(basis: GeneratorMatrix, variance: f64, center: Vec<f64>) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::InvalidInput(format!("variance must be positive, got {variance}")));
        }
        if center.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), got: center.len() });
        }
        let m = basis.matrix();
        let gram: DMatrix<f64> = m.transpose() * m;
        let lambda_max = gram.symmetric_eigenvalues().max();
        Ok(PullbackGaussianPotential {
            smoothness: lambda_max / variance,
            center: DVector::from_vec(center),
            basis,
            variance,
        })
    }

    pub fn basis(&self) -> &GeneratorMatrix {
        &self.basis
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn center(&self) -> &[f64] {
        self.center.as_slice()
    }

    fn residual(&self, x: &[f64]) -> DVector<f64> {
        self.basis.matrix() * DVector::from_column_slice(x) - &self.center
    }
}

impl Potential for PullbackGaussianPotential {
    fn dim(&self) -> usize {
        self.basis.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        squared_norm(self.residual(x).as_slice()) / (2.0 * self.variance)
    }

    fn gradient(&self, x: &[f64], grad: &mut [f64]) {
        let g = self.basis.matrix().tr_mul(&self.residual(x)) / self.variance;
        grad.copy_from_slice(g.as_slice());
    }

    fn value_and_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let r = self.residual(x);
        let g = self.basis.matrix().tr_mul(&r) / self.variance;
        grad.copy_from_slice(g.as_slice());
        squared_norm(r.as_slice()) / (2.0 * self.variance)
    }

    fn smoothness(&self) -> Option<f64> {
        Some(self.smoothness)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::log_pi_unnorm;
    use crate::lattice::leech_generator;

    #[test]
    fn isotropic_examples() {
        let p = IsotropicGaussianPotential::centered(2, 1.0).unwrap();
        assert_eq!(log_pi_unnorm(&p, &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(log_pi_unnorm(&p, &[1.0, 1.0]).unwrap(), -1.0);
        assert_eq!(p.smoothness(), Some(1.0));
        assert!(log_pi_unnorm(&p, &[1.0]).is_err());
        assert!(IsotropicGaussianPotential::centered(2, -1.0).is_err());
    }

    #[test]
    fn leech_pullback_value_on_last_unit_vector() {
        let p = PullbackGaussianPotential::new(leech_generator(), 4.0).unwrap();
        let mut e = vec![0.0; 24];
        e[23] = 1.0;
        // ||last column||^2 = (9 + 23) / 8 = 4
        assert!((log_pi_unnorm(&p, &e).unwrap() + 4.0 / 8.0).abs() < 1e-14);
    }

    #[test]
    fn pullback_identity_matches_isotropic() {
        let a = PullbackGaussianPotential::new(GeneratorMatrix::identity(3), 2.0).unwrap();
        let b = IsotropicGaussianPotential::centered(3, 2.0).unwrap();
        let x = [0.3, -1.2, 2.0];
        assert!((a.value(&x) - b.value(&x)).abs() < 1e-15);
        assert!((a.smoothness().unwrap() - b.smoothness().unwrap()).abs() < 1e-12);
    }

    #[test]
    fn pullback_smoothness_is_top_eigenvalue() {
        let b = GeneratorMatrix::diagonal(&[1.0, 3.0]).unwrap();
        let p = PullbackGaussianPotential::new(b, 0.5).unwrap();
        assert!((p.smoothness().unwrap() - 18.0).abs() < 1e-12);
    }
}
