//! Klein's randomized nearest-plane sampler for `D_{L(B), sigma, c}`.

use super::{ChainRng, DiscreteGaussianSampler};
use crate::error::{Error, Result};
use crate::lattice::{GeneratorMatrix, IntegerPoint};

/// Conditional widths `sigma / ||b~_i||` below this are rejected.
pub const MIN_CONDITIONAL_SIGMA: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct KleinParams {
    basis: GeneratorMatrix,
    sigma: f64,
    center: Vec<f64>,
    gso: Vec<Vec<f64>>,
    gso_norms_sq: Vec<f64>,
    mu: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl KleinParams {
    pub fn new(basis: GeneratorMatrix, sigma: f64, center: Vec<f64>) -> Result<Self> {
        let d = basis.dim();
        if center.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: center.len() });
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
        }
        // modified Gram-Schmidt on the columns
        let mut gso: Vec<Vec<f64>> = (0..d).map(|i| basis.column(i)).collect();
        let mut mu = vec![vec![0.0; d]; d];
        let mut norms = vec![0.0; d];
        for i in 0..d {
            for j in 0..i {
                let (head, tail) = gso.split_at_mut(i);
                let m = dot(&tail[0], &head[j]) / norms[j];
                mu[i][j] = m;
                for (t, h) in tail[0].iter_mut().zip(&head[j]) {
                    *t -= m * h;
                }
            }
            mu[i][i] = 1.0;
            norms[i] = dot(&gso[i], &gso[i]);
        }
        for n in &norms {
            let s = sigma / n.sqrt();
            if !(s >= MIN_CONDITIONAL_SIGMA) {
                return Err(Error::Domain { what: "conditional width sigma / ||b~_i|| too small", value: s });
            }
        }
        Ok(KleinParams { basis, sigma, center, gso, gso_norms_sq: norms, mu })
    }

    pub fn basis(&self) -> &GeneratorMatrix {
        &self.basis
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn gso_vectors(&self) -> &[Vec<f64>] {
        &self.gso
    }

    pub fn gso_norms_sq(&self) -> &[f64] {
        &self.gso_norms_sq
    }

    /// `mu[i][j] = <b_i, b~_j> / ||b~_j||^2` for `j < i`.
    pub fn mu(&self) -> &[Vec<f64>] {
        &self.mu
    }
}

/// Returns integer coordinates `z` of the sampled lattice point `B z`.
pub fn klein_sample(params: &KleinParams, rng: &mut ChainRng, sampler: &mut DiscreteGaussianSampler) -> Result<IntegerPoint> {
    let d = params.basis.dim();
    let mut c = params.center.clone();
    let mut z = vec![0i64; d];
    for i in (0..d).rev() {
        let ci = dot(&c, &params.gso[i]) / params.gso_norms_sq[i];
        let si = params.sigma / params.gso_norms_sq[i].sqrt();
        let zi = sampler.sample(ci, si, rng)?;
        z[i] = zi;
        let b = params.basis.matrix().column(i);
        for (ck, bk) in c.iter_mut().zip(b.iter()) {
            *ck -= zi as f64 * bk;
        }
    }
    Ok(IntegerPoint(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::leech_generator;
    use crate::samplers::{chain_rng, DiscreteGaussian1d};

    #[test]
    fn gso_is_orthogonal_on_leech() {
        let p = KleinParams::new(leech_generator(), 2.0, vec![0.0; 24]).unwrap();
        let g = p.gso_vectors();
        for i in 0..24 {
            for j in 0..i {
                assert!(dot(&g[i], &g[j]).abs() < 1e-9, "{i},{j}");
            }
        }
        // the product of GSO norms is |det B|
        let prod: f64 = p.gso_norms_sq().iter().map(|n| n.sqrt()).product();
        assert!((prod - 1.0).abs() < 1e-9);
    }

    #[test]
    fn identity_basis_reduces_to_coordinatewise() {
        let p = KleinParams::new(GeneratorMatrix::identity(2), 1.0, vec![0.0, 0.0]).unwrap();
        let oracle = DiscreteGaussian1d::new(0.0, 1.0).unwrap();
        let mut rng = chain_rng(3);
        let mut s = DiscreteGaussianSampler::new();
        let n = 100_000;
        let mut zeros = 0;
        for _ in 0..n {
            let z = klein_sample(&p, &mut rng, &mut s).unwrap();
            if z.0[1] == 0 {
                zeros += 1;
            }
        }
        let f = zeros as f64 / n as f64;
        let q = oracle.pmf(0);
        assert!((f - q).abs() < 5.0 * (q * (1.0 - q) / n as f64).sqrt());
    }

    #[test]
    fn too_small_sigma_is_rejected() {
        assert!(KleinParams::new(GeneratorMatrix::identity(2), 1e-9, vec![0.0; 2]).is_err());
    }
}
