use crate::densities::Potential;
use crate::error::{Error, Result};
use crate::lattice::IntegerPoint;

const SUM_TOLERANCE: f64 = 1e-9;

/// Probability mass function on consecutive integers `lo, lo+1, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalPMF {
    lo: i64,
    probs: Vec<f64>,
}

impl MarginalPMF {
    pub fn new(lo: i64, probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidInput("empty pmf".into()));
        }
        if probs.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidInput("pmf entries must be finite and nonnegative".into()));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidInput(format!("pmf sums to {s}")));
        }
        Ok(MarginalPMF { lo, probs })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(lo: i64, weights: &[f64]) -> Result<Self> {
        let s: f64 = weights.iter().sum();
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidInput("weights must have positive finite sum".into()));
        }
        Self::new(lo, weights.iter().map(|w| w / s).collect())
    }

    pub fn from_counts(lo: i64, counts: &[u64]) -> Result<Self> {
        let w: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        Self::from_weights(lo, &w)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.probs.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, z: i64) -> f64 {
        if z < self.lo || z > self.hi() {
            0.0
        } else {
            self.probs[(z - self.lo) as usize]
        }
    }

    pub fn mean(&self) -> f64 {
        (self.lo..=self.hi()).map(|z| z as f64 * self.prob(z)).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        (self.lo..=self.hi()).map(|z| (z as f64 - m).powi(2) * self.prob(z)).sum()
    }
}

/// Half the L1 distance; missing entries count as zero.
pub fn tvd(p: &MarginalPMF, q: &MarginalPMF) -> f64 {
    let lo = p.lo().min(q.lo());
    let hi = p.hi().max(q.hi());
    let s: f64 = (lo..=hi).map(|z| (p.prob(z) - q.prob(z)).abs()).sum();
    (0.5 * s).clamp(0.0, 1.0)
}

/// `P(z) ∝ exp(-z^2 / (2 sigma^2))` on `[-window, window]`.
pub fn exact_marginal_isotropic(sigma2: f64, window: i64) -> Result<MarginalPMF> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidInput(format!("sigma2 must be positive, got {sigma2}")));
    }
    if (window as f64) < 8.0 * sigma2.sqrt() {
        return Err(Error::InvalidInput(format!("window {window} is below 8 sigma")));
    }
    let w: Vec<f64> = (-window..=window).map(|z| (-(z * z) as f64 / (2.0 * sigma2)).exp()).collect();
    MarginalPMF::from_weights(-window, &w)
}

/// Marginals of `exp(-phi(z))` by summing over the box `[-window, window]^d`.
/// Intended for `d <= 3`.
pub fn exact_marginals_truncated<P: Potential + ?Sized>(p: &P, window: i64) -> Result<Vec<MarginalPMF>> {
    let d = p.dim();
    if d == 0 || d > 3 {
        return Err(Error::InvalidInput(format!("truncated-sum oracle supports 1 <= d <= 3, got {d}")));
    }
    if window < 1 {
        return Err(Error::InvalidInput("window must be positive".into()));
    }
    let side = (2 * window + 1) as usize;
    let mut weights = vec![vec![0.0; side]; d];
    let mut z = vec![-window; d];
    let mut x = vec![0.0; d];
    loop {
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi = *zi as f64;
        }
        let w = (-p.value(&x)).exp();
        for i in 0..d {
            weights[i][(z[i] + window) as usize] += w;
        }
        let mut k = 0;
        loop {
            if k == d {
                return weights.iter().map(|w| MarginalPMF::from_weights(-window, w)).collect();
            }
            z[k] += 1;
            if z[k] <= window {
                break;
            }
            z[k] = -window;
            k += 1;
        }
    }
}

/// Per-coordinate empirical marginals over each coordinate's observed range.
pub fn marginals_from_samples(samples: &[IntegerPoint]) -> Result<Vec<MarginalPMF>> {
    let first = samples.first().ok_or_else(|| Error::InvalidInput("no samples".into()))?;
    let d = first.dim();
    (0..d)
        .map(|i| {
            let mut lo = i64::MAX;
            let mut hi = i64::MIN;
            for s in samples {
                if s.dim() != d {
                    return Err(Error::DimensionMismatch { expected: d, got: s.dim() });
                }
                lo = lo.min(s.0[i]);
                hi = hi.max(s.0[i]);
            }
            let mut counts = vec![0u64; (hi - lo + 1) as usize];
            for s in samples {
                counts[(s.0[i] - lo) as usize] += 1;
            }
            MarginalPMF::from_counts(lo, &counts)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::IsotropicGaussianPotential;

    #[test]
    fn tvd_examples() {
        let p = MarginalPMF::new(0, vec![0.5, 0.5]).unwrap();
        let q = MarginalPMF::new(0, vec![1.0, 0.0]).unwrap();
        assert_eq!(tvd(&p, &p), 0.0);
        assert!((tvd(&p, &q) - 0.5).abs() < 1e-15);
        let r = MarginalPMF::new(5, vec![1.0]).unwrap();
        assert_eq!(tvd(&p, &r), 1.0);
    }

    #[test]
    fn isotropic_marginal() {
        let m = exact_marginal_isotropic(1.0, 10).unwrap();
        assert!((m.prob(0) / m.prob(1) - 0.5f64.exp()).abs() < 1e-12);
        for z in 1..=10 {
            assert_eq!(m.prob(z), m.prob(-z));
        }
        // independent oracle: direct truncated sum
        let s: f64 = (-10..=10).map(|z: i64| (-(z * z) as f64 / 2.0).exp()).sum();
        assert!((m.prob(0) - 1.0 / s).abs() < 1e-15);
        assert!((m.prob(0) - 0.398942).abs() < 1e-6);
        assert!(exact_marginal_isotropic(1.0, 7).is_err());
    }

    #[test]
    fn truncated_oracle_factorizes_for_isotropic() {
        let p = IsotropicGaussianPotential::centered(2, 1.0).unwrap();
        let ms = exact_marginals_truncated(&p, 10).unwrap();
        let m1 = exact_marginal_isotropic(1.0, 10).unwrap();
        for m in &ms {
            assert!(tvd(m, &m1) < 1e-14);
        }
    }

    #[test]
    fn pmf_validation() {
        assert!(MarginalPMF::new(0, vec![0.5, 0.6]).is_err());
        assert!(MarginalPMF::new(0, vec![-0.1, 1.1]).is_err());
        assert!(MarginalPMF::new(0, vec![]).is_err());
    }

    #[test]
    fn samples_to_marginals() {
        let s = vec![IntegerPoint(vec![0, 2]), IntegerPoint(vec![1, 2]), IntegerPoint(vec![1, 3]), IntegerPoint(vec![1, 2])];
        let m = marginals_from_samples(&s).unwrap();
        assert_eq!(m[0].lo(), 0);
        assert_eq!(m[0].probs(), &[0.25, 0.75]);
        assert_eq!(m[1].lo(), 2);
        assert_eq!(m[1].probs(), &[0.75, 0.25]);
    }
}
