use rand::Rng;

use super::ChainRng;
use crate::error::{Error, Result};

/// Support is truncated to `center ± TAIL_CUT * sigma`.
pub const TAIL_CUT: f64 = 12.0;

const REUSE_TOLERANCE: f64 = 1e-12;

/// `D_{Z, sigma, c}(z) ∝ exp(-(z - c)^2 / (2 sigma^2))`, sampled by inverting
/// a cumulative table over the truncated support.
#[derive(Debug, Clone)]
pub struct DiscreteGaussian1d {
    center: f64,
    sigma: f64,
    lo: i64,
    cumulative: Vec<f64>,
}

impl DiscreteGaussian1d {
    pub fn new(center: f64, sigma: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::NonFinite("discrete Gaussian center"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
        }
        let lo = (center - TAIL_CUT * sigma).ceil();
        let hi = (center + TAIL_CUT * sigma).floor();
        // a very narrow window can miss every integer; fall back to the nearest one
        let (lo, hi) = if lo > hi { (center.round(), center.round()) } else { (lo, hi) };
        let n = (hi - lo) as usize + 1;
        let inv = 1.0 / (2.0 * sigma * sigma);
        let mut cumulative = Vec::with_capacity(n);
        let mut total = 0.0;
        for k in 0..n {
            let z = lo + k as f64;
            total += (-(z - center) * (z - center) * inv).exp();
            cumulative.push(total);
        }
        Ok(DiscreteGaussian1d { center, sigma, lo: lo as i64, cumulative })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn support(&self) -> (i64, i64) {
        (self.lo, self.lo + self.cumulative.len() as i64 - 1)
    }

    pub fn pmf(&self, z: i64) -> f64 {
        let (lo, hi) = self.support();
        if z < lo || z > hi {
            return 0.0;
        }
        let k = (z - lo) as usize;
        let prev = if k == 0 { 0.0 } else { self.cumulative[k - 1] };
        (self.cumulative[k] - prev) / self.cumulative[self.cumulative.len() - 1]
    }

    pub fn sample(&self, rng: &mut ChainRng) -> i64 {
        let total = self.cumulative[self.cumulative.len() - 1];
        let t = rng.random::<f64>() * total;
        let k = self.cumulative.partition_point(|&c| c <= t).min(self.cumulative.len() - 1);
        self.lo + k as i64
    }
}

/// Keeps the last table and rebuilds it only when the parameters move.
#[derive(Debug, Clone, Default)]
pub struct DiscreteGaussianSampler {
    table: Option<DiscreteGaussian1d>,
}

impl DiscreteGaussianSampler {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sample(&mut self, center: f64, sigma: f64, rng: &mut ChainRng) -> Result<i64> {
        let reuse = matches!(&self.table, Some(t)
            if (t.center - center).abs() <= REUSE_TOLERANCE && (t.sigma - sigma).abs() <= REUSE_TOLERANCE);
        if !reuse {
            self.table = Some(DiscreteGaussian1d::new(center, sigma)?);
        }
        Ok(self.table.as_ref().expect("table present").sample(rng))
    }
}

pub fn discrete_gaussian_1d(center: f64, sigma: f64, rng: &mut ChainRng) -> Result<i64> {
    Ok(DiscreteGaussian1d::new(center, sigma)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::chain_rng;

    #[test]
    fn pmf_sums_to_one_and_is_symmetric() {
        let g = DiscreteGaussian1d::new(0.0, 1.5).unwrap();
        let (lo, hi) = g.support();
        assert_eq!((lo, hi), (-18, 18));
        let s: f64 = (lo..=hi).map(|z| g.pmf(z)).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!((g.pmf(3) - g.pmf(-3)).abs() < 1e-15);
    }

    #[test]
    fn empirical_frequencies() {
        let g = DiscreteGaussian1d::new(0.3, 1.0).unwrap();
        let mut rng = chain_rng(1);
        let n = 200_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..n {
            *counts.entry(g.sample(&mut rng)).or_insert(0u32) += 1;
        }
        for z in -3..=3 {
            let p = g.pmf(z);
            let f = *counts.get(&z).unwrap_or(&0) as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((f - p).abs() < 5.0 * se, "z={z}: {f} vs {p}");
        }
    }

    #[test]
    fn tiny_sigma_is_a_point_mass() {
        let g = DiscreteGaussian1d::new(2.2, 1e-3).unwrap();
        assert_eq!(g.support(), (2, 2));
        assert_eq!(g.sample(&mut chain_rng(0)), 2);
    }

    #[test]
    fn cached_sampler_matches_direct() {
        let mut s = DiscreteGaussianSampler::new();
        let mut a = chain_rng(4);
        let mut b = chain_rng(4);
        for k in 0..50 {
            let c = (k / 10) as f64 * 0.25;
            assert_eq!(s.sample(c, 2.0, &mut a).unwrap(), discrete_gaussian_1d(c, 2.0, &mut b).unwrap());
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DiscreteGaussian1d::new(0.0, 0.0).is_err());
        assert!(DiscreteGaussian1d::new(f64::NAN, 1.0).is_err());
    }
}
