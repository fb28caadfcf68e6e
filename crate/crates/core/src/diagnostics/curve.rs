use rayon::prelude::*;

use super::{noise_floor, tvd, MarginalPMF};
use crate::densities::LatticeTarget;
use crate::error::{Error, Result};
use crate::lattice::{check_finite, round_scalar};
use crate::samplers::{imhr_step, replica_rng, ChainState, ProposalBackend};

pub const DEFAULT_REPLICAS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct TvdMOptions {
    pub replicas: usize,
    pub t_values: Vec<u64>,
    pub seed: u64,
}

/// `TVD_m(t)`: the largest per-coordinate total variation between the
/// replica histogram after `t` steps and the oracle marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct TVDMCurve {
    pub iterations: Vec<u64>,
    pub values: Vec<f64>,
    pub replicas: usize,
    pub noise_floor: f64,
    /// Recorded coordinates that fell outside the histogram window.
    pub out_of_window: u64,
}

struct Layout {
    lo: Vec<i64>,
    offset: Vec<usize>,
    per_t: usize,
}

impl Layout {
    fn new(oracle: &[MarginalPMF], x0: &[f64]) -> Self {
        let mut lo = Vec::with_capacity(oracle.len());
        let mut offset = Vec::with_capacity(oracle.len() + 1);
        offset.push(0);
        for (m, x) in oracle.iter().zip(x0) {
            let w = (8.0 * m.variance().sqrt() + x.abs()).ceil() as i64;
            let l = m.lo().min(-w);
            let h = m.hi().max(w);
            lo.push(l);
            offset.push(offset[offset.len() - 1] + (h - l + 1) as usize);
        }
        let per_t = offset[offset.len() - 1];
        Layout { lo, offset, per_t }
    }

    fn bins(&self, i: usize) -> usize {
        self.offset[i + 1] - self.offset[i]
    }
}

#[derive(Clone)]
struct Hist {
    counts: Vec<u64>,
    out_of_window: u64,
}

impl Hist {
    fn merge(mut self, other: Hist) -> Hist {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.out_of_window += other.out_of_window;
        self
    }
}

pub fn tvd_m_curve<T, B>(
    target: &T,
    backend: &B,
    x0: &[f64],
    oracle: &[MarginalPMF],
    options: &TvdMOptions,
) -> Result<TVDMCurve>
where
    T: LatticeTarget,
    B: ProposalBackend + ?Sized,
{
    let d = target.dim();
    if x0.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x0.len() });
    }
    if oracle.len() != d {
        return Err(Error::InvalidInput(format!("oracle covers {} coordinates, need {d}", oracle.len())));
    }
    if options.replicas == 0 || options.t_values.is_empty() {
        return Err(Error::InvalidInput("replicas and t_values must be nonempty".into()));
    }
    check_finite(x0)?;
    let mut ts = options.t_values.clone();
    ts.sort_unstable();
    ts.dedup();
    let layout = Layout::new(oracle, x0);
    let zero = || Hist { counts: vec![0; layout.per_t * ts.len()], out_of_window: 0 };

    let hist = (0..options.replicas)
        .into_par_iter()
        .try_fold(zero, |mut h, r| -> Result<Hist> {
            let mut state = ChainState::with_rng(target, x0.to_vec(), replica_rng(options.seed, r as u64))?;
            let mut steps = 0u64;
            for (k, &t) in ts.iter().enumerate() {
                while steps < t {
                    imhr_step(&mut state, backend, target)?;
                    steps += 1;
                }
                let base = k * layout.per_t;
                for (i, x) in state.x().iter().enumerate() {
                    let z = round_scalar(*x) as i64 - layout.lo[i];
                    let n = layout.bins(i) as i64;
                    let bin = if z < 0 || z >= n {
                        h.out_of_window += 1;
                        z.clamp(0, n - 1)
                    } else {
                        z
                    };
                    h.counts[base + layout.offset[i] + bin as usize] += 1;
                }
            }
            Ok(h)
        })
        .try_reduce(zero, |a, b| Ok(a.merge(b)))?;

    let mut values_sorted = Vec::with_capacity(ts.len());
    for k in 0..ts.len() {
        let base = k * layout.per_t;
        let mut worst: f64 = 0.0;
        for (i, m) in oracle.iter().enumerate() {
            let c = &hist.counts[base + layout.offset[i]..base + layout.offset[i + 1]];
            let h = MarginalPMF::from_counts(layout.lo[i], c)?;
            worst = worst.max(tvd(&h, m));
        }
        values_sorted.push(worst);
    }
    let values = options
        .t_values
        .iter()
        .map(|t| values_sorted[ts.binary_search(t).expect("t present")])
        .collect();
    Ok(TVDMCurve {
        iterations: options.t_values.clone(),
        values,
        replicas: options.replicas,
        noise_floor: noise_floor(oracle, options.replicas),
        out_of_window: hist.out_of_window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{IsotropicGaussianPotential, SigmoidTarget};
    use crate::diagnostics::exact_marginal_isotropic;
    use crate::samplers::ExactGaussianBackend;

    fn setup(d: usize) -> (SigmoidTarget<IsotropicGaussianPotential>, ExactGaussianBackend, Vec<MarginalPMF>) {
        (
            SigmoidTarget::new(IsotropicGaussianPotential::centered(d, 1.0).unwrap()),
            ExactGaussianBackend::isotropic(d, 1.0).unwrap(),
            vec![exact_marginal_isotropic(1.0, 10).unwrap(); d],
        )
    }

    #[test]
    fn t_zero_is_point_mass() {
        let (t, b, o) = setup(2);
        let opts = TvdMOptions { replicas: 100, t_values: vec![0], seed: 0 };
        let c = tvd_m_curve(&t, &b, &[0.0, 0.0], &o, &opts).unwrap();
        assert!((c.values[0] - (1.0 - o[0].prob(0))).abs() < 1e-12);
    }

    #[test]
    fn curve_decreases_and_keeps_input_order() {
        let (t, b, o) = setup(1);
        let opts = TvdMOptions { replicas: 20_000, t_values: vec![20, 0, 1, 5], seed: 3 };
        let c = tvd_m_curve(&t, &b, &[3.0], &o, &opts).unwrap();
        assert_eq!(c.iterations, vec![20, 0, 1, 5]);
        assert!(c.values[1] > 0.9);
        assert!(c.values[0] < 3.0 * c.noise_floor, "{:?}", c);
        assert_eq!(c.out_of_window, 0);
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let (t, b, o) = setup(3);
        let opts = TvdMOptions { replicas: 3_000, t_values: vec![1, 4], seed: 9 };
        let run = |n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .unwrap()
                .install(|| tvd_m_curve(&t, &b, &[0.0; 3], &o, &opts).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
