//! Independent Metropolis-Hastings with rounding.
//!
//! Proposals `y ~ pi` are accepted against the sigmoidal target with
//!
//! ```text
//! alpha(x, y) = 1 ∧ pibar(y) pi(x) / (pibar(x) pi(y)),
//! ```
//!
//! computed as `w(y) - w(x)` with `w = log pibar - log pi`, which is finite
//! wherever both densities are positive and independent of the normalizers.

use rand::Rng;

use super::{chain_rng, ChainRng, DrawStatus, ProposalBackend};
use crate::densities::{LatticeTarget, Potential, TargetScratch};
use crate::error::{Error, Result};
use crate::lattice::{check_finite, round_nearest, IntegerPoint};

/// State of one chain: position, counters and its private RNG stream.
#[derive(Debug, Clone)]
pub struct ChainState {
    x: Vec<f64>,
    weight: f64,
    steps: u64,
    accepts: u64,
    nonfinite_rejections: u64,
    flagged_draws: u64,
    rng: ChainRng,
    proposal: Vec<f64>,
    scratch: TargetScratch,
}

/// Result of one transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub accepted: bool,
    pub log_alpha: f64,
    /// The proposal had a non-finite log-density and was rejected.
    pub nonfinite: bool,
    /// The backend flagged the draw.
    pub flagged: bool,
}

fn log_weight<T: LatticeTarget>(target: &T, x: &[f64], scratch: &mut TargetScratch) -> f64 {
    let phi = target.potential().value(x);
    target.log_density(x, scratch) + phi
}

impl ChainState {
    pub fn new<T: LatticeTarget>(target: &T, x0: Vec<f64>, seed: u64) -> Result<Self> {
        Self::with_rng(target, x0, chain_rng(seed))
    }

    pub fn with_rng<T: LatticeTarget>(target: &T, x0: Vec<f64>, rng: ChainRng) -> Result<Self> {
        if x0.len() != target.dim() {
            return Err(Error::DimensionMismatch { expected: target.dim(), got: x0.len() });
        }
        check_finite(&x0)?;
        let mut scratch = TargetScratch::new(x0.len());
        let weight = log_weight(target, &x0, &mut scratch);
        if !weight.is_finite() {
            return Err(Error::NonFinite("initial state has zero target or proposal density"));
        }
        Ok(ChainState {
            proposal: vec![0.0; x0.len()],
            x: x0,
            weight,
            steps: 0,
            accepts: 0,
            nonfinite_rejections: 0,
            flagged_draws: 0,
            rng,
            scratch,
        })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn accepts(&self) -> u64 {
        self.accepts
    }

    /// Proposals rejected because their log-density was not finite.
    pub fn nonfinite_rejections(&self) -> u64 {
        self.nonfinite_rejections
    }

    /// Proposals the backend flagged as unreliable.
    pub fn flagged_draws(&self) -> u64 {
        self.flagged_draws
    }

    pub fn rounded(&self) -> IntegerPoint {
        round_nearest(&self.x).expect("chain state is finite")
    }

    pub fn rng_mut(&mut self) -> &mut ChainRng {
        &mut self.rng
    }
}

/// One IMHR transition.
pub fn imhr_step<T, B>(state: &mut ChainState, backend: &B, target: &T) -> Result<StepOutcome>
where
    T: LatticeTarget,
    B: ProposalBackend + ?Sized,
{
    if backend.dim() != state.x.len() {
        return Err(Error::DimensionMismatch { expected: state.x.len(), got: backend.dim() });
    }
    let flagged = backend.draw(&mut state.rng, &mut state.proposal) == DrawStatus::Flagged;
    let u: f64 = state.rng.random();
    state.steps += 1;
    if flagged {
        state.flagged_draws += 1;
    }

    let w_y = if state.proposal.iter().all(|v| v.is_finite()) {
        log_weight(target, &state.proposal, &mut state.scratch)
    } else {
        f64::NAN
    };
    if !w_y.is_finite() {
        state.nonfinite_rejections += 1;
        return Ok(StepOutcome { accepted: false, log_alpha: f64::NEG_INFINITY, nonfinite: true, flagged });
    }

    let log_alpha = (w_y - state.weight).min(0.0);
    let accepted = u.ln() <= log_alpha;
    if accepted {
        std::mem::swap(&mut state.x, &mut state.proposal);
        state.weight = w_y;
        state.accepts += 1;
    }
    Ok(StepOutcome { accepted, log_alpha, nonfinite: false, flagged })
}

/// Runs `burn_in` transitions, then emits the rounded state every `thin`
/// transitions until `n_samples` points are collected.
pub fn imhr_run<T, B>(
    target: &T,
    backend: &B,
    state: &mut ChainState,
    burn_in: usize,
    n_samples: usize,
    thin: usize,
) -> Result<Vec<IntegerPoint>>
where
    T: LatticeTarget,
    B: ProposalBackend + ?Sized,
{
    if n_samples == 0 || thin == 0 {
        return Err(Error::InvalidInput("n_samples and thin must be positive".into()));
    }
    for _ in 0..burn_in {
        imhr_step(state, backend, target)?;
    }
    let mut out = Vec::with_capacity(n_samples);
    while out.len() < n_samples {
        for _ in 0..thin {
            imhr_step(state, backend, target)?;
        }
        out.push(state.rounded());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{IsotropicGaussianPotential, SigmoidTarget};
    use crate::samplers::{BackendKind, ExactGaussianBackend};

    struct Fixed(Vec<f64>);

    impl ProposalBackend for Fixed {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn kind(&self) -> BackendKind {
            BackendKind::Custom
        }
        fn draw(&self, _: &mut ChainRng, out: &mut [f64]) -> DrawStatus {
            out.copy_from_slice(&self.0);
            DrawStatus::Ok
        }
    }

    fn gauss(d: usize) -> SigmoidTarget<IsotropicGaussianPotential> {
        SigmoidTarget::new(IsotropicGaussianPotential::centered(d, 1.0).unwrap())
    }

    #[test]
    fn proposing_current_point_always_accepts() {
        let t = gauss(2);
        let x0 = vec![0.7, -1.3];
        let mut s = ChainState::new(&t, x0.clone(), 3).unwrap();
        for _ in 0..100 {
            let o = imhr_step(&mut s, &Fixed(x0.clone()), &t).unwrap();
            assert!(o.accepted);
            assert_eq!(o.log_alpha, 0.0);
        }
        assert_eq!(s.accepts(), 100);
    }

    #[test]
    fn central_cube_move_is_accepted() {
        // On the central cube grad phi(0) = 0, so w(x) = log 2 - log 2 + phi(x).
        let t = gauss(1);
        let mut s = ChainState::new(&t, vec![0.0], 1).unwrap();
        let o = imhr_step(&mut s, &Fixed(vec![0.3]), &t).unwrap();
        assert_eq!(o.log_alpha, 0.0);
        assert!(o.accepted);
    }

    #[test]
    fn nonfinite_proposal_is_rejected_not_fatal() {
        let t = gauss(1);
        let mut s = ChainState::new(&t, vec![0.0], 1).unwrap();
        let o = imhr_step(&mut s, &Fixed(vec![f64::NAN]), &t).unwrap();
        assert!(!o.accepted && o.nonfinite);
        assert_eq!(s.nonfinite_rejections(), 1);
        assert_eq!(s.steps(), 1);
        assert_eq!(s.x(), &[0.0]);
    }

    #[test]
    fn run_with_constant_backend_returns_rounded_start() {
        let t = gauss(2);
        let x0 = vec![1.4, -2.6];
        let mut s = ChainState::new(&t, x0.clone(), 0).unwrap();
        let out = imhr_run(&t, &Fixed(x0), &mut s, 0, 1, 1).unwrap();
        assert_eq!(out, vec![IntegerPoint(vec![1, -3])]);
    }

    #[test]
    fn dimension_checks() {
        let t = gauss(2);
        assert!(ChainState::new(&t, vec![0.0], 0).is_err());
        let mut s = ChainState::new(&t, vec![0.0, 0.0], 0).unwrap();
        assert!(imhr_step(&mut s, &Fixed(vec![0.0]), &t).is_err());
        assert!(ChainState::new(&t, vec![f64::INFINITY, 0.0], 0).is_err());
    }

    #[test]
    fn seeded_runs_are_identical() {
        let t = gauss(3);
        let b = ExactGaussianBackend::isotropic(3, 1.0).unwrap();
        let run = |seed| {
            let mut s = ChainState::new(&t, vec![0.0; 3], seed).unwrap();
            imhr_run(&t, &b, &mut s, 10, 200, 2).unwrap()
        };
        assert_eq!(run(11), run(11));
        assert_ne!(run(11), run(12));
    }
}
