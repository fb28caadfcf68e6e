use lattice_sampler::densities::{IsotropicGaussianPotential, PullbackGaussianPotential, SigmoidTarget};
use lattice_sampler::diagnostics::{
    exact_marginal_isotropic, isotropic_gaussian_z_over_k, marginals_from_samples, tvd, tvd_m_curve,
    uniform_ergodicity_bound, TvdMOptions,
};
use lattice_sampler::lattice::{leech_generator, GeneratorMatrix};
use lattice_sampler::samplers::{imhr_run, ChainState, ExactGaussianBackend};

#[test]
fn imhr_marginal_matches_exact_pmf() {
    let t = SigmoidTarget::new(IsotropicGaussianPotential::centered(1, 2.0).unwrap());
    let b = ExactGaussianBackend::isotropic(1, 2.0).unwrap();
    let mut s = ChainState::new(&t, vec![0.0], 21).unwrap();
    let out = imhr_run(&t, &b, &mut s, 50, 200_000, 1).unwrap();
    let m = marginals_from_samples(&out).unwrap();
    let exact = exact_marginal_isotropic(2.0, 12).unwrap();
    assert!(tvd(&m[0], &exact) < 0.01);
}

#[test]
fn decay_is_dominated_by_geometric_bound() {
    let t = SigmoidTarget::new(IsotropicGaussianPotential::centered(1, 1.0).unwrap());
    let b = ExactGaussianBackend::isotropic(1, 1.0).unwrap();
    let oracle = vec![exact_marginal_isotropic(1.0, 10).unwrap()];
    let opts = TvdMOptions { replicas: 20_000, t_values: (0..8).collect(), seed: 5 };
    let c = tvd_m_curve(&t, &b, &[4.0], &oracle, &opts).unwrap();
    let zk = isotropic_gaussian_z_over_k(1, 1.0).unwrap();
    for (tt, v) in c.iterations.iter().zip(&c.values) {
        let bound = 2.0 * uniform_ergodicity_bound(1.0, 1, zk, *tt).unwrap();
        assert!(*v <= bound + 3.0 * c.noise_floor, "t={tt}: {v} vs {bound}");
    }
}

// Pullback of a diagonal basis is a product of 1-D lattice Gaussians with
// scaled variances, giving an exact oracle for the pullback path.
#[test]
fn diagonal_pullback_marginals() {
    let basis = GeneratorMatrix::diagonal(&[1.0, 2.0]).unwrap();
    let p = PullbackGaussianPotential::new(basis, 4.0).unwrap();
    let b = ExactGaussianBackend::for_pullback(&p).unwrap();
    let t = SigmoidTarget::new(p);
    let oracle = vec![exact_marginal_isotropic(4.0, 16).unwrap(), exact_marginal_isotropic(1.0, 16).unwrap()];
    let opts = TvdMOptions { replicas: 20_000, t_values: vec![15], seed: 1 };
    let c = tvd_m_curve(&t, &b, &[0.0, 0.0], &oracle, &opts).unwrap();
    assert!(c.values[0] < 3.0 * c.noise_floor, "{:?}", c);
}

#[test]
fn leech_chain_accepts_often() {
    let p = PullbackGaussianPotential::new(leech_generator(), 4.0).unwrap();
    let b = ExactGaussianBackend::for_pullback(&p).unwrap();
    let t = SigmoidTarget::new(p);
    let mut s = ChainState::new(&t, vec![0.0; 24], 2).unwrap();
    imhr_run(&t, &b, &mut s, 0, 2_000, 1).unwrap();
    let a = s.accepts() as f64 / s.steps() as f64;
    assert!(a > 0.1 && a <= 1.0, "{a}");
}
