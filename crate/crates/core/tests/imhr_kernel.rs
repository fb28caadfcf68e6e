use lattice_sampler::densities::{log_pi_bar_unnorm, IsotropicGaussianPotential, Potential, SigmoidTarget};
use lattice_sampler::samplers::{imhr_step, BackendKind, ChainRng, ChainState, DrawStatus, ProposalBackend};

struct Fixed(f64);

impl ProposalBackend for Fixed {
    fn dim(&self) -> usize {
        1
    }
    fn kind(&self) -> BackendKind {
        BackendKind::Custom
    }
    fn draw(&self, _: &mut ChainRng, out: &mut [f64]) -> DrawStatus {
        out[0] = self.0;
        DrawStatus::Ok
    }
}

struct Shifted<P>(P, f64);

impl<P: Potential> Potential for Shifted<P> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.0.value(x) + self.1
    }
    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        self.0.gradient(x, g)
    }
}

fn log_alpha<P: Potential>(t: &SigmoidTarget<P>, x: f64, y: f64) -> f64 {
    let mut s = ChainState::new(t, vec![x], 0).unwrap();
    imhr_step(&mut s, &Fixed(y), t).unwrap().log_alpha
}

fn centers() -> Vec<f64> {
    (0..41).map(|i| -5.0 + (i as f64 + 0.5) * 10.0 / 41.0).collect()
}

#[test]
fn detailed_balance_on_grid() {
    let p = IsotropicGaussianPotential::centered(1, 1.0).unwrap();
    let c = centers();
    let q: Vec<f64> = c.iter().map(|x| (-p.value(&[*x])).exp()).collect();
    let qs: f64 = q.iter().sum();
    let t = SigmoidTarget::new(p);
    let pb: Vec<f64> = c.iter().map(|x| log_pi_bar_unnorm(&t, &[*x]).unwrap().exp()).collect();
    let ps: f64 = pb.iter().sum();
    let n = c.len();
    let mut tm = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                tm[i][j] = q[j] / qs * log_alpha(&t, c[i], c[j]).exp();
            }
        }
        tm[i][i] = 1.0 - tm[i].iter().sum::<f64>();
    }
    for i in 0..n {
        for j in 0..n {
            let l = pb[i] / ps * tm[i][j];
            let r = pb[j] / ps * tm[j][i];
            assert!((l - r).abs() <= 1e-10, "{i},{j}: {l} vs {r}");
        }
    }
}

#[test]
fn acceptance_ignores_constant_shift() {
    let base = SigmoidTarget::new(IsotropicGaussianPotential::centered(1, 1.0).unwrap());
    let shifted = SigmoidTarget::new(Shifted(IsotropicGaussianPotential::centered(1, 1.0).unwrap(), 17.3));
    for &(x, y) in &[(0.2, 1.7), (-3.1, 0.4), (2.49, -2.51), (4.0, 4.6)] {
        let a = log_alpha(&base, x, y);
        let b = log_alpha(&shifted, x, y);
        assert!((a - b).abs() < 1e-12, "{x},{y}: {a} vs {b}");
    }
}
