use std::path::PathBuf;
use std::time::Instant;

use nalgebra::DMatrix;

use lattice_sampler::densities::{
    IsotropicGaussianPotential, PerfectSecurityPotential, Potential, PullbackGaussianPotential, SigmoidTarget,
};
use lattice_sampler::diagnostics::{
    acf, appendix_a_degeneracy_probe, csv, exact_marginal_isotropic, exact_marginals_truncated,
    marginals_from_samples, tvd_m_curve, MarginalPMF, TvdMOptions,
};
use lattice_sampler::lattice::{leech_generator, GeneratorMatrix};
use lattice_sampler::samplers::{
    imhr_run, imhr_step, io, klein_sample, mix64, replica_seed, ChainState, DiscreteGaussianSampler,
    ExactGaussianBackend, HmcBackend, KleinParams, ProposalBackend, RadialRejectionBackend, RwmOracle,
};

use crate::config::{BackendChoice, Experiment, ExperimentConfig, LatticeChoice};
use crate::error::{CliError, CliResult};
use crate::output::write_atomic;

const ORACLE_STREAM: u64 = 0x6f72_6163_6c65;
const RWM_SCALE: f64 = 2.38 * 2.38;

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub summary: Vec<(String, String)>,
}

#[derive(Debug, Clone)]
enum ModelKind {
    Isotropic,
    Pullback(GeneratorMatrix),
    PerfectSecurity(PerfectSecurityPotential),
}

/// Potential, proposal backend and enough structure to build an oracle.
pub struct Model {
    pub potential: Box<dyn Potential>,
    pub backend: Box<dyn ProposalBackend>,
    kind: ModelKind,
}

fn load_basis(cfg: &ExperimentConfig) -> CliResult<Option<GeneratorMatrix>> {
    let b = match &cfg.lattice {
        LatticeChoice::Zd => return Ok(None),
        LatticeChoice::Leech => leech_generator(),
        LatticeChoice::File(p) => GeneratorMatrix::load(p)?,
    };
    if b.dim() != cfg.d {
        return Err(CliError::Config(format!("lattice has dimension {} but d = {}", b.dim(), cfg.d)));
    }
    Ok(Some(b))
}

fn hmc<P: Potential + 'static>(p: P, cfg: &ExperimentConfig) -> CliResult<Box<dyn ProposalBackend>> {
    Ok(Box::new(HmcBackend::new(p, cfg.hmc)?))
}

pub fn build_model(cfg: &ExperimentConfig) -> CliResult<Model> {
    if cfg.experiment == Experiment::PerfectSecurity {
        let p = PerfectSecurityPotential::unit_variance(cfg.d)?;
        let backend: Box<dyn ProposalBackend> = match cfg.backend {
            BackendChoice::Exact => Box::new(RadialRejectionBackend::new(p.clone())?),
            BackendChoice::Hmc => hmc(p.clone(), cfg)?,
        };
        return Ok(Model { potential: Box::new(p.clone()), backend, kind: ModelKind::PerfectSecurity(p) });
    }
    match load_basis(cfg)? {
        None => {
            let p = IsotropicGaussianPotential::centered(cfg.d, cfg.sigma2)?;
            let backend: Box<dyn ProposalBackend> = match cfg.backend {
                BackendChoice::Exact => Box::new(ExactGaussianBackend::for_isotropic(&p)?),
                BackendChoice::Hmc => hmc(p.clone(), cfg)?,
            };
            Ok(Model { potential: Box::new(p), backend, kind: ModelKind::Isotropic })
        }
        Some(b) => {
            let p = PullbackGaussianPotential::new(b.clone(), cfg.sigma2)?;
            let backend: Box<dyn ProposalBackend> = match cfg.backend {
                BackendChoice::Exact => Box::new(ExactGaussianBackend::for_pullback(&p)?),
                BackendChoice::Hmc => hmc(p.clone(), cfg)?,
            };
            Ok(Model { potential: Box::new(p), backend, kind: ModelKind::Pullback(b) })
        }
    }
}

fn rwm_oracle(model: &Model, cfg: &ExperimentConfig, cov: DMatrix<f64>) -> CliResult<Vec<MarginalPMF>> {
    let o = RwmOracle::new(cov)?.with_iterations(cfg.rwm_iterations)?;
    let samples = o.sample(&*model.potential, &vec![0.0; cfg.d], cfg.rwm_samples, mix64(cfg.seed ^ ORACLE_STREAM))?;
    Ok(marginals_from_samples(&samples)?)
}

/// Per-coordinate reference marginals and a label for how they were made.
pub fn oracle_marginals(model: &Model, cfg: &ExperimentConfig) -> CliResult<(Vec<MarginalPMF>, &'static str)> {
    let d = cfg.d;
    match &model.kind {
        ModelKind::Isotropic => {
            let w = (12.0 * cfg.sigma2.sqrt()).ceil().max(10.0) as i64;
            Ok((vec![exact_marginal_isotropic(cfg.sigma2, w)?; d], "exact"))
        }
        ModelKind::PerfectSecurity(p) if d <= 3 => {
            let w = (2.0 * p.rho() * p.guard()).ceil() as i64;
            Ok((exact_marginals_truncated(p, w)?, "exact"))
        }
        ModelKind::PerfectSecurity(_) => {
            let cov = DMatrix::identity(d, d) * (RWM_SCALE / d as f64);
            Ok((rwm_oracle(model, cfg, cov)?, "rwm"))
        }
        ModelKind::Pullback(b) => {
            let m = b.matrix();
            let gram_inv = (m.transpose() * m)
                .try_inverse()
                .ok_or_else(|| CliError::Config("lattice basis is singular".into()))?;
            let mut cov = gram_inv * (RWM_SCALE * cfg.sigma2 / d as f64);
            cov = (&cov + cov.transpose()) * 0.5;
            Ok((rwm_oracle(model, cfg, cov)?, "rwm"))
        }
    }
}

fn pair(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn curve(cfg: &ExperimentConfig) -> CliResult<RunReport> {
    let model = build_model(cfg)?;
    let (oracle, source) = oracle_marginals(&model, cfg)?;
    let target = SigmoidTarget::new(&*model.potential);
    let opts = TvdMOptions { replicas: cfg.replicas, t_values: cfg.t_values.clone(), seed: cfg.seed };
    let c = tvd_m_curve(&target, &model.backend, &cfg.x0, &oracle, &opts)?;
    let mut meta = cfg.to_pairs();
    let extra = vec![
        pair("oracle", source),
        pair("noise_floor", csv::format_real(c.noise_floor)),
        pair("out_of_window", c.out_of_window),
    ];
    meta.extend(extra.iter().cloned());
    write_atomic(&cfg.output_path, |w| csv::write_tvd_curve(w, &c, &meta))?;
    let mut summary = extra;
    if let Some(v) = c.values.last() {
        summary.push(pair("final_tvd_m", csv::format_real(*v)));
    }
    Ok(RunReport { files: vec![cfg.output_path.clone()], summary })
}

fn chain_samples(cfg: &ExperimentConfig, model: &Model) -> CliResult<(Vec<lattice_sampler::lattice::IntegerPoint>, f64)> {
    let target = SigmoidTarget::new(&*model.potential);
    let mut state = ChainState::new(&target, cfg.x0.clone(), cfg.seed)?;
    let out = imhr_run(&target, &model.backend, &mut state, cfg.burn_in, cfg.n_samples, cfg.thin)?;
    Ok((out, state.accepts() as f64 / state.steps().max(1) as f64))
}

fn acf_experiment(cfg: &ExperimentConfig) -> CliResult<RunReport> {
    let model = build_model(cfg)?;
    let (samples, acc) = chain_samples(cfg, &model)?;
    let series: Vec<Vec<f64>> = samples.iter().map(|z| z.to_real()).collect();
    let values = acf(&series, cfg.max_lag)?;
    let mut meta = cfg.to_pairs();
    meta.push(pair("acceptance", csv::format_real(acc)));
    write_atomic(&cfg.output_path, |w| csv::write_acf(w, &values, &meta))?;
    Ok(RunReport { files: vec![cfg.output_path.clone()], summary: vec![pair("acceptance", csv::format_real(acc))] })
}

fn acceptance_vs_dim(cfg: &ExperimentConfig) -> CliResult<RunReport> {
    let mut rows = Vec::new();
    for &d in &cfg.dims {
        let mut c = cfg.clone();
        c.d = d;
        c.x0 = vec![0.0; d];
        c.lattice = LatticeChoice::Zd;
        c.hmc = lattice_sampler::samplers::HmcParams::for_dimension(d);
        let model = build_model(&c)?;
        let target = SigmoidTarget::new(&*model.potential);
        let mut state = ChainState::new(&target, c.x0.clone(), replica_seed(cfg.seed, d as u64))?;
        for _ in 0..cfg.burn_in {
            imhr_step(&mut state, &model.backend, &target)?;
        }
        let before = state.accepts();
        for _ in 0..cfg.n_samples {
            imhr_step(&mut state, &model.backend, &target)?;
        }
        rows.push((d, (state.accepts() - before) as f64 / cfg.n_samples as f64));
    }
    let meta = cfg.to_pairs();
    write_atomic(&cfg.output_path, |w| {
        csv::write_metadata(w, &meta)?;
        writeln!(w, "d,value")?;
        for (d, v) in &rows {
            writeln!(w, "{d},{}", csv::format_real(*v))?;
        }
        Ok(())
    })?;
    let summary = rows.iter().map(|(d, v)| pair(&format!("acceptance_d{d}"), csv::format_real(*v))).collect();
    Ok(RunReport { files: vec![cfg.output_path.clone()], summary })
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Median seconds per IMHR step and per Klein sample at dimension `d`.
pub fn bench_dimension(cfg: &ExperimentConfig, d: usize, basis: Option<GeneratorMatrix>) -> CliResult<(f64, f64)> {
    let mut c = cfg.clone();
    c.d = d;
    c.x0 = vec![0.0; d];
    c.backend = BackendChoice::Exact;
    c.lattice = LatticeChoice::Zd;
    let (model, basis) = match basis {
        None => (build_model(&c)?, GeneratorMatrix::identity(d)),
        Some(b) => {
            let p = PullbackGaussianPotential::new(b.clone(), c.sigma2)?;
            let backend = Box::new(ExactGaussianBackend::for_pullback(&p)?);
            (Model { potential: Box::new(p), backend, kind: ModelKind::Pullback(b.clone()) }, b)
        }
    };
    let target = SigmoidTarget::new(&*model.potential);
    let mut state = ChainState::new(&target, c.x0.clone(), cfg.seed)?;
    for _ in 0..cfg.bench_warmup {
        imhr_step(&mut state, &model.backend, &target)?;
    }
    let mut imhr = Vec::with_capacity(cfg.bench_iterations);
    for _ in 0..cfg.bench_iterations {
        let t0 = Instant::now();
        imhr_step(&mut state, &model.backend, &target)?;
        imhr.push(t0.elapsed().as_secs_f64());
    }

    let params = KleinParams::new(basis, cfg.sigma2.sqrt(), vec![0.0; d])?;
    let mut rng = lattice_sampler::samplers::chain_rng(cfg.seed);
    let mut dg = DiscreteGaussianSampler::new();
    for _ in 0..cfg.bench_warmup {
        klein_sample(&params, &mut rng, &mut dg)?;
    }
    let mut klein = Vec::with_capacity(cfg.bench_iterations);
    for _ in 0..cfg.bench_iterations {
        let t0 = Instant::now();
        klein_sample(&params, &mut rng, &mut dg)?;
        klein.push(t0.elapsed().as_secs_f64());
    }
    Ok((median(imhr), median(klein)))
}

fn bench_runtime(cfg: &ExperimentConfig) -> CliResult<RunReport> {
    let cases: Vec<(usize, Option<GeneratorMatrix>)> = match load_basis(cfg)? {
        None => cfg.dims.iter().map(|&d| (d, None)).collect(),
        Some(b) => vec![(b.dim(), Some(b))],
    };
    let mut rows = Vec::new();
    for (d, b) in cases {
        let (i, k) = bench_dimension(cfg, d, b)?;
        rows.push((d, i, k));
    }
    let meta = cfg.to_pairs();
    write_atomic(&cfg.output_path, |w| {
        csv::write_metadata(w, &meta)?;
        writeln!(w, "d,imhr_seconds,klein_seconds,ratio")?;
        for (d, i, k) in &rows {
            writeln!(w, "{d},{},{},{}", csv::format_real(*i), csv::format_real(*k), csv::format_real(k / i))?;
        }
        Ok(())
    })?;
    let summary = rows
        .iter()
        .map(|(d, i, k)| pair(&format!("d{d}"), format!("imhr {:.3e} s, klein {:.3e} s, ratio {:.2}", i, k, k / i)))
        .collect();
    Ok(RunReport { files: vec![cfg.output_path.clone()], summary })
}

fn appendix_a(cfg: &ExperimentConfig) -> CliResult<RunReport> {
    let v = appendix_a_degeneracy_probe(cfg.sigma2, cfg.window_max)?;
    let meta = cfg.to_pairs();
    write_atomic(&cfg.output_path, |w| {
        csv::write_metadata(w, &meta)?;
        writeln!(w, "m,value")?;
        for (m, x) in v.iter().enumerate() {
            writeln!(w, "{m},{}", csv::format_real(*x))?;
        }
        Ok(())
    })?;
    Ok(RunReport {
        files: vec![cfg.output_path.clone()],
        summary: vec![pair("ratio_last_to_first", csv::format_real(v[v.len() - 1] / v[0]))],
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> CliResult<RunReport> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::IsoGaussian | Experiment::LeechGaussian | Experiment::PerfectSecurity => curve(cfg),
        Experiment::Acf => acf_experiment(cfg),
        Experiment::AcceptanceVsDim => acceptance_vs_dim(cfg),
        Experiment::BenchRuntime => bench_runtime(cfg),
        Experiment::AppendixA => appendix_a(cfg),
    }
}

/// Writes `n_samples` chain samples; the `.lsmp` extension selects the binary format.
pub fn run_sample(cfg: &ExperimentConfig) -> CliResult<RunReport> {
    cfg.validate()?;
    let model = build_model(cfg)?;
    let (samples, acc) = chain_samples(cfg, &model)?;
    let binary = cfg.output_path.extension().is_some_and(|e| e == "lsmp");
    let meta = cfg.to_pairs();
    write_atomic(&cfg.output_path, |w| {
        if binary {
            io::write_binary(w, cfg.d, &samples)
        } else {
            io::write_csv(w, cfg.d, &samples, &meta)
        }
    })?;
    Ok(RunReport { files: vec![cfg.output_path.clone()], summary: vec![pair("acceptance", csv::format_real(acc))] })
}
