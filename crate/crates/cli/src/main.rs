use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lattice_sampler::diagnostics::{csv, ergodicity_delta, inexact_alg_bound, isotropic_gaussian_z_over_k, uniform_ergodicity_bound};
use lattice_sampler_cli::{
    init_threads, load_config, output::write_atomic, run_experiment, run_sample, Assignment, CliError, CliResult,
    Experiment, RunReport,
};

#[derive(Parser)]
#[command(name = "latsamp", version, about = "Lattice sampling with independent Metropolis-Hastings and rounding")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Default)]
struct Common {
    /// Configuration file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    sigma2: Option<String>,
    #[arg(long)]
    replicas: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Comma-separated iteration counts.
    #[arg(long)]
    t_values: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// exact or hmc
    #[arg(long)]
    backend: Option<String>,
    /// zd, leech or file:<path>
    #[arg(long)]
    lattice: Option<String>,
    /// Any other config key, as KEY=VALUE. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn assignments(&self) -> CliResult<Vec<Assignment>> {
        let mut v = Vec::new();
        let flags = [
            ("d", &self.d),
            ("sigma2", &self.sigma2),
            ("replicas", &self.replicas),
            ("seed", &self.seed),
            ("t_values", &self.t_values),
            ("output_path", &self.out),
            ("backend", &self.backend),
            ("lattice", &self.lattice),
        ];
        for (k, val) in flags {
            if let Some(x) = val {
                v.push(Assignment::flag(k, x));
            }
        }
        for s in &self.set {
            let (k, x) = s
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got '{s}'")))?;
            let k = k.trim();
            if !lattice_sampler_cli::config::KEYS.contains(&k) {
                return Err(CliError::Config(format!("unknown key '{k}'")));
            }
            v.push(Assignment::flag(k, x.trim()));
        }
        Ok(v)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Gaussian,
    PerfectSecurity,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchKind {
    Runtime,
    Acceptance,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write chain samples as CSV, or LSMP binary for a `.lsmp` output path.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "gaussian")]
        target: Target,
        #[arg(long)]
        n_samples: Option<String>,
        #[arg(long)]
        burn_in: Option<String>,
        #[arg(long)]
        thin: Option<String>,
    },
    /// TVD_m against the reference marginals for each requested t.
    TvdCurve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "gaussian")]
        target: Target,
    },
    /// Uncentred autocorrelation of a single chain.
    Acf {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n_samples: Option<String>,
        #[arg(long)]
        max_lag: Option<String>,
        #[arg(long)]
        burn_in: Option<String>,
    },
    /// Per-iteration time against the Klein sampler, or acceptance rate across dimensions.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "runtime")]
        kind: BenchKind,
        /// Comma-separated dimensions.
        #[arg(long)]
        dims: Option<String>,
    },
    /// Geometric TVD bound for the isotropic Gaussian, or the inexact-sampler interval.
    Bound {
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma2: f64,
        #[arg(long, default_value = "0,1,2,3,4,5,10,20")]
        t_values: String,
        /// V,rho,n,delta,k
        #[arg(long)]
        inexact: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Infimum of pi / pibar over unit cells for the piecewise-constant target.
    ProbeAppendixA {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        window_max: Option<String>,
    },
}

fn push(v: &mut Vec<Assignment>, key: &str, val: &Option<String>) {
    if let Some(x) = val {
        v.push(Assignment::flag(key, x));
    }
}

fn target_experiment(target: Target, common: &Common) -> Experiment {
    match target {
        Target::PerfectSecurity => Experiment::PerfectSecurity,
        Target::Gaussian if common.lattice.as_deref() == Some("leech") => Experiment::LeechGaussian,
        Target::Gaussian => Experiment::IsoGaussian,
    }
}

fn configured(common: &Common, extra: Vec<Assignment>, fallback: Experiment, allowed: &[Experiment]) -> CliResult<lattice_sampler_cli::ExperimentConfig> {
    let mut a = common.assignments()?;
    a.extend(extra);
    let cfg = load_config(common.config.as_deref(), &a, Some(fallback))?;
    if !allowed.contains(&cfg.experiment) {
        return Err(CliError::Config(format!("experiment '{}' does not belong to this subcommand", cfg.experiment)));
    }
    Ok(cfg)
}

const CURVES: [Experiment; 3] = [Experiment::IsoGaussian, Experiment::LeechGaussian, Experiment::PerfectSecurity];

fn bound(d: usize, sigma2: f64, t_values: &str, inexact: Option<&str>, out: Option<PathBuf>) -> CliResult<RunReport> {
    let mut meta = vec![("d".to_string(), d.to_string()), ("sigma2".to_string(), sigma2.to_string())];
    let body: String = if let Some(arg) = inexact {
        let f: Vec<&str> = arg.split(',').map(str::trim).collect();
        let bad = || CliError::Config(format!("--inexact expects V,rho,n,delta,k, got '{arg}'"));
        if f.len() != 5 {
            return Err(bad());
        }
        let v: f64 = f[0].parse().map_err(|_| bad())?;
        let rho: f64 = f[1].parse().map_err(|_| bad())?;
        let n: u64 = f[2].parse().map_err(|_| bad())?;
        let delta: f64 = f[3].parse().map_err(|_| bad())?;
        let k: u64 = f[4].parse().map_err(|_| bad())?;
        let (lo, hi) = inexact_alg_bound(v, rho, n, delta, k)?;
        meta = vec![("inexact".to_string(), arg.to_string())];
        format!("lower,upper\n{},{}\n", csv::format_real(lo), csv::format_real(hi))
    } else {
        let l = 1.0 / sigma2;
        let zk = isotropic_gaussian_z_over_k(d, sigma2)?;
        let delta = ergodicity_delta(l, d, zk)?;
        meta.push(("delta".to_string(), csv::format_real(delta)));
        let mut s = String::from("t,value\n");
        for t in t_values.split(',') {
            let t: u64 = t.trim().parse().map_err(|_| CliError::Config(format!("bad t value '{t}'")))?;
            s.push_str(&format!("{t},{}\n", csv::format_real(uniform_ergodicity_bound(l, d, zk, t)?)));
        }
        s
    };
    match out {
        Some(p) => {
            write_atomic(&p, |w| {
                csv::write_metadata(w, &meta)?;
                w.write_all(body.as_bytes())?;
                Ok(())
            })?;
            Ok(RunReport { files: vec![p], summary: meta })
        }
        None => {
            print!("{body}");
            Ok(RunReport { files: vec![], summary: vec![] })
        }
    }
}

fn run(cli: Cli) -> CliResult<RunReport> {
    match cli.cmd {
        Cmd::Sample { common, target, n_samples, burn_in, thin } => {
            let mut extra = Vec::new();
            push(&mut extra, "n_samples", &n_samples);
            push(&mut extra, "burn_in", &burn_in);
            push(&mut extra, "thin", &thin);
            let cfg = configured(&common, extra, target_experiment(target, &common), &CURVES)?;
            run_sample(&cfg)
        }
        Cmd::TvdCurve { common, target } => {
            let cfg = configured(&common, vec![], target_experiment(target, &common), &CURVES)?;
            run_experiment(&cfg)
        }
        Cmd::Acf { common, n_samples, max_lag, burn_in } => {
            let mut extra = Vec::new();
            push(&mut extra, "n_samples", &n_samples);
            push(&mut extra, "max_lag", &max_lag);
            push(&mut extra, "burn_in", &burn_in);
            run_experiment(&configured(&common, extra, Experiment::Acf, &[Experiment::Acf])?)
        }
        Cmd::Bench { common, kind, dims } => {
            let mut extra = Vec::new();
            push(&mut extra, "dims", &dims);
            let fallback = match kind {
                BenchKind::Runtime => Experiment::BenchRuntime,
                BenchKind::Acceptance => Experiment::AcceptanceVsDim,
            };
            run_experiment(&configured(&common, extra, fallback, &[fallback])?)
        }
        Cmd::Bound { d, sigma2, t_values, inexact, out } => bound(d, sigma2, &t_values, inexact.as_deref(), out),
        Cmd::ProbeAppendixA { common, window_max } => {
            let mut extra = Vec::new();
            push(&mut extra, "window_max", &window_max);
            run_experiment(&configured(&common, extra, Experiment::AppendixA, &[Experiment::AppendixA])?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| run(cli));
    match result {
        Ok(report) => {
            for f in &report.files {
                eprintln!("wrote {}", f.display());
            }
            for (k, v) in &report.summary {
                eprintln!("{k}: {v}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Config(_) | CliError::ConfigLine { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
