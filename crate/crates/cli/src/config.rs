//! Plain-text `key = value` experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lattice_sampler::samplers::{HmcParams, DEFAULT_RWM_ITERATIONS, DEFAULT_RWM_SAMPLES};

use crate::error::{CliError, CliResult};

pub const MIN_REPLICAS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    IsoGaussian,
    LeechGaussian,
    PerfectSecurity,
    BenchRuntime,
    AcceptanceVsDim,
    Acf,
    AppendixA,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::IsoGaussian,
        Experiment::LeechGaussian,
        Experiment::PerfectSecurity,
        Experiment::BenchRuntime,
        Experiment::AcceptanceVsDim,
        Experiment::Acf,
        Experiment::AppendixA,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::IsoGaussian => "iso-gaussian",
            Experiment::LeechGaussian => "leech-gaussian",
            Experiment::PerfectSecurity => "perfect-security",
            Experiment::BenchRuntime => "bench-runtime",
            Experiment::AcceptanceVsDim => "acceptance-vs-dim",
            Experiment::Acf => "acf",
            Experiment::AppendixA => "appendix-a",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendChoice {
    Exact,
    Hmc,
}

impl fmt::Display for BackendChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendChoice::Exact => "exact",
            BackendChoice::Hmc => "hmc",
        })
    }
}

impl FromStr for BackendChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(BackendChoice::Exact),
            "hmc" => Ok(BackendChoice::Hmc),
            _ => Err(format!("unknown backend '{s}' (expected exact or hmc)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeChoice {
    Zd,
    Leech,
    File(PathBuf),
}

impl fmt::Display for LatticeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeChoice::Zd => f.write_str("zd"),
            LatticeChoice::Leech => f.write_str("leech"),
            LatticeChoice::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for LatticeChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "zd" => Ok(LatticeChoice::Zd),
            "leech" => Ok(LatticeChoice::Leech),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(LatticeChoice::File(PathBuf::from(p))),
                _ => Err(format!("unknown lattice '{s}' (expected zd, leech or file:<path>)")),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub d: usize,
    pub sigma2: f64,
    pub replicas: usize,
    pub t_values: Vec<u64>,
    pub seed: u64,
    pub output_path: PathBuf,
    pub backend: BackendChoice,
    pub lattice: LatticeChoice,
    pub x0: Vec<f64>,
    pub burn_in: usize,
    pub n_samples: usize,
    pub thin: usize,
    pub max_lag: usize,
    pub dims: Vec<usize>,
    pub bench_iterations: usize,
    pub bench_warmup: usize,
    pub window_max: u32,
    pub hmc: HmcParams,
    pub rwm_samples: usize,
    pub rwm_iterations: usize,
}

pub const KEYS: &[&str] = &[
    "experiment",
    "d",
    "sigma2",
    "replicas",
    "t_values",
    "seed",
    "output_path",
    "backend",
    "lattice",
    "x0",
    "burn_in",
    "n_samples",
    "thin",
    "max_lag",
    "dims",
    "bench_iterations",
    "bench_warmup",
    "window_max",
    "hmc_leapfrog_steps",
    "hmc_step_size",
    "hmc_momentum_variance",
    "hmc_inner_iterations",
    "rwm_samples",
    "rwm_iterations",
];

/// One `key = value` assignment; `line` is 0 for command-line overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub line: usize,
    pub key: String,
    pub value: String,
}

impl Assignment {
    pub fn flag(key: &str, value: impl ToString) -> Self {
        Assignment { line: 0, key: key.to_string(), value: value.to_string() }
    }

    fn err(&self, msg: impl fmt::Display) -> CliError {
        if self.line == 0 {
            CliError::Config(format!("{}: {msg}", self.key))
        } else {
            CliError::ConfigLine { line: self.line, msg: format!("{}: {msg}", self.key) }
        }
    }
}

/// Splits config text into assignments. Blank lines and `#` comments are skipped.
pub fn parse_assignments(text: &str) -> CliResult<Vec<Assignment>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| CliError::ConfigLine { line, msg: format!("expected key = value, got '{t}'") })?;
        let key = k.trim().to_string();
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::ConfigLine { line, msg: format!("unknown key '{key}'") });
        }
        out.push(Assignment { line, key, value: v.trim().to_string() });
    }
    Ok(out)
}

fn scalar<T: FromStr>(a: &Assignment) -> CliResult<T>
where
    T::Err: fmt::Display,
{
    a.value.parse::<T>().map_err(|e| a.err(format!("invalid value '{}': {e}", a.value)))
}

fn list<T: FromStr>(a: &Assignment) -> CliResult<Vec<T>>
where
    T::Err: fmt::Display,
{
    if a.value.is_empty() {
        return Err(a.err("empty list"));
    }
    a.value
        .split(',')
        .map(|s| s.trim().parse::<T>().map_err(|e| a.err(format!("invalid list entry '{}': {e}", s.trim()))))
        .collect()
}

fn positive_real(a: &Assignment) -> CliResult<f64> {
    let v: f64 = scalar(a)?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(a.err(format!("must be positive, got {v}")));
    }
    Ok(v)
}

fn positive_int(a: &Assignment) -> CliResult<usize> {
    let v: usize = scalar(a)?;
    if v == 0 {
        return Err(a.err("must be positive"));
    }
    Ok(v)
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Documented defaults for `experiment`.
    pub fn defaults(experiment: Experiment) -> Self {
        let d = match experiment {
            Experiment::LeechGaussian => 24,
            Experiment::PerfectSecurity => 2,
            _ => 1,
        };
        let dims = match experiment {
            Experiment::AcceptanceVsDim => vec![1, 2, 5, 10, 20, 50, 100, 200],
            _ => vec![10, 50, 100],
        };
        ExperimentConfig {
            experiment,
            d,
            sigma2: if experiment == Experiment::AppendixA { 0.5 } else { 1.0 },
            replicas: 100_000,
            t_values: (0..=20).collect(),
            seed: 0,
            output_path: PathBuf::from(format!("{}.csv", experiment.name())),
            backend: if experiment == Experiment::PerfectSecurity { BackendChoice::Hmc } else { BackendChoice::Exact },
            lattice: if experiment == Experiment::LeechGaussian { LatticeChoice::Leech } else { LatticeChoice::Zd },
            x0: vec![0.0; d],
            burn_in: 100,
            n_samples: 10_000,
            thin: 1,
            max_lag: 50,
            dims,
            bench_iterations: 1_000,
            bench_warmup: 100,
            window_max: 10,
            hmc: HmcParams::for_dimension(d),
            rwm_samples: DEFAULT_RWM_SAMPLES,
            rwm_iterations: DEFAULT_RWM_ITERATIONS,
        }
    }

    /// Applies assignments in order over the defaults of the experiment they
    /// name, or `fallback` when none does.
    pub fn from_assignments(assignments: &[Assignment], fallback: Option<Experiment>) -> CliResult<Self> {
        let experiment = match assignments.iter().rev().find(|a| a.key == "experiment") {
            Some(a) => scalar::<Experiment>(a)?,
            None => fallback.ok_or_else(|| CliError::Config("missing required key 'experiment'".into()))?,
        };
        let mut c = Self::defaults(experiment);
        let (mut hmc_l, mut hmc_eps, mut hmc_m, mut hmc_inner) = (None, None, None, None);
        let mut x0 = None;
        let mut lattice_set = false;
        let mut d_set = false;
        for a in assignments {
            match a.key.as_str() {
                "experiment" => {}
                "d" => {
                    c.d = positive_int(a)?;
                    d_set = true;
                }
                "sigma2" => c.sigma2 = positive_real(a)?,
                "replicas" => {
                    c.replicas = scalar(a)?;
                    if c.replicas < MIN_REPLICAS {
                        return Err(a.err(format!("must be at least {MIN_REPLICAS}, got {}", c.replicas)));
                    }
                }
                "t_values" => c.t_values = list(a)?,
                "seed" => c.seed = scalar(a)?,
                "output_path" => {
                    if a.value.is_empty() {
                        return Err(a.err("empty path"));
                    }
                    c.output_path = PathBuf::from(&a.value);
                }
                "backend" => c.backend = scalar(a)?,
                "lattice" => {
                    c.lattice = scalar(a)?;
                    lattice_set = true;
                }
                "x0" => {
                    let v: Vec<f64> = list(a)?;
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(a.err("entries must be finite"));
                    }
                    x0 = Some(v);
                }
                "burn_in" => c.burn_in = scalar(a)?,
                "n_samples" => c.n_samples = positive_int(a)?,
                "thin" => c.thin = positive_int(a)?,
                "max_lag" => c.max_lag = positive_int(a)?,
                "dims" => {
                    c.dims = list(a)?;
                    if c.dims.contains(&0) {
                        return Err(a.err("dimensions must be positive"));
                    }
                }
                "bench_iterations" => c.bench_iterations = positive_int(a)?,
                "bench_warmup" => c.bench_warmup = scalar(a)?,
                "window_max" => c.window_max = scalar(a)?,
                "hmc_leapfrog_steps" => hmc_l = Some(positive_int(a)?),
                "hmc_step_size" => hmc_eps = Some(positive_real(a)?),
                "hmc_momentum_variance" => hmc_m = Some(positive_real(a)?),
                "hmc_inner_iterations" => hmc_inner = Some(positive_int(a)?),
                "rwm_samples" => c.rwm_samples = positive_int(a)?,
                "rwm_iterations" => c.rwm_iterations = positive_int(a)?,
                other => return Err(a.err(format!("unknown key '{other}'"))),
            }
        }
        if !d_set && c.lattice == LatticeChoice::Leech {
            c.d = 24;
        }
        if !lattice_set && experiment == Experiment::LeechGaussian {
            c.lattice = LatticeChoice::Leech;
        }
        let base = HmcParams::for_dimension(c.d);
        c.hmc = HmcParams {
            leapfrog_steps: hmc_l.unwrap_or(base.leapfrog_steps),
            step_size: hmc_eps.unwrap_or(base.step_size),
            momentum_variance: hmc_m.unwrap_or(base.momentum_variance),
            inner_iterations: hmc_inner.unwrap_or(base.inner_iterations),
        };
        c.x0 = match x0 {
            None => vec![0.0; c.d],
            Some(v) if v.len() == 1 => vec![v[0]; c.d],
            Some(v) => v,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn parse(text: &str, fallback: Option<Experiment>) -> CliResult<Self> {
        Self::from_assignments(&parse_assignments(text)?, fallback)
    }

    /// Cross-field checks.
    pub fn validate(&self) -> CliResult<()> {
        if self.x0.len() != self.d {
            return Err(CliError::Config(format!("x0 has {} entries but d = {}", self.x0.len(), self.d)));
        }
        if self.t_values.is_empty() {
            return Err(CliError::Config("t_values must be nonempty".into()));
        }
        if self.lattice == LatticeChoice::Leech && self.d != 24 {
            return Err(CliError::Config(format!("the leech lattice needs d = 24, got {}", self.d)));
        }
        if self.experiment == Experiment::PerfectSecurity {
            if self.lattice != LatticeChoice::Zd {
                return Err(CliError::Config("perfect-security is defined on zd only".into()));
            }
            if !(2..=30).contains(&self.d) {
                return Err(CliError::Config(format!("perfect-security needs 2 <= d <= 30, got {}", self.d)));
            }
        }
        if self.n_samples <= self.max_lag && self.experiment == Experiment::Acf {
            return Err(CliError::Config("n_samples must exceed max_lag".into()));
        }
        Ok(())
    }

    /// Every effective setting, in key order.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let v: Vec<(&str, String)> = vec![
            ("experiment", self.experiment.to_string()),
            ("d", self.d.to_string()),
            ("sigma2", self.sigma2.to_string()),
            ("replicas", self.replicas.to_string()),
            ("t_values", join(&self.t_values)),
            ("seed", self.seed.to_string()),
            ("output_path", self.output_path.display().to_string()),
            ("backend", self.backend.to_string()),
            ("lattice", self.lattice.to_string()),
            ("x0", join(&self.x0)),
            ("burn_in", self.burn_in.to_string()),
            ("n_samples", self.n_samples.to_string()),
            ("thin", self.thin.to_string()),
            ("max_lag", self.max_lag.to_string()),
            ("dims", join(&self.dims)),
            ("bench_iterations", self.bench_iterations.to_string()),
            ("bench_warmup", self.bench_warmup.to_string()),
            ("window_max", self.window_max.to_string()),
            ("hmc_leapfrog_steps", self.hmc.leapfrog_steps.to_string()),
            ("hmc_step_size", self.hmc.step_size.to_string()),
            ("hmc_momentum_variance", self.hmc.momentum_variance.to_string()),
            ("hmc_inner_iterations", self.hmc.inner_iterations.to_string()),
            ("rwm_samples", self.rwm_samples.to_string()),
            ("rwm_iterations", self.rwm_iterations.to_string()),
        ];
        v.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn to_text(&self) -> String {
        self.to_pairs().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

/// Reads a config file; the file must name its experiment.
pub fn validate_config(path: impl AsRef<Path>) -> CliResult<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    ExperimentConfig::parse(&text, None)
}

/// File assignments (if any) followed by command-line overrides.
pub fn load_config(
    path: Option<&Path>,
    overrides: &[Assignment],
    fallback: Option<Experiment>,
) -> CliResult<ExperimentConfig> {
    let mut all = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| CliError::Io { path: p.to_path_buf(), source })?;
            parse_assignments(&text)?
        }
        None => Vec::new(),
    };
    all.extend_from_slice(overrides);
    ExperimentConfig::from_assignments(&all, fallback)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let c = ExperimentConfig::parse("", Some(Experiment::IsoGaussian)).unwrap();
        assert_eq!(c, ExperimentConfig::defaults(Experiment::IsoGaussian));
        assert_eq!(c.replicas, 100_000);
        assert_eq!(c.seed, 0);
        assert_eq!(c.hmc, HmcParams::for_dimension(1));
        assert!(ExperimentConfig::parse("", None).is_err());
    }

    #[test]
    fn negative_sigma2_names_key_and_line() {
        let e = ExperimentConfig::parse("experiment = iso-gaussian\n\nsigma2 = -1\n", None).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("line 3") && msg.contains("sigma2") && msg.contains("positive"), "{msg}");
    }

    #[test]
    fn unknown_key_and_malformed_lines() {
        let e = ExperimentConfig::parse("experiment = acf\ncolour = red\n", None).unwrap_err();
        assert!(e.to_string().contains("line 2"));
        assert!(ExperimentConfig::parse("experiment acf\n", None).is_err());
        assert!(ExperimentConfig::parse("experiment = acf\nd = two\n", None).is_err());
        assert!(ExperimentConfig::parse("experiment = acf\nreplicas = 50\n", None).is_err());
    }

    #[test]
    fn leech_defaults_and_checks() {
        let c = ExperimentConfig::parse("experiment = leech-gaussian\n", None).unwrap();
        assert_eq!((c.d, &c.lattice), (24, &LatticeChoice::Leech));
        assert!(ExperimentConfig::parse("experiment = leech-gaussian\nd = 5\n", None).is_err());
        let c = ExperimentConfig::parse("experiment = iso-gaussian\nlattice = file:/tmp/b.txt\nd = 3\n", None).unwrap();
        assert_eq!(c.lattice, LatticeChoice::File("/tmp/b.txt".into()));
    }

    #[test]
    fn round_trip() {
        let text = "experiment = perfect-security\nd = 3\nsigma2 = 0.25\nt_values = 1,2,5\nseed = 99\nx0 = 0.5\nhmc_step_size = 0.3\n";
        let c = ExperimentConfig::parse(text, None).unwrap();
        assert_eq!(c.x0, vec![0.5; 3]);
        assert_eq!(c.hmc.step_size, 0.3);
        assert_eq!(c.hmc.leapfrog_steps, HmcParams::for_dimension(3).leapfrog_steps);
        let again = ExperimentConfig::parse(&c.to_text(), None).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn later_assignments_win() {
        let file = parse_assignments("experiment = iso-gaussian\nd = 3\n").unwrap();
        let mut all = file;
        all.push(Assignment::flag("d", 4));
        let c = ExperimentConfig::from_assignments(&all, None).unwrap();
        assert_eq!((c.d, c.x0.len()), (4, 4));
    }
}
