//! Command dispatch for the `uncertlab` binary.

pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use uncertlab_core::catalog::{scenario, Check, Scenario, SCENARIO_NAMES};
use uncertlab_core::relations::{robertson_check, schrodinger_check, uffink_check, SearchParams, SweepGrid};
use uncertlab_core::sampling::{relation_sweep, rng_from_seed, uffink_sweep};
use uncertlab_core::worlds::repeated_measurement_chain;
use uncertlab_core::{HermitianObservable, QuantumState, Tolerances};

pub use config::{parse_config, Config, ConfigError};
use report::{ConfigEcho, Provenance};
pub use report::{Format, Report, ResultEntry};

/// Dimensions cycled through by `sweep`.
pub const SWEEP_DIMS: [usize; 4] = [2, 3, 4, 5];
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Robertson and Schrödinger checks for every state and observable pair.
    Relations,
    /// Width/translation checks for one state and generator over an (α, β) grid or one cell.
    Uffink,
    /// Seeded random checks of all three relations.
    Sweep,
    /// Repeated-measurement branch trees, coherent and decoherent.
    Chain,
    /// Runs a built-in scenario's expected checks.
    Catalog,
    /// Lists built-in scenarios.
    List,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Relations => "relations",
            Command::Uffink => "uffink",
            Command::Sweep => "sweep",
            Command::Chain => "chain",
            Command::Catalog => "catalog",
            Command::List => "list",
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "uncertlab",
    version,
    about = "Uncertainty relations and measurement branching on finite-dimensional states"
)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Built-in scenario (see `uncertlab list`).
    #[arg(long, conflicts_with = "custom")]
    pub scenario: Option<String>,
    /// JSON document with `observables` and `states`.
    #[arg(long)]
    pub custom: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// State to use (default: the first one).
    #[arg(long)]
    pub state: Option<String>,
    /// Generator for `uffink`, prepared observable θ for `chain` (default: the first one).
    #[arg(long)]
    pub observable: Option<String>,
    /// Intermediate observable for `chain` (default: the second one).
    #[arg(long)]
    pub measure: Option<String>,
    /// Seed for `sweep` (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random samples per relation for `sweep`.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file, written atomically; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Tolerance override, e.g. `--tolerance hermitian=1e-8`; repeatable.
    #[arg(long = "tolerance", value_name = "NAME=VALUE")]
    pub tolerances: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] uncertlab_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Observables and states from a scenario or a custom file.
struct Source {
    observables: Vec<(String, HermitianObservable)>,
    states: Vec<(String, QuantumState)>,
    sweep: Option<SweepGrid>,
    scenario: Option<Scenario>,
    warnings: Vec<String>,
}

impl Source {
    fn observable(
        &self,
        name: Option<&str>,
        default: usize,
        what: &str,
    ) -> Result<(String, &HermitianObservable), CliError> {
        pick(&self.observables, name, default, what)
    }

    fn state(&self, name: Option<&str>) -> Result<(String, &QuantumState), CliError> {
        pick(&self.states, name, 0, "state")
    }
}

fn pick<'a, V>(
    items: &'a [(String, V)],
    name: Option<&str>,
    default: usize,
    what: &str,
) -> Result<(String, &'a V), CliError> {
    let found = match name {
        Some(n) => items.iter().find(|(k, _)| k == n),
        None => items.get(default),
    };
    found.map(|(k, v)| (k.clone(), v)).ok_or_else(|| match name {
        Some(n) => usage(format!("no {what} named {n:?}")),
        None => usage(format!("no {what} available")),
    })
}

pub fn tolerances(overrides: &[String]) -> Result<Tolerances, CliError> {
    let mut tol = Tolerances::default();
    for o in overrides {
        let (name, value) = o.split_once('=').ok_or_else(|| usage(format!("tolerance {o:?} is not NAME=VALUE")))?;
        let value: f64 =
            value.trim().parse().map_err(|_| usage(format!("tolerance {name}: {value:?} is not a number")))?;
        if !(value.is_finite() && value >= 0.0) {
            return Err(usage(format!("tolerance {name} must be finite and non-negative")));
        }
        if !tol.set(name.trim(), value) {
            return Err(usage(format!("unknown tolerance {name:?}")));
        }
    }
    Ok(tol)
}

fn load_source(cfg: &RunConfig, tol: &Tolerances) -> Result<Source, CliError> {
    match (&cfg.scenario, &cfg.custom) {
        (Some(name), None) => {
            let sc = scenario(name, cfg.hbar, tol)?.ok_or_else(|| {
                usage(format!("unknown scenario {name:?}; expected one of {}", SCENARIO_NAMES.join(", ")))
            })?;
            Ok(Source {
                observables: sc.observables.clone(),
                states: sc.states.clone(),
                sweep: sc.sweep.clone(),
                scenario: Some(sc),
                warnings: Vec::new(),
            })
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
            let Config { observables, states, warnings, .. } = parse_config(&text, tol)?;
            Ok(Source { observables, states, sweep: None, scenario: None, warnings })
        }
        (None, None) => Err(usage("one of --scenario or --custom is required")),
        (Some(_), Some(_)) => Err(usage("--scenario and --custom are exclusive")),
    }
}

/// Runs one command and builds its report; writing is left to the caller.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let tol = tolerances(&cfg.tolerances)?;
    if !(cfg.hbar.is_finite() && cfg.hbar > 0.0) {
        return Err(usage("--hbar must be finite and positive"));
    }
    let mut echo = ConfigEcho {
        scenario: cfg.scenario.clone(),
        custom: cfg.custom.as_ref().map(|p| p.display().to_string()),
        hbar: cfg.hbar,
        alpha: cfg.alpha,
        beta: cfg.beta,
        state: cfg.state.clone(),
        observable: cfg.observable.clone(),
        samples: cfg.samples,
        warnings: Vec::new(),
    };
    let mut seed = cfg.seed;
    let results = match cfg.command {
        Command::List => list(cfg, &tol)?,
        Command::Sweep => {
            if cfg.scenario.is_some() || cfg.custom.is_some() {
                return Err(usage("sweep draws random states and takes no --scenario or --custom"));
            }
            let s = *seed.get_or_insert(0);
            let samples = *echo.samples.get_or_insert(DEFAULT_SAMPLES);
            sweep(s, samples, cfg.hbar, &tol)?
        }
        cmd => {
            let src = load_source(cfg, &tol)?;
            echo.warnings = src.warnings.clone();
            match cmd {
                Command::Relations => relations(cfg, &src, &tol)?,
                Command::Uffink => uffink(cfg, &src, &tol)?,
                Command::Chain => chain(cfg, &src, &tol)?,
                _ => catalog(cfg, &src, &tol)?,
            }
        }
    };
    Ok(Report {
        command: cfg.command.name().to_owned(),
        config_echo: echo,
        results,
        provenance: Provenance { version: uncertlab_core::VERSION.to_owned(), seed, tolerances: tol },
    })
}

fn list(cfg: &RunConfig, tol: &Tolerances) -> Result<Vec<ResultEntry>, CliError> {
    if cfg.scenario.is_some() || cfg.custom.is_some() {
        return Err(usage("list takes no --scenario or --custom"));
    }
    SCENARIO_NAMES
        .iter()
        .map(|name| {
            let sc = scenario(name, cfg.hbar, tol)?.expect("listed scenario exists");
            Ok(ResultEntry::Scenario {
                name: sc.name,
                description: sc.description,
                observables: sc.observables.into_iter().map(|(n, _)| n).collect(),
                states: sc.states.into_iter().map(|(n, _)| n).collect(),
                checks: sc.expected.len(),
            })
        })
        .collect()
}

fn relations(cfg: &RunConfig, src: &Source, tol: &Tolerances) -> Result<Vec<ResultEntry>, CliError> {
    if src.observables.len() < 2 {
        return Err(usage("relations needs at least two observables"));
    }
    let states: Vec<_> = match &cfg.state {
        Some(n) => vec![src.state(Some(n))?],
        None => src.states.iter().map(|(n, v)| (n.clone(), v)).collect(),
    };
    if states.is_empty() {
        return Err(usage("relations needs at least one state"));
    }
    let mut out = Vec::new();
    for (sn, s) in &states {
        for (i, (an, a)) in src.observables.iter().enumerate() {
            for (bn, b) in &src.observables[i + 1..] {
                for (anchor, report) in [
                    (report::ROBERTSON, robertson_check(s, a, b, tol)?),
                    (report::SCHRODINGER, schrodinger_check(s, a, b, tol)?),
                ] {
                    out.push(ResultEntry::Relation {
                        anchor: anchor.to_owned(),
                        state: sn.clone(),
                        a: an.clone(),
                        b: bn.clone(),
                        report,
                    });
                }
            }
        }
    }
    Ok(out)
}

fn uffink(cfg: &RunConfig, src: &Source, tol: &Tolerances) -> Result<Vec<ResultEntry>, CliError> {
    let (sn, s) = src.state(cfg.state.as_deref())?;
    let (gn, g) = src.observable(cfg.observable.as_deref(), 0, "observable")?;
    let cells: Vec<(f64, f64)> = match (cfg.alpha, cfg.beta) {
        (Some(a), Some(b)) => vec![(a, b)],
        (None, None) => src.sweep.clone().unwrap_or_else(SweepGrid::standard).cells().collect(),
        _ => return Err(usage("--alpha and --beta must be given together")),
    };
    let search = SearchParams::default();
    cells
        .into_iter()
        .map(|(alpha, beta)| {
            Ok(ResultEntry::Uffink {
                anchor: report::UFFINK.to_owned(),
                state: sn.clone(),
                generator: gn.clone(),
                report: uffink_check(s, g, alpha, beta, cfg.hbar, &search, tol)?,
            })
        })
        .collect()
}

fn chain_entries(
    state: (String, &QuantumState),
    theta: (String, &HermitianObservable),
    a: (String, &HermitianObservable),
    hbar: f64,
    tol: &Tolerances,
) -> Result<Vec<ResultEntry>, CliError> {
    [false, true]
        .into_iter()
        .map(|decoherent| {
            let outcome = repeated_measurement_chain(state.1, theta.1, a.1, decoherent, hbar, tol)?;
            let conserved = outcome.tree.probability_by_depth().iter().all(|p| (p - 1.0).abs() <= 1e-10);
            Ok(ResultEntry::Chain {
                anchor: report::CHAIN.to_owned(),
                state: state.0.clone(),
                theta: theta.0.clone(),
                a: a.0.clone(),
                conserved,
                outcome,
            })
        })
        .collect()
}

fn chain(cfg: &RunConfig, src: &Source, tol: &Tolerances) -> Result<Vec<ResultEntry>, CliError> {
    let state = src.state(cfg.state.as_deref())?;
    let theta = src.observable(cfg.observable.as_deref(), 0, "observable")?;
    let a = src.observable(cfg.measure.as_deref(), 1, "observable to measure")?;
    chain_entries(state, theta, a, cfg.hbar, tol)
}

fn catalog(cfg: &RunConfig, src: &Source, tol: &Tolerances) -> Result<Vec<ResultEntry>, CliError> {
    let sc = src.scenario.as_ref().ok_or_else(|| usage("catalog needs --scenario"))?;
    sc.validate()?;
    let mut out: Vec<ResultEntry> = sc
        .run(tol)?
        .into_iter()
        .map(|outcome| ResultEntry::Check {
            anchor: anchor_of(&sc.expected, &outcome.id),
            scenario: sc.name.clone(),
            outcome,
        })
        .collect();
    // Full branch trees for every chain the checks refer to.
    let mut seen = Vec::new();
    for e in &sc.expected {
        let triple = match &e.check {
            Check::ChainFidelity { state, theta, a }
            | Check::ChainLeafCount { state, theta, a, .. }
            | Check::ChainFinalDistribution { state, theta, a, .. } => (state, theta, a),
            _ => continue,
        };
        if seen.contains(&triple) {
            continue;
        }
        seen.push(triple);
        let (state, theta, a) = triple;
        out.extend(chain_entries(
            src.state(Some(state))?,
            src.observable(Some(theta), 0, "observable")?,
            src.observable(Some(a), 0, "observable")?,
            cfg.hbar,
            tol,
        )?);
    }
    Ok(out)
}

fn anchor_of(expected: &[uncertlab_core::catalog::ExpectedCheck], id: &str) -> String {
    let Some(e) = expected.iter().find(|e| e.id == id) else { return String::new() };
    match e.check {
        Check::RobertsonLhs { .. } | Check::RobertsonRhs { .. } | Check::Stddev { .. } => report::ROBERTSON,
        Check::UffinkSides { .. } | Check::UffinkDomain { .. } | Check::UffinkSweep { .. } => report::UFFINK,
        Check::ChainFidelity { .. } | Check::ChainLeafCount { .. } | Check::ChainFinalDistribution { .. } => {
            report::CHAIN
        }
        Check::CommutatorMaxNorm { .. } | Check::JointCount { .. } | Check::JointEigenvalues { .. } => {
            "joint eigenvectors of non-commuting observables"
        }
        Check::WorldProbabilities { .. } => "worlds decomposition",
        Check::Expectation { .. } => "expectation value",
    }
    .to_owned()
}

fn sweep(seed: u64, samples: usize, hbar: f64, tol: &Tolerances) -> Result<Vec<ResultEntry>, CliError> {
    if samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    let rel = relation_sweep(&mut rng, samples, &SWEEP_DIMS, tol)?;
    let uff = uffink_sweep(&mut rng, samples, &SWEEP_DIMS, hbar, tol)?;
    Ok(vec![
        ResultEntry::RelationSweep {
            anchor: format!("{}; {}", report::ROBERTSON, report::SCHRODINGER),
            dims: SWEEP_DIMS.to_vec(),
            summary: rel,
        },
        ResultEntry::UffinkSweep { anchor: report::UFFINK.to_owned(), dims: SWEEP_DIMS.to_vec(), summary: uff },
    ])
}

/// Renders and writes the report; returns the process exit code.
pub fn emit(cfg: &RunConfig, report: &Report) -> Result<i32, CliError> {
    let text = report.render(cfg.format)?;
    match &cfg.out {
        Some(path) => report::write_atomic(path, &text)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?,
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
        }
    }
    Ok(if report.ok() { 0 } else { 1 })
}
