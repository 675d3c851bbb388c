//! Report documents and their JSON/CSV renderings.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use uncertlab_core::catalog::CheckOutcome;
use uncertlab_core::relations::Crossing;
use uncertlab_core::sampling::{RelationSweepSummary, UffinkSweepSummary};
use uncertlab_core::worlds::ChainOutcome;
use uncertlab_core::{RelationReport, Tolerances, UffinkReport};

pub const ROBERTSON: &str = "robertson: dA dB >= |<[A,B]>|/2";
pub const SCHRODINGER: &str = "schrodinger: var(A) var(B) >= |<[A,B]>|^2/4 + <{A-<A>,B-<B>}>^2/4";
pub const UFFINK: &str = "width-translation: dtheta(beta) W(alpha) >= hbar arccos((1+beta-alpha)/alpha)";
pub const CHAIN: &str = "repeated first-kind measurement";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config_echo: ConfigEcho,
    pub results: Vec<ResultEntry>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub scenario: Option<String>,
    pub custom: Option<String>,
    pub hbar: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub state: Option<String>,
    pub observable: Option<String>,
    pub samples: Option<usize>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResultEntry {
    Relation { anchor: String, state: String, a: String, b: String, report: RelationReport },
    Uffink { anchor: String, state: String, generator: String, report: UffinkReport },
    Chain { anchor: String, state: String, theta: String, a: String, conserved: bool, outcome: ChainOutcome<f64> },
    Check { anchor: String, scenario: String, outcome: CheckOutcome },
    RelationSweep { anchor: String, dims: Vec<usize>, summary: RelationSweepSummary },
    UffinkSweep { anchor: String, dims: Vec<usize>, summary: UffinkSweepSummary },
    Scenario { name: String, description: String, observables: Vec<String>, states: Vec<String>, checks: usize },
}

impl ResultEntry {
    /// False when the entry records a violated relation or failed check.
    pub fn ok(&self) -> bool {
        match self {
            ResultEntry::Relation { report, .. } => report.satisfied,
            ResultEntry::Uffink { report, .. } => report.satisfied,
            ResultEntry::Chain { conserved, outcome, .. } => {
                *conserved && outcome.fidelity.is_none_or(|f| f >= 1.0 - 1e-10)
            }
            ResultEntry::Check { outcome, .. } => outcome.passed,
            ResultEntry::RelationSweep { summary, .. } => {
                summary.robertson_violations + summary.schrodinger_violations + summary.ordering_violations == 0
            }
            ResultEntry::UffinkSweep { summary, .. } => summary.violations == 0,
            ResultEntry::Scenario { .. } => true,
        }
    }
}

impl Report {
    pub fn ok(&self) -> bool {
        self.results.iter().all(ResultEntry::ok)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match self.command.as_str() {
            "relations" => write_relations(&mut w, &self.results)?,
            "uffink" => write_uffink(&mut w, &self.results)?,
            "chain" => write_chain(&mut w, &self.results)?,
            "catalog" => write_catalog(&mut w, &self.results)?,
            "sweep" => write_sweep(&mut w, &self.results)?,
            _ => write_list(&mut w, &self.results)?,
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn render(&self, format: Format) -> Result<String, csv::Error> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Column headers per command, in output order.
pub fn csv_columns(command: &str) -> &'static [&'static str] {
    match command {
        "relations" => &["state", "a", "b", "relation", "lhs", "rhs", "slack", "satisfied"],
        "uffink" => &[
            "state",
            "generator",
            "alpha",
            "beta",
            "argument",
            "domain_ok",
            "beta_ge_2alpha_minus_1",
            "w_lo",
            "w_hi",
            "w_width",
            "w_mass",
            "crossing",
            "delta_theta",
            "root_residual",
            "lhs",
            "rhs",
            "satisfied",
            "vacuous",
        ],
        "chain" => &["mode", "row", "label", "eigenvalue", "amplitude_re", "amplitude_im", "probability"],
        "catalog" => &["scenario", "check", "passed", "observed", "expected"],
        "sweep" => &["sweep", "samples", "violations", "reached", "vacuous", "min_slack", "max_root_residual"],
        _ => &["name", "description", "observables", "states", "checks"],
    }
}

/// Twelve significant digits, exponent form outside `[1e-5, 1e15)`; empty
/// for undefined values.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    let sci = format!("{x:.11e}");
    let rounded: f64 = sci.parse().expect("valid float");
    if rounded == 0.0 {
        return "0".into();
    }
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        return rounded.to_string();
    }
    let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
    format!("{mantissa}e{exp}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

type W = csv::Writer<Vec<u8>>;

fn write_relations(w: &mut W, results: &[ResultEntry]) -> csv::Result<()> {
    w.write_record(csv_columns("relations"))?;
    for r in results {
        if let ResultEntry::Relation { state, a, b, report, .. } = r {
            let kind = serde_json::to_value(report.kind).expect("kind serializes");
            w.write_record([
                state.clone(),
                a.clone(),
                b.clone(),
                kind.as_str().unwrap_or_default().to_owned(),
                num(report.lhs),
                num(report.rhs),
                num(report.slack),
                report.satisfied.to_string(),
            ])?;
        }
    }
    Ok(())
}

fn write_uffink(w: &mut W, results: &[ResultEntry]) -> csv::Result<()> {
    w.write_record(csv_columns("uffink"))?;
    for r in results {
        if let ResultEntry::Uffink { state, generator, report, .. } = r {
            let (status, residual) = match report.crossing {
                Crossing::Reached { residual, .. } => ("reached".to_owned(), num(residual)),
                Crossing::NotReached { reason, .. } => {
                    let reason = serde_json::to_value(reason).expect("reason serializes");
                    (format!("not_reached_{}", reason.as_str().unwrap_or_default()), String::new())
                }
            };
            let iv = &report.w_interval;
            w.write_record([
                state.clone(),
                generator.clone(),
                num(report.alpha),
                num(report.beta),
                num(report.argument),
                report.domain_ok.to_string(),
                report.beta_at_least_two_alpha_minus_one.to_string(),
                num(iv.lo),
                num(iv.hi),
                num(iv.width),
                num(iv.mass),
                status,
                opt(report.delta_theta),
                residual,
                opt(report.lhs),
                opt(report.rhs),
                report.satisfied.to_string(),
                report.vacuous.to_string(),
            ])?;
        }
    }
    Ok(())
}

fn write_chain(w: &mut W, results: &[ResultEntry]) -> csv::Result<()> {
    w.write_record(csv_columns("chain"))?;
    for r in results {
        if let ResultEntry::Chain { outcome, .. } = r {
            let mode = if outcome.tree.decoherent { "decoherent" } else { "coherent" };
            for leaf in outcome.tree.leaves() {
                let last = leaf.pointer.history.last().map_or(f64::NAN, |r| r.value);
                let path: Vec<String> =
                    leaf.pointer.history.iter().map(|r| format!("{}={}", r.observable, num(r.value))).collect();
                w.write_record([
                    mode.to_owned(),
                    "leaf".to_owned(),
                    path.join(" > "),
                    num(last),
                    num(leaf.amplitude.re),
                    num(leaf.amplitude.im),
                    num(leaf.probability()),
                ])?;
            }
            for f in &outcome.final_outcomes {
                w.write_record([
                    mode.to_owned(),
                    "final".to_owned(),
                    format!("{} leaves", f.leaves),
                    num(f.eigenvalue),
                    opt(f.amplitude.map(|a| a.re)),
                    opt(f.amplitude.map(|a| a.im)),
                    num(f.probability),
                ])?;
            }
        }
    }
    Ok(())
}

fn join(values: impl Iterator<Item = String>) -> String {
    values.collect::<Vec<_>>().join(";")
}

fn write_catalog(w: &mut W, results: &[ResultEntry]) -> csv::Result<()> {
    use uncertlab_core::catalog::Expected;
    w.write_record(csv_columns("catalog"))?;
    for r in results {
        if let ResultEntry::Check { scenario, outcome, .. } = r {
            let expected = match &outcome.expected {
                Expected::Values { values, tol } => {
                    format!("{} +- {}", join(values.iter().map(|&v| num(v))), num(*tol))
                }
                Expected::Above { bound } => format!("> {}", num(*bound)),
            };
            w.write_record([
                scenario.clone(),
                outcome.id.clone(),
                outcome.passed.to_string(),
                join(outcome.observed.iter().map(|&v| opt(v))),
                expected,
            ])?;
        }
    }
    Ok(())
}

fn write_sweep(w: &mut W, results: &[ResultEntry]) -> csv::Result<()> {
    w.write_record(csv_columns("sweep"))?;
    for r in results {
        match r {
            ResultEntry::RelationSweep { summary: s, .. } => {
                w.write_record([
                    "robertson".to_owned(),
                    s.samples.to_string(),
                    s.robertson_violations.to_string(),
                    String::new(),
                    String::new(),
                    num(s.min_robertson_slack),
                    String::new(),
                ])?;
                w.write_record([
                    "schrodinger".to_owned(),
                    s.samples.to_string(),
                    (s.schrodinger_violations + s.ordering_violations).to_string(),
                    String::new(),
                    String::new(),
                    num(s.min_schrodinger_slack),
                    String::new(),
                ])?;
            }
            ResultEntry::UffinkSweep { summary: s, .. } => {
                w.write_record([
                    "width_translation".to_owned(),
                    s.samples.to_string(),
                    s.violations.to_string(),
                    s.reached.to_string(),
                    s.vacuous.to_string(),
                    opt(s.min_slack),
                    num(s.max_root_residual),
                ])?;
            }
            _ => {}
        }
    }
    Ok(())
}

fn write_list(w: &mut W, results: &[ResultEntry]) -> csv::Result<()> {
    w.write_record(csv_columns("list"))?;
    for r in results {
        if let ResultEntry::Scenario { name, description, observables, states, checks } = r {
            w.write_record([
                name.clone(),
                description.clone(),
                observables.join(";"),
                states.join(";"),
                checks.to_string(),
            ])?;
        }
    }
    Ok(())
}

/// Writes through a temporary file in the destination directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
