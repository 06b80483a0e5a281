//! Command-line front end. [`run`] parses arguments, builds a [`Report`] and
//! renders it; `main` only forwards the result to the process.

mod report;
mod verify;

pub use report::{
    exact_fraction, prob_text, render_csv, render_json, render_text, Check, Command, Report,
    PREDICTION_TOLERANCE, SAMPLING_SIGMAS, SCHEMA_VERSION,
};
pub use verify::{verify_scenario, HARDY_FIXTURE_TOLERANCE};

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::path::PathBuf;

use crate::disturbance::{commutation_audit, loophole_matrix, prediction_stability};
use crate::error::Error;
use crate::lhv::{
    constraints_from_predictions, event_constraint, explain_contradiction, find_models,
    reduced_cabello,
};
use crate::measurement::{joint_distribution, sample_outcomes, EventPredicate};
use crate::scenarios::{prediction_table, Scenario};
use report::{
    AmplitudeEntry, AuditRow, DistributionEntry, DistributionSection, ModelSection,
    PredictionEntry, QuantityEntry, SampleEntry, SampleSection,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "eprlab", version, about = "Exact quantum predictions, hidden-variable searches and disturbance analyses for EPR-type arguments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioName {
    Cabello,
    Ghz,
    Hardy,
}

impl ScenarioName {
    pub fn build(self) -> Scenario {
        let name = match self {
            ScenarioName::Cabello => "cabello",
            ScenarioName::Ghz => "ghz",
            ScenarioName::Hardy => "hardy",
        };
        Scenario::by_name(name).expect("built-in scenario")
    }
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// State, observables, prediction table and joint distribution.
    Scenario {
        #[arg(value_enum)]
        name: ScenarioName,
    },
    /// Exhaustive search for deterministic local hidden-variable models.
    Lhv {
        #[arg(value_enum)]
        name: ScenarioName,
        /// Run event, e.g. "A1A3=+1,a1a3=+1,B2b4=+1,b2B4=-1". Defaults to the
        /// scenario's own run event.
        #[arg(long, value_name = "EVENT", conflicts_with = "reduced")]
        event: Option<EventPredicate>,
        /// Only the two predictions conditioned on Alice's pair, with the
        /// event A1A3=+1,a1a3=+1 (cabello only).
        #[arg(long)]
        reduced: bool,
    },
    /// Commutation audit and prediction stability under intervening measurements.
    Disturb {
        #[arg(value_enum)]
        name: ScenarioName,
        #[command(flatten)]
        custom: CustomDisturbance,
    },
    /// Seeded sampling of the scenario's joint measurement.
    Sample {
        #[arg(value_enum)]
        name: ScenarioName,
        #[arg(long = "n", value_name = "N", default_value_t = 80_000)]
        n: u64,
        #[arg(long, value_name = "S", default_value_t = 42)]
        seed: u64,
    },
    /// Runs every check for a scenario and prints one PASS/FAIL line each.
    Verify {
        #[arg(value_enum)]
        name: ScenarioName,
    },
}

/// A single user-specified stability question instead of the built-in matrix.
#[derive(Debug, Args)]
pub struct CustomDisturbance {
    #[arg(long, value_name = "EVENT", requires_all = ["target", "intervening"])]
    pub given: Option<EventPredicate>,
    #[arg(long, value_name = "EVENT", requires = "given")]
    pub target: Option<EventPredicate>,
    /// Comma-separated observable labels measured in between.
    #[arg(long, value_name = "LABELS", value_delimiter = ',', requires = "given")]
    pub intervening: Option<Vec<String>>,
    /// Keep only intervening outcomes satisfying EVENT.
    #[arg(long, value_name = "EVENT", requires = "given")]
    pub filter: Option<EventPredicate>,
}

/// Exit status plus what belongs on standard output and standard error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: String) -> Self {
        Self {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: msg,
        }
    }
}

/// An error attributed to a command-line flag.
struct FlagError {
    flag: &'static str,
    error: Error,
}

enum Failure {
    Usage(String),
    Internal(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Internal(e)
    }
}

impl From<FlagError> for Failure {
    fn from(e: FlagError) -> Self {
        Failure::Usage(format!("error: invalid value for '{}': {}\n", e.flag, e.error))
    }
}

fn flag<T>(flag: &'static str, r: crate::error::Result<T>) -> Result<T, FlagError> {
    r.map_err(|error| FlagError { flag, error })
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome::usage(text)
            };
        }
    };
    let (report, code) = match build(&cli.command) {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => return Outcome::usage(msg),
        Err(Failure::Internal(e)) => {
            return Outcome {
                code: EXIT_FAILURE,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            }
        }
    };
    let rendered = match cli.format {
        Format::Text => render_text(&report),
        Format::Json => render_json(&report),
        Format::Csv => render_csv(&report),
    };
    match &cli.out {
        Some(path) => match std::fs::write(path, &rendered) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => Outcome {
                code: EXIT_FAILURE,
                stdout: String::new(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
            },
        },
        None => Outcome {
            code,
            stdout: rendered,
            stderr: String::new(),
        },
    }
}

fn build(cmd: &Cmd) -> Result<(Report, i32), Failure> {
    match cmd {
        Cmd::Scenario { name } => scenario_report(&name.build()),
        Cmd::Lhv {
            name,
            event,
            reduced,
        } => lhv_report(&name.build(), event.as_ref(), *reduced),
        Cmd::Disturb { name, custom } => disturb_report(&name.build(), custom),
        Cmd::Sample { name, n, seed } => sample_report(&name.build(), *n, *seed),
        Cmd::Verify { name } => {
            let s = name.build();
            let checks = verify_scenario(&s);
            let code = if checks.iter().all(|c| c.pass) {
                EXIT_OK
            } else {
                EXIT_FAILURE
            };
            let mut r = Report::new(Command::Verify, &s.name);
            r.sections.checks = Some(checks);
            Ok((r, code))
        }
    }
}

fn scenario_report(s: &Scenario) -> Result<(Report, i32), Failure> {
    let mut r = Report::new(Command::Scenario, &s.name);
    let n = s.state.num_qubits();
    r.sections.state = Some(
        s.state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > crate::measurement::NULL_PROBABILITY)
            .map(|(i, a)| AmplitudeEntry {
                basis: format!("|{i:0n$b}>"),
                re: a.re,
                im: a.im,
            })
            .collect(),
    );
    let mut quantities: Vec<QuantityEntry> = s
        .quantities
        .iter()
        .map(|q| QuantityEntry {
            name: q.name.clone(),
            owner: q.party.to_string(),
            observable: q.observable.to_string(),
        })
        .collect();
    quantities.extend(s.composites.iter().map(|c| QuantityEntry {
        name: c.label.clone(),
        owner: c.factors.join("·"),
        observable: c.observable.to_string(),
    }));
    r.sections.quantities = Some(quantities);

    let table = prediction_table(s)?;
    let rows: Vec<PredictionEntry> = table
        .rows
        .into_iter()
        .map(|c| PredictionEntry {
            pass: c.deviation <= PREDICTION_TOLERANCE,
            exact: exact_fraction(c.computed),
            name: c.name,
            event: c.row,
            stored: c.stored,
            computed: c.computed,
            deviation: c.deviation,
        })
        .collect();
    let code = if rows.iter().all(|r| r.pass) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    };
    r.sections.prediction_table = Some(rows);

    let ctx = s.joint()?;
    let dist = joint_distribution(&s.state, &ctx)?;
    r.sections.distribution = Some(DistributionSection {
        context: ctx.labels().to_vec(),
        entries: dist
            .entries()
            .iter()
            .map(|(t, &p)| DistributionEntry {
                outcomes: t.clone(),
                probability: p,
                exact: exact_fraction(p),
            })
            .collect(),
    });
    Ok((r, code))
}

fn lhv_report(
    s: &Scenario,
    event: Option<&EventPredicate>,
    reduced: bool,
) -> Result<(Report, i32), Failure> {
    let (constraints, event) = if reduced {
        if s.name != "cabello" {
            return Err(Failure::Usage(format!(
                "error: '--reduced' applies only to the cabello scenario, not {}\n",
                s.name
            )));
        }
        let (cs, ev) = reduced_cabello(s)?;
        (cs, Some(ev))
    } else {
        let cs = constraints_from_predictions(s, &s.predictions)?;
        let ev = match event.or(s.run_event.as_ref()) {
            Some(e) => Some(flag("--event", event_constraint(s, e))?),
            None => None,
        };
        (cs, ev)
    };
    let report = find_models(&s.quantity_names(), &constraints, event.as_ref())?;
    let explanation = if report.contradiction {
        Some(explain_contradiction(&report, &constraints, event.as_ref())?)
    } else {
        None
    };
    let models = report
        .models
        .iter()
        .map(|m| {
            m.0.iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    let mut r = Report::new(Command::Lhv, &s.name);
    r.sections.model_report = Some(ModelSection {
        constraints: constraints.iter().map(|c| c.to_string()).collect(),
        event: event.as_ref().map(|e| e.text.clone()),
        report,
        models,
    });
    r.sections.explanation = explanation;
    Ok((r, EXIT_OK))
}

fn disturb_report(s: &Scenario, custom: &CustomDisturbance) -> Result<(Report, i32), Failure> {
    let mut contexts: Vec<Vec<String>> = Vec::new();
    let reports = match (&custom.given, &custom.target, &custom.intervening) {
        (Some(given), Some(target), Some(labels)) => {
            let intervening = flag("--intervening", s.context_for(labels))?;
            contexts.push(labels.clone());
            let report = prediction_stability(s, given, &intervening, target, custom.filter.as_ref())
                .map_err(|e| match e {
                    Error::FilterOutsideContext(_) => Failure::from(FlagError { flag: "--filter", error: e }),
                    Error::UnknownLabel(_) | Error::NonCommuting { .. } | Error::ConditioningOnNull(_) => {
                        Failure::from(FlagError { flag: "--given", error: e })
                    }
                    e => Failure::Internal(e),
                })?;
            vec![report]
        }
        _ => {
            for row in &s.predictions.rows {
                if !row.intervening.is_empty() && !contexts.contains(&row.intervening) {
                    contexts.push(row.intervening.clone());
                }
            }
            loophole_matrix(s)?
        }
    };
    let mut audit = Vec::new();
    for labels in &contexts {
        let ctx = s.context_for(labels)?;
        for e in commutation_audit(&s.quantities, &ctx)?.entries {
            audit.push(AuditRow {
                context: labels.join(","),
                quantity: e.quantity,
                observable: e.observable,
                commutes: e.commutes,
            });
        }
    }
    let mut r = Report::new(Command::Disturb, &s.name);
    r.sections.audit_table = Some(audit);
    r.sections.disturbance_reports = Some(reports);
    Ok((r, EXIT_OK))
}

fn sample_report(s: &Scenario, n: u64, seed: u64) -> Result<(Report, i32), Failure> {
    let ctx = s.joint()?;
    let dist = joint_distribution(&s.state, &ctx)?;
    let counts = sample_outcomes(&s.state, &ctx, n, seed)?;
    let entries: Vec<SampleEntry> = dist
        .entries()
        .iter()
        .map(|(t, &p)| {
            let count = counts.get(t).copied().unwrap_or(0);
            let expected = n as f64 * p;
            let sigma = (n as f64 * p * (1.0 - p)).sqrt();
            let z = if sigma > 0.0 {
                (count as f64 - expected) / sigma
            } else {
                0.0
            };
            SampleEntry {
                outcomes: t.clone(),
                count,
                expected,
                sigma,
                within: (count as f64 - expected).abs() <= SAMPLING_SIGMAS * sigma,
                z,
            }
        })
        .collect();
    let code = if entries.iter().all(|e| e.within) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    };
    let mut r = Report::new(Command::Sample, &s.name);
    r.sections.samples = Some(SampleSection {
        context: ctx.labels().to_vec(),
        entries,
    });
    r.metadata.seed = Some(seed);
    r.metadata.sample_size = Some(n);
    Ok((r, code))
}
