//! `algebroid`: runs one verification job described by a JSON spec file
//! and writes a JSON report.
//!
//! Exit codes: 0 all checks pass, 1 some check fails, 2 input error,
//! 3 unsupported construction.

mod run;
mod spec;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use algebroid::report::Check;
use algebroid::sample::{DEFAULT_SAMPLES, DEFAULT_SEED};
use algebroid::symcalc::{max_degree, set_max_degree, with_degree_guard, DegreeCapExceeded};
use algebroid::Error;
use clap::Parser;
use serde::Serialize;
use serde_json::Value;

use run::{Settings, VERBS};
use spec::SpecFile;

#[derive(Parser, Debug)]
#[command(name = "algebroid", version, about = "Exact checks for Lie and Courant algebroid structure data")]
struct Args {
    /// JSON job file.
    #[arg(long)]
    spec: PathBuf,
    /// Verb to run; overrides the spec's "verb".
    #[arg(long)]
    verb: Option<String>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Cap on the total degree of intermediate polynomials.
    #[arg(long)]
    max_degree: Option<u32>,
}

#[derive(Serialize)]
struct Job {
    verb: String,
    spec: String,
    seed: u64,
    samples: usize,
    max_degree: u32,
}

#[derive(Serialize)]
struct ReportFile {
    tool_version: &'static str,
    job: Job,
    checks: Vec<Check>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    artifacts: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Unsupported(_) => 3,
        _ => 2,
    }
}

fn load(path: &PathBuf) -> Result<SpecFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(out: &Option<PathBuf>, report: &ReportFile) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    // degree-cap overruns unwind to `with_degree_guard`; keep them quiet
    let default_hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(move |info| {
        if info.payload().downcast_ref::<DegreeCapExceeded>().is_none() {
            default_hook(info);
        }
    }));
    if let Some(d) = args.max_degree {
        set_max_degree(d);
    }

    let spec = load(&args.spec);
    let verb = args
        .verb
        .clone()
        .or_else(|| spec.as_ref().ok().and_then(|s| s.verb.clone()))
        .unwrap_or_default();
    let mut report = ReportFile {
        tool_version: env!("CARGO_PKG_VERSION"),
        job: Job {
            verb: verb.clone(),
            spec: args.spec.display().to_string(),
            seed: args.seed,
            samples: args.samples,
            max_degree: max_degree(),
        },
        checks: Vec::new(),
        artifacts: BTreeMap::new(),
        error: None,
    };

    let result = match spec {
        Err(msg) => Err((2, msg)),
        Ok(_) if verb.is_empty() => Err((2, format!("no verb given; expected one of {}", VERBS.join(", ")))),
        Ok(spec) => {
            let settings = Settings { seed: args.seed, samples: args.samples };
            with_degree_guard(|| run::run(&verb, &spec, &settings)).map_err(|e| (exit_code(&e), e.to_string()))
        }
    };
    let code = match result {
        Ok(outcome) => {
            let passed = outcome.report.all_passed();
            report.checks = outcome.report.sorted().checks;
            report.artifacts = outcome.artifacts;
            if passed {
                0
            } else {
                1
            }
        }
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            report.error = Some(msg);
            code
        }
    };
    if let Err(msg) = write(&args.out, &report) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
