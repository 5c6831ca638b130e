use std::fmt;
use std::fs;
use std::path::Path;

use ivote::actors::Variant;
use ivote::adversaries::{AdversaryConfig, AdversaryKind};
use ivote::sim_harness::report::summary_header;
use ivote::sim_harness::{
    parse_scenario, parse_seed, run_election as harness_election, run_scenario_with,
    ExperimentReport, HarnessError, RunOptions, Scenario,
};
use log::{info, warn};

use crate::{CommonArgs, EXIT_ALARM, EXIT_CLAIM, EXIT_IO, EXIT_OK, EXIT_USAGE};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// Scenario from the file (or `base`), with command-line overrides applied.
/// Seed precedence: `--seed`, then the file, then `IVOTE_SEED`.
pub fn load_scenario(args: &CommonArgs, base: Scenario) -> Result<Scenario, CliError> {
    let mut file_has_seed = false;
    let mut s = match &args.scenario {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read scenario {}: {e}", path.display()))
            })?;
            file_has_seed = text
                .lines()
                .any(|l| l.split('#').next().unwrap_or("").trim_start().starts_with("seed"));
            parse_scenario(&text)?
        }
        None => base,
    };
    if let Some(hex) = &args.seed {
        s.seed = parse_seed(hex).map_err(|e| CliError::Usage(format!("--seed: {e}")))?;
    } else if !file_has_seed {
        if let Ok(hex) = std::env::var("IVOTE_SEED") {
            s.seed = parse_seed(&hex).map_err(|e| CliError::Usage(format!("IVOTE_SEED: {e}")))?;
        }
    }
    if let Some(t) = args.trials {
        s.trials = t;
    }
    if let Some(v) = args.variant {
        s.variant = v;
    }
    s.validate()?;
    Ok(s)
}

pub fn ensure_out(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))
}

pub fn run_election(args: &CommonArgs) -> Result<u8, CliError> {
    if args.scenario.is_none() {
        return Err(CliError::Usage("run-election needs --scenario".into()));
    }
    let s = load_scenario(args, Scenario::default())?;
    ensure_out(&args.out)?;
    info!("running {} election: m={} voters={}", s.variant, s.m, s.voters);
    let report = harness_election(
        &s,
        RunOptions {
            capture_events: true,
            ..RunOptions::default()
        },
    )?;
    report.write_to(&args.out).map_err(|e| CliError::io(&args.out, e))?;

    println!(
        "{} election, {} voters: {} accepted, {} alarms",
        s.variant, s.voters, report.accepted, report.alarms
    );
    for (id, count) in &report.tally.counts {
        println!("  candidate {id}: {count}");
    }
    if !report.counter_check.passed() {
        for d in &report.counter_check.diffs {
            eprintln!("counter mismatch: {d}");
        }
        return Ok(EXIT_CLAIM);
    }
    Ok(if report.all_accepted() { EXIT_OK } else { EXIT_ALARM })
}

/// Every strategy inside `1/m ± 4·sqrt((1/m)(1-1/m)/N)`.
fn guessing_only(report: &ExperimentReport) -> bool {
    let p = 1.0 / report.scenario.m as f64;
    report
        .rates
        .iter()
        .filter(|r| r.name.starts_with("guess_"))
        .all(|r| r.proportion().within(p, 4.0))
}

pub fn privacy_experiment(args: &CommonArgs, leaky: bool) -> Result<u8, CliError> {
    let base = Scenario {
        m: 5,
        trials: 20_000,
        ..Scenario::default()
    };
    let mut s = load_scenario(args, base)?;
    if !s.has_sniffer() {
        s.adversaries.push(AdversaryConfig::new(AdversaryKind::VerifappSniffer));
    }
    if s.client_adversary().is_some() {
        return Err(CliError::Usage(
            "privacy-experiment takes an honest voting client".into(),
        ));
    }
    ensure_out(&args.out)?;
    if leaky {
        warn!("leaky transcripts enabled: the verification screen marks the voter's row");
    }

    let mut summary = summary_header();
    let mut reports = Vec::new();
    for variant in [Variant::Proposed, Variant::Original] {
        let mut sv = s.clone();
        sv.variant = variant;
        if variant == Variant::Original {
            sv.truncation_bits = None;
        }
        let opts = RunOptions {
            leaky_transcript: leaky,
            capture_events: false,
        };
        let report = run_scenario_with(&sv, opts)?;
        let dir = args.out.join(variant.to_string());
        report.write_to(&dir).map_err(|e| CliError::io(&dir, e))?;
        report.summary_rows("privacy", &mut summary);
        reports.push(report);
    }
    let summary_path = args.out.join("privacy.csv");
    fs::write(&summary_path, &summary).map_err(|e| CliError::io(&summary_path, e))?;

    let proposed_ok = guessing_only(&reports[0]);
    let original_best = reports[1].rate("guess_best").expect("sniffer ran");
    let original_ok = original_best.successes == original_best.trials;
    let n = s.trials as f64;
    let p = 1.0 / s.m as f64;
    let delta = 4.0 * (p * (1.0 - p) / n).sqrt();
    let verdict = serde_json::json!({
        "m": s.m,
        "trials": s.trials,
        "expected_rate": p,
        "delta": delta,
        "proposed_within_guessing": proposed_ok,
        "original_rate": original_best.rate,
        "passed": proposed_ok && original_ok,
    });
    let path = args.out.join("privacy.json");
    fs::write(&path, format!("{verdict:#}\n")).map_err(|e| CliError::io(&path, e))?;

    print!("{summary}");
    println!(
        "proposed within {p:.4} ± {delta:.4}: {proposed_ok}; original rate {}",
        original_best.rate
    );
    Ok(if proposed_ok && original_ok { EXIT_OK } else { EXIT_CLAIM })
}
