//! Aggregation of trials into an [`ExperimentReport`] and its files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::{
    compare_counters, expected_counters, CounterCheck, Harness, HarnessError, OpCounters,
    Proportion, RunOptions, Scenario, TrialEvent, TrialRow,
};
use crate::actors::Variant;
use crate::adversaries::AdversaryKind;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateStat {
    pub name: String,
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl RateStat {
    pub fn new(name: impl Into<String>, p: Proportion) -> Self {
        let (ci_low, ci_high) = p.ci();
        Self {
            name: name.into(),
            successes: p.successes,
            trials: p.trials,
            rate: p.rate(),
            ci_low,
            ci_high,
        }
    }

    pub fn proportion(&self) -> Proportion {
        Proportion::new(self.successes, self.trials)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub scenario: Scenario,
    pub votes: u64,
    pub verifications: u64,
    pub rates: Vec<RateStat>,
    pub counters: OpCounters,
    pub expected_counters: OpCounters,
    pub counter_check: CounterCheck,
    pub notes: Vec<String>,
    pub events_file: Option<String>,
    #[serde(skip)]
    pub trials: Vec<TrialRow>,
    #[serde(skip)]
    pub events: Vec<TrialEvent>,
    #[serde(skip)]
    pub strategy_names: Vec<&'static str>,
}

impl ExperimentReport {
    pub fn rate(&self, name: &str) -> Option<&RateStat> {
        self.rates.iter().find(|r| r.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn trials_csv(&self) -> String {
        let mut out = String::from(
            "trial,voter_id,beta,submitted,alpha,verdict,search_attempts,search_success",
        );
        for name in &self.strategy_names {
            write!(out, ",guess_{name}").unwrap();
        }
        out.push('\n');
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in &self.trials {
            write!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.trial,
                r.voter_id,
                r.beta,
                opt(r.submitted.map(|v| v.to_string())),
                opt(r.alpha.map(|v| v.to_string())),
                r.verdict,
                opt(r.search_attempts.map(|v| v.to_string())),
                opt(r.search_success.map(|v| v.to_string())),
            )
            .unwrap();
            for i in 0..self.strategy_names.len() {
                write!(out, ",{}", opt(r.guesses.get(i).map(|g| g.to_string()))).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn events_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("event serializes"));
            out.push('\n');
        }
        out
    }

    /// One row per rate: `experiment, variant, m, t, trials, successes, rate, ci_low, ci_high, seed`.
    pub fn summary_csv(&self, experiment: &str) -> String {
        let mut out = summary_header();
        self.summary_rows(experiment, &mut out);
        out
    }

    pub fn summary_rows(&self, experiment: &str, out: &mut String) {
        let s = &self.scenario;
        let t = s.truncation_bits.map(|t| t.to_string()).unwrap_or_else(|| "symbols".into());
        for r in &self.rates {
            writeln!(
                out,
                "{experiment}:{},{},{},{t},{},{},{},{},{},{}",
                r.name,
                s.variant,
                s.m,
                r.trials,
                r.successes,
                r.rate,
                r.ci_low,
                r.ci_high,
                hex::encode(s.seed)
            )
            .unwrap();
        }
    }

    /// Writes `report.json`, `trials.csv`, `summary.csv` and, when events
    /// were captured, `events.jsonl` into `dir`.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json())?;
        fs::write(dir.join("trials.csv"), self.trials_csv())?;
        fs::write(dir.join("summary.csv"), self.summary_csv("scenario"))?;
        if self.events_file.is_some() {
            fs::write(dir.join("events.jsonl"), self.events_jsonl())?;
        }
        Ok(())
    }
}

pub fn summary_header() -> String {
    "experiment,variant,m,t,trials,successes,rate,ci_low,ci_high,seed\n".to_string()
}

pub fn run_scenario(s: &Scenario) -> Result<ExperimentReport, HarnessError> {
    run_scenario_with(
        s,
        RunOptions {
            capture_events: true,
            ..RunOptions::default()
        },
    )
}

pub fn run_scenario_with(s: &Scenario, opts: RunOptions) -> Result<ExperimentReport, HarnessError> {
    let harness = Harness::new(s, opts)?;
    let strategy_names = harness.strategy_names();
    let mut accept = Proportion::default();
    let mut alpha_ok = Proportion::default();
    let mut search = Proportion::default();
    let mut guesses = vec![Proportion::default(); strategy_names.len()];
    let mut counters = OpCounters::default();
    let (mut votes, mut verifications) = (0, 0);
    let mut trials = Vec::with_capacity(s.trials as usize);
    let mut events = Vec::new();

    for i in 0..s.trials {
        let t = harness.run_trial(i)?;
        accept.record(t.outcome.accepted());
        alpha_ok.record(t.row.alpha == Some(t.row.beta));
        if let Some(ok) = t.row.search_success {
            search.record(ok);
        }
        for (p, g) in guesses.iter_mut().zip(&t.row.guesses) {
            p.record(*g == t.row.beta);
        }
        counters += t.counters;
        votes += u64::from(t.stored);
        verifications += u64::from(t.verified);
        events.extend(t.events.into_iter().map(|event| TrialEvent { trial: i, event }));
        trials.push(t.row);
    }

    let mut rates = vec![
        RateStat::new("accept", accept),
        RateStat::new("alarm", Proportion::new(accept.trials - accept.successes, accept.trials)),
        RateStat::new("alpha_eq_beta", alpha_ok),
    ];
    if search.trials > 0 {
        rates.push(RateStat::new("search_success", search));
    }
    if s.has_sniffer() {
        for (name, p) in strategy_names.iter().zip(&guesses) {
            rates.push(RateStat::new(format!("guess_{name}"), *p));
        }
        let best = guesses
            .iter()
            .copied()
            .max_by_key(|p| p.successes)
            .expect("at least one strategy");
        rates.push(RateStat::new("guess_best", best));
    }

    let expected = expected_counters(s.variant, s.m as u64, votes, verifications);
    let counter_check = compare_counters(&counters, &expected);

    Ok(ExperimentReport {
        scenario: s.clone(),
        votes,
        verifications,
        rates,
        counters,
        expected_counters: expected,
        counter_check,
        notes: notes(s),
        events_file: opts.capture_events.then(|| "events.jsonl".to_string()),
        trials,
        events,
        strategy_names: if s.has_sniffer() {
            strategy_names
        } else {
            Vec::new()
        },
    })
}

fn notes(s: &Scenario) -> Vec<String> {
    let mut notes = Vec::new();
    if s.variant == Variant::Proposed {
        notes.push(
            "q_right holds 4 symbols from a 64-symbol alphabet: 24 bits chosen by the voter \
             inside a 32-bit field, so full-width comparison resists a guess with probability \
             1 - 2^-24"
                .into(),
        );
    }
    for a in &s.adversaries {
        match a.kind {
            AdversaryKind::FoolingSearch => {
                let t = s.truncation_bits.unwrap_or(24);
                notes.push(format!(
                    "fooling: the search fixes the target candidate, so each attempt succeeds \
                     with 2^-{t} = {:e}; an attacker who must also guess the voter's candidate \
                     succeeds per guess with (1/m)·2^-32 = {:e}",
                    2f64.powi(-(t as i32)),
                    2f64.powi(-32) / s.m as f64
                ));
            }
            AdversaryKind::VerifappSniffer => notes.push(
                "sniffer: each transcript is linkable to its voter_id through the voteref, so \
                 the device learns that the voter verified, though not the vote"
                    .into(),
            ),
            AdversaryKind::StudentSubstitution => {}
        }
    }
    notes
}
