//! A whole election: every registered voter casts and verifies once against
//! one shared server, then the counting server tallies.

use std::fs;
use std::path::Path;

use serde::Serialize;

use super::{
    compare_counters, derive_seed, expected_counters, CounterCheck, Harness, HarnessError,
    OpCounters, RunOptions, Scenario, TrialEvent, TrialRow,
};
use crate::actors::{CountingServer, TallyResult};

#[derive(Debug, Clone, Serialize)]
pub struct ElectionReport {
    pub scenario: Scenario,
    pub accepted: u64,
    pub alarms: u64,
    pub tally: TallyResult,
    pub counters: OpCounters,
    pub expected_counters: OpCounters,
    pub counter_check: CounterCheck,
    #[serde(skip)]
    pub voters: Vec<TrialRow>,
    #[serde(skip)]
    pub events: Vec<TrialEvent>,
}

impl ElectionReport {
    pub fn all_accepted(&self) -> bool {
        self.alarms == 0
    }

    /// Writes `report.json`, `tally.json`, `trials.csv` and `events.jsonl`.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), pretty(self))?;
        fs::write(dir.join("tally.json"), pretty(&self.tally))?;
        let mut csv = String::from("voter_id,beta,submitted,alpha,verdict\n");
        for r in &self.voters {
            let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                r.voter_id,
                r.beta,
                opt(r.submitted),
                opt(r.alpha),
                r.verdict
            ));
        }
        fs::write(dir.join("trials.csv"), csv)?;
        let mut events = String::new();
        for e in &self.events {
            events.push_str(&serde_json::to_string(e).expect("event serializes"));
            events.push('\n');
        }
        fs::write(dir.join("events.jsonl"), events)
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializes");
    s.push('\n');
    s
}

pub fn run_election(s: &Scenario, opts: RunOptions) -> Result<ElectionReport, HarnessError> {
    let harness = Harness::new(s, opts)?;
    let mut vfs = harness.new_vfs(&derive_seed(&s.seed, "server", 0));
    let mut counters = OpCounters::default();
    let (mut accepted, mut alarms, mut votes, mut verifications) = (0, 0, 0, 0);
    let mut rows = Vec::new();
    let mut events = Vec::new();

    for voter in 0..s.voters {
        let seed = derive_seed(&s.seed, "voter", voter);
        let t = harness.session(&mut vfs, voter as usize, voter, &seed, None)?;
        if t.outcome.accepted() {
            accepted += 1;
        } else {
            alarms += 1;
        }
        votes += u64::from(t.stored);
        verifications += u64::from(t.verified);
        counters += t.counters;
        events.extend(t.events.into_iter().map(|event| TrialEvent { trial: voter, event }));
        rows.push(t.row);
    }

    let mut counting = CountingServer::default();
    let tally = counting.tally(
        &vfs,
        &harness.keys().sk,
        harness.registry(),
        &derive_seed(&s.seed, "mix", 0),
    )?;
    counters.counting = counting.ops();

    let expected = expected_counters(s.variant, s.m as u64, votes, verifications);
    Ok(ElectionReport {
        scenario: s.clone(),
        accepted,
        alarms,
        tally,
        counter_check: compare_counters(&counters, &expected),
        counters,
        expected_counters: expected,
        voters: rows,
        events,
    })
}
