//! Seeded scenario runner.
//!
//! A [`Scenario`] fully determines a run: every trial draws its randomness
//! from `H(seed ‖ "trial" ‖ index)`, so a report is a pure function of the
//! scenario and any single trial can be replayed in isolation.

pub mod counters;
pub mod election;
pub mod report;
pub mod stats;
pub mod trial;

use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::actors::{ActorError, AuditError, Variant, VfsError};
use crate::adversaries::{
    AdversaryConfig, AdversaryKind, QHandling, StudentMode, TRUNCATION_WIDTHS,
};
use crate::crypto_suite::hash::hash_parts;
use crate::protocol_messages::MessageError;

pub use counters::{compare_counters, expected_counters, CounterCheck, CounterDiff, OpCounters};
pub use election::{run_election, ElectionReport};
pub use report::{run_scenario, run_scenario_with, ExperimentReport, RateStat};
pub use stats::{
    bernoulli_self_test, chi_square_homogeneity, chi_square_uniform, ChiSquare, Proportion,
};
pub use trial::{Harness, RunOptions, TrialEvent, TrialOutcome, TrialRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error("scenario line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Actor(#[from] ActorError),
    #[error(transparent)]
    Vfs(#[from] VfsError),
    #[error(transparent)]
    Message(#[from] MessageError),
    #[error(transparent)]
    Audit(#[from] AuditError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn hex_seed<S: Serializer>(seed: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&hex::encode(seed))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Scenario {
    pub variant: Variant,
    pub m: usize,
    pub voters: u64,
    pub adversaries: Vec<AdversaryConfig>,
    #[serde(serialize_with = "hex_seed")]
    pub seed: [u8; 32],
    /// Bits of `q_right` the voter compares. `None` compares the four
    /// rendered symbols.
    pub truncation_bits: Option<u32>,
    pub trials: u64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            variant: Variant::Proposed,
            m: 5,
            voters: 1,
            adversaries: Vec::new(),
            seed: [0; 32],
            truncation_bits: None,
            trials: 100,
        }
    }
}

impl Scenario {
    pub fn client_adversary(&self) -> Option<&AdversaryConfig> {
        self.adversaries.iter().find(|a| a.kind != AdversaryKind::VerifappSniffer)
    }

    pub fn has_sniffer(&self) -> bool {
        self.adversaries.iter().any(|a| a.kind == AdversaryKind::VerifappSniffer)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.m < 2 {
            return bad(format!("m must be at least 2, got {}", self.m));
        }
        if self.m > u32::MAX as usize {
            return bad("m exceeds the candidate id space".into());
        }
        if self.voters == 0 {
            return bad("voters must be at least 1".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if let Some(t) = self.truncation_bits {
            if self.variant == Variant::Original {
                return bad("truncation_bits applies to q, which the original variant lacks".into());
            }
            if !TRUNCATION_WIDTHS.contains(&t) {
                return bad(format!("truncation_bits must be one of {TRUNCATION_WIDTHS:?}"));
            }
        }
        let clients = self
            .adversaries
            .iter()
            .filter(|a| a.kind != AdversaryKind::VerifappSniffer)
            .count();
        if clients > 1 {
            return bad("at most one voting-client adversary per scenario".into());
        }
        for adv in &self.adversaries {
            adv.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
            if adv.target_candidate.is_some_and(|t| t > self.m) {
                return bad(format!("adversary target outside 1..={}", self.m));
            }
            if adv.kind == AdversaryKind::FoolingSearch {
                if self.variant == Variant::Original {
                    return bad("fooling_search needs the q of the proposed variant".into());
                }
                if let Some(t) = self.truncation_bits {
                    if adv.truncation_bits != t {
                        return bad(format!(
                            "adversary truncation {} differs from the voter's {t}",
                            adv.truncation_bits
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `H(root ‖ label ‖ index_le)`.
pub fn derive_seed(root: &[u8; 32], label: &str, index: u64) -> [u8; 32] {
    hash_parts(&[root, label.as_bytes(), &index.to_le_bytes()]).0
}

pub fn parse_seed(text: &str) -> Result<[u8; 32], String> {
    let bytes = hex::decode(text.trim()).map_err(|e| format!("seed is not hex: {e}"))?;
    bytes
        .try_into()
        .map_err(|b: Vec<u8>| format!("seed must be 32 bytes, got {}", b.len()))
}

/// Parses the flat `key = value` scenario format. `#` starts a comment.
///
/// Keys: `variant`, `m`, `voters`, `seed`, `trials`, `truncation_bits`,
/// `adversary.kind` (comma-separated), `adversary.budget`,
/// `adversary.target`, `adversary.mode` (`divert`/`cancel`) and
/// `adversary.q` (`forward`/`scramble`).
pub fn parse_scenario(text: &str) -> Result<Scenario, HarnessError> {
    let mut s = Scenario::default();
    let mut kinds: Vec<AdversaryKind> = Vec::new();
    let mut budget = None;
    let mut target = None;
    let mut mode = StudentMode::Divert;
    let mut q_handling = QHandling::Scramble;
    let mut seen = std::collections::HashSet::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |reason: String| HarnessError::Parse {
            line: line_no,
            reason,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err("expected `key = value`".into()))?;
        if !seen.insert(key.to_string()) {
            return Err(err(format!("duplicate key `{key}`")));
        }
        fn num<T: FromStr>(v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("`{v}` is not a valid number"))
        }
        let res: Result<(), String> = (|| {
            match key {
                "variant" => s.variant = value.parse()?,
                "m" => s.m = num(value)?,
                "voters" => s.voters = num(value)?,
                "trials" => s.trials = num(value)?,
                "seed" => s.seed = parse_seed(value)?,
                "truncation_bits" => {
                    s.truncation_bits = match value {
                        "none" | "symbols" => None,
                        v => Some(num(v)?),
                    }
                }
                "adversary.kind" => {
                    kinds = value
                        .split(',')
                        .map(str::trim)
                        .filter(|k| !k.is_empty() && *k != "none")
                        .map(str::parse)
                        .collect::<Result<_, _>>()?;
                }
                "adversary.budget" => budget = Some(num(value)?),
                "adversary.target" => target = Some(num(value)?),
                "adversary.mode" => {
                    mode = match value {
                        "divert" => StudentMode::Divert,
                        "cancel" => StudentMode::Cancel,
                        v => return Err(format!("unknown adversary.mode `{v}`")),
                    }
                }
                "adversary.q" => {
                    q_handling = match value {
                        "forward" => QHandling::Forward,
                        "scramble" => QHandling::Scramble,
                        v => return Err(format!("unknown adversary.q `{v}`")),
                    }
                }
                other => return Err(format!("unknown key `{other}`")),
            }
            Ok(())
        })();
        res.map_err(err)?;
    }

    s.adversaries = kinds
        .into_iter()
        .map(|kind| {
            let mut a = AdversaryConfig::new(kind);
            if let Some(b) = budget {
                a.search_budget = b;
            }
            if let Some(t) = s.truncation_bits {
                a.truncation_bits = t;
            }
            a.target_candidate = target;
            a.student_mode = mode;
            a.q_handling = q_handling;
            a
        })
        .collect();
    s.validate()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_keys() {
        let text = "\
# fooling at desk scale
variant = proposed
m = 3
voters = 2
seed = 0101010101010101010101010101010101010101010101010101010101010101
adversary.kind = fooling_search, verifapp_sniffer
adversary.budget = 500
truncation_bits = 8
trials = 20
";
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.m, 3);
        assert_eq!(s.voters, 2);
        assert_eq!(s.seed, [1; 32]);
        assert_eq!(s.truncation_bits, Some(8));
        assert_eq!(s.adversaries.len(), 2);
        assert_eq!(s.adversaries[0].search_budget, 500);
        assert_eq!(s.adversaries[0].truncation_bits, 8);
        assert!(s.has_sniffer());
    }

    #[test]
    fn rejects_bad_input() {
        for (text, line) in [
            ("m = x", 1),
            ("variant = proposed\nbogus = 1", 2),
            ("m = 3\nm = 4", 2),
            ("no equals sign", 1),
            ("seed = abcd", 1),
        ] {
            match parse_scenario(text) {
                Err(HarnessError::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn q_parameters_under_original_are_a_config_error() {
        for text in [
            "variant = original\ntruncation_bits = 8",
            "variant = original\nadversary.kind = fooling_search",
            "m = 1",
            "trials = 0",
            "adversary.kind = student_substitution, fooling_search",
            "truncation_bits = 12",
        ] {
            assert!(
                matches!(parse_scenario(text), Err(HarnessError::Config(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn seeds_split_by_label_and_index() {
        let root = [7; 32];
        assert_ne!(derive_seed(&root, "trial", 0), derive_seed(&root, "trial", 1));
        assert_ne!(derive_seed(&root, "trial", 0), derive_seed(&root, "election", 0));
        assert_eq!(derive_seed(&root, "trial", 3), derive_seed(&root, "trial", 3));
    }
}
