//! Per-actor operation counters and the analytic cost model.

use std::fmt;
use std::ops::{Add, AddAssign};

use serde::Serialize;

use crate::actors::{OpCount, Variant};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OpCounters {
    pub voter_app: OpCount,
    pub vfs: OpCount,
    pub verif_app: OpCount,
    pub counting: OpCount,
    pub adversary: OpCount,
}

impl OpCounters {
    pub const ACTORS: [&'static str; 5] = ["voter_app", "vfs", "verif_app", "counting", "adversary"];

    pub fn actor(&self, name: &str) -> Option<&OpCount> {
        match name {
            "voter_app" => Some(&self.voter_app),
            "vfs" => Some(&self.vfs),
            "verif_app" => Some(&self.verif_app),
            "counting" => Some(&self.counting),
            "adversary" => Some(&self.adversary),
            _ => None,
        }
    }
}

impl Add for OpCounters {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            voter_app: self.voter_app + rhs.voter_app,
            vfs: self.vfs + rhs.vfs,
            verif_app: self.verif_app + rhs.verif_app,
            counting: self.counting + rhs.counting,
            adversary: self.adversary + rhs.adversary,
        }
    }
}

impl AddAssign for OpCounters {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// Counters that must match the prediction exactly.
pub const EXACT_COUNTERS: [&str; 3] = ["asym_enc", "sym_enc", "sym_dec"];
/// Actors covered by the cost model.
pub const MODELLED_ACTORS: [&str; 3] = ["voter_app", "vfs", "verif_app"];

/// Predicted cost of `votes` casts and `verifications` verifications.
///
/// Per vote the voting client does one asymmetric encryption and one
/// signature. Per verification the verification app re-encrypts all `m`
/// candidates and, in the proposed variant, also does `m` symmetric
/// decryptions, while the server does one symmetric encryption.
pub fn expected_counters(variant: Variant, m: u64, votes: u64, verifications: u64) -> OpCounters {
    let mut c = OpCounters::default();
    c.voter_app.asym_enc = votes;
    c.voter_app.sign = votes;
    c.vfs.verify = votes;
    c.verif_app.asym_enc = m * verifications;
    if variant == Variant::Proposed {
        c.verif_app.sym_dec = m * verifications;
        c.verif_app.hash = m * verifications;
        c.vfs.sym_enc = verifications;
        c.vfs.hash = verifications;
    }
    c
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CounterDiff {
    pub actor: &'static str,
    pub counter: &'static str,
    pub measured: u64,
    pub expected: u64,
}

impl fmt::Display for CounterDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{}: measured {} expected {}",
            self.actor, self.counter, self.measured, self.expected
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CounterCheck {
    /// Mismatches on the exact counters. Any entry fails the check.
    pub diffs: Vec<CounterDiff>,
    /// Mismatches on the remaining counters, reported only.
    pub informational: Vec<CounterDiff>,
}

impl CounterCheck {
    pub fn passed(&self) -> bool {
        self.diffs.is_empty()
    }
}

pub fn compare_counters(measured: &OpCounters, predicted: &OpCounters) -> CounterCheck {
    let mut check = CounterCheck::default();
    for actor in MODELLED_ACTORS {
        let (m, p) = (
            measured.actor(actor).expect("known actor"),
            predicted.actor(actor).expect("known actor"),
        );
        for counter in OpCount::FIELDS {
            let (mv, pv) = (m.get(counter).expect("field"), p.get(counter).expect("field"));
            if mv == pv {
                continue;
            }
            let diff = CounterDiff {
                actor,
                counter,
                measured: mv,
                expected: pv,
            };
            if EXACT_COUNTERS.contains(&counter) {
                check.diffs.push(diff);
            } else {
                check.informational.push(diff);
            }
        }
    }
    check
}
