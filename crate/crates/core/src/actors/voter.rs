//! The human voter's final comparison.

use super::{OriginalScreen, Variant, VoterIntent};
use crate::protocol_messages::{truncate_display, Candidate, DisplayList, QRight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AlarmReason {
    /// Nothing on the screen matched.
    NoMatch,
    /// Original variant: the shown candidate is not the chosen one.
    WrongCandidate,
    /// Proposed variant: the voter's characters appear at another position.
    WrongPosition,
    /// Proposed variant: the voter's characters appear more than once.
    Ambiguous,
    /// The verification could not be run (unknown or replayed voteref).
    VerificationFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Alarm(AlarmReason),
}

impl AlarmReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlarmReason::NoMatch => "no_match",
            AlarmReason::WrongCandidate => "wrong_candidate",
            AlarmReason::WrongPosition => "wrong_position",
            AlarmReason::Ambiguous => "ambiguous",
            AlarmReason::VerificationFailed => "verification_failed",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Accept => f.write_str("accept"),
            Verdict::Alarm(r) => write!(f, "alarm:{}", r.as_str()),
        }
    }
}

/// How the voter compares display entries with what they remember.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    /// The four rendered symbols against the characters the voter typed.
    Symbols,
    /// The low `bits` bits of each entry against `reference`, the `q_right`
    /// value shown by the voting client. Used by experiments that shorten
    /// the compared width to make collisions observable.
    LowBits { bits: u32, reference: QRight },
}

fn low_bits(v: u32, bits: u32) -> u32 {
    if bits >= 32 {
        v
    } else {
        v & ((1u32 << bits) - 1)
    }
}

impl Comparison {
    pub fn matches(&self, display: &DisplayList, position: usize, intent: &VoterIntent) -> bool {
        display
            .entry(position)
            .is_some_and(|e| self.matches_entry(e, intent))
    }

    /// Would the voter take the decrypted entry `q_j` for their own?
    pub fn matches_entry(&self, entry: &[u8; 32], intent: &VoterIntent) -> bool {
        match *self {
            Comparison::Symbols => intent
                .chosen_q_right
                .as_deref()
                .is_some_and(|chars| truncate_display(entry) == chars),
            Comparison::LowBits { bits, reference } => {
                let v = u32::from_be_bytes(entry[28..].try_into().expect("4 bytes"));
                low_bits(v, bits) == low_bits(reference.to_u32(), bits)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Displayed {
    Candidate(Option<Candidate>),
    List(DisplayList),
    Nothing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationOutcome {
    pub variant: Variant,
    pub verdict: Verdict,
    pub displayed: Displayed,
    /// Proposed variant: the position `α` where the voter found their characters.
    pub matched_index: Option<usize>,
}

impl VerificationOutcome {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }

    pub fn alarm(&self) -> bool {
        !self.accepted()
    }
}

/// Accept iff the shown candidate is the chosen one.
pub fn voter_check_original(screen: &OriginalScreen, intent: &VoterIntent) -> Verdict {
    match &screen.shown {
        None => Verdict::Alarm(AlarmReason::NoMatch),
        Some(c) if *c == intent.candidate => Verdict::Accept,
        Some(_) => Verdict::Alarm(AlarmReason::WrongCandidate),
    }
}

/// Scans the list for the voter's characters. Accepts only when they appear
/// exactly once, at the chosen position. Returns the verdict and `α`, the
/// first matching position.
pub fn voter_check_proposed(
    display: &DisplayList,
    intent: &VoterIntent,
    comparison: Comparison,
) -> (Verdict, Option<usize>) {
    let hits: Vec<usize> = (1..=display.len())
        .filter(|&j| comparison.matches(display, j, intent))
        .collect();
    let alpha = hits.first().copied();
    let verdict = match hits.as_slice() {
        [] => Verdict::Alarm(AlarmReason::NoMatch),
        [a] if *a == intent.beta => Verdict::Accept,
        [_] => Verdict::Alarm(AlarmReason::WrongPosition),
        _ => Verdict::Alarm(AlarmReason::Ambiguous),
    };
    (verdict, alpha)
}
