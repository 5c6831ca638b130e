//! Line-oriented ballot store export:
//! `voter_id,seq,hex(ciphertext),hex(signature),hex(q),hex(voteref)`.
//!
//! `hex(q)` is empty for the original protocol. The voteref's issue time and
//! consumed flag are not part of the format; parsed records come back with
//! `issued_at = 0` and `consumed = false`.

use std::fmt::Write as _;

use super::{BallotRecord, MessageError, SignEncVote, VerificationParameter, VoteRef, VoteRefToken};
use crate::crypto_suite::{AsymCiphertext, Signature, VoterId};

pub fn write_ballot_store<'a>(records: impl IntoIterator<Item = &'a BallotRecord>) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.vote.voter_id,
            r.seq,
            hex::encode(r.vote.ciphertext.0),
            hex::encode(r.vote.signature.bytes),
            r.q.map(|q| hex::encode(q.0)).unwrap_or_default(),
            hex::encode(r.voteref.token.0),
        );
    }
    out
}

pub fn parse_ballot_store(text: &str) -> Result<Vec<BallotRecord>, MessageError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let err = |reason: String| MessageError::StoreFormat { line, reason };
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 6 {
            return Err(err(format!("expected 6 fields, got {}", fields.len())));
        }
        let voter_id = VoterId(
            fields[0]
                .parse()
                .map_err(|e| err(format!("voter_id: {e}")))?,
        );
        let seq = fields[1].parse().map_err(|e| err(format!("seq: {e}")))?;
        let bytes = |name: &str, s: &str| hex::decode(s).map_err(|e| err(format!("{name}: {e}")));
        let ciphertext = AsymCiphertext::from_slice(&bytes("ciphertext", fields[2])?)
            .map_err(|e| err(format!("ciphertext: {e}")))?;
        let signature = Signature::from_slice(&bytes("signature", fields[3])?, voter_id)
            .map_err(|e| err(format!("signature: {e}")))?;
        let q = if fields[4].is_empty() {
            None
        } else {
            let q: [u8; 32] = bytes("q", fields[4])?
                .try_into()
                .map_err(|_| err("q: expected 32 bytes".into()))?;
            Some(VerificationParameter(q))
        };
        let token: [u8; 16] = bytes("voteref", fields[5])?
            .try_into()
            .map_err(|_| err("voteref: expected 16 bytes".into()))?;
        out.push(BallotRecord {
            vote: SignEncVote {
                ciphertext,
                signature,
                voter_id,
            },
            q,
            voteref: VoteRef {
                token: VoteRefToken(token),
                issued_at: 0,
                consumed: false,
            },
            seq,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn record(q: Option<[u8; 32]>, id: u64, seq: u64, fill: u8) -> BallotRecord {
        BallotRecord {
            vote: SignEncVote {
                ciphertext: AsymCiphertext([fill; 64]),
                signature: Signature {
                    bytes: [fill.wrapping_add(1); 64],
                    signer_id: VoterId(id),
                },
                voter_id: VoterId(id),
            },
            q: q.map(VerificationParameter),
            voteref: VoteRef {
                token: VoteRefToken([fill.wrapping_add(2); 16]),
                issued_at: 0,
                consumed: false,
            },
            seq,
        }
    }

    #[test]
    fn original_record_has_empty_q_field() {
        let text = write_ballot_store([&record(None, 7, 1, 0)]);
        let fields: Vec<&str> = text.trim_end().split(',').collect();
        assert_eq!(fields[0], "7");
        assert_eq!(fields[1], "1");
        assert_eq!(fields[4], "");
        assert_eq!(fields[5], "02".repeat(16));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(
            parse_ballot_store("1,2,3"),
            Err(MessageError::StoreFormat { line: 1, .. })
        ));
        let mut text = write_ballot_store([&record(None, 1, 1, 0)]);
        text = text.replacen("1,1,", "1,x,", 1);
        assert!(parse_ballot_store(&text).is_err());
    }

    proptest! {
        #[test]
        fn store_round_trip(
            q in proptest::option::of(any::<[u8; 32]>()),
            id in any::<u64>(), seq in any::<u64>(), fill in any::<u8>(),
        ) {
            let recs = vec![record(q, id, seq, fill), record(None, id ^ 1, 0, fill ^ 0x55)];
            let parsed = parse_ballot_store(&write_ballot_store(&recs)).unwrap();
            prop_assert_eq!(parsed, recs);
        }
    }
}
