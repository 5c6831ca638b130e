use super::{OpCount, OriginalResponse, ProposedResponse};
use crate::crypto_suite::{asym_encrypt, hash, sym_decrypt, AsymCiphertext, ElectionPublicKey};
use crate::protocol_messages::{decode_qr, Candidate, CandidateList, DisplayList, MessageError, QrPayload};

/// Result of the original verification: the re-encryptions and, if one
/// matched the stored ciphertext, that candidate in the clear.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OriginalScreen {
    pub recomputed: Vec<AsymCiphertext>,
    /// 1-based position `ℓ` of the matching candidate.
    pub matched: Option<usize>,
    pub shown: Option<Candidate>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProposedScreen {
    pub recomputed: Vec<AsymCiphertext>,
    pub display: DisplayList,
}

/// The verification app on the voter's smart device.
#[derive(Debug, Clone)]
pub struct VerifApp {
    pk: ElectionPublicKey,
    ops: OpCount,
}

impl VerifApp {
    pub fn new(pk: ElectionPublicKey) -> Self {
        Self {
            pk,
            ops: OpCount::default(),
        }
    }

    /// Camera scan of the QR code on the voting client's screen.
    pub fn scan(&self, qr_text: &str) -> Result<QrPayload, MessageError> {
        decode_qr(qr_text)
    }

    fn reencrypt_all(&mut self, payload: &QrPayload, cl: &CandidateList) -> Vec<AsymCiphertext> {
        cl.iter()
            .map(|c| {
                self.ops.asym_enc += 1;
                asym_encrypt(&self.pk, c.id.into(), &payload.r).expect("u32 ids are in range")
            })
            .collect()
    }

    /// m asymmetric encryptions, then a byte-equality search.
    pub fn verify_original(
        &mut self,
        payload: &QrPayload,
        response: &OriginalResponse,
    ) -> OriginalScreen {
        let recomputed = self.reencrypt_all(payload, &response.cl);
        let matched = recomputed
            .iter()
            .position(|ct| *ct == response.e_asym)
            .map(|i| i + 1);
        let shown = matched.and_then(|l| response.cl.get(l).cloned());
        OriginalScreen {
            recomputed,
            matched,
            shown,
        }
    }

    /// m asymmetric encryptions and m symmetric decryptions. The app does not
    /// decide anything; it only shows the ordered list.
    pub fn verify_proposed(
        &mut self,
        payload: &QrPayload,
        response: &ProposedResponse,
    ) -> ProposedScreen {
        let recomputed = self.reencrypt_all(payload, &response.cl);
        let entries = recomputed
            .iter()
            .map(|ct| {
                let key = hash(&ct.0);
                self.ops.hash += 1;
                self.ops.sym_dec += 1;
                sym_decrypt(&key, &response.e_sym)
            })
            .collect();
        ProposedScreen {
            recomputed,
            display: DisplayList::from_entries(entries),
        }
    }

    pub fn ops(&self) -> OpCount {
        self.ops
    }
}
