//! QR payload carried from the voting client's screen to the verification
//! app's camera. Layout: `0x01 ‖ r[32] ‖ voteref[16]`, base-64 without padding.

use base64::engine::general_purpose::STANDARD_NO_PAD;
use base64::Engine;

use super::{MessageError, VoteRefToken};
use crate::crypto_suite::Randomness;

pub const QR_VERSION: u8 = 0x01;
pub const QR_BODY_LEN: usize = 1 + 32 + 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QrPayload {
    pub r: Randomness,
    pub voteref: VoteRefToken,
}

impl QrPayload {
    pub fn to_bytes(&self) -> [u8; QR_BODY_LEN] {
        let mut out = [0u8; QR_BODY_LEN];
        out[0] = QR_VERSION;
        out[1..33].copy_from_slice(&self.r.0);
        out[33..].copy_from_slice(&self.voteref.0);
        out
    }

    pub fn from_bytes(body: &[u8]) -> Result<Self, MessageError> {
        if body.len() != QR_BODY_LEN {
            return Err(MessageError::QrLength {
                expected: QR_BODY_LEN,
                actual: body.len(),
            });
        }
        if body[0] != QR_VERSION {
            return Err(MessageError::QrVersion(body[0]));
        }
        Ok(Self {
            r: Randomness(body[1..33].try_into().expect("32 bytes")),
            voteref: VoteRefToken(body[33..].try_into().expect("16 bytes")),
        })
    }
}

pub fn encode_qr(payload: &QrPayload) -> String {
    STANDARD_NO_PAD.encode(payload.to_bytes())
}

pub fn decode_qr(text: &str) -> Result<QrPayload, MessageError> {
    let body = STANDARD_NO_PAD
        .decode(text)
        .map_err(|e| MessageError::QrEncoding(e.to_string()))?;
    QrPayload::from_bytes(&body)
}
