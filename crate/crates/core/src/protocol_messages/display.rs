//! The four-character rendering of verification parameters.
//!
//! Voters pick `q_right` as four symbols from a 64-symbol alphabet, one byte
//! per symbol. Decryptions under wrong keys are uniform bytes, so the screen
//! needs a rendering for all 256 byte values. The display table maps each
//! alphabet byte to itself (its ASCII symbol) and assigns the remaining 192
//! bytes to the alphabet cyclically, so every symbol has exactly four
//! preimages and a uniform byte renders as a uniform symbol.

use rand::Rng;

use super::MessageError;

pub const ALPHABET: &[u8; 64] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
pub const Q_RIGHT_CHARS: usize = 4;
pub const PREIMAGES_PER_SYMBOL: usize = 4;

const fn in_alphabet(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'+' || b == b'/'
}

const fn build_display_table() -> [u8; 256] {
    let mut table = [0u8; 256];
    let mut rank = 0usize;
    let mut b = 0usize;
    while b < 256 {
        if in_alphabet(b as u8) {
            table[b] = b as u8;
        } else {
            table[b] = ALPHABET[rank % 64];
            rank += 1;
        }
        b += 1;
    }
    table
}

const fn build_preimages() -> [[u8; PREIMAGES_PER_SYMBOL]; 128] {
    let table = build_display_table();
    let mut pre = [[0u8; PREIMAGES_PER_SYMBOL]; 128];
    let mut fill = [0usize; 128];
    let mut b = 0usize;
    while b < 256 {
        let sym = table[b] as usize;
        pre[sym][fill[sym]] = b as u8;
        fill[sym] += 1;
        b += 1;
    }
    pre
}

/// Byte value to displayed symbol.
pub const DISPLAY_TABLE: [u8; 256] = build_display_table();
// Indexed by the ASCII code of the symbol.
const PREIMAGES: [[u8; PREIMAGES_PER_SYMBOL]; 128] = build_preimages();

pub fn display_symbol(byte: u8) -> char {
    DISPLAY_TABLE[byte as usize] as char
}

/// All byte values that render as `symbol`, ascending.
pub fn preimages(symbol: char) -> Result<[u8; PREIMAGES_PER_SYMBOL], MessageError> {
    if symbol.is_ascii() && in_alphabet(symbol as u8) {
        Ok(PREIMAGES[symbol as usize])
    } else {
        Err(MessageError::Alphabet(symbol))
    }
}

/// The low 32 bits of a verification parameter, stored as bytes 29..=32 of `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct QRight(pub [u8; Q_RIGHT_CHARS]);

impl QRight {
    pub fn to_u32(self) -> u32 {
        u32::from_be_bytes(self.0)
    }

    pub fn from_u32(v: u32) -> Self {
        Self(v.to_be_bytes())
    }
}

fn check_chars(chars: &str) -> Result<[char; Q_RIGHT_CHARS], MessageError> {
    let v: Vec<char> = chars.chars().collect();
    if v.len() != Q_RIGHT_CHARS {
        return Err(MessageError::QRightLength(v.len()));
    }
    for &c in &v {
        preimages(c)?;
    }
    Ok([v[0], v[1], v[2], v[3]])
}

/// Canonical encoding: each symbol becomes its ASCII byte.
pub fn q_right_from_chars(chars: &str) -> Result<QRight, MessageError> {
    let c = check_chars(chars)?;
    Ok(QRight(c.map(|ch| ch as u8)))
}

/// Encoding used by the voting client: each symbol becomes a uniformly chosen
/// preimage under the display table. For uniformly chosen symbols the result
/// is uniform over all 2^32 values, the same distribution as a wrong-key
/// decryption, while still rendering as the voter's characters.
pub fn q_right_from_chars_randomized<R: Rng + ?Sized>(
    chars: &str,
    rng: &mut R,
) -> Result<QRight, MessageError> {
    let c = check_chars(chars)?;
    let mut out = [0u8; Q_RIGHT_CHARS];
    for (slot, ch) in out.iter_mut().zip(c) {
        let pre = preimages(ch)?;
        *slot = pre[rng.random_range(0..PREIMAGES_PER_SYMBOL)];
    }
    Ok(QRight(out))
}

pub fn q_right_to_chars(v: QRight) -> String {
    v.0.iter().map(|&b| display_symbol(b)).collect()
}

/// Four-symbol rendering of the last 32 bits (byte positions 29 to 32).
pub fn truncate_display(q: &[u8; 32]) -> String {
    q[28..].iter().map(|&b| display_symbol(b)).collect()
}

/// A random symbol string of length four, uniform over the alphabet.
pub fn random_chars<R: Rng + ?Sized>(rng: &mut R) -> String {
    (0..Q_RIGHT_CHARS)
        .map(|_| ALPHABET[rng.random_range(0..64)] as char)
        .collect()
}
