//! The sealed message envelope.
//!
//! Every message is encrypted under a fresh 256-bit key, and that key
//! travels in the same string as the ciphertext:
//!
//! ```text
//! envelope = ctlen cthex keyb64 keylen
//! ctlen    = 4HEXDIG    ; ciphertext byte count, big-endian
//! cthex    = 2*HEXDIG   ; exactly 2 * ctlen chars
//! keyb64   = 44B64CHAR  ; standard Base64 of the 32 key bytes
//! keylen   = 2HEXDIG    ; always "20"
//! ```
//!
//! Hex is emitted uppercase and accepted in either case. Anyone who sees the
//! envelope can decrypt it; it hides the text from casual inspection along
//! the transport path and nothing more.

use thiserror::Error;

use crate::aes::{CipherKey, BLOCK_SIZE};
use crate::codec::{base64_decode, base64_encode, hex_decode, hex_encode, CodecError};
use crate::modes::{mode_decrypt, mode_encrypt, Ciphertext, Mode, ModeError, ModeKind};
use crate::rng::{EntropyUnavailable, RandomnessProvider};

pub const KEY_LEN: usize = 32;
pub const KEY_B64_LEN: usize = 44;
const CT_LEN_WIDTH: usize = 4;
const KEY_LEN_WIDTH: usize = 2;
pub const MAX_CT_LEN: usize = 0xffff;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvelopeError {
    #[error("message is empty")]
    EmptyMessage,
    #[error("ciphertext of {0} bytes does not fit the 16-bit length field")]
    CiphertextTooLarge(usize),
    #[error("malformed envelope: {0}")]
    MalformedEnvelope(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("unsupported key length {0}, only 32-byte keys are carried")]
    KeyLenUnsupported(usize),
    #[error("invalid ciphertext length {0}")]
    CtLenInvalid(usize),
    #[error(transparent)]
    Mode(#[from] ModeError),
    #[error("decrypted text is not UTF-8")]
    Utf8,
    #[error(transparent)]
    Entropy(#[from] EntropyUnavailable),
}

/// A per-message 256-bit key.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MessageKey([u8; KEY_LEN]);

impl MessageKey {
    pub fn from_bytes(bytes: [u8; KEY_LEN]) -> Self {
        MessageKey(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; KEY_LEN] {
        &self.0
    }

    pub fn to_cipher_key(&self) -> CipherKey {
        CipherKey::new(&self.0).expect("32 bytes is a valid AES-256 key")
    }

    pub fn to_base64(&self) -> String {
        base64_encode(&self.0)
    }
}

impl std::fmt::Debug for MessageKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("MessageKey(..)")
    }
}

pub fn generate_key(rng: &RandomnessProvider) -> Result<MessageKey, EntropyUnavailable> {
    let mut bytes = [0u8; KEY_LEN];
    rng.fill(&mut bytes)?;
    Ok(MessageKey(bytes))
}

/// Decoded envelope contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub ciphertext: Ciphertext,
    pub key: MessageKey,
}

impl Envelope {
    pub fn ct_hex(&self) -> String {
        hex_encode(self.ciphertext.as_bytes())
    }

    pub fn key_b64(&self) -> String {
        self.key.to_base64()
    }

    pub fn to_wire(&self) -> Result<String, EnvelopeError> {
        encode_envelope(&self.ciphertext, &self.key)
    }

    pub fn parse(s: &str) -> Result<Self, EnvelopeError> {
        let (ciphertext, key) = decode_envelope(s.as_bytes())?;
        Ok(Envelope { ciphertext, key })
    }

    pub fn decrypt(&self, kind: ModeKind) -> Result<String, EnvelopeError> {
        let plain = mode_decrypt(kind, &self.key.to_cipher_key(), self.ciphertext.as_bytes())?;
        String::from_utf8(plain).map_err(|_| EnvelopeError::Utf8)
    }
}

pub fn encode_envelope(ct: &Ciphertext, key: &MessageKey) -> Result<String, EnvelopeError> {
    let ct_len = ct.len();
    if ct_len > MAX_CT_LEN {
        return Err(EnvelopeError::CiphertextTooLarge(ct_len));
    }
    let mut out = String::with_capacity(wire_len(ct_len));
    out.push_str(&format!("{ct_len:04X}"));
    out.push_str(&hex_encode(ct.as_bytes()));
    out.push_str(&key.to_base64());
    out.push_str(&format!("{KEY_LEN:02X}"));
    Ok(out)
}

pub fn wire_len(ct_len: usize) -> usize {
    CT_LEN_WIDTH + 2 * ct_len + KEY_B64_LEN + KEY_LEN_WIDTH
}

fn parse_hex_field(field: &[u8]) -> Result<usize, EnvelopeError> {
    let bytes = hex_decode(field)?;
    Ok(bytes.iter().fold(0usize, |acc, &b| (acc << 8) | b as usize))
}

/// Splits a serialized envelope into ciphertext and key.
///
/// Works on raw bytes so arbitrary input, including non-ASCII, is rejected
/// with an error rather than a panic.
pub fn decode_envelope(s: &[u8]) -> Result<(Ciphertext, MessageKey), EnvelopeError> {
    let min = CT_LEN_WIDTH + KEY_B64_LEN + KEY_LEN_WIDTH;
    if s.len() < min {
        return Err(EnvelopeError::MalformedEnvelope(format!(
            "{} chars is shorter than the {min}-char minimum",
            s.len()
        )));
    }
    let ct_len = parse_hex_field(&s[..CT_LEN_WIDTH])?;
    if ct_len == 0 || ct_len % BLOCK_SIZE != 0 {
        return Err(EnvelopeError::CtLenInvalid(ct_len));
    }
    let expected = wire_len(ct_len);
    if s.len() != expected {
        return Err(EnvelopeError::MalformedEnvelope(format!(
            "length {} does not match {expected} implied by ciphertext length {ct_len}",
            s.len()
        )));
    }
    let key_len = parse_hex_field(&s[s.len() - KEY_LEN_WIDTH..])?;
    if key_len != KEY_LEN {
        return Err(EnvelopeError::KeyLenUnsupported(key_len));
    }

    let ct_end = CT_LEN_WIDTH + 2 * ct_len;
    let ct = hex_decode(&s[CT_LEN_WIDTH..ct_end])?;
    let key = base64_decode(&s[ct_end..ct_end + KEY_B64_LEN])?;
    let key: [u8; KEY_LEN] = key.try_into().map_err(|k: Vec<u8>| {
        CodecError::BadBase64(format!("key decodes to {} bytes, expected {KEY_LEN}", k.len()))
    })?;
    let ct = Ciphertext::new(ct).map_err(|_| EnvelopeError::CtLenInvalid(ct_len))?;
    Ok((ct, MessageKey(key)))
}

/// Encrypts `plaintext` under a fresh key and returns the decoded envelope.
pub fn seal_envelope(
    plaintext: &str,
    rng: &RandomnessProvider,
    kind: ModeKind,
) -> Result<Envelope, EnvelopeError> {
    if plaintext.is_empty() {
        return Err(EnvelopeError::EmptyMessage);
    }
    let key = generate_key(rng)?;
    let mode = match kind {
        ModeKind::Ecb => Mode::Ecb,
        ModeKind::Cbc => {
            let mut iv = [0u8; BLOCK_SIZE];
            rng.fill(&mut iv)?;
            Mode::Cbc { iv }
        }
    };
    let ciphertext = mode_encrypt(&mode, &key.to_cipher_key(), plaintext.as_bytes());
    if ciphertext.len() > MAX_CT_LEN {
        return Err(EnvelopeError::CiphertextTooLarge(ciphertext.len()));
    }
    Ok(Envelope { ciphertext, key })
}

pub fn seal(plaintext: &str, rng: &RandomnessProvider, kind: ModeKind) -> Result<String, EnvelopeError> {
    seal_envelope(plaintext, rng, kind)?.to_wire()
}

/// Reverses [`seal`]. The key bytes recovered from Base64 are used verbatim.
pub fn open(s: &str, kind: ModeKind) -> Result<String, EnvelopeError> {
    Envelope::parse(s)?.decrypt(kind)
}
