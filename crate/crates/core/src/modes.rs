//! PKCS#7 padding with ECB and CBC modes over [`crate::aes`].

use thiserror::Error;

use crate::aes::{expand_key, Block, CipherKey, BLOCK_SIZE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModeError {
    #[error("invalid PKCS#7 padding")]
    Padding,
    #[error("length {0} is not a positive multiple of the block size")]
    BlockAlign(usize),
    #[error("CBC ciphertext of {0} bytes is shorter than IV plus one block")]
    CiphertextTooShort(usize),
}

/// Which chaining mode to use, independent of any IV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ModeKind {
    #[default]
    Ecb,
    Cbc,
}

impl std::str::FromStr for ModeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ecb" => Ok(ModeKind::Ecb),
            "cbc" => Ok(ModeKind::Cbc),
            other => Err(format!("unknown mode {other:?}, expected ecb or cbc")),
        }
    }
}

impl std::fmt::Display for ModeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModeKind::Ecb => "ecb",
            ModeKind::Cbc => "cbc",
        })
    }
}

/// A mode ready for encryption. CBC carries its IV.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Ecb,
    Cbc { iv: [u8; BLOCK_SIZE] },
}

impl Mode {
    pub fn kind(&self) -> ModeKind {
        match self {
            Mode::Ecb => ModeKind::Ecb,
            Mode::Cbc { .. } => ModeKind::Cbc,
        }
    }
}

/// Mode output. For CBC the IV occupies the first block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ciphertext(Vec<u8>);

impl Ciphertext {
    /// Accepts any non-empty block-aligned byte string.
    pub fn new(bytes: Vec<u8>) -> Result<Self, ModeError> {
        if bytes.is_empty() || !bytes.len().is_multiple_of(BLOCK_SIZE) {
            return Err(ModeError::BlockAlign(bytes.len()));
        }
        Ok(Ciphertext(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }
}

pub fn pkcs7_pad(data: &[u8]) -> Vec<u8> {
    let n = BLOCK_SIZE - data.len() % BLOCK_SIZE;
    let mut out = Vec::with_capacity(data.len() + n);
    out.extend_from_slice(data);
    out.resize(data.len() + n, n as u8);
    out
}

pub fn pkcs7_unpad(data: &[u8]) -> Result<Vec<u8>, ModeError> {
    if data.is_empty() || !data.len().is_multiple_of(BLOCK_SIZE) {
        return Err(ModeError::BlockAlign(data.len()));
    }
    let n = data[data.len() - 1] as usize;
    if n == 0 || n > BLOCK_SIZE {
        return Err(ModeError::Padding);
    }
    let (body, pad) = data.split_at(data.len() - n);
    if pad.iter().any(|&b| b as usize != n) {
        return Err(ModeError::Padding);
    }
    Ok(body.to_vec())
}

fn block_at(bytes: &[u8], index: usize) -> Block {
    let mut arr = [0u8; BLOCK_SIZE];
    arr.copy_from_slice(&bytes[index * BLOCK_SIZE..(index + 1) * BLOCK_SIZE]);
    Block(arr)
}

fn xor_block(a: &Block, b: &[u8; BLOCK_SIZE]) -> Block {
    Block(core::array::from_fn(|i| a.0[i] ^ b[i]))
}

pub fn mode_encrypt(mode: &Mode, key: &CipherKey, plaintext: &[u8]) -> Ciphertext {
    let schedule = expand_key(key);
    let padded = pkcs7_pad(plaintext);
    let blocks = padded.len() / BLOCK_SIZE;
    let out = match mode {
        Mode::Ecb => (0..blocks)
            .flat_map(|i| schedule.encrypt_block(&block_at(&padded, i)).0)
            .collect(),
        Mode::Cbc { iv } => {
            let mut out = Vec::with_capacity(padded.len() + BLOCK_SIZE);
            out.extend_from_slice(iv);
            let mut prev = *iv;
            for i in 0..blocks {
                let ct = schedule.encrypt_block(&xor_block(&block_at(&padded, i), &prev));
                out.extend_from_slice(&ct.0);
                prev = ct.0;
            }
            out
        }
    };
    Ciphertext(out)
}

/// Decrypts and unpads. CBC reads its IV from the first ciphertext block.
pub fn mode_decrypt(kind: ModeKind, key: &CipherKey, ct: &[u8]) -> Result<Vec<u8>, ModeError> {
    if ct.is_empty() || !ct.len().is_multiple_of(BLOCK_SIZE) {
        return Err(ModeError::BlockAlign(ct.len()));
    }
    let schedule = expand_key(key);
    let blocks = ct.len() / BLOCK_SIZE;
    let padded: Vec<u8> = match kind {
        ModeKind::Ecb => (0..blocks)
            .flat_map(|i| schedule.decrypt_block(&block_at(ct, i)).0)
            .collect(),
        ModeKind::Cbc => {
            if ct.len() < 2 * BLOCK_SIZE {
                return Err(ModeError::CiphertextTooShort(ct.len()));
            }
            (1..blocks)
                .flat_map(|i| {
                    let prev = block_at(ct, i - 1).0;
                    xor_block(&schedule.decrypt_block(&block_at(ct, i)), &prev).0
                })
                .collect()
        }
    };
    pkcs7_unpad(&padded)
}
