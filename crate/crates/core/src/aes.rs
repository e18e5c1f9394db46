//! AES block cipher (FIPS-197) written from the round operations up.
//!
//! The 128-bit state is held column-major: input byte `i` lands in row
//! `i % 4`, column `i / 4`. All three standard key sizes are supported.
//!
//! This implementation makes no constant-time guarantees. It exists to make
//! the message pipeline observable and testable, not to protect real traffic.

use std::sync::OnceLock;

use thiserror::Error;

pub const BLOCK_SIZE: usize = 16;

/// Reduction polynomial x^8 + x^4 + x^3 + x + 1, without the x^8 term.
const REDUCTION: u8 = 0x1b;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AesError {
    #[error("invalid key length {0}, expected 16, 24 or 32 bytes")]
    InvalidKeyLength(usize),
    #[error("invalid block length {0}, expected 16 bytes")]
    InvalidBlockLength(usize),
}

/// One 16-byte cipher block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Block(pub [u8; BLOCK_SIZE]);

impl Block {
    pub fn from_slice(bytes: &[u8]) -> Result<Self, AesError> {
        let arr: [u8; BLOCK_SIZE] = bytes
            .try_into()
            .map_err(|_| AesError::InvalidBlockLength(bytes.len()))?;
        Ok(Block(arr))
    }

    pub fn as_bytes(&self) -> &[u8; BLOCK_SIZE] {
        &self.0
    }
}

impl From<[u8; BLOCK_SIZE]> for Block {
    fn from(bytes: [u8; BLOCK_SIZE]) -> Self {
        Block(bytes)
    }
}

/// The 4x4 byte matrix the round operations act on, indexed `[row][col]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CipherState {
    cells: [[u8; 4]; 4],
}

impl CipherState {
    pub fn from_block(block: &Block) -> Self {
        let mut cells = [[0u8; 4]; 4];
        for (i, byte) in block.0.iter().enumerate() {
            cells[i % 4][i / 4] = *byte;
        }
        CipherState { cells }
    }

    pub fn to_block(&self) -> Block {
        let mut out = [0u8; BLOCK_SIZE];
        for (i, byte) in out.iter_mut().enumerate() {
            *byte = self.cells[i % 4][i / 4];
        }
        Block(out)
    }

    pub fn from_rows(cells: [[u8; 4]; 4]) -> Self {
        CipherState { cells }
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.cells[row][col]
    }

    pub fn row(&self, row: usize) -> [u8; 4] {
        self.cells[row]
    }

    pub fn column(&self, col: usize) -> [u8; 4] {
        [
            self.cells[0][col],
            self.cells[1][col],
            self.cells[2][col],
            self.cells[3][col],
        ]
    }

    fn set_column(&mut self, col: usize, values: [u8; 4]) {
        for (row, v) in values.into_iter().enumerate() {
            self.cells[row][col] = v;
        }
    }
}

/// Supported AES key lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KeySize {
    Aes128,
    Aes192,
    Aes256,
}

impl KeySize {
    pub fn bits(self) -> usize {
        match self {
            KeySize::Aes128 => 128,
            KeySize::Aes192 => 192,
            KeySize::Aes256 => 256,
        }
    }

    pub fn bytes(self) -> usize {
        self.bits() / 8
    }

    /// Key length in 32-bit words.
    pub fn nk(self) -> usize {
        self.bytes() / 4
    }

    /// Number of cipher rounds.
    pub fn rounds(self) -> usize {
        self.nk() + 6
    }

    pub fn all() -> [KeySize; 3] {
        [KeySize::Aes128, KeySize::Aes192, KeySize::Aes256]
    }
}

/// Raw key material of one of the three standard sizes.
#[derive(Clone, PartialEq, Eq)]
pub struct CipherKey {
    bytes: Vec<u8>,
    size: KeySize,
}

impl CipherKey {
    pub fn new(bytes: &[u8]) -> Result<Self, AesError> {
        let size = match bytes.len() {
            16 => KeySize::Aes128,
            24 => KeySize::Aes192,
            32 => KeySize::Aes256,
            n => return Err(AesError::InvalidKeyLength(n)),
        };
        Ok(CipherKey {
            bytes: bytes.to_vec(),
            size,
        })
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn size(&self) -> KeySize {
        self.size
    }

    pub fn key_bits(&self) -> usize {
        self.size.bits()
    }
}

impl std::fmt::Debug for CipherKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CipherKey")
            .field("size", &self.size)
            .finish_non_exhaustive()
    }
}

/// Forward and inverse substitution tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SBoxTables {
    pub forward: [u8; 256],
    pub inverse: [u8; 256],
}

/// Product of `a` and `b` in GF(2^8) modulo 0x11b.
pub fn gf_mul(mut a: u8, mut b: u8) -> u8 {
    let mut product = 0u8;
    while b != 0 {
        if b & 1 != 0 {
            product ^= a;
        }
        a = xtime(a);
        b >>= 1;
    }
    product
}

/// Multiplication by x (0x02).
fn xtime(a: u8) -> u8 {
    let shifted = a << 1;
    if a & 0x80 != 0 {
        shifted ^ REDUCTION
    } else {
        shifted
    }
}

/// Multiplicative inverse in GF(2^8); zero maps to zero.
fn gf_inverse(a: u8) -> u8 {
    // a^254 == a^-1 for nonzero a (the multiplicative group has order 255)
    let mut result = 1u8;
    let mut base = a;
    let mut exp = 254u32;
    while exp > 0 {
        if exp & 1 != 0 {
            result = gf_mul(result, base);
        }
        base = gf_mul(base, base);
        exp >>= 1;
    }
    if a == 0 {
        0
    } else {
        result
    }
}

fn affine(b: u8) -> u8 {
    b ^ b.rotate_left(1) ^ b.rotate_left(2) ^ b.rotate_left(3) ^ b.rotate_left(4) ^ 0x63
}

/// Computes both substitution tables from field inversion and the affine map.
pub fn build_sboxes() -> SBoxTables {
    let mut forward = [0u8; 256];
    let mut inverse = [0u8; 256];
    for x in 0..=255u8 {
        let s = affine(gf_inverse(x));
        forward[x as usize] = s;
        inverse[s as usize] = x;
    }
    SBoxTables { forward, inverse }
}

/// Tables used by the cipher, generated on first use.
pub fn sboxes() -> &'static SBoxTables {
    static TABLES: OnceLock<SBoxTables> = OnceLock::new();
    TABLES.get_or_init(build_sboxes)
}

/// Returns the indices at which the generated table disagrees with
/// [`EMBEDDED_SBOX`]. Empty on success.
pub fn sbox_self_test() -> Vec<usize> {
    let generated = sboxes();
    (0..256)
        .filter(|&i| generated.forward[i] != EMBEDDED_SBOX[i])
        .collect()
}

pub fn sub_bytes(st: &CipherState, tables: &SBoxTables, inverse: bool) -> CipherState {
    let table = if inverse {
        &tables.inverse
    } else {
        &tables.forward
    };
    let mut out = *st;
    for row in out.cells.iter_mut() {
        for cell in row.iter_mut() {
            *cell = table[*cell as usize];
        }
    }
    out
}

pub fn shift_rows(st: &CipherState, inverse: bool) -> CipherState {
    let mut out = *st;
    for (r, row) in out.cells.iter_mut().enumerate() {
        if inverse {
            row.rotate_right(r);
        } else {
            row.rotate_left(r);
        }
    }
    out
}

const MIX: [[u8; 4]; 4] = [
    [0x02, 0x03, 0x01, 0x01],
    [0x01, 0x02, 0x03, 0x01],
    [0x01, 0x01, 0x02, 0x03],
    [0x03, 0x01, 0x01, 0x02],
];

const INV_MIX: [[u8; 4]; 4] = [
    [0x0e, 0x0b, 0x0d, 0x09],
    [0x09, 0x0e, 0x0b, 0x0d],
    [0x0d, 0x09, 0x0e, 0x0b],
    [0x0b, 0x0d, 0x09, 0x0e],
];

pub fn mix_column(column: [u8; 4], inverse: bool) -> [u8; 4] {
    let matrix = if inverse { &INV_MIX } else { &MIX };
    let mut out = [0u8; 4];
    for (r, coeffs) in matrix.iter().enumerate() {
        out[r] = coeffs
            .iter()
            .zip(column.iter())
            .fold(0, |acc, (&c, &v)| acc ^ gf_mul(c, v));
    }
    out
}

pub fn mix_columns(st: &CipherState, inverse: bool) -> CipherState {
    let mut out = *st;
    for col in 0..4 {
        out.set_column(col, mix_column(st.column(col), inverse));
    }
    out
}

/// XORs a round key into the state. The key is laid out column-major like a block.
pub fn add_round_key(st: &CipherState, round_key: &[u8; BLOCK_SIZE]) -> CipherState {
    let mut out = *st;
    for (i, k) in round_key.iter().enumerate() {
        out.cells[i % 4][i / 4] ^= k;
    }
    out
}

/// Expanded round keys for one cipher key.
#[derive(Clone, PartialEq, Eq)]
pub struct KeySchedule {
    round_keys: Vec<[u8; BLOCK_SIZE]>,
    nr: usize,
    nk: usize,
}

impl std::fmt::Debug for KeySchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeySchedule")
            .field("nr", &self.nr)
            .field("nk", &self.nk)
            .finish_non_exhaustive()
    }
}

impl KeySchedule {
    pub fn round_keys(&self) -> &[[u8; BLOCK_SIZE]] {
        &self.round_keys
    }

    pub fn rounds(&self) -> usize {
        self.nr
    }

    pub fn nk(&self) -> usize {
        self.nk
    }

    /// The schedule as a flat list of 32-bit words, big-endian per word.
    pub fn words(&self) -> Vec<u32> {
        self.round_keys
            .iter()
            .flat_map(|rk| {
                rk.chunks_exact(4)
                    .map(|w| u32::from_be_bytes([w[0], w[1], w[2], w[3]]))
            })
            .collect()
    }

    pub fn encrypt_block(&self, block: &Block) -> Block {
        let tables = sboxes();
        let mut st = add_round_key(&CipherState::from_block(block), &self.round_keys[0]);
        for round in 1..self.nr {
            st = sub_bytes(&st, tables, false);
            st = shift_rows(&st, false);
            st = mix_columns(&st, false);
            st = add_round_key(&st, &self.round_keys[round]);
        }
        st = sub_bytes(&st, tables, false);
        st = shift_rows(&st, false);
        st = add_round_key(&st, &self.round_keys[self.nr]);
        st.to_block()
    }

    pub fn decrypt_block(&self, block: &Block) -> Block {
        let tables = sboxes();
        let mut st = add_round_key(&CipherState::from_block(block), &self.round_keys[self.nr]);
        for round in (1..self.nr).rev() {
            st = shift_rows(&st, true);
            st = sub_bytes(&st, tables, true);
            st = add_round_key(&st, &self.round_keys[round]);
            st = mix_columns(&st, true);
        }
        st = shift_rows(&st, true);
        st = sub_bytes(&st, tables, true);
        st = add_round_key(&st, &self.round_keys[0]);
        st.to_block()
    }
}

fn sub_word(word: [u8; 4], forward: &[u8; 256]) -> [u8; 4] {
    word.map(|b| forward[b as usize])
}

pub fn expand_key(key: &CipherKey) -> KeySchedule {
    let nk = key.size().nk();
    let nr = key.size().rounds();
    let total_words = 4 * (nr + 1);
    let forward = &sboxes().forward;

    let mut words: Vec<[u8; 4]> = key
        .as_bytes()
        .chunks_exact(4)
        .map(|w| [w[0], w[1], w[2], w[3]])
        .collect();
    let mut rcon = 0x01u8;
    for i in nk..total_words {
        let mut temp = words[i - 1];
        if i % nk == 0 {
            temp.rotate_left(1);
            temp = sub_word(temp, forward);
            temp[0] ^= rcon;
            rcon = xtime(rcon);
        } else if nk == 8 && i % nk == 4 {
            temp = sub_word(temp, forward);
        }
        let prev = words[i - nk];
        words.push([
            prev[0] ^ temp[0],
            prev[1] ^ temp[1],
            prev[2] ^ temp[2],
            prev[3] ^ temp[3],
        ]);
    }

    let round_keys = words
        .chunks_exact(4)
        .map(|chunk| {
            let mut rk = [0u8; BLOCK_SIZE];
            for (j, w) in chunk.iter().enumerate() {
                rk[4 * j..4 * j + 4].copy_from_slice(w);
            }
            rk
        })
        .collect();
    KeySchedule { round_keys, nr, nk }
}

pub fn encrypt_block(key: &CipherKey, block: &Block) -> Block {
    expand_key(key).encrypt_block(block)
}

pub fn decrypt_block(key: &CipherKey, block: &Block) -> Block {
    expand_key(key).decrypt_block(block)
}

/// A known-answer vector: key, plaintext and expected ciphertext in hex.
#[derive(Debug, Clone, Copy)]
pub struct KnownAnswer {
    pub name: &'static str,
    pub key: &'static str,
    pub plaintext: &'static str,
    pub ciphertext: &'static str,
}

/// FIPS-197 appendix C example vectors.
pub const KNOWN_ANSWERS: [KnownAnswer; 3] = [
    KnownAnswer {
        name: "AES-128",
        key: "000102030405060708090a0b0c0d0e0f",
        plaintext: "00112233445566778899aabbccddeeff",
        ciphertext: "69c4e0d86a7b0430d8cdb78070b4c55a",
    },
    KnownAnswer {
        name: "AES-192",
        key: "000102030405060708090a0b0c0d0e0f1011121314151617",
        plaintext: "00112233445566778899aabbccddeeff",
        ciphertext: "dda97ca4864cdfe06eaf70a0ec0d7191",
    },
    KnownAnswer {
        name: "AES-256",
        key: "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f",
        plaintext: "00112233445566778899aabbccddeeff",
        ciphertext: "8ea2b7ca516745bfeafc49904b496089",
    },
];

/// Outcome of running one known-answer vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KatResult {
    pub name: &'static str,
    pub encrypt_ok: bool,
    pub decrypt_ok: bool,
    pub computed: String,
}

impl KatResult {
    pub fn passed(&self) -> bool {
        self.encrypt_ok && self.decrypt_ok
    }
}

pub fn run_known_answers() -> Vec<KatResult> {
    KNOWN_ANSWERS
        .iter()
        .map(|kat| {
            let key = CipherKey::new(&hex::decode(kat.key).expect("static hex"))
                .expect("static key length");
            let pt = Block::from_slice(&hex::decode(kat.plaintext).expect("static hex"))
                .expect("static block");
            let schedule = expand_key(&key);
            let ct = schedule.encrypt_block(&pt);
            let computed = hex::encode(ct.0);
            let back = schedule.decrypt_block(&ct);
            KatResult {
                name: kat.name,
                encrypt_ok: computed == kat.ciphertext,
                decrypt_ok: back == pt,
                computed,
            }
        })
        .collect()
}

#[rustfmt::skip]
pub const EMBEDDED_SBOX: [u8; 256] = [
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16,
];
