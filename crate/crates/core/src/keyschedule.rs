//! Key and IV initialization.
//!
//! Initialization runs eight phases. Phases 0..4 absorb the key and phases
//! 4..8 absorb the IV; each phase adds the rotated material into the table,
//! runs the main loop for eight blocks and XORs those 256 words into the
//! table. The state after the key phases is kept as a [`KeyPhaseSnapshot`]
//! so a new IV only costs the last four phases.

use crate::error::Mv3Error;
use crate::state::{CipherState, MultiplierUpdate, StateParts, Table, BUFFER_WORDS, TABLE_WORDS};
use crate::word::{add_mod, rotate_right};

pub const MAX_KEY_WORDS: usize = 256;
const FILL: u32 = 0xEFEF_EFEF;
const PHASES_PER_HALF: usize = 4;

/// A validated key and IV of equal length, 1 to 256 double words.
#[derive(Clone, PartialEq, Eq)]
pub struct KeyMaterial {
    key: Vec<u32>,
    iv: Vec<u32>,
}

impl KeyMaterial {
    pub fn new(key: Vec<u32>, iv: Vec<u32>) -> Result<Self, Mv3Error> {
        check_key_len(key.len())?;
        if iv.len() != key.len() {
            return Err(Mv3Error::LengthMismatch { key: key.len(), iv: iv.len() });
        }
        Ok(KeyMaterial { key, iv })
    }

    /// Parses key and IV from hex (case-insensitive, 8 hex digits per word,
    /// each 4-byte group read little-endian).
    pub fn from_hex(key: &str, iv: &str) -> Result<Self, Mv3Error> {
        KeyMaterial::new(parse_hex_words(key)?, parse_hex_words(iv)?)
    }

    pub fn key(&self) -> &[u32] {
        &self.key
    }

    pub fn iv(&self) -> &[u32] {
        &self.iv
    }

    pub fn key_words(&self) -> usize {
        self.key.len()
    }

    pub fn key_bits(&self) -> usize {
        self.key.len() * 32
    }
}

impl std::fmt::Debug for KeyMaterial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeyMaterial").field("key_words", &self.key.len()).finish_non_exhaustive()
    }
}

fn check_key_len(words: usize) -> Result<(), Mv3Error> {
    if words == 0 || words > MAX_KEY_WORDS {
        return Err(Mv3Error::KeyLength(words));
    }
    Ok(())
}

/// Decodes hex into words, little-endian per 4-byte group.
pub fn parse_hex_words(s: &str) -> Result<Vec<u32>, Mv3Error> {
    let s = s.trim();
    let s = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
    if s.is_empty() || s.len() % 8 != 0 {
        return Err(Mv3Error::HexLength(s.len()));
    }
    let bytes = hex::decode(s).map_err(|e| Mv3Error::Hex(e.to_string()))?;
    words_from_le_bytes(&bytes)
}

/// Reads raw binary key material, little-endian per 4-byte group.
pub fn words_from_le_bytes(bytes: &[u8]) -> Result<Vec<u32>, Mv3Error> {
    if bytes.is_empty() || bytes.len() % 4 != 0 {
        return Err(Mv3Error::ByteLength(bytes.len()));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect())
}

/// The state captured after the key phases. Rekeying clones it, so a
/// snapshot can be shared and reused indefinitely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyPhaseSnapshot {
    state: CipherState,
    key_words: usize,
}

impl KeyPhaseSnapshot {
    pub fn state(&self) -> &CipherState {
        &self.state
    }

    pub fn key_words(&self) -> usize {
        self.key_words
    }

    /// Runs only the IV phases on a copy of the snapshot.
    pub fn rekey_iv(&self, iv: &[u32]) -> Result<CipherState, Mv3Error> {
        if iv.len() != self.key_words {
            return Err(Mv3Error::LengthMismatch { key: self.key_words, iv: iv.len() });
        }
        let mut state = self.state.clone();
        absorb_half(&mut state, iv, PHASES_PER_HALF);
        Ok(state)
    }
}

/// Full initialization with the default (squaring) multiplier update.
pub fn initialize(km: &KeyMaterial) -> (CipherState, KeyPhaseSnapshot) {
    initialize_with(km, MultiplierUpdate::Square)
}

pub fn initialize_with(km: &KeyMaterial, update: MultiplierUpdate) -> (CipherState, KeyPhaseSnapshot) {
    let mut state = CipherState::from(StateParts {
        a: [FILL; BUFFER_WORDS],
        b: [FILL; BUFFER_WORDS],
        c_buf: [FILL; BUFFER_WORDS],
        t: [FILL; TABLE_WORDS],
        u: 0,
        j: 0,
        c: 1,
        x: 0,
        update,
    });
    absorb_half(&mut state, &km.key, 0);
    let snapshot = KeyPhaseSnapshot { state: state.clone(), key_words: km.key.len() };
    absorb_half(&mut state, &km.iv, PHASES_PER_HALF);
    (state, snapshot)
}

pub fn rekey_iv(snapshot: &KeyPhaseSnapshot, iv: &[u32]) -> Result<CipherState, Mv3Error> {
    snapshot.rekey_iv(iv)
}

fn absorb_half(state: &mut CipherState, material: &[u32], first_phase: usize) {
    for phase in first_phase..first_phase + PHASES_PER_HALF {
        absorb_phase(state, material, phase);
    }
}

fn absorb_phase(state: &mut CipherState, material: &[u32], phase: usize) {
    add_material(&mut state.t, material, phase);
    // 1024 bytes of ordinary output, then XOR word k into T[k].
    let mut ks = [0u32; TABLE_WORDS];
    state.fill_words(&mut ks).expect("table size is a whole number of blocks");
    for (t, k) in state.t.iter_mut().zip(ks.iter()) {
        *t ^= k;
    }
}

/// `T[phase + l] += (material[l mod len] >>> 8*phase) + l` for `l` in 0..256.
fn add_material(t: &mut Table, material: &[u32], phase: usize) {
    let rotation = (8 * phase) as u32;
    for l in 0..TABLE_WORDS {
        let idx = (phase + l) % TABLE_WORDS;
        let mixed = add_mod(rotate_right(material[l % material.len()], rotation), l as u32);
        t[idx] = add_mod(t[idx], mixed);
    }
}
