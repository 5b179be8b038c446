use crate::keyschedule::{initialize_with, KeyMaterial};
use crate::keystream::BLOCK_BYTES;
use crate::state::{CipherState, MultiplierUpdate, BUFFER_WORDS};

/// Byte-oriented XOR session over the block generator.
///
/// Keystream is consumed strictly in order. A partially used block is kept
/// in `pending` so no keystream byte is ever skipped between calls.
#[derive(Clone)]
pub struct StreamSession {
    state: CipherState,
    pending: [u8; BLOCK_BYTES],
    // index of the next unread byte in `pending`; BLOCK_BYTES when empty
    cursor: usize,
    produced: u64,
}

impl StreamSession {
    pub fn new(km: &KeyMaterial) -> Self {
        Self::with_update(km, MultiplierUpdate::Square)
    }

    pub fn with_update(km: &KeyMaterial, update: MultiplierUpdate) -> Self {
        let (state, _) = initialize_with(km, update);
        Self::from_state(state)
    }

    /// Wraps an already-initialized (or hand-built) state.
    pub fn from_state(state: CipherState) -> Self {
        StreamSession { state, pending: [0; BLOCK_BYTES], cursor: BLOCK_BYTES, produced: 0 }
    }

    /// Keystream bytes emitted so far.
    pub fn produced(&self) -> u64 {
        self.produced
    }

    /// Unconsumed bytes left from the last generated block (always < 128).
    pub fn pending_len(&self) -> usize {
        BLOCK_BYTES - self.cursor
    }

    pub fn state(&self) -> &CipherState {
        &self.state
    }

    pub fn keystream_bytes(&mut self, n: usize) -> Vec<u8> {
        let mut out = vec![0u8; n];
        self.apply_keystream(&mut out);
        out
    }

    pub fn encrypt(&mut self, plaintext: &[u8]) -> Vec<u8> {
        let mut out = plaintext.to_vec();
        self.apply_keystream(&mut out);
        out
    }

    pub fn decrypt(&mut self, ciphertext: &[u8]) -> Vec<u8> {
        self.encrypt(ciphertext)
    }

    /// XORs the next `buf.len()` keystream bytes into `buf` in place.
    pub fn apply_keystream(&mut self, buf: &mut [u8]) {
        let total = buf.len() as u64;
        let mut rest = buf;

        let take = self.pending_len().min(rest.len());
        if take > 0 {
            let (head, tail) = rest.split_at_mut(take);
            xor_in(head, &self.pending[self.cursor..self.cursor + take]);
            self.cursor += take;
            rest = tail;
        }

        let mut words = [0u32; BUFFER_WORDS];
        let mut blocks = rest.chunks_exact_mut(BLOCK_BYTES);
        for chunk in &mut blocks {
            self.state.block_into(&mut words);
            for (bytes, w) in chunk.chunks_exact_mut(4).zip(words.iter()) {
                let v = u32::from_le_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]) ^ w;
                bytes.copy_from_slice(&v.to_le_bytes());
            }
        }

        let tail = blocks.into_remainder();
        if !tail.is_empty() {
            self.state.block_into(&mut words);
            for (bytes, w) in self.pending.chunks_exact_mut(4).zip(words.iter()) {
                bytes.copy_from_slice(&w.to_le_bytes());
            }
            xor_in(tail, &self.pending[..tail.len()]);
            self.cursor = tail.len();
        }

        self.produced += total;
    }
}

fn xor_in(dst: &mut [u8], ks: &[u8]) {
    for (d, k) in dst.iter_mut().zip(ks) {
        *d ^= k;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn km() -> KeyMaterial {
        KeyMaterial::new(vec![0x0302_0100, 0x0706_0504, 0x0b0a_0908, 0x0f0e_0d0c], vec![
            0x1312_1110,
            0x1716_1514,
            0x1b1a_1918,
            0x1f1e_1d1c,
        ])
        .unwrap()
    }

    #[test]
    fn zero_bytes_leaves_session_untouched() {
        let mut s = StreamSession::new(&km());
        let before = s.state().clone();
        assert!(s.keystream_bytes(0).is_empty());
        assert_eq!(s.state(), &before);
        assert_eq!(s.produced(), 0);
    }

    #[test]
    fn one_block_is_one_next_block() {
        let (mut state, _) = crate::initialize(&km());
        let mut s = StreamSession::new(&km());
        assert_eq!(s.keystream_bytes(128), state.next_block().to_le_bytes().to_vec());
        assert_eq!(s.pending_len(), 0);
    }

    #[test]
    fn split_requests_concatenate() {
        let mut whole = StreamSession::new(&km());
        let mut split = whole.clone();
        let mut joined = split.keystream_bytes(100);
        assert_eq!(split.pending_len(), 28);
        joined.extend(split.keystream_bytes(28));
        assert_eq!(joined, whole.keystream_bytes(128));
        assert_eq!(split.produced(), 128);
    }

    #[test]
    fn encrypt_zeros_gives_keystream() {
        let mut a = StreamSession::new(&km());
        let mut b = a.clone();
        assert_eq!(a.encrypt(&[0u8; 300]), b.keystream_bytes(300));
    }

    #[test]
    fn empty_plaintext() {
        let mut s = StreamSession::new(&km());
        assert!(s.encrypt(&[]).is_empty());
    }

    #[test]
    fn cube_variant_differs() {
        let mut sq = StreamSession::new(&km());
        let mut cu = StreamSession::with_update(&km(), MultiplierUpdate::Cube);
        assert_ne!(sq.keystream_bytes(256), cu.keystream_bytes(256));
    }
}
