//! The main loop: 32 walk steps per block, then the table/multiplier
//! refresh and the buffer revolution.

use crate::error::Mv3Error;
use crate::state::{Buffer, CipherState, BUFFER_WORDS};

pub const BLOCK_BYTES: usize = BUFFER_WORDS * 4;

/// The 32 output words of one outer-loop iteration, in step order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeystreamBlock(pub [u32; BUFFER_WORDS]);

impl KeystreamBlock {
    pub fn words(&self) -> &[u32; BUFFER_WORDS] {
        &self.0
    }

    /// Little-endian serialization, word by word.
    pub fn to_le_bytes(&self) -> [u8; BLOCK_BYTES] {
        let mut out = [0u8; BLOCK_BYTES];
        for (chunk, w) in out.chunks_exact_mut(4).zip(self.0.iter()) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        out
    }
}

#[inline(always)]
fn split_roles(bufs: &mut [Buffer; 3], front: usize) -> (&Buffer, &Buffer, &mut Buffer) {
    let [b0, b1, b2] = bufs;
    match front {
        0 => (&*b0, &*b1, b2),
        1 => (&*b1, &*b2, b0),
        _ => (&*b2, &*b0, b1),
    }
}

impl CipherState {
    /// One step of the inner loop at position `i`: advance `j` by the low
    /// byte of `B[i]`, advance `x` by `T[j]`, store `x >>> 8` in `C[i]` and
    /// return `(x * c) ^ A[9i+5] ^ (B[7i+18] >>> 16)` with buffer indices
    /// taken mod 32.
    ///
    /// Callers driving the loop by hand must make exactly 32 calls, for
    /// `i = 0..32`, before each [`finish_block`](Self::finish_block).
    pub fn step(&mut self, i: usize) -> Result<u32, Mv3Error> {
        if i >= BUFFER_WORDS {
            return Err(Mv3Error::StepIndex(i));
        }
        let (a, b, c) = split_roles(&mut self.buffers, self.front);
        self.j = self.j.wrapping_add(b[i] as u8);
        self.x = self.x.wrapping_add(self.t[self.j as usize]);
        c[i] = self.x.rotate_right(8);
        Ok(self.x.wrapping_mul(self.c) ^ a[(9 * i + 5) % BUFFER_WORDS] ^ b[(7 * i + 18) % BUFFER_WORDS].rotate_right(16))
    }

    /// Per-block refresh, in listing order: `u += 1`,
    /// `T[u] += T[j] >>> 13`, `c += A[0] >>> 16`, `c |= 1`, `c = c^2`
    /// (or `c^3`), then A takes B and B takes C.
    pub fn finish_block(&mut self) {
        self.u = self.u.wrapping_add(1);
        let u = self.u as usize;
        self.t[u] = self.t[u].wrapping_add(self.t[self.j as usize].rotate_right(13));
        let a0 = self.buffers[self.front][0];
        self.c = self.update.apply(self.c.wrapping_add(a0.rotate_right(16)) | 1);
        self.front = if self.front == 2 { 0 } else { self.front + 1 };
    }

    /// Runs the full outer loop once and returns its 32 output words.
    pub fn next_block(&mut self) -> KeystreamBlock {
        let mut out = [0u32; BUFFER_WORDS];
        self.block_into(&mut out);
        KeystreamBlock(out)
    }

    /// Fills `out` with keystream words; `out.len()` must be a multiple of 32.
    pub fn fill_words(&mut self, out: &mut [u32]) -> Result<(), Mv3Error> {
        if out.len() % BUFFER_WORDS != 0 {
            return Err(Mv3Error::BlockLength(out.len()));
        }
        for chunk in out.chunks_exact_mut(BUFFER_WORDS) {
            let chunk: &mut [u32; BUFFER_WORDS] = chunk.try_into().expect("exact chunk");
            self.block_into(chunk);
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn block_into(&mut self, out: &mut [u32; BUFFER_WORDS]) {
        let (a, b, c) = split_roles(&mut self.buffers, self.front);
        let t = &self.t;
        let mult = self.c;
        let mut j = self.j;
        let mut x = self.x;
        for i in 0..BUFFER_WORDS {
            j = j.wrapping_add(b[i] as u8);
            x = x.wrapping_add(t[j as usize]);
            c[i] = x.rotate_right(8);
            out[i] = x.wrapping_mul(mult) ^ a[(9 * i + 5) & 31] ^ b[(7 * i + 18) & 31].rotate_right(16);
        }
        self.j = j;
        self.x = x;
        self.finish_block();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{MultiplierUpdate, StateParts};

    /// Deterministic filler shared with the frozen vectors below.
    fn seeded_parts() -> StateParts {
        let mut k = 0u32;
        let mut next = || {
            k = k.wrapping_add(1);
            k.wrapping_mul(0x9E37_79B9).wrapping_add(0x7F4A_7C15) ^ (k << 7)
        };
        let mut p = StateParts::zeroed();
        p.a.iter_mut().for_each(|w| *w = next());
        p.b.iter_mut().for_each(|w| *w = next());
        p.c_buf.iter_mut().for_each(|w| *w = next());
        p.t.iter_mut().for_each(|w| *w = next());
        p.j = 0x3C;
        p.u = 0xF0;
        p.c = 0x1234_5679;
        p.x = 0xCAFE_BABE;
        p
    }

    // Produced by a separate straight-line transcription of the main loop
    // (physical buffer copies, explicit modular arithmetic).
    const SEEDED_STEP0: u32 = 0xc5d8_842a;
    const SEEDED_BLOCK: [u32; 32] = [
        0xc5d8842a, 0xac6ff925, 0xa9d77ee8, 0x1a43df67, 0xd8e4efc0, 0x68154b45, 0xcc338db7, 0xe55b092f,
        0x5038e52e, 0xc3c50e95, 0x07466b35, 0x19f783a6, 0x59a91caf, 0x50f10bcd, 0xc1da66cb, 0xfb28c777,
        0x7d1103ad, 0x31f5d7f5, 0x3243a2a1, 0xda58a867, 0x824d10f8, 0x59e54b05, 0xdcbef20f, 0xfe93f54f,
        0x73f5d276, 0x120c6455, 0x3592894d, 0x305fce87, 0x41d220d4, 0xaca640de, 0xd472ce12, 0xe3014ee7,
    ];

    #[test]
    fn zero_state_step_outputs_zero() {
        let mut s = CipherState::zeroed();
        assert_eq!(s.step(0).unwrap(), 0);
        assert_eq!(s.parts(), StateParts::zeroed());
    }

    #[test]
    fn only_the_a_term_survives() {
        let mut p = StateParts::zeroed();
        p.a[5] = 0xFFFF_FFFF;
        let mut s = CipherState::from(p);
        assert_eq!(s.step(0).unwrap(), 0xFFFF_FFFF);
    }

    #[test]
    fn step_rejects_out_of_range_index() {
        let mut s = CipherState::zeroed();
        assert_eq!(s.step(32), Err(Mv3Error::StepIndex(32)));
    }

    #[test]
    fn seeded_step_matches_transcription() {
        let mut s = CipherState::from(seeded_parts());
        assert_eq!(s.step(0).unwrap(), SEEDED_STEP0);
    }

    #[test]
    fn seeded_block_matches_transcription() {
        let mut s = CipherState::from(seeded_parts());
        assert_eq!(s.next_block().0, SEEDED_BLOCK);
    }

    #[test]
    fn manual_steps_equal_next_block() {
        let mut by_step = CipherState::from(seeded_parts());
        let mut by_block = by_step.clone();
        let words: Vec<u32> = (0..32).map(|i| by_step.step(i).unwrap()).collect();
        by_step.finish_block();
        assert_eq!(words, by_block.next_block().0.to_vec());
        assert_eq!(by_step, by_block);
    }

    #[test]
    fn finish_block_multiplier_examples() {
        let mut p = StateParts::zeroed();
        p.c = 0;
        let mut s = CipherState::from(p.clone());
        s.finish_block();
        assert_eq!(s.multiplier(), 1);

        p.c = 2;
        let mut s = CipherState::from(p.clone());
        s.finish_block();
        assert_eq!(s.multiplier(), 9);

        p.c = 2;
        p.update = MultiplierUpdate::Cube;
        let mut s = CipherState::from(p);
        s.finish_block();
        assert_eq!(s.multiplier(), 27);
    }

    #[test]
    fn finish_block_wraps_u() {
        let mut p = StateParts::zeroed();
        p.u = 255;
        let mut s = CipherState::from(p);
        s.finish_block();
        assert_eq!(s.u(), 0);
    }

    #[test]
    fn table_update_reads_before_write_when_u_equals_j() {
        let mut p = StateParts::zeroed();
        p.u = 6;
        p.j = 7;
        p.t[7] = 0x0000_2000;
        let mut s = CipherState::from(p);
        s.finish_block();
        // T[7] + (T[7] >>> 13) with the old value on both sides
        assert_eq!(s.table()[7], 0x0000_2001);
    }

    #[test]
    fn zero_state_is_a_fixed_point() {
        let mut s = CipherState::zeroed();
        let block = s.next_block();
        assert_eq!(block.0, [0u32; 32]);
        assert_eq!(s.multiplier(), 1);
        assert_eq!(s.j(), 0);
        assert_eq!(s.walk_position(), 0);
        let mut expected = StateParts::zeroed();
        expected.u = 1;
        assert_eq!(s.parts(), expected);
    }

    #[test]
    fn buffers_revolve() {
        let mut s = CipherState::from(seeded_parts());
        s.next_block();
        let written = *s.b();
        s.next_block();
        assert_eq!(*s.a(), written);
        let written_next = *s.b();
        s.next_block();
        assert_eq!(*s.a(), written_next);
    }

    #[test]
    fn j_trajectory_replays_from_b() {
        let mut s = CipherState::from(seeded_parts());
        for _ in 0..4 {
            let b = *s.b();
            let mut j = s.j();
            for (i, &w) in b.iter().enumerate() {
                s.step(i).unwrap();
                j = j.wrapping_add(w as u8);
                assert_eq!(s.j(), j);
            }
            s.finish_block();
        }
    }

    #[test]
    fn multiplier_odd_after_every_block() {
        let mut p = seeded_parts();
        p.c = 0;
        let mut s = CipherState::from(p);
        for _ in 0..200 {
            s.next_block();
            assert_eq!(s.multiplier() & 1, 1);
        }
    }

    #[test]
    fn fill_words_rejects_partial_blocks() {
        let mut s = CipherState::zeroed();
        let mut buf = [0u32; 33];
        assert_eq!(s.fill_words(&mut buf), Err(Mv3Error::BlockLength(33)));
    }

    #[test]
    fn block_bytes_are_little_endian() {
        let mut words = [0u32; 32];
        words[0] = 0x0403_0201;
        let bytes = KeystreamBlock(words).to_le_bytes();
        assert_eq!(&bytes[..4], &[1, 2, 3, 4]);
    }
}
