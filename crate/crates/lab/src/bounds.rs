//! Closed-form attack-cost calculators. Nothing here runs an attack; the
//! functions evaluate the cost expressions so they can be tabulated.

use mv3::STATE_BITS;

use crate::error::{LabError, Result};

/// `√(Σ A_N(a)·ε^{2a})` for `counts[i] = (a, A_N(a))`.
pub fn distinguisher_bound(eps: f64, counts: &[(u32, f64)]) -> Result<f64> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(LabError::Parameter(format!("bias must lie in [0, 1/2], got {eps}")));
    }
    if let Some((a, c)) = counts.iter().find(|(_, c)| c.is_nan() || *c < 0.0) {
        return Err(LabError::Parameter(format!("count for a={a} is {c}")));
    }
    Ok(counts.iter().map(|&(a, c)| c * eps.powi(2 * a as i32)).sum::<f64>().sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyScheduleLoops {
    Eight,
    Four,
    Two,
}

impl KeyScheduleLoops {
    pub fn from_count(loops: u32) -> Result<Self> {
        match loops {
            8 => Ok(Self::Eight),
            4 => Ok(Self::Four),
            2 => Ok(Self::Two),
            other => Err(LabError::Parameter(format!("loops per phase must be 8, 4 or 2, got {other}"))),
        }
    }

    pub fn count(self) -> u32 {
        match self {
            Self::Eight => 8,
            Self::Four => 4,
            Self::Two => 2,
        }
    }

    fn exponent(self) -> f64 {
        32.0 * self.count() as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelatedKeyCost {
    pub t: u32,
    pub loops: KeyScheduleLoops,
    pub insertion: bool,
    /// Related-IV pairs needed.
    pub log2_m: f64,
    /// Data and time, `log₂(2¹⁰·M)`.
    pub log2_total: f64,
}

impl RelatedKeyCost {
    /// Key length whose single step touches `t` table words.
    pub fn key_bits(&self) -> f64 {
        8192.0 / self.t as f64
    }

    pub fn pairs(&self) -> f64 {
        self.log2_m.exp2()
    }

    pub fn beats_exhaustive_search(&self) -> bool {
        self.log2_total < self.key_bits()
    }
}

/// Pairs of related IVs needed to see two equal keystreams when each key
/// word reaches `t` table words. With `insertion`, keystream is written
/// into the table instead of XORed, and `loops` does not apply.
pub fn related_key_complexity(t: u32, loops: KeyScheduleLoops, insertion: bool) -> Result<RelatedKeyCost> {
    if !(1..=63).contains(&t) {
        return Err(LabError::Parameter(format!("t must lie in 1..=63, got {t}")));
    }
    let q = |s: u32| (-((s * t) as f64) / 256.0).ln_1p();
    let ln_m = if insertion {
        -4.0 * 256.0 * q(1)
    } else {
        -loops.exponent() * (1..=4).map(q).sum::<f64>() - 32.0 * q(4)
    };
    let log2_m = ln_m / std::f64::consts::LN_2;
    Ok(RelatedKeyCost { t, loops, insertion, log2_m, log2_total: 10.0 + log2_m })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TmdtoMargin {
    pub state_bits: usize,
    pub key_bits: usize,
    /// The state is at least twice the key.
    pub holds: bool,
}

pub const MAX_KEY_BITS: usize = 8192;

fn state_bits() -> usize {
    STATE_BITS as usize
}

/// Time-memory-data tradeoffs need a state of at least twice the key size.
pub fn tmdto_margin(key_bits: usize) -> Result<TmdtoMargin> {
    if !(1..=MAX_KEY_BITS).contains(&key_bits) {
        return Err(LabError::Parameter(format!("key size must lie in 1..={MAX_KEY_BITS} bits, got {key_bits}")));
    }
    Ok(TmdtoMargin { state_bits: state_bits(), key_bits, holds: state_bits() >= 2 * key_bits })
}

/// Largest key for which [`tmdto_margin`] holds.
pub fn tmdto_max_key_bits() -> usize {
    state_bits() / 2
}

#[derive(Clone, Debug, PartialEq)]
pub struct GuessDetermineCost {
    pub guessed_words: u32,
    /// Guessed words plus the 8-bit index `j`.
    pub guessed_bits: u32,
    pub collisions_needed: u32,
    pub loops: u32,
    pub expected_collisions: f64,
    pub keystream_bits: u64,
}

impl GuessDetermineCost {
    pub fn enough_collisions(&self) -> bool {
        self.expected_collisions >= self.collisions_needed as f64
    }
}

/// Expected repeat hits among `32·loops` uniform draws from 256 table slots.
pub fn expected_collisions(loops: u32) -> f64 {
    let draws = 32.0 * loops as f64;
    draws - 256.0 * (1.0 - (255.0f64 / 256.0).powf(draws))
}

/// Each collision is a 32-bit filter; a few beyond the 66 guessed words
/// leave a single surviving guess.
pub const COLLISIONS_NEEDED: u32 = 70;

/// Cost of the full-word guess-and-determine attack: guess buffers `A` and
/// `B`, `c` and `x` (66 words) plus `j`, then trace `loops` blocks of
/// keystream and filter guesses on table collisions.
pub fn guess_and_determine_cost(loops: u32) -> GuessDetermineCost {
    let guessed_words = 66;
    GuessDetermineCost {
        guessed_words,
        guessed_bits: guessed_words * 32 + 8,
        collisions_needed: COLLISIONS_NEEDED,
        loops,
        expected_collisions: expected_collisions(loops),
        keystream_bits: loops as u64 * 32 * 32,
    }
}

/// Fewest loops whose expected collision count reaches `needed`.
pub fn loops_for_collisions(needed: u32) -> u32 {
    (1..).find(|&l| expected_collisions(l) >= needed as f64).expect("collisions grow without bound")
}
