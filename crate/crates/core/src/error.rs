use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Mv3Error {
    #[error("key length of {0} words is outside 1..=256 (32 to 8192 bits in steps of 32)")]
    KeyLength(usize),

    #[error("key/IV length mismatch: key has {key} words, IV has {iv} words")]
    LengthMismatch { key: usize, iv: usize },

    #[error("step index {0} is outside 0..32")]
    StepIndex(usize),

    #[error("hex input has {0} characters, expected a non-zero multiple of 8")]
    HexLength(usize),

    #[error("invalid hex: {0}")]
    Hex(String),

    #[error("binary key material has {0} bytes, expected a non-zero multiple of 4")]
    ByteLength(usize),

    #[error("{0} words requested, block output needs a multiple of 32")]
    BlockLength(usize),
}
