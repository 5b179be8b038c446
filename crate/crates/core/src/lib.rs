//! MV3 is a word-based stream cipher built around a pseudo-random walk
//! over a 256-entry table of double words, a multiplier refreshed by a
//! nonlinear add/or/square walk, and three revolving 32-word buffers that
//! space out the walk values combined into each output word.
//!
//! The crate is layered the same way the cipher is:
//!
//! * [`word`]: the modular primitives every other layer uses.
//! * [`state`]: the internal state and its layout.
//! * [`keystream`]: the main loop, one 32-word block at a time.
//! * [`keyschedule`]: key/IV initialization and IV-only rekeying.
//! * [`stream`]: a byte-granular XOR session for real data.
//!
//! ```
//! use mv3::{KeyMaterial, StreamSession};
//!
//! let km = KeyMaterial::from_hex("000102030405060708090a0b", "0c0d0e0f1011121314151617").unwrap();
//! let mut enc = StreamSession::new(&km);
//! let mut dec = StreamSession::new(&km);
//! let ct = enc.encrypt(b"attack at dawn");
//! assert_eq!(dec.decrypt(&ct), b"attack at dawn");
//! ```

#![forbid(unsafe_code)]

pub mod error;
pub mod keyschedule;
pub mod keystream;
pub mod state;
pub mod stream;
pub mod word;

pub use error::Mv3Error;
pub use keyschedule::{initialize, initialize_with, rekey_iv, KeyMaterial, KeyPhaseSnapshot};
pub use keystream::{KeystreamBlock, BLOCK_BYTES};
pub use state::{CipherState, MultiplierUpdate, StateParts, BUFFER_WORDS, STATE_BITS, TABLE_WORDS};
pub use stream::StreamSession;
