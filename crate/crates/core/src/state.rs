use std::fmt;

pub const BUFFER_WORDS: usize = 32;
pub const TABLE_WORDS: usize = 256;

pub type Buffer = [u32; BUFFER_WORDS];
pub type Table = [u32; TABLE_WORDS];

/// Bits of secret and public state: three buffers, the table, the byte
/// indices `u` and `j`, the multiplier `c` and the walk position `x`.
/// The loop counter `i` is implied by the block position and not counted.
pub const STATE_BITS: u32 = 3 * BUFFER_WORDS as u32 * u32::BITS
    + TABLE_WORDS as u32 * u32::BITS
    + 2 * u8::BITS
    + 2 * u32::BITS;

/// How the multiplier is refreshed after the add and or-1 steps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum MultiplierUpdate {
    #[default]
    Square,
    Cube,
}

impl MultiplierUpdate {
    #[inline(always)]
    pub(crate) fn apply(self, c: u32) -> u32 {
        match self {
            MultiplierUpdate::Square => c.wrapping_mul(c),
            MultiplierUpdate::Cube => c.wrapping_mul(c).wrapping_mul(c),
        }
    }
}

/// Plain, fully public view of a [`CipherState`], used to construct states
/// by hand (tests, oracles, lab experiments) and to inspect them.
#[derive(Clone, PartialEq, Eq)]
pub struct StateParts {
    pub a: Buffer,
    pub b: Buffer,
    pub c_buf: Buffer,
    pub t: Table,
    pub u: u8,
    pub j: u8,
    pub c: u32,
    pub x: u32,
    pub update: MultiplierUpdate,
}

impl StateParts {
    /// All-zero buffers and table, zero indices and `c = 1`.
    pub fn zeroed() -> Self {
        StateParts {
            a: [0; BUFFER_WORDS],
            b: [0; BUFFER_WORDS],
            c_buf: [0; BUFFER_WORDS],
            t: [0; TABLE_WORDS],
            u: 0,
            j: 0,
            c: 1,
            x: 0,
            update: MultiplierUpdate::Square,
        }
    }
}

impl fmt::Debug for StateParts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateParts").field("u", &self.u).finish_non_exhaustive()
    }
}

/// The full mutable MV3 state.
///
/// The three buffers live in one array and change roles by advancing
/// `front`: `buffers[front]` is A, the next one is B, the one after is C.
/// Revolving the buffers is a single index update and C's slots are never
/// cleared, since step `i` of the next block writes `C[i]` before anything
/// reads it.
#[derive(Clone)]
pub struct CipherState {
    pub(crate) buffers: [Buffer; 3],
    pub(crate) front: usize,
    pub(crate) t: Table,
    pub(crate) u: u8,
    pub(crate) j: u8,
    pub(crate) c: u32,
    pub(crate) x: u32,
    pub(crate) update: MultiplierUpdate,
}

impl CipherState {
    /// The all-zero fixed point: every output term and every update vanishes.
    pub fn zeroed() -> Self {
        StateParts::zeroed().into()
    }

    #[inline(always)]
    pub(crate) fn roles(&self) -> (usize, usize, usize) {
        let a = self.front;
        let b = if a == 2 { 0 } else { a + 1 };
        let c = if b == 2 { 0 } else { b + 1 };
        (a, b, c)
    }

    pub fn a(&self) -> &Buffer {
        &self.buffers[self.roles().0]
    }

    pub fn b(&self) -> &Buffer {
        &self.buffers[self.roles().1]
    }

    pub fn c_buffer(&self) -> &Buffer {
        &self.buffers[self.roles().2]
    }

    pub fn table(&self) -> &Table {
        &self.t
    }

    pub fn u(&self) -> u8 {
        self.u
    }

    pub fn j(&self) -> u8 {
        self.j
    }

    /// The multiplier `c`.
    pub fn multiplier(&self) -> u32 {
        self.c
    }

    /// The walk position `x`.
    pub fn walk_position(&self) -> u32 {
        self.x
    }

    pub fn multiplier_update(&self) -> MultiplierUpdate {
        self.update
    }

    pub fn set_multiplier_update(&mut self, update: MultiplierUpdate) {
        self.update = update;
    }

    pub fn parts(&self) -> StateParts {
        StateParts {
            a: *self.a(),
            b: *self.b(),
            c_buf: *self.c_buffer(),
            t: self.t,
            u: self.u,
            j: self.j,
            c: self.c,
            x: self.x,
            update: self.update,
        }
    }
}

impl From<StateParts> for CipherState {
    fn from(p: StateParts) -> Self {
        CipherState {
            buffers: [p.a, p.b, p.c_buf],
            front: 0,
            t: p.t,
            u: p.u,
            j: p.j,
            c: p.c,
            x: p.x,
            update: p.update,
        }
    }
}

/// Equality is by role, not by storage slot: two states that hold the same
/// A, B and C compare equal whatever their rotation offset.
impl PartialEq for CipherState {
    fn eq(&self, other: &Self) -> bool {
        self.a() == other.a()
            && self.b() == other.b()
            && self.c_buffer() == other.c_buffer()
            && self.t == other.t
            && self.u == other.u
            && self.j == other.j
            && self.c == other.c
            && self.x == other.x
            && self.update == other.update
    }
}

impl Eq for CipherState {}

// Secret words stay out of logs.
impl fmt::Debug for CipherState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CipherState")
            .field("u", &self.u)
            .field("update", &self.update)
            .finish_non_exhaustive()
    }
}
