//! Output-sequencing schemes and the search for low-weight linear relations.
//!
//! A scheme says which hidden walk values `x_n` are XORed into each output:
//! `y_i = x_{i − o_1} ⊕ … ⊕ x_{i − o_k}` with offsets taken from residue
//! `i mod P`. A combination of outputs whose XOR reduces to a sum of
//! adjacent-pair terms `x_i ⊕ x_{i+1}` is a relation; `a` counts the pairs
//! and `b` the outputs. Small `a` means a strong distinguisher.

use std::fmt::Write as _;

use crate::error::{LabError, Result};

pub const MIN_WINDOW: u32 = 64;
pub const MAX_WINDOW: u32 = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequencingScheme {
    period: usize,
    taps: Vec<Vec<u32>>,
    window: u32,
}

impl SequencingScheme {
    /// Checked constructor: the window must lie in `64..=256`.
    pub fn new(taps: Vec<Vec<u32>>, window: u32) -> Result<Self> {
        if !(MIN_WINDOW..=MAX_WINDOW).contains(&window) {
            return Err(LabError::Scheme(format!("window {window} outside {MIN_WINDOW}..={MAX_WINDOW}")));
        }
        Self::new_relaxed(taps, window)
    }

    /// Like [`new`](Self::new) but accepts any window, for small-scale search.
    pub fn new_relaxed(taps: Vec<Vec<u32>>, window: u32) -> Result<Self> {
        if taps.is_empty() {
            return Err(LabError::Scheme("period must be positive".into()));
        }
        for (i, row) in taps.iter().enumerate() {
            if !row.contains(&0) {
                return Err(LabError::Scheme(format!("residue {i} does not include its own walk value (offset 0)")));
            }
            if let Some(o) = row.iter().find(|&&o| o > window) {
                return Err(LabError::Scheme(format!("residue {i}: offset {o} exceeds window {window}")));
            }
        }
        Ok(SequencingScheme { period: taps.len(), taps, window })
    }

    /// Parses one line of offsets per residue; `#` starts a comment and
    /// blank lines are skipped. Offsets are separated by commas or spaces.
    pub fn parse(text: &str, window: u32, relaxed: bool) -> Result<Self> {
        let mut taps = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<u32>()
                        .map_err(|_| LabError::Scheme(format!("line {}: bad offset {s:?}", lineno + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            taps.push(row);
        }
        if relaxed {
            Self::new_relaxed(taps, window)
        } else {
            Self::new(taps, window)
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.taps {
            let cells: Vec<String> = row.iter().map(u32::to_string).collect();
            let _ = writeln!(out, "{}", cells.join(", "));
        }
        out
    }

    /// The cipher's own rule: step `i` of a block XORs the fresh walk value
    /// with buffer entries written one and two blocks earlier.
    pub fn mv3() -> Self {
        let taps = (0..32u32)
            .map(|i| vec![64 + i - (9 * i + 5) % 32, 32 + i - (7 * i + 18) % 32, 0])
            .collect();
        Self::new(taps, 96).expect("offsets fit the window")
    }

    /// Three-tap family with period 32: offsets `{5k mod 16, 16 + (3k mod 16), 0}`
    /// for `k = i mod 16`.
    pub fn modular_family() -> Self {
        let taps = (0..32u32)
            .map(|i| {
                let k = i % 16;
                vec![(5 * k) % 16, 16 + (3 * k) % 16, 0]
            })
            .collect();
        Self::new(taps, MIN_WINDOW).expect("offsets fit the window")
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn taps(&self, residue: usize) -> &[u32] {
        &self.taps[residue % self.period]
    }

    /// Largest offset in use.
    pub fn span(&self) -> u32 {
        self.taps.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Walk positions XORed into `y_j`, sorted, with repeated taps cancelled.
    pub fn output_support(&self, j: i64) -> Vec<i64> {
        let mut pos: Vec<i64> = self.taps(j.rem_euclid(self.period as i64) as usize)
            .iter()
            .map(|&o| j - o as i64)
            .collect();
        pos.sort_unstable();
        cancel_pairs(pos)
    }
}

fn cancel_pairs(sorted: Vec<i64>) -> Vec<i64> {
    let mut out: Vec<i64> = Vec::with_capacity(sorted.len());
    for p in sorted {
        if out.last() == Some(&p) {
            out.pop();
        } else {
            out.push(p);
        }
    }
    out
}

/// Minimal decomposition of a sorted even-size position set into adjacent
/// pairs `{i, i+1}`: pairs `p_1..p_2−1`, `p_3..p_4−1`, … Returns `None` for
/// odd sets, which have no decomposition.
pub fn pair_decomposition(sorted: &[i64]) -> Option<Vec<i64>> {
    if sorted.len() % 2 == 1 {
        return None;
    }
    Some(sorted.chunks(2).flat_map(|c| c[0]..c[1]).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationWitness {
    pub y_indices: Vec<i64>,
    pub pair_indices: Vec<i64>,
    pub a: usize,
    pub b: usize,
}

impl RelationWitness {
    /// Exact GF(2) check: the outputs' XOR equals the pairs' XOR.
    pub fn verify(&self, scheme: &SequencingScheme) -> bool {
        if self.a != self.pair_indices.len() || self.b != self.y_indices.len() || self.b == 0 {
            return false;
        }
        let mut lhs: Vec<i64> = self.y_indices.iter().flat_map(|&j| scheme.output_support(j)).collect();
        lhs.sort_unstable();
        let mut rhs: Vec<i64> = self.pair_indices.iter().flat_map(|&i| [i, i + 1]).collect();
        rhs.sort_unstable();
        let lhs = cancel_pairs(lhs);
        !lhs.is_empty() && lhs == cancel_pairs(rhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_b: usize,
    /// Outputs `y_j` with `0 ≤ j < horizon` are eligible.
    pub horizon: usize,
}

impl SearchConfig {
    pub fn default_for(scheme: &SequencingScheme) -> Self {
        SearchConfig { max_b: 6, horizon: 4 * scheme.period() + scheme.window() as usize }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub a_min: Option<usize>,
    pub witness: Option<RelationWitness>,
    /// No branch that could still beat `a_min` was cut by `max_b` or the
    /// horizon, so `a_min` is the true minimum rather than an upper bound.
    pub exhaustive: bool,
    pub nodes: u64,
}

/// Branch-and-bound over combinations of at most `max_b` outputs.
///
/// The scheme is periodic, so the first output is taken from `0..P`.
/// Positions below every remaining candidate's support are final; their
/// prefix-parity weight is a lower bound on the eventual pair count.
pub fn min_pair_weight(scheme: &SequencingScheme, cfg: SearchConfig) -> Result<SearchReport> {
    if cfg.max_b == 0 {
        return Err(LabError::Parameter("max_b must be positive".into()));
    }
    let min_horizon = 4 * scheme.period() + scheme.window() as usize;
    if cfg.horizon < min_horizon {
        return Err(LabError::Parameter(format!("horizon {} below 4P + C = {min_horizon}", cfg.horizon)));
    }
    let mut s = Search::new(scheme, cfg);
    let mut acc = vec![0u64; s.words];
    let mut js = Vec::with_capacity(cfg.max_b);
    for j in 0..scheme.period().min(cfg.horizon) {
        s.descend(j, &mut acc, 0, &mut js);
    }
    let witness = s.best_js.as_ref().map(|js| {
        let ys: Vec<i64> = js.iter().map(|&j| j as i64).collect();
        let mut support: Vec<i64> = ys.iter().flat_map(|&j| scheme.output_support(j)).collect();
        support.sort_unstable();
        let pairs = pair_decomposition(&cancel_pairs(support)).expect("even support");
        RelationWitness { a: pairs.len(), b: ys.len(), y_indices: ys, pair_indices: pairs }
    });
    let a_min = (s.best != usize::MAX).then_some(s.best);
    Ok(SearchReport { a_min, witness, exhaustive: s.cut_lb >= s.best, nodes: s.nodes })
}

struct Search {
    words: usize,
    rows: Vec<Vec<u64>>,
    odd: Vec<bool>,
    /// `frontier[j]`: lowest bit any output `≥ j` can touch.
    frontier: Vec<usize>,
    max_b: usize,
    horizon: usize,
    best: usize,
    best_js: Option<Vec<usize>>,
    cut_lb: usize,
    nodes: u64,
}

impl Search {
    fn new(scheme: &SequencingScheme, cfg: SearchConfig) -> Self {
        let base = scheme.span() as i64;
        let bits = cfg.horizon + base as usize + 1;
        let words = bits.div_ceil(64);
        let mut rows = Vec::with_capacity(cfg.horizon);
        let mut odd = Vec::with_capacity(cfg.horizon);
        let mut low = Vec::with_capacity(cfg.horizon + 1);
        for j in 0..cfg.horizon {
            let support = scheme.output_support(j as i64);
            let mut row = vec![0u64; words];
            for p in &support {
                let bit = (p + base) as usize;
                row[bit / 64] |= 1 << (bit % 64);
            }
            low.push(support.first().map_or(usize::MAX, |p| (p + base) as usize));
            odd.push(support.len() % 2 == 1);
            rows.push(row);
        }
        // Beyond the horizon, every output sits at or above j − span.
        low.push(cfg.horizon);
        let mut frontier = low.clone();
        for j in (0..cfg.horizon).rev() {
            frontier[j] = frontier[j].min(frontier[j + 1]);
        }
        Search {
            words,
            rows,
            odd,
            frontier,
            max_b: cfg.max_b,
            horizon: cfg.horizon,
            best: usize::MAX,
            best_js: None,
            cut_lb: usize::MAX,
            nodes: 0,
        }
    }

    fn descend(&mut self, j: usize, acc: &mut [u64], parity: usize, js: &mut Vec<usize>) {
        self.nodes += 1;
        xor_into(acc, &self.rows[j]);
        let parity = parity ^ self.odd[j] as usize;
        js.push(j);

        let nonempty = acc.iter().any(|&w| w != 0);
        if parity == 0 && nonempty {
            let cost = prefix_parity_weight(acc, usize::MAX);
            if cost < self.best {
                self.best = cost;
                self.best_js = Some(js.clone());
            }
        }
        let top = highest_bit(acc);
        for next in j + 1..=self.horizon {
            let f = self.frontier[next];
            if parity == 0 && nonempty && top.is_some_and(|t| f > t) {
                break;
            }
            let lb = prefix_parity_weight(acc, f);
            if lb >= self.best {
                break;
            }
            if next == self.horizon || js.len() == self.max_b {
                self.cut_lb = self.cut_lb.min(lb);
                break;
            }
            self.descend(next, acc, parity, js);
        }

        js.pop();
        xor_into(acc, &self.rows[j]);
    }
}

fn xor_into(acc: &mut [u64], row: &[u64]) {
    acc.iter_mut().zip(row).for_each(|(a, r)| *a ^= r);
}

fn highest_bit(acc: &[u64]) -> Option<usize> {
    acc.iter().enumerate().rev().find(|(_, &w)| w != 0).map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
}

/// Inclusive prefix XOR within a word: bit `q` becomes the parity of bits `0..=q`.
fn prefix_xor(mut x: u64) -> u64 {
    x ^= x << 1;
    x ^= x << 2;
    x ^= x << 4;
    x ^= x << 8;
    x ^= x << 16;
    x ^= x << 32;
    x
}

/// Number of bit positions below `limit` at which the running parity is odd.
/// For an even set over the whole range this is its minimal pair count.
fn prefix_parity_weight(acc: &[u64], limit: usize) -> usize {
    let mut carry = 0u64;
    let mut total = 0usize;
    for (i, &w) in acc.iter().enumerate() {
        let start = i * 64;
        if start >= limit {
            break;
        }
        let mut p = prefix_xor(w);
        if carry == 1 {
            p = !p;
        }
        if limit - start < 64 {
            p &= (1u64 << (limit - start)) - 1;
        }
        total += p.count_ones() as usize;
        carry ^= (w.count_ones() & 1) as u64;
    }
    total
}
