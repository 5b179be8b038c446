//! Lightweight keystream statistics: monobit, non-overlapping 2-bit serial,
//! and per-bit-position frequency over little-endian 32-bit words.

use crate::error::{LabError, Result};

pub const MIN_STREAM_BYTES: usize = 100_000;
pub const DEFAULT_SIGMA: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StatTest {
    Monobit,
    Serial2Bit,
    PositionBits,
}

impl StatTest {
    pub const ALL: [StatTest; 3] = [StatTest::Monobit, StatTest::Serial2Bit, StatTest::PositionBits];
}

#[derive(Clone, Debug, PartialEq)]
pub struct StatReport {
    pub bytes: usize,
    pub sigma: f64,
    pub monobit_z: Option<f64>,
    /// χ² over the four dibit values, 3 degrees of freedom.
    pub serial_chi2: Option<f64>,
    /// `serial_chi2` mapped to a standard normal (Wilson–Hilferty).
    pub serial_z: Option<f64>,
    /// One z-score per bit position of a word; index 0 is the lsb.
    pub lane_z: Option<[f64; 32]>,
}

impl StatReport {
    pub fn monobit_pass(&self) -> bool {
        self.monobit_z.map_or(true, |z| z.abs() <= self.sigma)
    }

    pub fn serial_pass(&self) -> bool {
        self.serial_z.map_or(true, |z| z.abs() <= self.sigma)
    }

    pub fn failing_lanes(&self) -> Vec<usize> {
        self.lane_z
            .map(|l| (0..32).filter(|&i| l[i].abs() > self.sigma).collect())
            .unwrap_or_default()
    }

    pub fn pass(&self) -> bool {
        self.monobit_pass() && self.serial_pass() && self.failing_lanes().is_empty()
    }

    /// Largest |z| over every statistic that was run.
    pub fn worst_z(&self) -> f64 {
        let lanes = self.lane_z.map(|l| l.into_iter().map(f64::abs).fold(0.0, f64::max)).unwrap_or(0.0);
        [self.monobit_z, self.serial_z].into_iter().flatten().map(f64::abs).fold(lanes, f64::max)
    }
}

pub fn stat_tests(stream: &[u8], which: &[StatTest]) -> Result<StatReport> {
    stat_tests_at(stream, which, DEFAULT_SIGMA)
}

pub fn stat_tests_at(stream: &[u8], which: &[StatTest], sigma: f64) -> Result<StatReport> {
    if stream.len() < MIN_STREAM_BYTES {
        return Err(LabError::UndersizedStream { len: stream.len(), min: MIN_STREAM_BYTES });
    }
    let run = |t| which.contains(&t);
    let monobit_z = run(StatTest::Monobit).then(|| monobit(stream));
    let serial_chi2 = run(StatTest::Serial2Bit).then(|| serial_chi2(stream));
    let serial_z = serial_chi2.map(|c| wilson_hilferty(c, 3.0));
    let lane_z = run(StatTest::PositionBits).then(|| position_lanes(stream));
    Ok(StatReport { bytes: stream.len(), sigma, monobit_z, serial_chi2, serial_z, lane_z })
}

fn binomial_z(ones: u64, n: u64) -> f64 {
    let n = n as f64;
    (ones as f64 - n / 2.0) / (n.sqrt() / 2.0)
}

fn monobit(stream: &[u8]) -> f64 {
    let ones: u64 = stream.iter().map(|b| b.count_ones() as u64).sum();
    binomial_z(ones, stream.len() as u64 * 8)
}

fn serial_chi2(stream: &[u8]) -> f64 {
    let mut counts = [0u64; 4];
    for &b in stream {
        for shift in [0, 2, 4, 6] {
            counts[(b >> shift & 3) as usize] += 1;
        }
    }
    let expected = stream.len() as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

fn wilson_hilferty(chi2: f64, df: f64) -> f64 {
    let v = 2.0 / (9.0 * df);
    ((chi2 / df).cbrt() - (1.0 - v)) / v.sqrt()
}

fn position_lanes(stream: &[u8]) -> [f64; 32] {
    let mut ones = [0u64; 32];
    let words = stream.chunks_exact(4);
    let n = words.len() as u64;
    for w in words {
        let w = u32::from_le_bytes([w[0], w[1], w[2], w[3]]);
        for (lane, count) in ones.iter_mut().enumerate() {
            *count += (w >> lane & 1) as u64;
        }
    }
    ones.map(|c| binomial_z(c, n))
}
