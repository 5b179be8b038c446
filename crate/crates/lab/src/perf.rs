//! Keystream throughput measurement.

use std::time::{Duration, Instant};

use mv3::{CipherState, BLOCK_BYTES};

use crate::error::{LabError, Result};

const WARMUP_BYTES: usize = 1 << 20;
const CHUNK_WORDS: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq)]
pub struct Throughput {
    pub bytes: u64,
    pub elapsed: Duration,
    /// Nominal clock from `/proc/cpuinfo`, when available.
    pub cpu_mhz: Option<f64>,
}

impl Throughput {
    pub fn bytes_per_sec(&self) -> f64 {
        self.bytes as f64 / self.elapsed.as_secs_f64()
    }

    pub fn mb_per_sec(&self) -> f64 {
        self.bytes_per_sec() / 1e6
    }

    /// Rough estimate: nominal clock over throughput. Turbo and frequency
    /// scaling make this approximate.
    pub fn cycles_per_byte(&self) -> Option<f64> {
        self.cpu_mhz.map(|mhz| mhz * 1e6 / self.bytes_per_sec())
    }
}

/// Generates at least `bytes` of keystream from `state` after a 1 MiB
/// warm-up and times the steady-state part.
pub fn measure_throughput(state: &mut CipherState, bytes: usize) -> Result<Throughput> {
    if bytes < BLOCK_BYTES {
        return Err(LabError::Parameter(format!("measure at least {BLOCK_BYTES} bytes")));
    }
    let mut buf = vec![0u32; CHUNK_WORDS];
    let mut sink = 0u32;
    let mut run = |state: &mut CipherState, total: usize| {
        let mut done = 0;
        while done < total {
            state.fill_words(&mut buf).expect("chunk is whole blocks");
            sink ^= buf[buf.len() - 1];
            done += CHUNK_WORDS * 4;
        }
        done
    };
    run(state, WARMUP_BYTES);
    let start = Instant::now();
    let done = run(state, bytes);
    let elapsed = start.elapsed();
    std::hint::black_box(sink);
    Ok(Throughput { bytes: done as u64, elapsed, cpu_mhz: cpu_mhz() })
}

pub fn cpu_mhz() -> Option<f64> {
    let info = std::fs::read_to_string("/proc/cpuinfo").ok()?;
    parse_cpu_mhz(&info)
}

fn parse_cpu_mhz(info: &str) -> Option<f64> {
    info.lines()
        .find(|l| l.starts_with("cpu MHz"))
        .and_then(|l| l.split(':').nth(1))
        .and_then(|v| v.trim().parse().ok())
}
