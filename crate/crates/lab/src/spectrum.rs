//! Exact adjacency spectra and the eigenvalue census for the nonlinear
//! (multiply-and-shift) graphs.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, Result};
use crate::graph::WalkGraph;

pub const DEFAULT_VERTEX_CAP: usize = 4096;

/// Eigenvalues of a symmetric adjacency operator, sorted by decreasing
/// absolute value (ties broken with the positive value first).
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    degree: f64,
}

impl Spectrum {
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, degree: f64) -> Self {
        eigenvalues.sort_by(|a, b| b.abs().total_cmp(&a.abs()).then(b.total_cmp(a)));
        Spectrum { eigenvalues, degree }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// The trivial eigenvalue `k`.
    pub fn degree(&self) -> f64 {
        self.degree
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    /// Everything except one copy of the eigenvalue nearest to `k`.
    pub fn nontrivial(&self) -> Vec<f64> {
        let mut rest = self.eigenvalues.clone();
        if let Some(idx) = nearest(&rest, self.degree) {
            rest.remove(idx);
        }
        rest
    }

    /// Second-largest eigenvalue in algebraic order.
    pub fn second_largest(&self) -> f64 {
        self.nontrivial().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest `|λ|` among the nontrivial eigenvalues.
    pub fn max_nontrivial_abs(&self) -> f64 {
        self.nontrivial().into_iter().map(f64::abs).fold(0.0, f64::max)
    }

    /// Second-largest eigenvalue of the adjacency matrix divided by the degree.
    pub fn normalized_second(&self) -> f64 {
        self.second_largest() / self.degree
    }

    /// `ε` with `λ₂ = k − εk`.
    pub fn epsilon(&self) -> f64 {
        (self.degree - self.second_largest()) / self.degree
    }

    pub fn multiplicity(&self, value: f64, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|l| (*l - value).abs() <= tol).count()
    }
}

fn nearest(values: &[f64], target: f64) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - target).abs().total_cmp(&(b.1 - target).abs()))
        .map(|(i, _)| i)
}

pub fn spectrum(g: &WalkGraph) -> Result<Spectrum> {
    spectrum_with_cap(g, DEFAULT_VERTEX_CAP)
}

/// Dense symmetric eigensolve of the adjacency matrix.
pub fn spectrum_with_cap(g: &WalkGraph, cap: usize) -> Result<Spectrum> {
    if g.is_directed() {
        return Err(LabError::Directed);
    }
    if g.n() > cap {
        return Err(LabError::AboveCap { n: g.n(), cap });
    }
    let values = g.adjacency_matrix().symmetric_eigenvalues();
    Ok(Spectrum::from_eigenvalues(values.iter().copied().collect(), g.degree() as f64))
}

/// Power-iteration estimate of the largest nontrivial `|λ|`, for graphs
/// past the dense cap. Iterates on the complement of the constant vector.
pub fn estimate_second_abs(g: &WalkGraph, iterations: usize, seed: u64) -> Result<f64> {
    if g.is_directed() {
        return Err(LabError::Directed);
    }
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut next = vec![0.0; n];
    let mut estimate = 0.0;
    for _ in 0..iterations {
        let mean = v.iter().sum::<f64>() / n as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        v.iter_mut().for_each(|x| *x /= norm);
        for (u, out) in next.iter_mut().enumerate() {
            *out = g.neighbors(u).iter().map(|&w| v[w]).sum();
        }
        estimate = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        std::mem::swap(&mut v, &mut next);
    }
    Ok(estimate)
}

/// `4 cos(2πk/n)` for every `k` in Z/nZ with `rk ≡ k (mod n)`: the
/// eigenvalues that come from characters fixed by multiplication by `r`.
pub fn explicit_eigenvalues(n: u64, r: u64) -> Vec<f64> {
    (0..n)
        .filter(|&k| (r as u128 * k as u128) % n as u128 == k as u128)
        .map(|k| 4.0 * (2.0 * PI * k as f64 / n as f64).cos())
        .collect()
}

/// The spectrum of a nonlinear graph split into the explicit eigenvalues
/// and the rest.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitCensus {
    pub n: u64,
    pub r: u64,
    pub explicit: Vec<f64>,
    /// Explicit values with no computed eigenvalue within tolerance.
    pub missing: Vec<f64>,
    /// Computed eigenvalues left after removing one match per explicit value.
    pub remaining: Vec<f64>,
}

impl ExplicitCensus {
    pub fn complete(&self) -> bool {
        self.missing.is_empty()
    }

    pub fn max_remaining_abs(&self) -> f64 {
        self.remaining.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }

    /// Largest `c` with `|λ| ≤ 4 − c/(ln n)²` for every remaining eigenvalue.
    pub fn admissible_c(&self) -> f64 {
        (4.0 - self.max_remaining_abs()) * (self.n as f64).ln().powi(2)
    }

    pub fn check_gap_bound(&self, c: f64) -> bool {
        gap_bound_holds(&self.remaining, self.n, c)
    }

    /// Whether the explicit set is exactly `{4, −4}`.
    pub fn explicit_is_plus_minus_four(&self) -> bool {
        let mut e = self.explicit.clone();
        e.sort_by(f64::total_cmp);
        e.len() == 2 && (e[0] + 4.0).abs() < 1e-12 && (e[1] - 4.0).abs() < 1e-12
    }
}

pub fn explicit_census(spec: &Spectrum, n: u64, r: u64, tol: f64) -> ExplicitCensus {
    let explicit = explicit_eigenvalues(n, r);
    let mut remaining = spec.eigenvalues().to_vec();
    let mut missing = Vec::new();
    for &e in &explicit {
        match nearest(&remaining, e) {
            Some(idx) if (remaining[idx] - e).abs() <= tol => {
                remaining.swap_remove(idx);
            }
            _ => missing.push(e),
        }
    }
    remaining.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    ExplicitCensus { n, r, explicit, missing, remaining }
}

/// `|λ| ≤ 4 − c/(ln n)²` for every given (non-explicit) eigenvalue.
pub fn gap_bound_holds(non_explicit: &[f64], n: u64, c: f64) -> bool {
    let limit = 4.0 - c / (n as f64).ln().powi(2);
    non_explicit.iter().all(|l| l.abs() <= limit)
}

/// The largest single `c` admissible for every census in a sweep.
pub fn fit_gap_constant(censuses: &[ExplicitCensus]) -> f64 {
    censuses.iter().map(ExplicitCensus::admissible_c).fold(f64::INFINITY, f64::min)
}
