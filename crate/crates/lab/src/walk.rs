//! Random walks on [`WalkGraph`]s: exact distribution iteration for mixing
//! times, and Monte-Carlo visit counts checked against the Chernoff-type
//! tail bound for expander walks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::graph::WalkGraph;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingOptions {
    /// Stay put with probability 1/2 at every step.
    pub lazy: bool,
    pub max_steps: usize,
}

impl Default for MixingOptions {
    fn default() -> Self {
        MixingOptions { lazy: true, max_steps: 200_000 }
    }
}

/// `½ Σ |p(v) − 1/n|`.
pub fn tv_from_uniform(dist: &[f64]) -> f64 {
    let u = 1.0 / dist.len() as f64;
    0.5 * dist.iter().map(|p| (p - u).abs()).sum::<f64>()
}

/// One step of the walk's distribution, pushed along out-edges.
pub fn evolve(g: &WalkGraph, dist: &[f64], lazy: bool, out: &mut [f64]) {
    let k = g.degree() as f64;
    let (stay, move_w) = if lazy { (0.5, 0.5 / k) } else { (0.0, 1.0 / k) };
    out.iter_mut().zip(dist).for_each(|(o, p)| *o = stay * p);
    for (v, &p) in dist.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let share = p * move_w;
        for &w in g.neighbors(v) {
            out[w] += share;
        }
    }
}

/// Total-variation distance from uniform after `0..=steps` steps.
pub fn tv_trajectory(g: &WalkGraph, start: usize, steps: usize, lazy: bool) -> Result<Vec<f64>> {
    check_vertex(g, start)?;
    let mut dist = vec![0.0; g.n()];
    dist[start] = 1.0;
    let mut next = vec![0.0; g.n()];
    let mut out = Vec::with_capacity(steps + 1);
    out.push(tv_from_uniform(&dist));
    for _ in 0..steps {
        evolve(g, &dist, lazy, &mut next);
        std::mem::swap(&mut dist, &mut next);
        out.push(tv_from_uniform(&dist));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixingReport {
    pub steps: usize,
    pub tv: f64,
}

/// Smallest `t` with TV distance from uniform below `eps`.
pub fn mixing_time(g: &WalkGraph, start: usize, eps: f64, opts: MixingOptions) -> Result<MixingReport> {
    check_vertex(g, start)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(LabError::Parameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    let mut dist = vec![0.0; g.n()];
    dist[start] = 1.0;
    let mut next = vec![0.0; g.n()];
    for t in 0..=opts.max_steps {
        let tv = tv_from_uniform(&dist);
        if tv < eps {
            return Ok(MixingReport { steps: t, tv });
        }
        evolve(g, &dist, opts.lazy, &mut next);
        std::mem::swap(&mut dist, &mut next);
    }
    Err(LabError::NoConvergence { eps, steps: opts.max_steps })
}

/// Walk length after which a walk lands in a set of `set_size` vertices
/// with probability at least `set_size / 2n`, given that every nontrivial
/// eigenvalue has `|λ| ≤ sigma < k`:
/// `log(2n / √|S|) / log(k / σ)`. Infinite when `σ ≥ k`.
pub fn hitting_walk_length(n: usize, set_size: usize, degree: f64, sigma: f64) -> f64 {
    if sigma >= degree {
        return f64::INFINITY;
    }
    (2.0 * n as f64 / (set_size as f64).sqrt()).ln() / (degree / sigma).ln()
}

/// `(1 + xε/(10n)) · exp(−x²ε/(20n))` for an `n`-step walk.
pub fn gillman_bound(x: f64, epsilon: f64, steps: usize) -> f64 {
    let n = steps as f64;
    (1.0 + x * epsilon / (10.0 * n)) * (-x * x * epsilon / (20.0 * n)).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Start {
    /// Start from a uniformly random vertex (the stationary distribution).
    Uniform,
    Vertex(usize),
}

#[derive(Clone, Debug)]
pub struct WalkExperiment<'g> {
    pub graph: &'g WalkGraph,
    pub start: Start,
    pub steps: usize,
    pub target: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
}

pub const MIN_TRIALS: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct TailRow {
    pub x: f64,
    pub empirical: f64,
    pub bound: f64,
}

impl TailRow {
    pub fn holds(&self) -> bool {
        self.empirical <= self.bound
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VisitReport {
    pub expected: f64,
    pub epsilon: f64,
    /// Visit count `t_n` of each trial.
    pub counts: Vec<usize>,
    pub rows: Vec<TailRow>,
}

impl VisitReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(TailRow::holds)
    }

    pub fn mean(&self) -> f64 {
        self.counts.iter().sum::<usize>() as f64 / self.counts.len() as f64
    }
}

/// Runs independent walks, counts how many of the `steps` positions after
/// the start land in the target set, and compares the empirical tail
/// `P[|t_n − n|S|/N| ≥ x]` with [`gillman_bound`] at each grid point.
///
/// Trials are independent ChaCha streams keyed by `(seed, trial)`, so the
/// result does not depend on how rayon schedules them.
pub fn visit_count_experiment(exp: &WalkExperiment<'_>, epsilon: f64, grid: &[f64]) -> Result<VisitReport> {
    let g = exp.graph;
    if exp.trials < MIN_TRIALS {
        return Err(LabError::Parameter(format!("need at least {MIN_TRIALS} trials, got {}", exp.trials)));
    }
    if exp.steps == 0 {
        return Err(LabError::Parameter("walk length must be positive".into()));
    }
    if let Start::Vertex(v) = exp.start {
        check_vertex(g, v)?;
    }
    let mut in_target = vec![false; g.n()];
    for &v in &exp.target {
        check_vertex(g, v)?;
        in_target[v] = true;
    }
    let set_size = in_target.iter().filter(|&&b| b).count();
    let expected = exp.steps as f64 * set_size as f64 / g.n() as f64;

    let counts: Vec<usize> = (0..exp.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(exp.seed);
            rng.set_stream(trial as u64);
            let mut v = match exp.start {
                Start::Uniform => rng.gen_range(0..g.n()),
                Start::Vertex(v) => v,
            };
            let mut hits = 0;
            for _ in 0..exp.steps {
                v = g.neighbors(v)[rng.gen_range(0..g.degree())];
                hits += in_target[v] as usize;
            }
            hits
        })
        .collect();

    let rows = grid
        .iter()
        .map(|&x| {
            let exceed = counts.iter().filter(|&&t| (t as f64 - expected).abs() >= x).count();
            TailRow { x, empirical: exceed as f64 / exp.trials as f64, bound: gillman_bound(x, epsilon, exp.steps) }
        })
        .collect();
    Ok(VisitReport { expected, epsilon, counts, rows })
}

fn check_vertex(g: &WalkGraph, v: usize) -> Result<()> {
    if v >= g.n() {
        return Err(LabError::Parameter(format!("vertex {v} outside 0..{}", g.n())));
    }
    Ok(())
}
