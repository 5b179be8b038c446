//! Explicit small graphs for spectral and random-walk experiments.
//!
//! Graphs are stored as flat out-neighbour lists of uniform length `degree`.
//! Multi-edges and self-loops are kept: they matter for the adjacency
//! operator and for the walk.

use nalgebra::DMatrix;
use num_integer::Integer;
use rand::Rng;

use crate::error::{LabError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkGraph {
    n: usize,
    degree: usize,
    targets: Vec<usize>,
    directed: bool,
}

impl WalkGraph {
    /// `targets[v * degree..(v + 1) * degree]` are the out-neighbours of `v`.
    /// Undirected graphs must be symmetric as multigraphs.
    pub fn new(n: usize, degree: usize, targets: Vec<usize>, directed: bool) -> Result<Self> {
        if n == 0 || degree == 0 {
            return Err(LabError::Graph("need at least one vertex and one edge per vertex".into()));
        }
        if targets.len() != n * degree {
            return Err(LabError::Graph(format!(
                "{} targets for {n} vertices of degree {degree}",
                targets.len()
            )));
        }
        if let Some(bad) = targets.iter().find(|&&t| t >= n) {
            return Err(LabError::Graph(format!("target {bad} out of range")));
        }
        let g = WalkGraph { n, degree, targets, directed };
        if !directed && !g.is_symmetric() {
            return Err(LabError::Graph("undirected graph with asymmetric edge multiplicities".into()));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[v * self.degree..(v + 1) * self.degree]
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.neighbors(u).iter().filter(|&&w| w == v).count()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|u| self.neighbors(u).iter().all(|&v| self.multiplicity(u, v) == self.multiplicity(v, u)))
    }

    /// Number of self-loop entries, i.e. the trace of the adjacency matrix.
    pub fn trace(&self) -> usize {
        (0..self.n).map(|v| self.multiplicity(v, v)).sum()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &t in &self.targets {
            d[t] += 1;
        }
        d
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for u in 0..self.n {
            for &v in self.neighbors(u) {
                m[(u, v)] += 1.0;
            }
        }
        m
    }

    fn require_in_regular(&self) -> Result<()> {
        if self.in_degrees().iter().any(|&d| d != self.degree) {
            return Err(LabError::Graph("in-degrees are not uniform".into()));
        }
        Ok(())
    }

    /// Undirected graph with adjacency `M + M^t`, degree `2k`. Needs uniform
    /// in-degree so the result stays regular.
    pub fn additive_reversal(&self) -> Result<WalkGraph> {
        self.require_in_regular()?;
        let k = self.degree;
        let mut adj: Vec<Vec<usize>> = (0..self.n).map(|v| self.neighbors(v).to_vec()).collect();
        for u in 0..self.n {
            for &v in self.neighbors(u) {
                adj[v].push(u);
            }
        }
        WalkGraph::new(self.n, 2 * k, adj.concat(), false)
    }

    /// Undirected graph with adjacency `M M^t`: `u ~ v` once for every
    /// common out-neighbour. Degree `k^2` under uniform in-degree.
    pub fn multiplicative_reversal(&self) -> Result<WalkGraph> {
        self.require_in_regular()?;
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for u in 0..self.n {
            for &w in self.neighbors(u) {
                preds[w].push(u);
            }
        }
        let mut targets = Vec::with_capacity(self.n * self.degree * self.degree);
        for u in 0..self.n {
            for &w in self.neighbors(u) {
                targets.extend_from_slice(&preds[w]);
            }
        }
        WalkGraph::new(self.n, self.degree * self.degree, targets, false)
    }
}

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn check_modulus(n: u64) -> Result<usize> {
    if n < 2 {
        return Err(LabError::Modulus(n));
    }
    usize::try_from(n).map_err(|_| LabError::Modulus(n))
}

/// Inverse of `r` modulo `n`.
pub fn mod_inverse(r: u64, n: u64) -> Result<u64> {
    let eg = (r as i128).extended_gcd(&(n as i128));
    if eg.gcd != 1 {
        return Err(LabError::NotCoprime { r, n, gcd: eg.gcd as u64 });
    }
    Ok(eg.x.rem_euclid(n as i128) as u64)
}

/// The 4-valent graph on Z/nZ joining `x` to `r(x+1)`, `r(x-1)`,
/// `r̄x + 1` and `r̄x - 1`, where `r r̄ = 1 (mod n)`. The two pairs are
/// reverses of each other, so the multigraph is symmetric.
pub fn build_nonlinear_graph(n: u64, r: u64) -> Result<WalkGraph> {
    let size = check_modulus(n)?;
    if r < 2 {
        return Err(LabError::Multiplier(r));
    }
    let r_inv = mod_inverse(r % n, n).map_err(|_| LabError::NotCoprime { r, n, gcd: r.gcd(&n) })?;
    let r = r % n;
    let mut targets = Vec::with_capacity(size * 4);
    for x in 0..n {
        targets.push(mul_mod(r, (x + 1) % n, n));
        targets.push(mul_mod(r, (x + n - 1) % n, n));
        targets.push((mul_mod(r_inv, x, n) + 1) % n);
        targets.push((mul_mod(r_inv, x, n) + n - 1) % n);
    }
    WalkGraph::new(size, 4, targets.into_iter().map(|t| t as usize).collect(), false)
}

/// Undirected Cayley graph of Z/nZ: `x ~ x + s` and `x ~ x - s` for every
/// generator, degree `2|S|`.
pub fn build_cayley_graph(n: u64, generators: &[u64]) -> Result<WalkGraph> {
    let size = check_modulus(n)?;
    if generators.is_empty() {
        return Err(LabError::NoGenerators);
    }
    let mut targets = Vec::with_capacity(size * 2 * generators.len());
    for x in 0..n {
        for &s in generators {
            let s = s % n;
            targets.push(((x + s) % n) as usize);
            targets.push(((x + n - s) % n) as usize);
        }
    }
    WalkGraph::new(size, 2 * generators.len(), targets, false)
}

/// `count` generators drawn uniformly (with repetition) from Z/nZ.
pub fn random_generators<R: Rng + ?Sized>(n: u64, count: usize, rng: &mut R) -> Vec<u64> {
    (0..count).map(|_| rng.gen_range(0..n)).collect()
}

/// Same shape as [`build_nonlinear_graph`] with multiplication by `r`
/// replaced by an arbitrary permutation `f`: `x ~ f(x+1)`, `x ~ f(x-1)`,
/// plus the reverse edges. Fails if `f` is not a bijection on Z/nZ.
pub fn build_permutation_graph(n: u64, f: impl Fn(u64) -> u64) -> Result<WalkGraph> {
    let size = check_modulus(n)?;
    let image: Vec<usize> = (0..n).map(|x| (f(x) % n) as usize).collect();
    let mut inverse = vec![usize::MAX; size];
    for (x, &y) in image.iter().enumerate() {
        if inverse[y] != usize::MAX {
            return Err(LabError::NotBijective(n));
        }
        inverse[y] = x;
    }
    let mut targets = Vec::with_capacity(size * 4);
    for x in 0..size {
        targets.push(image[(x + 1) % size]);
        targets.push(image[(x + size - 1) % size]);
        targets.push((inverse[x] + size - 1) % size);
        targets.push((inverse[x] + 1) % size);
    }
    WalkGraph::new(size, 4, targets, false)
}

/// Model of the multiplier walk: [`build_permutation_graph`] on Z/2^bits
/// with the invertible square-and-or map `x + 2(x^2 | 1)`. Only for
/// measuring gaps; no bound is known for it. The map keeps parity, so the
/// graph is bipartite and needs the lazy walk.
pub fn build_squaring_graph(bits: u32) -> Result<WalkGraph> {
    if !(1..=32).contains(&bits) {
        return Err(LabError::Parameter(format!("bit width {bits} outside 1..=32")));
    }
    let n = 1u64 << bits;
    build_permutation_graph(n, |x| x.wrapping_add((x.wrapping_mul(x) | 1) << 1) % n)
}

pub fn complete_graph(n: usize) -> Result<WalkGraph> {
    if n < 2 {
        return Err(LabError::Modulus(n as u64));
    }
    let targets = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u)).collect();
    WalkGraph::new(n, n - 1, targets, false)
}

/// Directed cycle `x -> x + 1`; useful as a worst-case directed example.
pub fn directed_cycle(n: usize) -> Result<WalkGraph> {
    if n < 2 {
        return Err(LabError::Modulus(n as u64));
    }
    WalkGraph::new(n, 1, (0..n).map(|x| (x + 1) % n).collect(), true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn nonlinear_neighbours_of_zero() {
        let g = build_nonlinear_graph(5, 2).unwrap();
        let mut nb = g.neighbors(0).to_vec();
        nb.sort();
        assert_eq!(nb, vec![1, 2, 3, 4]);
        // r(x+1)=2, r(x-1)=2*4=3, 3*0+1=1, 3*0-1=4
        assert_eq!(g.neighbors(0), &[2, 3, 1, 4]);
    }

    #[test]
    fn nonlinear_rejects_shared_factor() {
        assert_eq!(build_nonlinear_graph(6, 2), Err(LabError::NotCoprime { r: 2, n: 6, gcd: 2 }));
        assert_eq!(build_nonlinear_graph(1, 3), Err(LabError::Modulus(1)));
        assert_eq!(build_nonlinear_graph(7, 1), Err(LabError::Multiplier(1)));
    }

    #[test]
    fn nonlinear_graphs_are_symmetric() {
        for (n, r) in [(8, 3), (64, 5), (101, 7), (1024, 3)] {
            let g = build_nonlinear_graph(n, r).unwrap();
            assert!(g.is_symmetric());
            assert_eq!(g.in_degrees(), vec![4; n as usize]);
        }
    }

    #[test]
    fn cayley_cycle() {
        let g = build_cayley_graph(4, &[1]).unwrap();
        assert_eq!(g.degree(), 2);
        assert_eq!(g.neighbors(0), &[1, 3]);
        let loops = build_cayley_graph(3, &[0]).unwrap();
        assert_eq!(loops.trace(), 6);
        assert_eq!(build_cayley_graph(4, &[]), Err(LabError::NoGenerators));
    }

    #[test]
    fn random_generators_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let gens = random_generators(1024, 40, &mut rng);
        assert_eq!(gens.len(), 40);
        assert!(gens.iter().all(|&g| g < 1024));
    }

    #[test]
    fn permutation_graph_requires_bijection() {
        assert_eq!(build_permutation_graph(8, |x| x * 2), Err(LabError::NotBijective(8)));
        // multiplication by r is the permutation the nonlinear graph uses
        let g = build_permutation_graph(9, |x| 2 * x).unwrap();
        assert_eq!(edge_lists(&g), edge_lists(&build_nonlinear_graph(9, 2).unwrap()));
    }

    #[test]
    fn squaring_graph_is_regular_and_symmetric() {
        for bits in [3, 6, 10] {
            let g = build_squaring_graph(bits).unwrap();
            assert!(g.is_symmetric());
            assert_eq!(g.in_degrees(), vec![4; 1 << bits]);
        }
    }

    #[test]
    fn reversals() {
        let cyc = directed_cycle(6).unwrap();
        let add = cyc.additive_reversal().unwrap();
        assert_eq!(add, build_cayley_graph(6, &[1]).unwrap());
        let mul = cyc.multiplicative_reversal().unwrap();
        // each vertex shares its single out-neighbour only with itself
        assert_eq!(mul.degree(), 1);
        assert!((0..6).all(|v| mul.neighbors(v) == [v]));
    }

    #[test]
    fn asymmetric_undirected_rejected() {
        assert!(WalkGraph::new(3, 1, vec![1, 2, 0], false).is_err());
        assert!(WalkGraph::new(3, 1, vec![1, 2, 0], true).is_ok());
        assert!(WalkGraph::new(3, 1, vec![1, 2], true).is_err());
        assert!(WalkGraph::new(3, 1, vec![1, 2, 3], true).is_err());
    }

    #[test]
    fn complete_graph_shape() {
        let k4 = complete_graph(4).unwrap();
        assert_eq!(k4.degree(), 3);
        assert_eq!(k4.trace(), 0);
    }

    fn edge_lists(g: &WalkGraph) -> Vec<Vec<usize>> {
        (0..g.n())
            .map(|v| {
                let mut nb = g.neighbors(v).to_vec();
                nb.sort();
                nb
            })
            .collect()
    }
}
