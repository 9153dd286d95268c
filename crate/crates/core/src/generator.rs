//! The three generators: edge-centric SKG, its source-then-destination
//! equivalent, and the per-vertex Poisson variant (PSKG).
//!
//! Digit pairing: at recursion level `j` (counted from the most significant
//! digit) the destination digit is drawn from the `v` row selected by the
//! source digit at the same level. Source digits are peeled off
//! least-significant first with `mod`/`div`, so each drawn destination digit
//! is written back into the matching place value. This keeps the per-edge
//! probability equal to the `(u, v)` entry of the dense Kronecker power.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

use crate::initiator::{GraphSpec, InitiatorError, Marginals};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error(transparent)]
    Initiator(#[from] InitiatorError),
    #[error("Poisson mean must be finite and non-negative, got {0}")]
    BadPoissonMean(f64),
}

/// A generated directed multigraph over vertices `0..n_vertices`.
///
/// Multi-edges and self-loops are kept.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeList {
    pub n_vertices: u64,
    pub edges: Vec<(u64, u64)>,
}

impl EdgeList {
    pub fn new(n_vertices: u64, edges: Vec<(u64, u64)>) -> Self {
        Self { n_vertices, edges }
    }

    pub fn empty(n_vertices: u64) -> Self {
        Self {
            n_vertices,
            edges: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// First edge with an endpoint outside `0..n_vertices`, if any.
    pub fn first_out_of_range(&self) -> Option<(usize, (u64, u64))> {
        self.edges
            .iter()
            .copied()
            .enumerate()
            .find(|&(_, (a, b))| a >= self.n_vertices || b >= self.n_vertices)
    }

    /// Removes repeated `(source, destination)` pairs, keeping the first
    /// occurrence and the original order otherwise.
    pub fn dedup(&mut self) {
        let mut seen = std::collections::HashSet::with_capacity(self.edges.len());
        self.edges.retain(|e| seen.insert(*e));
    }
}

/// Deterministic random stream identified by `(seed, stream id)`.
///
/// Backed by ChaCha8 with the seed expanded into the key and the stream id
/// used as the ChaCha stream (nonce), so distinct ids never share a
/// keystream and output is identical on every platform.
#[derive(Debug, Clone)]
pub struct RandomStream(ChaCha8Rng);

/// Stream id reserved for the single sequential stream of the edge-centric
/// generators. Vertex ids never reach it because `n^k <= u64::MAX`.
pub const SEQUENTIAL_STREAM: u64 = u64::MAX;

impl RandomStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self(rng)
    }

    /// The stream the edge-centric generators consume.
    pub fn sequential(seed: u64) -> Self {
        Self::new(seed, SEQUENTIAL_STREAM)
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// Per-vertex stream for PSKG. Pure function of `(seed, u)`.
pub fn derive_vertex_stream(seed: u64, u: u64) -> RandomStream {
    RandomStream::new(seed, u)
}

/// Inverse-CDF draw from a small discrete distribution.
fn draw_index<R: Rng + ?Sized>(cumulative: &[f64], probs: &[f64], rng: &mut R) -> usize {
    let x: f64 = rng.random();
    match cumulative.iter().position(|&c| x < c) {
        Some(i) => i,
        // Rounding left the last running sum just under 1.
        None => probs
            .iter()
            .rposition(|&p| p > 0.0)
            .expect("distribution has positive mass"),
    }
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    probs
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

/// Draws the destination of one edge leaving `u` using `k` draws from `v`.
fn draw_destination<R: Rng + ?Sized>(marg: &Marginals, k: u32, u: u64, rng: &mut R) -> u64 {
    let n = marg.n() as u64;
    let mut z = u;
    let mut v = 0u64;
    let mut place = 1u64;
    for level in 0..k {
        let l = (z % n) as usize;
        z /= n;
        let s = draw_index(marg.v_cumulative_row(l), marg.v_row(l), rng) as u64;
        v += s * place;
        if level + 1 < k {
            place *= n;
        }
    }
    v
}

/// Edge-centric SKG: each of `round(E)` edges descends `k` levels picking a
/// sub-region `(r, s)` with probability `p[r][s]`.
pub fn skg_generate<R: Rng + ?Sized>(spec: &GraphSpec, rng: &mut R) -> EdgeList {
    let n = spec.initiator.n() as u64;
    let probs = spec.initiator.entries();
    let cum = cumulative(probs);
    let m = spec.exact_edge_count();
    let mut edges = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let (mut u, mut v) = (0u64, 0u64);
        for _ in 0..spec.k {
            let cell = draw_index(&cum, probs, rng) as u64;
            u = n * u + cell / n;
            v = n * v + cell % n;
        }
        edges.push((u, v));
    }
    EdgeList::new(spec.vertex_count(), edges)
}

/// SKG split by Bayes' rule: the source is drawn digit by digit from `u`,
/// then the destination digit by digit from the matching rows of `v`.
pub fn skg_equiv_generate<R: Rng + ?Sized>(
    spec: &GraphSpec,
    rng: &mut R,
) -> Result<EdgeList, GenerateError> {
    let marg = spec.initiator.marginals()?;
    let n = marg.n() as u64;
    let u_cum = cumulative(marg.u());
    let m = spec.exact_edge_count();
    let mut edges = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let mut u = 0u64;
        for _ in 0..spec.k {
            u = n * u + draw_index(&u_cum, marg.u(), rng) as u64;
        }
        let v = draw_destination(&marg, spec.k, u, rng);
        edges.push((u, v));
    }
    Ok(EdgeList::new(spec.vertex_count(), edges))
}

/// Expected share of all edges that leave `u`: the product of `u[l]` over
/// the base-`n` digits `l` of the vertex id.
pub fn vertex_load(marg: &Marginals, k: u32, u: u64) -> f64 {
    let n = marg.n() as u64;
    let mut z = u;
    let mut p = 1.0;
    for _ in 0..k {
        p *= marg.u()[(z % n) as usize];
        z /= n;
    }
    p
}

/// One draw from Poisson(`mean`).
pub fn sample_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64, GenerateError> {
    if !mean.is_finite() || mean < 0.0 {
        return Err(GenerateError::BadPoissonMean(mean));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|_| GenerateError::BadPoissonMean(mean))?;
    Ok(dist.sample(rng) as u64)
}

/// PSKG for a single vertex: draws the out-degree from
/// Poisson(`expected_edges * vertex_load(u)`) and then each destination.
pub fn pskg_vertex_edges<R: Rng + ?Sized>(
    marg: &Marginals,
    k: u32,
    expected_edges: f64,
    u: u64,
    rng: &mut R,
) -> Result<Vec<u64>, GenerateError> {
    let degree = sample_poisson(expected_edges * vertex_load(marg, k, u), rng)?;
    Ok((0..degree)
        .map(|_| draw_destination(marg, k, u, rng))
        .collect())
}

/// Runs [`pskg_vertex_edges`] for `u` on its own stream and appends the
/// resulting edges. Vertices whose mean underflows to exactly zero are
/// skipped without touching a stream.
pub(crate) fn append_vertex_edges(
    marg: &Marginals,
    k: u32,
    expected_edges: f64,
    seed: u64,
    u: u64,
    out: &mut Vec<(u64, u64)>,
) -> Result<(), GenerateError> {
    let mean = expected_edges * vertex_load(marg, k, u);
    if mean == 0.0 {
        return Ok(());
    }
    let mut rng = derive_vertex_stream(seed, u);
    let degree = sample_poisson(mean, &mut rng)?;
    out.reserve(degree as usize);
    for _ in 0..degree {
        out.push((u, draw_destination(marg, k, u, &mut rng)));
    }
    Ok(())
}
