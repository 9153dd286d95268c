//! Initiator matrices, their source/destination marginals, and the generation
//! configuration built on top of them.
//!
//! Vertex ids are written in base `n` with the most significant digit
//! belonging to the outermost recursion level, so that a walk that picks
//! digit `r` at each level builds its id as `u = n * u + r`. Every module in
//! the crate shares this convention.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Raw initiator sums may deviate from one by at most this much before they
/// are rejected. Accepted inputs are renormalized.
pub const SUM_TOLERANCE: f64 = 1e-3;

/// Largest side length `N` the dense Kronecker-power oracle will build.
pub const DENSE_ORACLE_CAP: u64 = 4096;

/// Largest length the Kronecker-power vector oracle will build.
pub const VECTOR_ORACLE_CAP: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InitiatorError {
    #[error("malformed initiator: {0}")]
    Malformed(String),
    #[error("initiator side length must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("initiator entry ({row}, {col}) is {value}, entries must be finite and non-negative")]
    InvalidEntry { row: usize, col: usize, value: f64 },
    #[error("initiator entries sum to {0}, which is not within {SUM_TOLERANCE} of 1")]
    BadSum(f64),
    #[error("initiator row {0} sums to zero, so its destination distribution is undefined")]
    ZeroRow(usize),
    #[error("recursion depth must be at least 1")]
    ZeroDepth,
    #[error("{n}^{k} vertices does not fit in 64 bits")]
    VertexOverflow { n: usize, k: u32 },
    #[error("oracle size {size} exceeds cap {cap}")]
    OracleTooLarge { size: u64, cap: u64 },
    #[error("expected edge count must be finite and non-negative, got {0}")]
    BadEdgeCount(f64),
    #[error("worker count must be at least 1")]
    ZeroWorkers,
    #[error("unknown model {0:?} (expected skg, skg-equiv or pskg)")]
    UnknownModel(String),
}

/// An `n x n` probability matrix whose Kronecker powers define the edge
/// distribution. Entries are stored row-major and always sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct InitiatorMatrix {
    n: usize,
    p: Vec<f64>,
}

impl InitiatorMatrix {
    /// Validates and renormalizes a row-major `n x n` matrix.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self, InitiatorError> {
        if n < 2 {
            return Err(InitiatorError::TooSmall(n));
        }
        if entries.len() != n * n {
            return Err(InitiatorError::Malformed(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        for (idx, &value) in entries.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(InitiatorError::InvalidEntry {
                    row: idx / n,
                    col: idx % n,
                    value,
                });
            }
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(InitiatorError::BadSum(sum));
        }
        let p = entries.into_iter().map(|x| x / sum).collect();
        Ok(Self { n, p })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, InitiatorError> {
        let n = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(InitiatorError::Malformed(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        Self::new(n, rows.concat())
    }

    /// Parses the initiator text format: a line holding `n`, then `n` lines of
    /// `n` whitespace-separated reals. Lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, InitiatorError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| InitiatorError::Malformed("empty input".into()))?;
        let n: usize = header
            .parse()
            .map_err(|_| InitiatorError::Malformed(format!("bad side length {header:?}")))?;
        if n < 2 {
            return Err(InitiatorError::TooSmall(n));
        }
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let line = lines.next().ok_or_else(|| {
                InitiatorError::Malformed(format!("expected {n} rows, found {i}"))
            })?;
            rows.push(parse_reals(line.split_whitespace(), i)?);
        }
        if let Some(extra) = lines.next() {
            return Err(InitiatorError::Malformed(format!(
                "unexpected trailing line {extra:?}"
            )));
        }
        Self::from_rows(&rows)
    }

    /// Parses the compact inline form `"a,b;c,d"` (rows separated by `;`).
    pub fn parse_inline(text: &str) -> Result<Self, InitiatorError> {
        let rows = text
            .split(';')
            .enumerate()
            .map(|(i, row)| parse_reals(row.split(','), i))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(&rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.p[row * self.n + col]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.p
    }

    pub fn marginals(&self) -> Result<Marginals, InitiatorError> {
        derive_marginals(self)
    }

    /// Inline representation accepted by [`InitiatorMatrix::parse_inline`].
    pub fn to_inline(&self) -> String {
        self.p
            .chunks(self.n)
            .map(|row| {
                row.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

fn parse_reals<'a>(
    fields: impl Iterator<Item = &'a str>,
    row: usize,
) -> Result<Vec<f64>, InitiatorError> {
    fields
        .map(|f| {
            let f = f.trim();
            f.parse::<f64>()
                .map_err(|_| InitiatorError::Malformed(format!("row {row}: bad number {f:?}")))
        })
        .collect()
}

/// Source marginal `u` (row sums of the initiator) and destination
/// conditional `v` (rows of the initiator divided by their sums).
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    n: usize,
    u: Vec<f64>,
    v: Vec<f64>,
    v_cumulative: Vec<f64>,
}

impl Marginals {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self, row: usize, col: usize) -> f64 {
        self.v[row * self.n + col]
    }

    pub fn v_row(&self, row: usize) -> &[f64] {
        &self.v[row * self.n..(row + 1) * self.n]
    }

    /// Running sums of `v_row(row)`, used for inverse-CDF digit draws.
    pub(crate) fn v_cumulative_row(&self, row: usize) -> &[f64] {
        &self.v_cumulative[row * self.n..(row + 1) * self.n]
    }

    /// Largest entry of `u`; its `k`-th power is the heaviest vertex load.
    pub fn max_u(&self) -> f64 {
        self.u.iter().copied().fold(0.0, f64::max)
    }
}

/// Splits `P` into `u[i] = sum_j p[i][j]` and `v[i][j] = p[i][j] / u[i]`.
pub fn derive_marginals(p: &InitiatorMatrix) -> Result<Marginals, InitiatorError> {
    let n = p.n;
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n * n);
    let mut v_cumulative = Vec::with_capacity(n * n);
    for (i, row) in p.p.chunks(n).enumerate() {
        let sum: f64 = row.iter().sum();
        if sum <= 0.0 {
            return Err(InitiatorError::ZeroRow(i));
        }
        u.push(sum);
        let mut acc = 0.0;
        for &x in row {
            let q = x / sum;
            v.push(q);
            acc += q;
            v_cumulative.push(acc);
        }
    }
    Ok(Marginals {
        n,
        u,
        v,
        v_cumulative,
    })
}

/// `n^k`, or an error if it overflows `u64`.
pub fn vertex_count(n: usize, k: u32) -> Result<u64, InitiatorError> {
    if k == 0 {
        return Err(InitiatorError::ZeroDepth);
    }
    (n as u64)
        .checked_pow(k)
        .ok_or(InitiatorError::VertexOverflow { n, k })
}

/// Dense `N x N` Kronecker power `P ⊗ ... ⊗ P` (row-major). Test oracle only.
pub fn kron_power_dense(p: &InitiatorMatrix, k: u32) -> Result<Vec<f64>, InitiatorError> {
    let size = vertex_count(p.n, k).map_err(|e| match e {
        InitiatorError::VertexOverflow { .. } => InitiatorError::OracleTooLarge {
            size: u64::MAX,
            cap: DENSE_ORACLE_CAP,
        },
        e => e,
    })?;
    if size > DENSE_ORACLE_CAP {
        return Err(InitiatorError::OracleTooLarge {
            size,
            cap: DENSE_ORACLE_CAP,
        });
    }
    let n = p.n;
    let mut current = p.p.clone();
    let mut side = n;
    for _ in 1..k {
        let next_side = side * n;
        let mut next = vec![0.0; next_side * next_side];
        for r in 0..side {
            for c in 0..side {
                let outer = current[r * side + c];
                for i in 0..n {
                    for j in 0..n {
                        next[(r * n + i) * next_side + c * n + j] = outer * p.get(i, j);
                    }
                }
            }
        }
        current = next;
        side = next_side;
    }
    Ok(current)
}

/// Kronecker power `u^[k]` of a probability vector. Test oracle only.
pub fn kron_power_vector(u: &[f64], k: u32) -> Result<Vec<f64>, InitiatorError> {
    let n = u.len();
    if n < 2 {
        return Err(InitiatorError::TooSmall(n));
    }
    let size = vertex_count(n, k)?;
    if size > VECTOR_ORACLE_CAP {
        return Err(InitiatorError::OracleTooLarge {
            size,
            cap: VECTOR_ORACLE_CAP,
        });
    }
    let mut current = u.to_vec();
    for _ in 1..k {
        current = current
            .iter()
            .flat_map(|&outer| u.iter().map(move |&x| outer * x))
            .collect();
    }
    Ok(current)
}

/// Which generation algorithm to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// Edge-centric: each edge picks one of the `n^2` sub-regions per level.
    Skg,
    /// Edge-centric with the source drawn first from `u`, then the
    /// destination from `v`.
    SkgEquiv,
    /// Per-vertex Poisson out-degrees followed by destination draws from `v`.
    Pskg,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Skg => "skg",
            Model::SkgEquiv => "skg-equiv",
            Model::Pskg => "pskg",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = InitiatorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "skg" => Ok(Model::Skg),
            "skg-equiv" => Ok(Model::SkgEquiv),
            "pskg" => Ok(Model::Pskg),
            other => Err(InitiatorError::UnknownModel(other.to_string())),
        }
    }
}

/// Full generation configuration.
///
/// `expected_edges` is the exact edge count (rounded) for the edge-centric
/// models and the Poisson mean of the total for [`Model::Pskg`].
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpec {
    pub initiator: InitiatorMatrix,
    pub k: u32,
    pub expected_edges: f64,
    pub seed: u64,
    pub model: Model,
    pub workers: usize,
}

impl GraphSpec {
    pub fn new(
        initiator: InitiatorMatrix,
        k: u32,
        expected_edges: f64,
        seed: u64,
        model: Model,
        workers: usize,
    ) -> Result<Self, InitiatorError> {
        let spec = Self {
            initiator,
            k,
            expected_edges,
            seed,
            model,
            workers,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), InitiatorError> {
        vertex_count(self.initiator.n(), self.k)?;
        if !self.expected_edges.is_finite() || self.expected_edges < 0.0 {
            return Err(InitiatorError::BadEdgeCount(self.expected_edges));
        }
        if self.workers == 0 {
            return Err(InitiatorError::ZeroWorkers);
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> u64 {
        vertex_count(self.initiator.n(), self.k).expect("validated at construction")
    }

    /// Edge count used by the edge-centric models.
    pub fn exact_edge_count(&self) -> u64 {
        self.expected_edges.round() as u64
    }
}
