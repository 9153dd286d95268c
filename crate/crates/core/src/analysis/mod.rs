//! Graph patterns used to compare generated graphs: binned degree
//! distribution, hop plot, scree plot and network values, plus distances
//! between pattern sets.

mod compare;
mod degree;
mod hop;
mod spectral;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::generator::EdgeList;

pub use compare::{
    calibrate_threshold, compare_patterns, series_distance, PatternDistance, PatternDistanceReport,
    Thresholds,
};
pub use degree::{degree_distribution, Direction};
pub use hop::{hop_plot, hop_plot_sampled, EXACT_HOP_CAP};
pub use spectral::{
    lanczos_largest, network_values, scree_plot, LanczosOptions, LanczosResult, NetworkValues,
    SparseMatrix, SCREE_CAP,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("bin ratio must be greater than 1, got {0}")]
    BinRatio(f64),
    #[error(
        "graph has {n} vertices, above the exact hop-plot cap of {cap}; sample sources instead"
    )]
    TooLargeForExactHops { n: u64, cap: u64 },
    #[error("graph has {0} vertices, too many to hold in memory")]
    TooLarge(u64),
    #[error("requested top {requested} values but at most {limit} are available")]
    TopM { requested: usize, limit: usize },
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("cannot compare a {a} series with a {b} series")]
    KindMismatch { a: PatternKind, b: PatternKind },
    #[error("pattern {0} is missing from one side of the comparison")]
    MissingPattern(PatternKind),
    #[error("{kind} series has no overlapping x range to compare")]
    NoOverlap { kind: PatternKind },
    #[error("invalid {kind} series: {reason}")]
    InvalidSeries { kind: PatternKind, reason: String },
    #[error("edge ({0}, {1}) is outside the vertex range")]
    EdgeOutOfRange(u64, u64),
    #[error("unknown pattern {0:?} (expected one of degree, hop, scree, netvalue)")]
    UnknownPattern(String),
    #[error("unknown degree direction {0:?} (expected in, out or total)")]
    UnknownDirection(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternKind {
    Degree,
    Hop,
    Scree,
    NetValue,
}

impl PatternKind {
    pub const ALL: [PatternKind; 4] = [
        PatternKind::Degree,
        PatternKind::Hop,
        PatternKind::Scree,
        PatternKind::NetValue,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternKind::Degree => "degree",
            PatternKind::Hop => "hop",
            PatternKind::Scree => "scree",
            PatternKind::NetValue => "netvalue",
        }
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for PatternKind {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PatternKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| AnalysisError::UnknownPattern(s.to_string()))
    }
}

/// An ordered `(x, y)` series for one pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternSeries {
    pub kind: PatternKind,
    pub points: Vec<(f64, f64)>,
}

impl PatternSeries {
    /// Builds a series, checking that `x` strictly increases, values are
    /// non-negative, and spectral series do not increase in `y`.
    pub fn new(kind: PatternKind, points: Vec<(f64, f64)>) -> Result<Self, AnalysisError> {
        let invalid = |reason: String| AnalysisError::InvalidSeries { kind, reason };
        for (i, &(x, y)) in points.iter().enumerate() {
            if !(x >= 0.0 && y >= 0.0 && x.is_finite() && y.is_finite()) {
                return Err(invalid(format!(
                    "point {i} ({x}, {y}) is not finite and non-negative"
                )));
            }
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(invalid(format!("x does not increase at point {}", i + 1)));
            }
            if matches!(kind, PatternKind::Scree | PatternKind::NetValue) && w[1].1 > w[0].1 {
                return Err(invalid(format!("y increases at point {}", i + 1)));
            }
        }
        Ok(Self { kind, points })
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }
}

/// Knobs for [`analyze`].
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub patterns: Vec<PatternKind>,
    pub direction: Direction,
    pub bin_ratio: f64,
    pub max_hops: usize,
    /// Number of BFS sources to sample for the hop plot; `None` is exact.
    pub hop_sources: Option<usize>,
    pub hop_seed: u64,
    pub scree_top_m: usize,
    pub netvalue_top_m: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            patterns: PatternKind::ALL.to_vec(),
            direction: Direction::Out,
            bin_ratio: 2.0,
            max_hops: 10,
            hop_sources: None,
            hop_seed: 0,
            scree_top_m: 20,
            netvalue_top_m: 100,
        }
    }
}

/// Computes every requested pattern. `top_m` values are capped at what the
/// graph can provide.
pub fn analyze(g: &EdgeList, config: &AnalysisConfig) -> Result<Vec<PatternSeries>, AnalysisError> {
    let n = usize::try_from(g.n_vertices).unwrap_or(usize::MAX);
    config
        .patterns
        .iter()
        .map(|kind| match kind {
            PatternKind::Degree => degree_distribution(g, config.direction, config.bin_ratio),
            PatternKind::Hop => match config.hop_sources {
                Some(s) => hop_plot_sampled(g, config.max_hops, s, config.hop_seed),
                None => hop_plot(g, config.max_hops),
            },
            PatternKind::Scree => scree_plot(g, config.scree_top_m.min(n).min(SCREE_CAP)),
            PatternKind::NetValue => {
                network_values(g, config.netvalue_top_m.min(n)).map(|nv| nv.series)
            }
        })
        .collect()
}

fn vertex_total(g: &EdgeList) -> Result<usize, AnalysisError> {
    if g.n_vertices > u32::MAX as u64 {
        return Err(AnalysisError::TooLarge(g.n_vertices));
    }
    let n = g.n_vertices as usize;
    if let Some((_, (a, b))) = g.first_out_of_range() {
        return Err(AnalysisError::EdgeOutOfRange(a, b));
    }
    Ok(n)
}
