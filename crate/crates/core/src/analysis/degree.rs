use std::fmt;
use std::str::FromStr;

use super::{vertex_total, AnalysisError, PatternKind, PatternSeries};
use crate::generator::EdgeList;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    In,
    #[default]
    Out,
    Total,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::In => "in",
            Direction::Out => "out",
            Direction::Total => "total",
        })
    }
}

impl FromStr for Direction {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "in" => Ok(Direction::In),
            "out" => Ok(Direction::Out),
            "total" => Ok(Direction::Total),
            other => Err(AnalysisError::UnknownDirection(other.to_string())),
        }
    }
}

/// Histogram of vertex degrees with exponential bins.
///
/// Degree zero gets its own bin at `x = 0`. Positive degrees fall into
/// `[b_i, b_{i+1})` with boundaries `ceil(bin_ratio^i)` (duplicates dropped)
/// and are reported at the geometric mean `sqrt(b_i * b_{i+1})`. Only
/// non-empty bins appear; counts always add up to the vertex count.
pub fn degree_distribution(
    g: &EdgeList,
    direction: Direction,
    bin_ratio: f64,
) -> Result<PatternSeries, AnalysisError> {
    if !(bin_ratio > 1.0 && bin_ratio.is_finite()) {
        return Err(AnalysisError::BinRatio(bin_ratio));
    }
    let n = vertex_total(g)?;
    let mut degree = vec![0u64; n];
    for &(a, b) in &g.edges {
        if direction != Direction::In {
            degree[a as usize] += 1;
        }
        if direction != Direction::Out {
            degree[b as usize] += 1;
        }
    }
    let max_degree = degree.iter().copied().max().unwrap_or(0);

    let mut bounds: Vec<u64> = vec![1];
    let mut i = 1;
    while *bounds.last().unwrap() <= max_degree {
        let b = bin_ratio.powi(i).ceil() as u64;
        if b > *bounds.last().unwrap() {
            bounds.push(b);
        }
        i += 1;
    }

    let mut zero = 0u64;
    let mut counts = vec![0u64; bounds.len() - 1];
    for d in degree {
        if d == 0 {
            zero += 1;
        } else {
            counts[bounds.partition_point(|&b| b <= d) - 1] += 1;
        }
    }

    let mut points = Vec::new();
    if zero > 0 {
        points.push((0.0, zero as f64));
    }
    for (bin, &count) in counts.iter().enumerate() {
        if count > 0 {
            let x = ((bounds[bin] as f64) * (bounds[bin + 1] as f64)).sqrt();
            points.push((x, count as f64));
        }
    }
    PatternSeries::new(PatternKind::Degree, points)
}
