use std::collections::BTreeMap;
use std::fmt;

use super::{AnalysisError, PatternKind, PatternSeries};

/// Largest relative L1 distance per pattern that still counts as "the same".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub degree: f64,
    pub hop: f64,
    pub scree: f64,
    pub netvalue: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            degree: 0.15,
            hop: 0.10,
            scree: 0.10,
            netvalue: 0.15,
        }
    }
}

impl Thresholds {
    pub fn get(&self, kind: PatternKind) -> f64 {
        match kind {
            PatternKind::Degree => self.degree,
            PatternKind::Hop => self.hop,
            PatternKind::Scree => self.scree,
            PatternKind::NetValue => self.netvalue,
        }
    }

    pub fn set(&mut self, kind: PatternKind, value: f64) {
        match kind {
            PatternKind::Degree => self.degree = value,
            PatternKind::Hop => self.hop = value,
            PatternKind::Scree => self.scree = value,
            PatternKind::NetValue => self.netvalue = value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternDistance {
    pub kind: PatternKind,
    pub distance: f64,
    pub threshold: f64,
}

impl PatternDistance {
    pub fn pass(&self) -> bool {
        self.distance <= self.threshold
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternDistanceReport {
    pub entries: Vec<PatternDistance>,
}

impl PatternDistanceReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(PatternDistance::pass)
    }

    pub fn distance(&self, kind: PatternKind) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.kind == kind)
            .map(|e| e.distance)
    }
}

impl fmt::Display for PatternDistanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "{:<9} distance={:.6} threshold={:.6} {}",
                e.kind,
                e.distance,
                e.threshold,
                if e.pass() { "PASS" } else { "FAIL" }
            )?;
        }
        write!(f, "overall {}", if self.pass() { "PASS" } else { "FAIL" })
    }
}

/// `sum |a - b| / mean(sum |a|, sum |b|)`, zero when both are all zero.
fn relative_l1(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
    let scale =
        0.5 * (a.iter().map(|x| x.abs()).sum::<f64>() + b.iter().map(|y| y.abs()).sum::<f64>());
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

fn interpolate(points: &[(f64, f64)], x: f64, log_x: bool) -> f64 {
    let i = points.partition_point(|p| p.0 < x);
    if i < points.len() && points[i].0 == x {
        return points[i].1;
    }
    let (x0, y0) = points[i - 1];
    let (x1, y1) = points[i];
    let t = if log_x {
        (x.ln() - x0.ln()) / (x1.ln() - x0.ln())
    } else {
        (x - x0) / (x1 - x0)
    };
    y0 + t * (y1 - y0)
}

/// Relative L1 distance between two series of the same kind.
///
/// Series on the same x grid are compared point by point. Otherwise degree
/// histograms are aligned on the union of their bins (a bin missing on one
/// side holds zero vertices), and the other kinds are interpolated onto the
/// union of x values inside the shared x range, in log-x for network values.
pub fn series_distance(a: &PatternSeries, b: &PatternSeries) -> Result<f64, AnalysisError> {
    if a.kind != b.kind {
        return Err(AnalysisError::KindMismatch {
            a: a.kind,
            b: b.kind,
        });
    }
    if a.points.len() == b.points.len() && a.xs().zip(b.xs()).all(|(x, y)| x == y) {
        let ya: Vec<f64> = a.ys().collect();
        let yb: Vec<f64> = b.ys().collect();
        return Ok(relative_l1(&ya, &yb));
    }
    if a.kind == PatternKind::Degree {
        let mut bins: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
        for &(x, y) in &a.points {
            bins.entry(x.to_bits()).or_default().0 = y;
        }
        for &(x, y) in &b.points {
            bins.entry(x.to_bits()).or_default().1 = y;
        }
        let (ya, yb): (Vec<f64>, Vec<f64>) = bins.into_values().unzip();
        return Ok(relative_l1(&ya, &yb));
    }
    if a.points.is_empty() || b.points.is_empty() {
        return Err(AnalysisError::NoOverlap { kind: a.kind });
    }
    let lo = a.points[0].0.max(b.points[0].0);
    let hi = a.points.last().unwrap().0.min(b.points.last().unwrap().0);
    if lo > hi {
        return Err(AnalysisError::NoOverlap { kind: a.kind });
    }
    let mut grid: Vec<f64> = a
        .xs()
        .chain(b.xs())
        .filter(|&x| x >= lo && x <= hi)
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let log_x = a.kind == PatternKind::NetValue && lo > 0.0;
    let ya: Vec<f64> = grid
        .iter()
        .map(|&x| interpolate(&a.points, x, log_x))
        .collect();
    let yb: Vec<f64> = grid
        .iter()
        .map(|&x| interpolate(&b.points, x, log_x))
        .collect();
    Ok(relative_l1(&ya, &yb))
}

/// Distances for every pattern present in `a`; `b` must hold exactly the same
/// pattern kinds.
pub fn compare_patterns(
    a: &[PatternSeries],
    b: &[PatternSeries],
    thresholds: &Thresholds,
) -> Result<PatternDistanceReport, AnalysisError> {
    for s in b {
        if !a.iter().any(|t| t.kind == s.kind) {
            return Err(match a {
                [only] => AnalysisError::KindMismatch {
                    a: only.kind,
                    b: s.kind,
                },
                _ => AnalysisError::MissingPattern(s.kind),
            });
        }
    }
    let mut entries = Vec::with_capacity(a.len());
    for s in a {
        let other = match b.iter().find(|t| t.kind == s.kind) {
            Some(t) => t,
            None => {
                return Err(match b {
                    [only] => AnalysisError::KindMismatch {
                        a: s.kind,
                        b: only.kind,
                    },
                    _ => AnalysisError::MissingPattern(s.kind),
                })
            }
        };
        entries.push(PatternDistance {
            kind: s.kind,
            distance: series_distance(s, other)?,
            threshold: thresholds.get(s.kind),
        });
    }
    Ok(PatternDistanceReport { entries })
}

/// Mean plus three sample standard deviations of null distances.
pub fn calibrate_threshold(null_distances: &[f64]) -> f64 {
    let n = null_distances.len() as f64;
    if null_distances.is_empty() {
        return 0.0;
    }
    let mean = null_distances.iter().sum::<f64>() / n;
    let var = if null_distances.len() > 1 {
        null_distances
            .iter()
            .map(|d| (d - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0)
    } else {
        0.0
    };
    mean + 3.0 * var.sqrt()
}
