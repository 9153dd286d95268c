//! Text and binary formats for edge lists, partition tables and pattern
//! series.
//!
//! Edge lists:
//! - `tsv`: `#`-prefixed header lines, then `u<TAB>v<LF>` per edge. The header
//!   written here always carries `# vertices: N`; readers use it for range
//!   checks when present and otherwise take `N` as one past the largest id.
//! - `binary`: magic `PSKG`, a version byte, little-endian `u64` vertex count
//!   and edge count, then little-endian `u64` pairs.

use std::fmt::Write as _;
use std::ops::Range;

use thiserror::Error;

use crate::analysis::{PatternKind, PatternSeries};
use crate::generator::EdgeList;
use crate::initiator::{GraphSpec, Model};
use crate::partition::PartitionTable;

pub const BINARY_MAGIC: &[u8; 4] = b"PSKG";
pub const BINARY_VERSION: u8 = 1;
const BINARY_HEADER_LEN: usize = 4 + 1 + 8 + 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("bad magic bytes, not a binary edge list")]
    BadMagic,
    #[error("unsupported binary edge list version {0}")]
    Version(u8),
    #[error("truncated input: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("{0} trailing bytes after the last edge")]
    TrailingBytes(usize),
    #[error("edge {index} ({src}, {dst}) has a vertex id not below {n_vertices}")]
    VertexOutOfRange {
        index: usize,
        src: u64,
        dst: u64,
        n_vertices: u64,
    },
    #[error("input is not valid UTF-8")]
    Utf8,
    #[error("invalid series: {0}")]
    Series(String),
    #[error("unknown edge list format {0:?} (expected tsv or binary)")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeFormat {
    #[default]
    Tsv,
    Binary,
}

impl std::str::FromStr for EdgeFormat {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(EdgeFormat::Tsv),
            "binary" | "bin" => Ok(EdgeFormat::Binary),
            other => Err(FormatError::UnknownFormat(other.to_string())),
        }
    }
}

impl EdgeFormat {
    /// Binary if the bytes start with the magic, text otherwise.
    pub fn sniff(bytes: &[u8]) -> Self {
        if bytes.starts_with(BINARY_MAGIC) {
            EdgeFormat::Binary
        } else {
            EdgeFormat::Tsv
        }
    }
}

/// Generation parameters recorded in text headers.
#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint {
    pub model: Model,
    pub n: usize,
    pub k: u32,
    pub expected_edges: f64,
    pub seed: u64,
    pub initiator: String,
}

impl From<&GraphSpec> for Fingerprint {
    fn from(spec: &GraphSpec) -> Self {
        Self {
            model: spec.model,
            n: spec.initiator.n(),
            k: spec.k,
            expected_edges: spec.expected_edges,
            seed: spec.seed,
            initiator: spec.initiator.to_inline(),
        }
    }
}

pub fn write_edge_list(
    g: &EdgeList,
    format: EdgeFormat,
    fingerprint: Option<&Fingerprint>,
) -> Vec<u8> {
    match format {
        EdgeFormat::Tsv => {
            let mut out = String::with_capacity(16 * g.len() + 128);
            out.push_str("# pskg edge list\n");
            if let Some(f) = fingerprint {
                let _ = writeln!(
                    out,
                    "# model={} n={} k={} expected_edges={} seed={} initiator={}",
                    f.model, f.n, f.k, f.expected_edges, f.seed, f.initiator
                );
            }
            let _ = writeln!(out, "# vertices: {}", g.n_vertices);
            let _ = writeln!(out, "# edges: {}", g.len());
            for &(u, v) in &g.edges {
                let _ = writeln!(out, "{u}\t{v}");
            }
            out.into_bytes()
        }
        EdgeFormat::Binary => {
            let mut out = Vec::with_capacity(BINARY_HEADER_LEN + 16 * g.len());
            out.extend_from_slice(BINARY_MAGIC);
            out.push(BINARY_VERSION);
            out.extend_from_slice(&g.n_vertices.to_le_bytes());
            out.extend_from_slice(&(g.len() as u64).to_le_bytes());
            for &(u, v) in &g.edges {
                out.extend_from_slice(&u.to_le_bytes());
                out.extend_from_slice(&v.to_le_bytes());
            }
            out
        }
    }
}

pub fn read_edge_list(bytes: &[u8], format: EdgeFormat) -> Result<EdgeList, FormatError> {
    let g = match format {
        EdgeFormat::Tsv => read_tsv(bytes)?,
        EdgeFormat::Binary => read_binary(bytes)?,
    };
    if let Some((index, (src, dst))) = g.first_out_of_range() {
        return Err(FormatError::VertexOutOfRange {
            index,
            src,
            dst,
            n_vertices: g.n_vertices,
        });
    }
    Ok(g)
}

fn read_tsv(bytes: &[u8]) -> Result<EdgeList, FormatError> {
    let text = std::str::from_utf8(bytes).map_err(|_| FormatError::Utf8)?;
    let mut declared = None;
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let parse_err = |reason: String| FormatError::Parse {
            line: line_no,
            reason,
        };
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(n) = comment.trim().strip_prefix("vertices:") {
                declared = Some(
                    n.trim()
                        .parse::<u64>()
                        .map_err(|_| parse_err(format!("bad vertex count {:?}", n.trim())))?,
                );
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let mut id = |name: &str| -> Result<u64, FormatError> {
            let field = fields
                .next()
                .ok_or_else(|| parse_err(format!("missing {name} vertex")))?;
            field
                .trim()
                .parse::<u64>()
                .map_err(|_| parse_err(format!("non-numeric {name} vertex {field:?}")))
        };
        let u = id("source")?;
        let v = id("destination")?;
        if fields.next().is_some() {
            return Err(parse_err("expected exactly two fields".into()));
        }
        edges.push((u, v));
    }
    let n_vertices =
        declared.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
    Ok(EdgeList::new(n_vertices, edges))
}

fn read_u64(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8-byte slice"))
}

fn read_binary(bytes: &[u8]) -> Result<EdgeList, FormatError> {
    if bytes.len() < BINARY_HEADER_LEN {
        if !BINARY_MAGIC.starts_with(&bytes[..bytes.len().min(4)]) {
            return Err(FormatError::BadMagic);
        }
        return Err(FormatError::Truncated {
            expected: BINARY_HEADER_LEN,
            found: bytes.len(),
        });
    }
    if &bytes[..4] != BINARY_MAGIC {
        return Err(FormatError::BadMagic);
    }
    if bytes[4] != BINARY_VERSION {
        return Err(FormatError::Version(bytes[4]));
    }
    let n_vertices = read_u64(bytes, 5);
    let count = read_u64(bytes, 13);
    let body = bytes.len() - BINARY_HEADER_LEN;
    let expected = count
        .checked_mul(16)
        .and_then(|b| usize::try_from(b).ok())
        .unwrap_or(usize::MAX);
    if body < expected {
        return Err(FormatError::Truncated {
            expected: BINARY_HEADER_LEN.saturating_add(expected),
            found: bytes.len(),
        });
    }
    if body > expected {
        return Err(FormatError::TrailingBytes(body - expected));
    }
    let edges = bytes[BINARY_HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| (read_u64(c, 0), read_u64(c, 8)))
        .collect();
    Ok(EdgeList::new(n_vertices, edges))
}

/// `x,y` header, then one point per line.
pub fn write_series_csv(s: &PatternSeries) -> Vec<u8> {
    let mut out = String::from("x,y\n");
    for &(x, y) in &s.points {
        let _ = writeln!(out, "{x},{y}");
    }
    out.into_bytes()
}

pub fn read_series_csv(bytes: &[u8], kind: PatternKind) -> Result<PatternSeries, FormatError> {
    let text = std::str::from_utf8(bytes).map_err(|_| FormatError::Utf8)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "x,y" => {}
        _ => {
            return Err(FormatError::Parse {
                line: 1,
                reason: "expected header \"x,y\"".into(),
            })
        }
    }
    let mut points = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |reason: String| FormatError::Parse {
            line: i + 1,
            reason,
        };
        let (x, y) = line
            .split_once(',')
            .ok_or_else(|| parse_err("expected two comma-separated fields".into()))?;
        let num = |f: &str| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| parse_err(format!("non-numeric field {f:?}")))
        };
        points.push((num(x)?, num(y)?));
    }
    PatternSeries::new(kind, points).map_err(|e| FormatError::Series(e.to_string()))
}

/// `worker_id<TAB>u_low<TAB>u_up<TAB>expected_mass` per worker.
pub fn write_partition_table(t: &PartitionTable) -> Vec<u8> {
    let mut out = String::new();
    for (w, (r, m)) in t.ranges.iter().zip(&t.expected_mass).enumerate() {
        let _ = writeln!(out, "{w}\t{}\t{}\t{m}", r.start, r.end);
    }
    out.into_bytes()
}

pub fn read_partition_table(bytes: &[u8]) -> Result<PartitionTable, FormatError> {
    let text = std::str::from_utf8(bytes).map_err(|_| FormatError::Utf8)?;
    let mut ranges: Vec<Range<u64>> = Vec::new();
    let mut expected_mass = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |reason: String| FormatError::Parse {
            line: i + 1,
            reason,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(parse_err(format!(
                "expected 4 fields, found {}",
                fields.len()
            )));
        }
        let int = |f: &str| {
            f.parse::<u64>()
                .map_err(|_| parse_err(format!("non-numeric field {f:?}")))
        };
        if int(fields[0])? != ranges.len() as u64 {
            return Err(parse_err(format!(
                "worker id {} out of sequence",
                fields[0]
            )));
        }
        ranges.push(int(fields[1])?..int(fields[2])?);
        expected_mass.push(
            fields[3]
                .parse::<f64>()
                .map_err(|_| parse_err(format!("non-numeric mass {:?}", fields[3])))?,
        );
    }
    Ok(PartitionTable {
        n_workers: ranges.len(),
        ranges,
        expected_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_tsv() {
        let g = EdgeList::new(2, vec![(0, 1)]);
        let text = String::from_utf8(write_edge_list(&g, EdgeFormat::Tsv, None)).unwrap();
        assert!(text.starts_with('#'));
        assert!(text.ends_with("\n0\t1\n"));
        assert_eq!(read_edge_list(text.as_bytes(), EdgeFormat::Tsv).unwrap(), g);
    }

    #[test]
    fn empty_list_is_header_only() {
        let g = EdgeList::empty(8);
        let bytes = write_edge_list(&g, EdgeFormat::Tsv, None);
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.lines().all(|l| l.starts_with('#')));
        assert_eq!(read_edge_list(&bytes, EdgeFormat::Tsv).unwrap(), g);
        let bin = write_edge_list(&g, EdgeFormat::Binary, None);
        assert_eq!(bin.len(), BINARY_HEADER_LEN);
        assert_eq!(read_edge_list(&bin, EdgeFormat::Binary).unwrap(), g);
    }

    #[test]
    fn binary_layout() {
        let g = EdgeList::new(4, vec![(3, 1)]);
        let bin = write_edge_list(&g, EdgeFormat::Binary, None);
        let mut want = b"PSKG\x01".to_vec();
        want.extend_from_slice(&4u64.to_le_bytes());
        want.extend_from_slice(&1u64.to_le_bytes());
        want.extend_from_slice(&3u64.to_le_bytes());
        want.extend_from_slice(&1u64.to_le_bytes());
        assert_eq!(bin, want);
        assert_eq!(EdgeFormat::sniff(&bin), EdgeFormat::Binary);
    }

    #[test]
    fn truncated_binary_is_rejected() {
        let g = EdgeList::new(4, vec![(3, 1), (2, 2)]);
        let bin = write_edge_list(&g, EdgeFormat::Binary, None);
        for cut in [bin.len() - 1, bin.len() - 16, 10, 3] {
            assert!(
                matches!(
                    read_edge_list(&bin[..cut], EdgeFormat::Binary),
                    Err(FormatError::Truncated { .. })
                ),
                "cut {cut}"
            );
        }
        let mut extra = bin.clone();
        extra.push(0);
        assert_eq!(
            read_edge_list(&extra, EdgeFormat::Binary),
            Err(FormatError::TrailingBytes(1))
        );
        let mut bad = bin;
        bad[0] = b'X';
        assert_eq!(
            read_edge_list(&bad, EdgeFormat::Binary),
            Err(FormatError::BadMagic)
        );
    }

    #[test]
    fn malformed_tsv_names_the_line() {
        let err = read_edge_list(b"# x\n0\t1\na\tb\n", EdgeFormat::Tsv).unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 3, .. }), "{err}");
        assert!(err.to_string().starts_with("line 3"));
        assert!(read_edge_list(b"0\t1\t2\n", EdgeFormat::Tsv).is_err());
        assert!(read_edge_list(b"0\n", EdgeFormat::Tsv).is_err());
    }

    #[test]
    fn out_of_range_vertex() {
        let text = b"# vertices: 2\n0\t2\n";
        assert!(matches!(
            read_edge_list(text, EdgeFormat::Tsv),
            Err(FormatError::VertexOutOfRange { index: 0, .. })
        ));
        let g = EdgeList::new(2, vec![(0, 5)]);
        let bin = write_edge_list(&g, EdgeFormat::Binary, None);
        assert!(read_edge_list(&bin, EdgeFormat::Binary).is_err());
    }

    #[test]
    fn fingerprint_header() {
        let p = crate::initiator::InitiatorMatrix::new(2, vec![0.25; 4]).unwrap();
        let spec = GraphSpec::new(p, 3, 10.0, 99, Model::Pskg, 1).unwrap();
        let text = String::from_utf8(write_edge_list(
            &EdgeList::empty(8),
            EdgeFormat::Tsv,
            Some(&Fingerprint::from(&spec)),
        ))
        .unwrap();
        assert!(text.contains("model=pskg n=2 k=3 expected_edges=10 seed=99"));
    }

    #[test]
    fn series_csv() {
        let empty = PatternSeries::new(PatternKind::Hop, vec![]).unwrap();
        assert_eq!(write_series_csv(&empty), b"x,y\n");
        let s =
            PatternSeries::new(PatternKind::Degree, vec![(0.0, 3.0), (2f64.sqrt(), 1.0)]).unwrap();
        let bytes = write_series_csv(&s);
        assert_eq!(read_series_csv(&bytes, PatternKind::Degree).unwrap(), s);
        assert!(read_series_csv(b"a,b\n", PatternKind::Degree).is_err());
    }

    #[test]
    fn skewed_halves_partition_table() {
        let t = PartitionTable {
            n_workers: 4,
            ranges: vec![0..1, 1..3, 3..5, 5..8],
            expected_mass: vec![0.166375, 0.27225, 0.2475, 0.313875],
        };
        let bytes = write_partition_table(&t);
        let text = String::from_utf8(bytes.clone()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "0\t0\t1\t0.166375");
        assert_eq!(lines[3], "3\t5\t8\t0.313875");
        assert_eq!(read_partition_table(&bytes).unwrap(), t);
    }
}
