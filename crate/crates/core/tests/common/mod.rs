#![allow(dead_code)]

use pskg::{EdgeList, InitiatorMatrix};
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub const CORE_INLINE: &str = "0.4532,0.2622;0.2622,0.0225";
pub const CORE_K: u32 = 12;
pub const CORE_EDGES: f64 = 11400.0;
pub const STAR_K: u32 = 8;
pub const STAR_EDGES: f64 = 263546.0;

pub fn core_periphery() -> InitiatorMatrix {
    InitiatorMatrix::parse_inline(CORE_INLINE).unwrap()
}

/// Star graph on four nodes (center plus three satellites) with ones
/// replaced by alpha and zeros by beta.
pub fn star() -> InitiatorMatrix {
    let (a, b) = (0.0861, 0.0231);
    InitiatorMatrix::new(4, vec![a, a, a, a, a, a, b, b, a, b, a, b, a, b, b, a]).unwrap()
}

/// Initiator whose row sums are exactly `u` (outer product `u u^T`).
pub fn with_row_sums(u: &[f64]) -> InitiatorMatrix {
    let entries = u
        .iter()
        .flat_map(|&a| u.iter().map(move |&b| a * b))
        .collect();
    InitiatorMatrix::new(u.len(), entries).unwrap()
}

/// Edge counts per adjacency cell, row-major over `N x N`.
pub fn cell_counts(g: &EdgeList) -> Vec<u64> {
    let n = g.n_vertices as usize;
    let mut counts = vec![0u64; n * n];
    for &(u, v) in &g.edges {
        counts[u as usize * n + v as usize] += 1;
    }
    counts
}

/// Pearson goodness-of-fit p-value of `observed` against probabilities
/// `probs` (cells with zero probability must be empty and are dropped).
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0;
    for (&o, &p) in observed.iter().zip(probs) {
        if p == 0.0 {
            assert_eq!(o, 0, "observation in a zero-probability cell");
            continue;
        }
        let e = total as f64 * p;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    upper_tail(stat, cells - 1)
}

/// Two-sample chi-square homogeneity p-value for two count tables.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> f64 {
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let (ka, kb) = (
        (nb as f64 / na as f64).sqrt(),
        (na as f64 / nb as f64).sqrt(),
    );
    let mut stat = 0.0;
    let mut cells = 0;
    for (&x, &y) in a.iter().zip(b) {
        if x + y == 0 {
            continue;
        }
        stat += (ka * x as f64 - kb * y as f64).powi(2) / (x + y) as f64;
        cells += 1;
    }
    upper_tail(stat, cells - 1)
}

fn upper_tail(stat: f64, dof: usize) -> f64 {
    1.0 - ChiSquared::new(dof as f64).unwrap().cdf(stat)
}

/// Brute-force prefix sums of per-vertex loads.
pub fn prefix_sums(loads: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(loads.len() + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for &l in loads {
        acc += l;
        out.push(acc);
    }
    out
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}
