use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{vertex_total, AnalysisError, PatternKind, PatternSeries, SparseMatrix};
use crate::generator::EdgeList;

/// Largest vertex count for the exact all-sources hop plot.
pub const EXACT_HOP_CAP: u64 = 1_000_000;

/// `r(h)` for `h = 0..=max_h`: ordered pairs `(a, b)` with directed distance
/// at most `h`, self-pairs included, from a BFS out of every vertex.
pub fn hop_plot(g: &EdgeList, max_h: usize) -> Result<PatternSeries, AnalysisError> {
    if g.n_vertices > EXACT_HOP_CAP {
        return Err(AnalysisError::TooLargeForExactHops {
            n: g.n_vertices,
            cap: EXACT_HOP_CAP,
        });
    }
    let n = vertex_total(g)?;
    let sources: Vec<usize> = (0..n).collect();
    reachable_pairs(g, n, &sources, max_h, 1.0)
}

/// Estimates `r(h)` from BFS out of `n_sources` vertices drawn without
/// replacement (deterministically from `seed`), scaled by `N / n_sources`.
/// Falls back to the exact plot when `n_sources >= N`.
pub fn hop_plot_sampled(
    g: &EdgeList,
    max_h: usize,
    n_sources: usize,
    seed: u64,
) -> Result<PatternSeries, AnalysisError> {
    let n = vertex_total(g)?;
    if n_sources >= n {
        return hop_plot(g, max_h);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sources = index::sample(&mut rng, n, n_sources).into_vec();
    sources.sort_unstable();
    reachable_pairs(g, n, &sources, max_h, n as f64 / n_sources.max(1) as f64)
}

fn reachable_pairs(
    g: &EdgeList,
    n: usize,
    sources: &[usize],
    max_h: usize,
    scale: f64,
) -> Result<PatternSeries, AnalysisError> {
    let adj = SparseMatrix::from_edges(n, &g.edges);
    let at_depth = sources
        .par_iter()
        .map_init(
            || (vec![u32::MAX; n], Vec::new()),
            |(dist, visited), &s| bfs_depth_counts(&adj, s, max_h, dist, visited),
        )
        .reduce(
            || vec![0u64; max_h + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let mut running = 0u64;
    let points = at_depth
        .into_iter()
        .enumerate()
        .map(|(h, c)| {
            running += c;
            (h as f64, running as f64 * scale)
        })
        .collect();
    PatternSeries::new(PatternKind::Hop, points)
}

/// Number of vertices first reached at each depth `0..=max_h` from `s`.
/// `dist` is left all-`u32::MAX` on return.
fn bfs_depth_counts(
    adj: &SparseMatrix,
    s: usize,
    max_h: usize,
    dist: &mut [u32],
    visited: &mut Vec<usize>,
) -> Vec<u64> {
    let mut counts = vec![0u64; max_h + 1];
    dist[s] = 0;
    visited.push(s);
    let mut head = 0;
    while head < visited.len() {
        let a = visited[head];
        head += 1;
        let d = dist[a] as usize;
        counts[d] += 1;
        if d == max_h {
            continue;
        }
        for &b in adj.row_cols(a) {
            let b = b as usize;
            if dist[b] == u32::MAX {
                dist[b] = d as u32 + 1;
                visited.push(b);
            }
        }
    }
    for &v in visited.iter() {
        dist[v] = u32::MAX;
    }
    visited.clear();
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directed_three_cycle() {
        let g = EdgeList::new(3, vec![(0, 1), (1, 2), (2, 0)]);
        let s = hop_plot(&g, 4).unwrap();
        let ys: Vec<f64> = s.ys().collect();
        assert_eq!(ys, vec![3.0, 6.0, 9.0, 9.0, 9.0]);
    }

    #[test]
    fn empty_graph_only_self_pairs() {
        let s = hop_plot(&EdgeList::empty(5), 3).unwrap();
        assert!(s.ys().all(|y| y == 5.0));
    }

    #[test]
    fn path_respects_direction() {
        let g = EdgeList::new(3, vec![(0, 1), (1, 2), (1, 2)]);
        let ys: Vec<f64> = hop_plot(&g, 2).unwrap().ys().collect();
        assert_eq!(ys, vec![3.0, 5.0, 6.0]);
    }

    #[test]
    fn sampling_all_sources_is_exact() {
        let g = EdgeList::new(4, vec![(0, 1), (1, 2), (3, 0)]);
        assert_eq!(
            hop_plot_sampled(&g, 3, 4, 9).unwrap(),
            hop_plot(&g, 3).unwrap()
        );
        let s = hop_plot_sampled(&g, 3, 2, 9).unwrap();
        assert_eq!(s.points[0].1, 4.0);
        assert_eq!(s, hop_plot_sampled(&g, 3, 2, 9).unwrap());
    }

    #[test]
    fn exact_cap() {
        let g = EdgeList::empty(EXACT_HOP_CAP + 1);
        assert!(matches!(
            hop_plot(&g, 2),
            Err(AnalysisError::TooLargeForExactHops { .. })
        ));
    }
}
