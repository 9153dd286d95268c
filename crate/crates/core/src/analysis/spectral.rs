//! Scree plot and network values via a Lanczos eigensolver on sparse
//! adjacency operators.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{vertex_total, AnalysisError, PatternKind, PatternSeries};
use crate::generator::EdgeList;

/// Most singular values the scree plot will report.
pub const SCREE_CAP: usize = 100;

/// Compressed sparse rows with duplicate entries summed, so a multi-edge
/// contributes its multiplicity as weight.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    /// Adjacency matrix of `edges` over `n` vertices. Every endpoint must be
    /// below `n`, and `n` must fit in `u32`.
    pub fn from_edges(n: usize, edges: &[(u64, u64)]) -> Self {
        let mut row_ptr = vec![0usize; n + 1];
        for &(a, _) in edges {
            row_ptr[a as usize + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut fill = row_ptr.clone();
        let mut raw = vec![0u32; edges.len()];
        for &(a, b) in edges {
            raw[fill[a as usize]] = b as u32;
            fill[a as usize] += 1;
        }

        let mut cols = Vec::with_capacity(edges.len());
        let mut vals = Vec::with_capacity(edges.len());
        let mut out_ptr = Vec::with_capacity(n + 1);
        out_ptr.push(0);
        for i in 0..n {
            let row = &mut raw[row_ptr[i]..row_ptr[i + 1]];
            row.sort_unstable();
            for &c in row.iter() {
                if cols.len() > *out_ptr.last().unwrap() && *cols.last().unwrap() == c {
                    *vals.last_mut().unwrap() += 1.0;
                } else {
                    cols.push(c);
                    vals.push(1.0);
                }
            }
            out_ptr.push(cols.len());
        }
        Self {
            n,
            row_ptr: out_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row_cols(&self, row: usize) -> &[u32] {
        &self.cols[self.row_ptr[row]..self.row_ptr[row + 1]]
    }

    pub fn transpose(&self) -> Self {
        let mut row_ptr = vec![0usize; self.n + 1];
        for &c in &self.cols {
            row_ptr[c as usize + 1] += 1;
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut fill = row_ptr.clone();
        let mut cols = vec![0u32; self.cols.len()];
        let mut vals = vec![0.0; self.cols.len()];
        for r in 0..self.n {
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[idx] as usize;
                cols[fill[c]] = r as u32;
                vals[fill[c]] = self.vals[idx];
                fill[c] += 1;
            }
        }
        Self {
            n: self.n,
            row_ptr,
            cols,
            vals,
        }
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            *out = self.cols[span.clone()]
                .iter()
                .zip(&self.vals[span])
                .map(|(&c, &v)| v * x[c as usize])
                .sum();
        }
    }

    /// Dense row-major copy, for small oracles.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.n * self.n];
        for r in 0..self.n {
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                dense[r * self.n + self.cols[idx] as usize] = self.vals[idx];
            }
        }
        dense
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Ritz pairs count as converged once their residual falls below
    /// `tolerance * |largest Ritz value|`.
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iter: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosResult {
    /// Largest eigenvalues, descending.
    pub values: Vec<f64>,
    /// Unit eigenvector for each returned value, if requested.
    pub vectors: Vec<Vec<f64>>,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}

/// Two passes of classical Gram-Schmidt against the basis.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(w, q);
            axpy(-c, q, w);
        }
    }
}

/// Fresh unit vector orthogonal to `basis`, or `None` if the basis already
/// spans the space.
fn restart_vector(dim: usize, basis: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    for _ in 0..8 {
        let mut w: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
        orthogonalize(&mut w, basis);
        let len = norm(&w);
        if len > 1e-8 {
            w.iter_mut().for_each(|x| *x /= len);
            return Some(w);
        }
    }
    None
}

/// Largest `nev` eigenpairs of the symmetric operator `apply` on `R^dim`,
/// by Lanczos with full reorthogonalization. On breakdown the iteration
/// continues from a random vector orthogonal to the current basis, so
/// repeated and zero eigenvalues are still found.
pub fn lanczos_largest(
    dim: usize,
    nev: usize,
    start: &[f64],
    want_vectors: bool,
    options: LanczosOptions,
    mut apply: impl FnMut(&[f64], &mut [f64]),
) -> Result<LanczosResult, AnalysisError> {
    if nev > dim {
        return Err(AnalysisError::TopM {
            requested: nev,
            limit: dim,
        });
    }
    if nev == 0 {
        return Ok(LanczosResult {
            values: vec![],
            vectors: vec![],
            iterations: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let max_iter = options.max_iter.max(nev).min(dim);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut scale = 0f64;

    let mut q = start.to_vec();
    let len = norm(&q);
    if len > 0.0 && len.is_finite() {
        q.iter_mut().for_each(|x| *x /= len);
    } else {
        q = restart_vector(dim, &basis, &mut rng).expect("dim > 0");
    }
    let mut w = vec![0.0; dim];
    let mut next_check = nev;
    let mut block_start = 0;
    let mut last_residual = f64::INFINITY;

    loop {
        apply(&q, &mut w);
        let alpha = dot(&w, &q);
        basis.push(q);
        alphas.push(alpha);
        orthogonalize(&mut w, &basis);
        let beta = norm(&w);
        scale = scale.max(alpha.abs()).max(beta);
        let steps = basis.len();
        let breakdown = beta <= 1e-12 * scale.max(f64::MIN_POSITIVE) || beta == 0.0;
        let exhausted = steps == dim;

        if steps >= next_check || breakdown || exhausted || steps == max_iter {
            let (values, vecs) = tridiagonal_eigen(&alphas, &betas);
            let order = descending_order(&values);
            let top = values[order[0]].abs();
            let converged = if breakdown {
                // The block just closed started from a vector with a component
                // along every remaining eigenvector, so its largest Ritz value
                // bounds everything not yet seen.
                let (block_values, _) =
                    tridiagonal_eigen(&alphas[block_start..], &betas[block_start..]);
                let block_max = block_values.iter().copied().fold(f64::MIN, f64::max);
                last_residual = 0.0;
                steps >= nev && block_max <= values[order[nev - 1]] + options.tolerance * top
            } else {
                let residual = order
                    .iter()
                    .take(nev)
                    .map(|&i| (beta * vecs[(steps - 1, i)]).abs())
                    .fold(0.0, f64::max);
                last_residual = residual;
                steps >= nev && residual <= options.tolerance * top
            };
            if converged || exhausted {
                let values_out: Vec<f64> = order.iter().take(nev).map(|&i| values[i]).collect();
                let vectors = if want_vectors {
                    order
                        .iter()
                        .take(nev)
                        .map(|&i| {
                            let mut x = vec![0.0; dim];
                            for (j, qj) in basis.iter().enumerate() {
                                axpy(vecs[(j, i)], qj, &mut x);
                            }
                            let len = norm(&x);
                            x.iter_mut().for_each(|v| *v /= len);
                            x
                        })
                        .collect()
                } else {
                    Vec::new()
                };
                return Ok(LanczosResult {
                    values: values_out,
                    vectors,
                    iterations: steps,
                });
            }
            next_check = steps + (steps / 8).max(4);
        }
        if steps == max_iter {
            return Err(AnalysisError::NonConvergence {
                iterations: steps,
                residual: last_residual,
            });
        }
        if breakdown {
            betas.push(0.0);
            block_start = steps;
            q = match restart_vector(dim, &basis, &mut rng) {
                Some(v) => v,
                None => {
                    // Rounding kept us from reaching `dim` exactly; the basis
                    // is complete anyway.
                    return Err(AnalysisError::NonConvergence {
                        iterations: steps,
                        residual: last_residual,
                    });
                }
            };
        } else {
            betas.push(beta);
            q = w.iter().map(|x| x / beta).collect();
        }
    }
}

fn tridiagonal_eigen(alphas: &[f64], betas: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

/// Top `top_m` singular values of the adjacency matrix (multi-edges weighted
/// by multiplicity), descending, at ranks `1..=top_m`.
pub fn scree_plot(g: &EdgeList, top_m: usize) -> Result<PatternSeries, AnalysisError> {
    let n = vertex_total(g)?;
    let limit = n.min(SCREE_CAP);
    if top_m > limit {
        return Err(AnalysisError::TopM {
            requested: top_m,
            limit,
        });
    }
    let values = if g.is_empty() {
        vec![0.0; top_m]
    } else {
        let a = SparseMatrix::from_edges(n, &g.edges);
        let at = a.transpose();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5c4ee);
        let start: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let mut tmp = vec![0.0; n];
        let result = lanczos_largest(
            n,
            top_m,
            &start,
            false,
            LanczosOptions::default(),
            |x, y| {
                a.mul_vec(x, &mut tmp);
                at.mul_vec(&tmp, y);
            },
        )?;
        result.values.iter().map(|&l| l.max(0.0).sqrt()).collect()
    };
    // Clamp tiny rounding inversions so the series stays non-increasing.
    let mut points = Vec::with_capacity(top_m);
    let mut prev = f64::INFINITY;
    for (rank, s) in values.into_iter().enumerate() {
        let s = s.min(prev);
        prev = s;
        points.push(((rank + 1) as f64, s));
    }
    PatternSeries::new(PatternKind::Scree, points)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkValues {
    pub series: PatternSeries,
    /// The graph has no edges, so there is no principal eigenvector and the
    /// series is all zeros.
    pub degenerate: bool,
    pub eigenvalue: f64,
}

/// Absolute components of the unit principal eigenvector of `(A + A^T) / 2`,
/// sorted descending, top `top_m` reported at ranks `1..=top_m`.
pub fn network_values(g: &EdgeList, top_m: usize) -> Result<NetworkValues, AnalysisError> {
    let n = vertex_total(g)?;
    if top_m > n {
        return Err(AnalysisError::TopM {
            requested: top_m,
            limit: n,
        });
    }
    let zeros = || -> Result<NetworkValues, AnalysisError> {
        Ok(NetworkValues {
            series: PatternSeries::new(
                PatternKind::NetValue,
                (1..=top_m).map(|r| (r as f64, 0.0)).collect(),
            )?,
            degenerate: true,
            eigenvalue: 0.0,
        })
    };
    if g.is_empty() {
        return zeros();
    }
    let a = SparseMatrix::from_edges(n, &g.edges);
    let at = a.transpose();
    // The principal vector is non-negative, so the all-ones start always
    // overlaps it.
    let start = vec![1.0; n];
    let mut tmp = vec![0.0; n];
    let options = LanczosOptions {
        tolerance: 1e-12,
        ..LanczosOptions::default()
    };
    let result = lanczos_largest(n, 1, &start, true, options, |x, y| {
        a.mul_vec(x, y);
        at.mul_vec(x, &mut tmp);
        y.iter_mut()
            .zip(&tmp)
            .for_each(|(y, t)| *y = 0.5 * (*y + t));
    })?;
    let mut components: Vec<f64> = result.vectors[0].iter().map(|x| x.abs()).collect();
    components.sort_by(|a, b| b.total_cmp(a));
    Ok(NetworkValues {
        series: PatternSeries::new(
            PatternKind::NetValue,
            components
                .into_iter()
                .take(top_m)
                .enumerate()
                .map(|(r, c)| ((r + 1) as f64, c))
                .collect(),
        )?,
        degenerate: false,
        eigenvalue: result.values[0],
    })
}
