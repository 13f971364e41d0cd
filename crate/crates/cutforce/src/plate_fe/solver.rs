//! Symmetric skyline (envelope) LDL^T factorization with reverse
//! Cuthill-McKee ordering. System sizes stay in the low ten-thousands of
//! unknowns, where a banded direct solve is both fast and deterministic.

use crate::error::{Error, Result};

/// Symmetric matrix stored by rows over the skyline envelope: row `i`
/// holds columns `first[i]..=i`.
pub struct Skyline {
    n: usize,
    first: Vec<usize>,
    offset: Vec<usize>,
    vals: Vec<f64>,
    factored: bool,
}

impl Skyline {
    /// `first[i]` must be the smallest column index coupled to row `i`.
    pub fn new(first: Vec<usize>) -> Self {
        let n = first.len();
        let mut offset = Vec::with_capacity(n + 1);
        let mut total = 0usize;
        for (i, &f) in first.iter().enumerate() {
            assert!(f <= i);
            offset.push(total);
            total += i - f + 1;
        }
        offset.push(total);
        Self { n, first, offset, vals: vec![0.0; total], factored: false }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j >= self.first[i] && j <= i);
        self.offset[i] + (j - self.first[i])
    }

    /// Accumulate into entry (i, j); only the lower triangle is stored.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let k = self.idx(r, c);
        self.vals[k] += v;
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        if j >= self.first[i] {
            self.vals[self.idx(i, j)]
        } else {
            0.0
        }
    }

    /// In-place LDL^T. Fails on non-positive pivots (singular or indefinite
    /// system, e.g. a floating rigid-body mode).
    pub fn factor_ldlt(&mut self) -> Result<()> {
        let mut max_pivot = 0.0f64;
        for i in 0..self.n {
            let fi = self.first[i];
            for j in fi..=i {
                let lo = fi.max(self.first[j]);
                let mut sum = self.get(i, j);
                for k in lo..j {
                    sum -= self.get(i, k) * self.get(k, k) * self.get(j, k);
                }
                if j < i {
                    let d = self.get(j, j);
                    let k = self.idx(i, j);
                    self.vals[k] = sum / d;
                } else {
                    max_pivot = max_pivot.max(sum.abs());
                    if sum <= 1e-14 * max_pivot.max(1e-300) {
                        return Err(Error::SingularSystem(format!(
                            "non-positive pivot {sum} at row {i}"
                        )));
                    }
                    let k = self.idx(i, i);
                    self.vals[k] = sum;
                }
            }
        }
        self.factored = true;
        Ok(())
    }

    /// Solve A x = b after factorization.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert!(self.factored);
        let n = self.n;
        let mut x = b.to_vec();
        // Forward: L z = b (unit lower triangular).
        for i in 0..n {
            let mut s = x[i];
            for k in self.first[i]..i {
                s -= self.get(i, k) * x[k];
            }
            x[i] = s;
        }
        // Diagonal: D y = z.
        for i in 0..n {
            x[i] /= self.get(i, i);
        }
        // Backward: L^T x = y.
        for i in (0..n).rev() {
            let xi = x[i];
            for k in self.first[i]..i {
                x[k] -= self.get(i, k) * xi;
            }
        }
        x
    }
}

/// Reverse Cuthill-McKee ordering of an undirected graph given by adjacency
/// lists. Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.sort_by_key(|&i| adj[i].len());
    for &start in &nodes {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut nb: Vec<usize> = adj[u].iter().copied().filter(|&v| !visited[v]).collect();
            nb.sort_by_key(|&v| (adj[v].len(), v));
            for v in nb {
                if !visited[v] {
                    visited[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    order.reverse();
    order
}
