//! Cholesky factorization of symmetric positive definite matrices: dense for
//! small orders, envelope (skyline) storage after reverse Cuthill–McKee
//! reordering otherwise.

use std::collections::VecDeque;

use thiserror::Error;

use super::SparseSymMatrix;

/// Orders up to this size are factored densely.
pub const DENSE_LIMIT: usize = 512;

/// A pivot that was not strictly positive.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("matrix is not positive definite: pivot {pivot} (row {row}) is {value:e}")]
pub struct NotPositiveDefinite {
    /// 1-based position in elimination order.
    pub pivot: usize,
    /// 0-based index of the offending row in the original ordering.
    pub row: usize,
    /// The computed pivot `a_kk − Σ l_ki²` (before the square root).
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct DenseFactor {
    n: usize,
    /// Row-major lower triangle, row `i` occupying `i(i+1)/2 ..`.
    l: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SkylineFactor {
    n: usize,
    /// `perm[k]` is the original index eliminated at step `k`.
    perm: Vec<usize>,
    /// First stored column of each permuted row.
    first: Vec<usize>,
    /// Offset of each row in `l`; row `i` stores columns `first[i] ..= i`.
    start: Vec<usize>,
    l: Vec<f64>,
}

#[derive(Debug, Clone)]
pub enum CholeskyFactor {
    Dense(DenseFactor),
    Skyline(SkylineFactor),
}

/// Factors `A = L Lᵀ`, choosing the storage scheme by order.
pub fn cholesky(a: &SparseSymMatrix) -> Result<CholeskyFactor, NotPositiveDefinite> {
    if a.n() <= DENSE_LIMIT {
        dense(a).map(CholeskyFactor::Dense)
    } else {
        skyline(a).map(CholeskyFactor::Skyline)
    }
}

fn check_pivot(s: f64, k: usize, row: usize) -> Result<f64, NotPositiveDefinite> {
    if s > 0.0 && s.is_finite() {
        Ok(s.sqrt())
    } else {
        Err(NotPositiveDefinite {
            pivot: k + 1,
            row,
            value: s,
        })
    }
}

pub fn dense(a: &SparseSymMatrix) -> Result<DenseFactor, NotPositiveDefinite> {
    let n = a.n();
    let mut l = vec![0.0; n * (n + 1) / 2];
    for i in 0..n {
        let (cols, vals) = a.row(i);
        let ri = i * (i + 1) / 2;
        for (&j, &v) in cols.iter().zip(vals) {
            l[ri + j] = v;
        }
        for j in 0..=i {
            let rj = j * (j + 1) / 2;
            let s = l[ri + j] - dot(&l[ri..ri + j], &l[rj..rj + j]);
            if j == i {
                l[ri + i] = check_pivot(s, i, i)?;
            } else {
                l[ri + j] = s / l[rj + j];
            }
        }
    }
    Ok(DenseFactor { n, l })
}

pub fn skyline(a: &SparseSymMatrix) -> Result<SkylineFactor, NotPositiveDefinite> {
    let n = a.n();
    let perm = reverse_cuthill_mckee(a);
    let mut inv = vec![0; n];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }

    // envelope of the permuted lower triangle
    let mut first: Vec<usize> = (0..n).collect();
    for old in 0..n {
        let (cols, _) = a.row(old);
        for &c in cols {
            let (r, q) = (inv[old].max(inv[c]), inv[old].min(inv[c]));
            first[r] = first[r].min(q);
        }
    }
    let mut start = Vec::with_capacity(n + 1);
    start.push(0);
    for i in 0..n {
        start.push(start[i] + i - first[i] + 1);
    }
    let mut l = vec![0.0; start[n]];
    for old in 0..n {
        let (cols, vals) = a.row(old);
        for (&c, &v) in cols.iter().zip(vals) {
            let (r, q) = (inv[old].max(inv[c]), inv[old].min(inv[c]));
            l[start[r] + q - first[r]] = v;
        }
    }

    for i in 0..n {
        let fi = first[i];
        let si = start[i];
        for j in fi..i {
            let fj = first[j];
            let sj = start[j];
            let k0 = fi.max(fj);
            let s =
                l[si + j - fi] - dot(&l[si + k0 - fi..si + j - fi], &l[sj + k0 - fj..sj + j - fj]);
            l[si + j - fi] = s / l[sj + j - fj];
        }
        let s = l[si + i - fi] - dot(&l[si..si + i - fi], &l[si..si + i - fi]);
        l[si + i - fi] = check_pivot(s, i, perm[i])?;
    }
    Ok(SkylineFactor {
        n,
        perm,
        first,
        start,
        l,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Reverse Cuthill–McKee ordering of the matrix graph, one component at a
/// time, each started from a pseudo-peripheral vertex.
pub fn reverse_cuthill_mckee(a: &SparseSymMatrix) -> Vec<usize> {
    let n = a.n();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let (cols, _) = a.row(i);
        for &j in cols {
            if j != i {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    for nbrs in &mut adj {
        nbrs.sort_by_key(|&v| (degree[v], v));
    }

    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (degree[v], v));
    for &seed in &by_degree {
        if placed[seed] {
            continue;
        }
        let root = pseudo_peripheral(&adj, seed);
        let mut queue = VecDeque::from([root]);
        placed[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &adj[v] {
                if !placed[w] {
                    placed[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order.reverse();
    order
}

/// BFS levels from `root`: (eccentricity, vertices of the last level).
fn last_level(adj: &[Vec<usize>], root: usize) -> (usize, Vec<usize>) {
    let mut dist = std::collections::HashMap::from([(root, 0usize)]);
    let mut frontier = vec![root];
    let mut depth = 0;
    loop {
        let mut next = Vec::new();
        for &v in &frontier {
            for &w in &adj[v] {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                    e.insert(depth + 1);
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            return (depth, frontier);
        }
        frontier = next;
        depth += 1;
    }
}

fn pseudo_peripheral(adj: &[Vec<usize>], seed: usize) -> usize {
    let mut root = seed;
    let (mut ecc, mut level) = last_level(adj, root);
    loop {
        let candidate = *level
            .iter()
            .min_by_key(|&&v| (adj[v].len(), v))
            .expect("nonempty level");
        let (e, l) = last_level(adj, candidate);
        if e <= ecc {
            return root;
        }
        root = candidate;
        ecc = e;
        level = l;
    }
}

impl CholeskyFactor {
    pub fn n(&self) -> usize {
        match self {
            Self::Dense(f) => f.n,
            Self::Skyline(f) => f.n,
        }
    }

    /// Diagonal of `L` in elimination order.
    pub fn diagonal(&self) -> Vec<f64> {
        match self {
            Self::Dense(f) => (0..f.n).map(|i| f.l[i * (i + 1) / 2 + i]).collect(),
            Self::Skyline(f) => (0..f.n).map(|i| f.l[f.start[i + 1] - 1]).collect(),
        }
    }

    /// Stored entries of `L`.
    pub fn stored(&self) -> usize {
        match self {
            Self::Dense(f) => f.l.len(),
            Self::Skyline(f) => f.l.len(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Dense(_) => "dense",
            Self::Skyline(_) => "skyline",
        }
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n(), "right-hand side has the wrong length");
        match self {
            Self::Dense(f) => f.solve(b),
            Self::Skyline(f) => f.solve(b),
        }
    }
}

impl DenseFactor {
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let ri = i * (i + 1) / 2;
            y[i] = (y[i] - dot(&self.l[ri..ri + i], &y[..i])) / self.l[ri + i];
        }
        for i in (0..n).rev() {
            let ri = i * (i + 1) / 2;
            y[i] /= self.l[ri + i];
            let xi = y[i];
            for k in 0..i {
                y[k] -= self.l[ri + k] * xi;
            }
        }
        y
    }
}

impl SkylineFactor {
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let (fi, si) = (self.first[i], self.start[i]);
            let row = &self.l[si..si + i - fi];
            y[i] = (y[i] - dot(row, &y[fi..i])) / self.l[si + i - fi];
        }
        for i in (0..n).rev() {
            let (fi, si) = (self.first[i], self.start[i]);
            y[i] /= self.l[si + i - fi];
            let xi = y[i];
            for k in fi..i {
                y[k] -= self.l[si + k - fi] * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }
}
