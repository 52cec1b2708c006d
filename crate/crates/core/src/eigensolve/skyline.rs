//! Profile (skyline) Cholesky factorization with reverse Cuthill–McKee
//! ordering.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::EigenError;
use crate::sparse::{BandedSymMatrix, SparseSymMatrix};

/// `P A Pᵀ = L Lᵀ` stored by rows of the lower profile.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    // perm[new] = old
    perm: Vec<usize>,
    first: Vec<usize>,
    offsets: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineCholesky {
    /// Factors `a - shift * b` for a sparse pencil, reordering by reverse
    /// Cuthill–McKee first. `b` must have a pattern contained in that of `a`
    /// (true for assembled stiffness/mass pairs and for diagonal masses).
    pub fn factor_sparse(
        a: &SparseSymMatrix,
        b: &SparseSymMatrix,
        shift: f64,
    ) -> Result<Self, EigenError> {
        let n = a.order();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (new, &old) in perm.iter().enumerate() {
            for &c in a.row(old).0 {
                let j = inv[c];
                if j < new {
                    first[new] = first[new].min(j);
                }
            }
        }
        let mut sk = Self::allocate(perm, first);
        for new in 0..n {
            let old = sk.perm[new];
            let (cols, vals) = a.row(old);
            for (&c, &v) in cols.iter().zip(vals) {
                let j = inv[c];
                if j <= new {
                    let s = sk.offsets[new] + j - sk.first[new];
                    sk.data[s] += v;
                }
            }
            if shift != 0.0 {
                let (cols, vals) = b.row(old);
                for (&c, &v) in cols.iter().zip(vals) {
                    let j = inv[c];
                    if j <= new {
                        assert!(j >= sk.first[new], "mass pattern exceeds stiffness profile");
                        let s = sk.offsets[new] + j - sk.first[new];
                        sk.data[s] -= shift * v;
                    }
                }
            }
        }
        sk.decompose()?;
        Ok(sk)
    }

    /// Factors `a - shift * b` for banded matrices in their natural order.
    pub fn factor_banded(
        a: &BandedSymMatrix,
        b: &BandedSymMatrix,
        shift: f64,
    ) -> Result<Self, EigenError> {
        let n = a.order();
        let bw = a.bandwidth().max(b.bandwidth());
        let first = (0..n).map(|i| i.saturating_sub(bw)).collect();
        let mut sk = Self::allocate((0..n).collect(), first);
        for i in 0..n {
            for j in sk.first[i]..=i {
                let s = sk.offsets[i] + j - sk.first[i];
                sk.data[s] = a.get(i, j) - shift * b.get(i, j);
            }
        }
        sk.decompose()?;
        Ok(sk)
    }

    fn allocate(perm: Vec<usize>, first: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(first.len() + 1);
        let mut total = 0;
        for (i, &f) in first.iter().enumerate() {
            offsets.push(total);
            total += i - f + 1;
        }
        offsets.push(total);
        Self {
            perm,
            first,
            offsets,
            data: vec![0.0; total],
        }
    }

    /// Number of stored entries in the factor.
    pub fn profile_size(&self) -> usize {
        self.data.len()
    }

    pub fn order(&self) -> usize {
        self.perm.len()
    }

    fn decompose(&mut self) -> Result<(), EigenError> {
        let n = self.order();
        for i in 0..n {
            let fi = self.first[i];
            let oi = self.offsets[i];
            for j in fi..i {
                let fj = self.first[j];
                let oj = self.offsets[j];
                let k0 = fi.max(fj);
                let len = j - k0;
                let ri = &self.data[oi + k0 - fi..oi + k0 - fi + len];
                let rj = &self.data[oj + k0 - fj..oj + k0 - fj + len];
                let dot = dot(ri, rj);
                let ljj = self.data[oj + j - fj];
                let s = oi + j - fi;
                self.data[s] = (self.data[s] - dot) / ljj;
            }
            let row = &self.data[oi..oi + i - fi];
            let d = self.data[oi + i - fi] - dot(row, row);
            if !(d > 0.0) || !d.is_finite() {
                return Err(EigenError::NotPositiveDefinite {
                    pivot: self.perm[i],
                    value: d,
                });
            }
            self.data[oi + i - fi] = libm::sqrt(d);
        }
        Ok(())
    }

    /// Solves `(A - shift B) x = rhs`.
    pub fn solve(&self, rhs: &[f64], x: &mut [f64]) {
        self.solve_many(&[rhs], core::slice::from_mut(&mut &mut *x));
    }

    /// Solves for several right-hand sides with one pass over the factor.
    pub fn solve_many(&self, rhs: &[&[f64]], out: &mut [&mut [f64]]) {
        let n = self.order();
        let r = rhs.len();
        assert_eq!(out.len(), r);
        // y[i * r + c] holds entry i of system c in the permuted order
        let mut y = vec![0.0; n * r];
        for (new, &old) in self.perm.iter().enumerate() {
            for c in 0..r {
                y[new * r + c] = rhs[c][old];
            }
        }
        let mut acc = vec![0.0; r];
        for i in 0..n {
            let fi = self.first[i];
            let oi = self.offsets[i];
            let row = &self.data[oi..oi + i - fi];
            acc.iter_mut().for_each(|a| *a = 0.0);
            for (k, &l) in row.iter().enumerate() {
                let yk = &y[(fi + k) * r..(fi + k + 1) * r];
                for c in 0..r {
                    acc[c] += l * yk[c];
                }
            }
            let d = self.data[oi + i - fi];
            for c in 0..r {
                y[i * r + c] = (y[i * r + c] - acc[c]) / d;
            }
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let oi = self.offsets[i];
            let d = self.data[oi + i - fi];
            let (head, tail) = y.split_at_mut(i * r);
            let yi = &mut tail[..r];
            yi.iter_mut().for_each(|v| *v /= d);
            let row = &self.data[oi..oi + i - fi];
            for (k, &l) in row.iter().enumerate() {
                let yk = &mut head[(fi + k) * r..(fi + k + 1) * r];
                for c in 0..r {
                    yk[c] -= l * yi[c];
                }
            }
        }
        for (new, &old) in self.perm.iter().enumerate() {
            for c in 0..r {
                out[c][old] = y[new * r + c];
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators; the order is fixed so results stay reproducible
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for l in 0..4 {
            acc[l] += a[4 * c + l] * b[4 * c + l];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Reverse Cuthill–McKee ordering of the graph of `a`; returns `perm` with
/// `perm[new] = old`. Each connected component starts from a pseudo-peripheral
/// node.
pub fn reverse_cuthill_mckee(a: &SparseSymMatrix) -> Vec<usize> {
    let n = a.order();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).0.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut level = vec![usize::MAX; n];

    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(a, seed, &degree, &mut level);
        let mut queue = VecDeque::new();
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = a.row(v).0.iter().copied().filter(|&u| !visited[u]).collect();
            nbrs.sort_by_key(|&u| (degree[u], u));
            for u in nbrs {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral(a: &SparseSymMatrix, seed: usize, degree: &[usize], level: &mut [usize]) -> usize {
    let mut root = seed;
    let mut ecc = bfs_levels(a, root, level).0;
    loop {
        let (_, last) = bfs_levels(a, root, level);
        let candidate = last
            .into_iter()
            .min_by_key(|&u| (degree[u], u))
            .unwrap_or(root);
        let (e, _) = bfs_levels(a, candidate, level);
        if e > ecc {
            ecc = e;
            root = candidate;
        } else {
            return root;
        }
    }
}

/// Eccentricity of `root` and the nodes of its last level.
fn bfs_levels(a: &SparseSymMatrix, root: usize, level: &mut [usize]) -> (usize, Vec<usize>) {
    let mut touched = vec![root];
    level[root] = 0;
    let mut frontier = vec![root];
    let mut depth = 0;
    loop {
        let mut next = Vec::new();
        for &v in &frontier {
            for &u in a.row(v).0 {
                if level[u] == usize::MAX {
                    level[u] = depth + 1;
                    next.push(u);
                    touched.push(u);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        depth += 1;
        frontier = next;
    }
    for t in touched {
        level[t] = usize::MAX;
    }
    (depth, frontier)
}
