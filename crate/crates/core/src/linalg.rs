//! Sparse complex matrices and the few numerical routines the oracle needs.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::product_system::{C64, PRUNE_TOL};

/// Stopping tolerance (relative residual) for power iteration.
pub const POWER_TOL: f64 = 1e-10;
pub const POWER_MAX_ITER: usize = 10_000;

/// Square matrix stored column by column, rows sorted within each column.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    cols: Vec<Vec<(usize, C64)>>,
}

fn collect_col(map: BTreeMap<usize, C64>) -> Vec<(usize, C64)> {
    map.into_iter().filter(|(_, v)| v.norm() >= PRUNE_TOL).collect()
}

impl SparseMatrix {
    pub fn zeros(n: usize) -> Self {
        SparseMatrix { n, cols: vec![Vec::new(); n] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix { n, cols: (0..n).map(|j| vec![(j, C64::new(1.0, 0.0))]).collect() }
    }

    pub fn diagonal(values: &[C64]) -> Self {
        SparseMatrix::from_triplets(values.len(), values.iter().enumerate().map(|(i, v)| (i, i, *v)))
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut cols: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); n];
        for (i, j, v) in triplets {
            assert!(i < n && j < n, "triplet ({i}, {j}) outside a {n}x{n} matrix");
            *cols[j].entry(i).or_insert_with(C64::zero) += v;
        }
        SparseMatrix { n, cols: cols.into_iter().map(collect_col).collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn col(&self, j: usize) -> &[(usize, C64)] {
        &self.cols[j]
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match self.cols[j].binary_search_by_key(&i, |(r, _)| *r) {
            Ok(k) => self.cols[j][k].1,
            Err(_) => C64::zero(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    /// `(row, col, value)` for every stored entry, column-major.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |(i, v)| (*i, j, *v)))
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.n, other.n);
        let cols = other
            .cols
            .iter()
            .map(|bcol| {
                let mut acc: BTreeMap<usize, C64> = BTreeMap::new();
                for (k, b) in bcol {
                    for (i, a) in &self.cols[*k] {
                        *acc.entry(*i).or_insert_with(C64::zero) += a * b;
                    }
                }
                collect_col(acc)
            })
            .collect();
        SparseMatrix { n: self.n, cols }
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: C64, other: &SparseMatrix, b: C64) -> SparseMatrix {
        assert_eq!(self.n, other.n);
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(x, y)| {
                let mut acc: BTreeMap<usize, C64> = BTreeMap::new();
                for (i, v) in x {
                    *acc.entry(*i).or_insert_with(C64::zero) += a * v;
                }
                for (i, v) in y {
                    *acc.entry(*i).or_insert_with(C64::zero) += b * v;
                }
                collect_col(acc)
            })
            .collect();
        SparseMatrix { n: self.n, cols }
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        let one = C64::new(1.0, 0.0);
        self.lin_comb(one, other, one)
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        self.lin_comb(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, c: C64) -> SparseMatrix {
        let cols = self
            .cols
            .iter()
            .map(|col| col.iter().map(|(i, v)| (*i, v * c)).filter(|(_, v)| v.norm() >= PRUNE_TOL).collect())
            .collect();
        SparseMatrix { n: self.n, cols }
    }

    pub fn adjoint(&self) -> SparseMatrix {
        SparseMatrix::from_triplets(self.n, self.triplets().map(|(i, j, v)| (j, i, v.conj())))
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::zero(); self.n];
        for (j, col) in self.cols.iter().enumerate() {
            if v[j] == C64::zero() {
                continue;
            }
            for (i, a) in col {
                out[*i] += a * v[j];
            }
        }
        out
    }

    pub fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        self.cols
            .iter()
            .map(|col| col.iter().map(|(i, a)| a.conj() * v[*i]).sum())
            .collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|j| self.get(j, j)).sum()
    }

    /// Keeps only entries for which `keep(row, col)` holds.
    pub fn filter(&self, keep: impl Fn(usize, usize) -> bool) -> SparseMatrix {
        let cols = self
            .cols
            .iter()
            .enumerate()
            .map(|(j, col)| col.iter().copied().filter(|(i, _)| keep(*i, j)).collect())
            .collect();
        SparseMatrix { n: self.n, cols }
    }

    /// Dense copy of the block with the given rows and columns.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<C64>> {
        rows.iter().map(|&i| cols.iter().map(|&j| self.get(i, j)).collect()).collect()
    }

    /// Operator norm estimate by power iteration on `A*A`.
    pub fn norm(&self) -> NormEstimate {
        power_norm(self.n, |v| self.apply(v), |v| self.apply_adjoint(v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Power iteration for `‖A‖` given `A` and `A*` as closures on dimension `n`.
///
/// Starts from a fixed-seed random vector and stops once the residual
/// `‖A*Av − λv‖` falls below `POWER_TOL·λ`.
pub fn power_norm(
    n: usize,
    apply: impl Fn(&[C64]) -> Vec<C64>,
    apply_adjoint: impl Fn(&[C64]) -> Vec<C64>,
) -> NormEstimate {
    if n == 0 {
        return NormEstimate { value: 0.0, iterations: 0, converged: true };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let mut lambda = 0.0;
    for it in 1..=POWER_MAX_ITER {
        let nv = vec_norm(&v);
        if nv == 0.0 {
            return NormEstimate { value: 0.0, iterations: it, converged: true };
        }
        v.iter_mut().for_each(|c| *c /= nv);
        let w = apply_adjoint(&apply(&v));
        lambda = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
        if lambda <= f64::MIN_POSITIVE {
            return NormEstimate { value: 0.0, iterations: it, converged: true };
        }
        let residual = v
            .iter()
            .zip(&w)
            .map(|(a, b)| (b - a * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual <= POWER_TOL * lambda {
            return NormEstimate { value: lambda.sqrt(), iterations: it, converged: true };
        }
        v = w;
    }
    NormEstimate { value: lambda.max(0.0).sqrt(), iterations: POWER_MAX_ITER, converged: false }
}

/// Rank of a dense matrix by Gaussian elimination with partial pivoting.
pub fn dense_rank(rows: &[Vec<C64>], tol: f64) -> usize {
    let mut m: Vec<Vec<C64>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let pivot = (rank..m.len()).max_by(|&a, &b| m[a][c].norm().total_cmp(&m[b][c].norm()));
        let Some(p) = pivot else { break };
        if m[p][c].norm() <= tol {
            continue;
        }
        m.swap(rank, p);
        let pv = m[rank][c];
        for r in rank + 1..m.len() {
            let f = m[r][c] / pv;
            if f != C64::zero() {
                for k in c..ncols {
                    let sub = f * m[rank][k];
                    m[r][k] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}
