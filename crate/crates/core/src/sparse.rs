//! Sparse linear algebra: triplet assembly into CSR, sparse LU with partial
//! pivoting (Gilbert-Peierls), and restarted GMRES preconditioned with ILU(0).
//!
//! The Newton/Picard systems assembled by the flow modules are nonsymmetric,
//! so nothing here assumes symmetry.

use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};

/// Systems at or below this many unknowns are solved directly by default;
/// larger ones use preconditioned GMRES (with a direct fallback if the
/// iteration stalls). Beyond this size the fill of the banded-profile LU on
/// surface-mesh systems outweighs the Krylov iteration cost.
pub const DIRECT_SOLVER_LIMIT: usize = 2_000;

const NONE: usize = usize::MAX;

/// Square sparse matrix in compressed-row form.
#[derive(Clone, Debug)]
pub struct CsrMatrix<S> {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<S>,
}

/// Assembled linear system `A x = b`.
#[derive(Clone, Debug)]
pub struct SparseSystem<S> {
    pub matrix: CsrMatrix<S>,
    pub rhs: Vec<S>,
}

/// Linear solver selection for the time-stepping modules.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LinearSolver {
    Direct,
    Iterative,
    /// Direct at or below [`DIRECT_SOLVER_LIMIT`] unknowns, iterative above.
    #[default]
    Auto,
}

impl<S: Scalar> CsrMatrix<S> {
    /// Builds an `n x n` matrix from `(row, col, value)` triplets; duplicate
    /// entries are summed (finite element assembly semantics).
    ///
    /// Triplets are reduced in a canonical order (sorted by row, column and
    /// value), so permutations of the input produce bitwise-identical
    /// matrices.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, S)]) -> Result<Self> {
        for &(r, c, v) in triplets {
            if r >= n || c >= n {
                return Err(Error::EntryOutOfRange { row: r, col: c, dim: n });
            }
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { row: r, col: c });
            }
        }
        let mut sorted = triplets.to_vec();
        sorted.sort_by(|a, b| {
            (a.0, a.1)
                .cmp(&(b.0, b.1))
                .then_with(|| a.2.partial_cmp(&b.2).expect("finite values"))
        });

        let mut counts = vec![0usize; n];
        let mut col_idx: Vec<usize> = Vec::with_capacity(sorted.len());
        let mut values: Vec<S> = Vec::with_capacity(sorted.len());
        let mut prev: Option<(usize, usize)> = None;
        for &(r, c, v) in &sorted {
            if prev == Some((r, c)) {
                let last = values.last_mut().expect("previous entry exists");
                *last = *last + v;
            } else {
                col_idx.push(c);
                values.push(v);
                counts[r] += 1;
                prev = Some((r, c));
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            if counts[i] == 0 {
                return Err(Error::EmptyRow(i));
            }
            row_ptr[i + 1] = row_ptr[i] + counts[i];
        }
        Ok(Self { n, row_ptr, col_idx, values })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, S)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi].iter().copied().zip(self.values[lo..hi].iter().copied())
    }

    pub fn matvec(&self, x: &[S]) -> Vec<S> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).fold(S::zero(), |acc, (j, v)| acc + v * x[j]))
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> S {
        (0..self.n)
            .map(|i| self.row(i).fold(S::zero(), |acc, (_, v)| acc + v.abs()))
            .fold(S::zero(), S::max)
    }

    fn to_csc(&self) -> Csc<S> {
        let n = self.n;
        let mut col_ptr = vec![0usize; n + 1];
        for &c in &self.col_idx {
            col_ptr[c + 1] += 1;
        }
        for i in 0..n {
            col_ptr[i + 1] += col_ptr[i];
        }
        let mut next = col_ptr.clone();
        let mut row_idx = vec![0usize; self.nnz()];
        let mut values = vec![S::zero(); self.nnz()];
        for r in 0..n {
            for (c, v) in self.row(r) {
                let slot = next[c];
                row_idx[slot] = r;
                values[slot] = v;
                next[c] += 1;
            }
        }
        Csc { col_ptr, row_idx, values }
    }

    #[cfg(test)]
    fn pattern(&self) -> (&[usize], &[usize]) {
        (&self.row_ptr, &self.col_idx)
    }

    #[cfg(test)]
    fn raw_values(&self) -> &[S] {
        &self.values
    }
}

struct Csc<S> {
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<S>,
}

/// LU factors of a row-permuted, symmetrically pre-ordered matrix.
pub struct LuFactors<S> {
    n: usize,
    /// Fill-reducing symmetric pre-order: `perm[new] = old`.
    perm: Vec<usize>,
    /// Pivot row (pre-ordered indexing) of each elimination step.
    prow: Vec<usize>,
    l_colptr: Vec<usize>,
    l_rows: Vec<usize>,
    l_vals: Vec<S>,
    u_colptr: Vec<usize>,
    u_rows: Vec<usize>,
    u_vals: Vec<S>,
    u_diag: Vec<S>,
}

impl<S: Scalar> LuFactors<S> {
    /// Sparse left-looking LU with partial pivoting after a reverse
    /// Cuthill-McKee pre-ordering of the pattern.
    pub fn factorize(a: &CsrMatrix<S>) -> Result<Self> {
        let n = a.dim();
        let perm = reverse_cuthill_mckee(a);
        let mut inv_perm = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv_perm[old] = new;
        }
        // Pre-ordered CSC: entry (i, j) is A[perm[i], perm[j]].
        let csc = {
            let mut triplets: Vec<(usize, usize, S)> = Vec::with_capacity(a.nnz());
            for r in 0..n {
                for (c, v) in a.row(r) {
                    triplets.push((inv_perm[r], inv_perm[c], v));
                }
            }
            CsrMatrix::from_triplets(n, &triplets)?.to_csc()
        };

        // pinv[row] = elimination step at which `row` became the pivot.
        let mut pinv = vec![NONE; n];
        let mut prow = vec![NONE; n];
        let mut l_colptr = vec![0usize; n + 1];
        let mut l_rows: Vec<usize> = Vec::new();
        let mut l_vals: Vec<S> = Vec::new();
        let mut u_colptr = vec![0usize; n + 1];
        let mut u_rows: Vec<usize> = Vec::new();
        let mut u_vals: Vec<S> = Vec::new();
        let mut u_diag = vec![S::zero(); n];

        let mut x = vec![S::zero(); n];
        let mut mark = vec![0u32; n];
        let mut generation = 0u32;
        let mut topo: Vec<usize> = Vec::with_capacity(n);
        let mut stack: Vec<(usize, usize)> = Vec::new();

        for k in 0..n {
            generation += 1;
            topo.clear();
            // DFS from the pattern of column k through the columns of L;
            // `topo` ends up in postorder (dependencies before dependents
            // when traversed in reverse).
            for idx in csc.col_ptr[k]..csc.col_ptr[k + 1] {
                let start = csc.row_idx[idx];
                if mark[start] == generation {
                    continue;
                }
                mark[start] = generation;
                stack.push((start, 0));
                while let Some(&mut (node, ref mut child)) = stack.last_mut() {
                    let step = pinv[node];
                    let (lo, hi) = if step == NONE {
                        (0, 0)
                    } else {
                        (l_colptr[step], l_colptr[step + 1])
                    };
                    let mut descended = false;
                    while lo + *child < hi {
                        let next = l_rows[lo + *child];
                        *child += 1;
                        if mark[next] != generation {
                            mark[next] = generation;
                            stack.push((next, 0));
                            descended = true;
                            break;
                        }
                    }
                    if !descended {
                        topo.push(node);
                        stack.pop();
                    }
                }
            }

            for idx in csc.col_ptr[k]..csc.col_ptr[k + 1] {
                x[csc.row_idx[idx]] = csc.values[idx];
            }
            // Sparse lower-triangular solve in topological order.
            for &node in topo.iter().rev() {
                let step = pinv[node];
                if step == NONE {
                    continue;
                }
                let xi = x[node];
                if xi == S::zero() {
                    continue;
                }
                for p in l_colptr[step]..l_colptr[step + 1] {
                    x[l_rows[p]] = x[l_rows[p]] - l_vals[p] * xi;
                }
            }

            // Partial pivoting over rows not yet assigned to a pivot.
            let mut pivot_row = NONE;
            let mut pivot_abs = S::zero();
            for &node in &topo {
                if pinv[node] == NONE {
                    let a = x[node].abs();
                    if pivot_row == NONE || a > pivot_abs {
                        pivot_row = node;
                        pivot_abs = a;
                    }
                }
            }
            if pivot_row == NONE || pivot_abs == S::zero() || !pivot_abs.is_finite() {
                return Err(Error::SingularFactorization {
                    column: k,
                    pivot: pivot_abs.to_f64().unwrap_or(0.0),
                });
            }
            let pivot = x[pivot_row];
            pinv[pivot_row] = k;
            prow[k] = pivot_row;
            u_diag[k] = pivot;

            for &node in &topo {
                let v = x[node];
                x[node] = S::zero();
                if node == pivot_row || v == S::zero() {
                    continue;
                }
                match pinv[node] {
                    NONE => {
                        l_rows.push(node);
                        l_vals.push(v / pivot);
                    }
                    step => {
                        u_rows.push(step);
                        u_vals.push(v);
                    }
                }
            }
            l_colptr[k + 1] = l_rows.len();
            u_colptr[k + 1] = u_rows.len();
        }

        Ok(Self {
            n,
            perm,
            prow,
            l_colptr,
            l_rows,
            l_vals,
            u_colptr,
            u_rows,
            u_vals,
            u_diag,
        })
    }

    pub fn solve(&self, b: &[S]) -> Vec<S> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut work: Vec<S> = (0..n).map(|i| b[self.perm[i]]).collect();
        // Forward substitution L y = P b (unit diagonal, columns hold
        // original pre-ordered row indices).
        let mut y = vec![S::zero(); n];
        for k in 0..n {
            let yk = work[self.prow[k]];
            y[k] = yk;
            if yk != S::zero() {
                for p in self.l_colptr[k]..self.l_colptr[k + 1] {
                    work[self.l_rows[p]] = work[self.l_rows[p]] - self.l_vals[p] * yk;
                }
            }
        }
        // Backward substitution U z = y, column-oriented.
        for k in (0..n).rev() {
            let zk = y[k] / self.u_diag[k];
            y[k] = zk;
            if zk != S::zero() {
                for p in self.u_colptr[k]..self.u_colptr[k + 1] {
                    let c = self.u_rows[p];
                    y[c] = y[c] - self.u_vals[p] * zk;
                }
            }
        }
        let mut out = vec![S::zero(); n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = y[new];
        }
        out
    }
}

/// Reverse Cuthill-McKee ordering of the symmetrized pattern; returns
/// `perm[new] = old`.
fn reverse_cuthill_mckee<S: Scalar>(a: &CsrMatrix<S>) -> Vec<usize> {
    let n = a.dim();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for r in 0..n {
        for (c, _) in a.row(r) {
            if c != r {
                adj[r].push(c);
                adj[c].push(r);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();

    let mut visited = vec![false; n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut queue = std::collections::VecDeque::new();
    let mut frontier: Vec<usize> = Vec::new();
    for start in 0..n {
        if visited[start] {
            continue;
        }
        // Seed each connected component from its minimum-degree vertex.
        let mut component = vec![start];
        visited[start] = true;
        let mut qi = 0;
        while qi < component.len() {
            let v = component[qi];
            qi += 1;
            for &w in &adj[v] {
                if !visited[w] {
                    visited[w] = true;
                    component.push(w);
                }
            }
        }
        let mut seed = start;
        for &v in &component {
            visited[v] = false;
            if degree[v] < degree[seed] {
                seed = v;
            }
        }

        visited[seed] = true;
        queue.push_back(seed);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            frontier.clear();
            frontier.extend(adj[v].iter().copied().filter(|&w| !visited[w]));
            frontier.sort_unstable_by_key(|&w| degree[w]);
            for &w in &frontier {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// ILU(0): incomplete LU restricted to the sparsity pattern of `A`.
pub struct Ilu0<S> {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<S>,
    diag_pos: Vec<usize>,
}

impl<S: Scalar> Ilu0<S> {
    pub fn factor(a: &CsrMatrix<S>) -> Result<Self> {
        let n = a.dim();
        let row_ptr = a.row_ptr.clone();
        let col_idx = a.col_idx.clone();
        let mut values = a.values.clone();
        let mut diag_pos = vec![NONE; n];
        for i in 0..n {
            for p in row_ptr[i]..row_ptr[i + 1] {
                if col_idx[p] == i {
                    diag_pos[i] = p;
                }
            }
            if diag_pos[i] == NONE {
                return Err(Error::SingularFactorization { column: i, pivot: 0.0 });
            }
        }
        // A vanishing pivot only degrades the preconditioner, never the
        // solution, so it is replaced rather than reported.
        let small = real::<S>(1e-30);
        let mut pos_of_col = vec![NONE; n];
        for i in 0..n {
            for p in row_ptr[i]..row_ptr[i + 1] {
                pos_of_col[col_idx[p]] = p;
            }
            for p in row_ptr[i]..row_ptr[i + 1] {
                let k = col_idx[p];
                if k >= i {
                    break;
                }
                let mut pivot = values[diag_pos[k]];
                if pivot.abs() < small {
                    pivot = small;
                }
                let lik = values[p] / pivot;
                values[p] = lik;
                for q in (diag_pos[k] + 1)..row_ptr[k + 1] {
                    let slot = pos_of_col[col_idx[q]];
                    if slot != NONE && slot > p && slot < row_ptr[i + 1] {
                        values[slot] = values[slot] - lik * values[q];
                    }
                }
            }
            for p in row_ptr[i]..row_ptr[i + 1] {
                pos_of_col[col_idx[p]] = NONE;
            }
        }
        Ok(Self { n, row_ptr, col_idx, values, diag_pos })
    }

    /// Applies `(LU)^{-1} v`.
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        let n = self.n;
        let mut y = v.to_vec();
        for i in 0..n {
            let mut acc = y[i];
            for p in self.row_ptr[i]..self.diag_pos[i] {
                acc = acc - self.values[p] * y[self.col_idx[p]];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for p in (self.diag_pos[i] + 1)..self.row_ptr[i + 1] {
                acc = acc - self.values[p] * y[self.col_idx[p]];
            }
            let mut d = self.values[self.diag_pos[i]];
            if d == S::zero() {
                d = real::<S>(1e-30);
            }
            y[i] = acc / d;
        }
        y
    }
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

fn norm2<S: Scalar>(a: &[S]) -> S {
    dot(a, a).sqrt()
}

/// Right-preconditioned restarted GMRES. Returns the solution and the total
/// number of inner iterations.
pub fn gmres<S: Scalar>(
    a: &CsrMatrix<S>,
    b: &[S],
    precond: &Ilu0<S>,
    tol: S,
    max_iters: usize,
) -> Result<(Vec<S>, usize)> {
    let n = a.dim();
    assert_eq!(b.len(), n);
    let restart = 60.min(n);
    let bnorm = norm2(b);
    if bnorm == S::zero() {
        return Ok((vec![S::zero(); n], 0));
    }
    let target = tol * bnorm;

    let mut x = vec![S::zero(); n];
    let mut total_iters = 0usize;

    loop {
        let ax = a.matvec(&x);
        let r: Vec<S> = b.iter().zip(&ax).map(|(&bi, &axi)| bi - axi).collect();
        let beta = norm2(&r);
        if beta <= target {
            return Ok((x, total_iters));
        }
        if total_iters >= max_iters {
            return Err(Error::KrylovStalled {
                iterations: total_iters,
                tol: tol.to_f64().unwrap_or(f64::NAN),
                residual: (beta / bnorm).to_f64().unwrap_or(f64::NAN),
            });
        }

        let mut basis: Vec<Vec<S>> = vec![r.iter().map(|&v| v / beta).collect()];
        let mut h = vec![vec![S::zero(); restart]; restart + 1];
        let mut cs = vec![S::zero(); restart];
        let mut sn = vec![S::zero(); restart];
        let mut g = vec![S::zero(); restart + 1];
        g[0] = beta;

        let mut inner = 0usize;
        for j in 0..restart {
            if total_iters >= max_iters {
                break;
            }
            total_iters += 1;
            inner = j + 1;
            let z = precond.apply(&basis[j]);
            let mut w = a.matvec(&z);
            for i in 0..=j {
                let hij = dot(&w, &basis[i]);
                h[i][j] = hij;
                for (wk, vk) in w.iter_mut().zip(&basis[i]) {
                    *wk = *wk - hij * *vk;
                }
            }
            let hj1 = norm2(&w);
            h[j + 1][j] = hj1;
            basis.push(if hj1 > S::zero() {
                w.iter().map(|&v| v / hj1).collect()
            } else {
                vec![S::zero(); n]
            });
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let denom = (h[j][j] * h[j][j] + h[j + 1][j] * h[j + 1][j]).sqrt();
            if denom == S::zero() {
                cs[j] = S::one();
                sn[j] = S::zero();
            } else {
                cs[j] = h[j][j] / denom;
                sn[j] = h[j + 1][j] / denom;
            }
            h[j][j] = denom;
            h[j + 1][j] = S::zero();
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            if g[j + 1].abs() <= target {
                break;
            }
        }

        let m = inner;
        let mut y = vec![S::zero(); m];
        for i in (0..m).rev() {
            let mut acc = g[i];
            for k in (i + 1)..m {
                acc = acc - h[i][k] * y[k];
            }
            if h[i][i] == S::zero() {
                return Err(Error::KrylovStalled {
                    iterations: total_iters,
                    tol: tol.to_f64().unwrap_or(f64::NAN),
                    residual: g[m].abs().to_f64().unwrap_or(f64::NAN),
                });
            }
            y[i] = acc / h[i][i];
        }
        let mut update = vec![S::zero(); n];
        for (k, &yk) in y.iter().enumerate() {
            for (u, v) in update.iter_mut().zip(&basis[k]) {
                *u = *u + yk * *v;
            }
        }
        let update = precond.apply(&update);
        for (xi, ui) in x.iter_mut().zip(&update) {
            *xi = *xi + *ui;
        }
    }
}

impl<S: Scalar> SparseSystem<S> {
    pub fn new(matrix: CsrMatrix<S>, rhs: Vec<S>) -> Self {
        assert_eq!(matrix.dim(), rhs.len());
        Self { matrix, rhs }
    }

    /// Sparse LU solve.
    pub fn solve_direct(&self) -> Result<Vec<S>> {
        let lu = LuFactors::factorize(&self.matrix)?;
        Ok(lu.solve(&self.rhs))
    }

    /// ILU(0)-preconditioned GMRES solve with relative tolerance `tol`.
    pub fn solve_krylov(&self, tol: S, max_iters: usize) -> Result<Vec<S>> {
        let precond = Ilu0::factor(&self.matrix)?;
        let (x, _) = gmres(&self.matrix, &self.rhs, &precond, tol, max_iters)?;
        Ok(x)
    }

    /// Dispatches on [`LinearSolver`]; `Auto` switches on system size and
    /// falls back to the direct solver if the iteration stalls.
    pub fn solve(&self, kind: LinearSolver) -> Result<Vec<S>> {
        match kind {
            LinearSolver::Direct => self.solve_direct(),
            LinearSolver::Iterative => self.solve_krylov(real::<S>(1e-12), 40 * self.matrix.dim()),
            LinearSolver::Auto => {
                if self.matrix.dim() <= DIRECT_SOLVER_LIMIT {
                    self.solve_direct()
                } else {
                    match self.solve_krylov(real::<S>(1e-12), 40 * self.matrix.dim()) {
                        Ok(x) => Ok(x),
                        Err(Error::KrylovStalled { .. }) => self.solve_direct(),
                        Err(e) => Err(e),
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense Gaussian elimination with partial pivoting; the reference
    /// solver the sparse paths are checked against.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
            a.swap(k, piv);
            b.swap(k, piv);
            assert!(a[k][k].abs() > 0.0, "singular test matrix");
            for i in (k + 1)..n {
                let f = a[i][k] / a[k][k];
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in (i + 1)..n {
                acc -= a[i][j] * x[j];
            }
            x[i] = acc / a[i][i];
        }
        x
    }

    fn random_dd_system(rng: &mut ChaCha8Rng, n: usize) -> (Vec<(usize, usize, f64)>, Vec<f64>) {
        let mut triplets = Vec::new();
        let mut diag = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.gen_bool(0.4) {
                    let v: f64 = rng.gen_range(-1.0..1.0);
                    triplets.push((i, j, v));
                    diag[i] += v.abs();
                }
            }
        }
        for i in 0..n {
            triplets.push((i, i, diag[i] + 1.0 + rng.gen_range(0.0..1.0)));
        }
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        (triplets, b)
    }

    #[test]
    fn duplicate_triplets_sum() {
        let m = CsrMatrix::from_triplets(1, &[(0, 0, 1.0), (0, 0, 2.0)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.matvec(&[1.0]), vec![3.0]);
    }

    #[test]
    fn empty_row_is_rejected() {
        let err = CsrMatrix::<f64>::from_triplets(2, &[(0, 0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::EmptyRow(1)));
        let err = CsrMatrix::<f64>::from_triplets(1, &[]).unwrap_err();
        assert!(matches!(err, Error::EmptyRow(0)));
    }

    #[test]
    fn out_of_range_and_non_finite_rejected() {
        let err = CsrMatrix::from_triplets(2, &[(0, 2, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::EntryOutOfRange { .. }));
        let err = CsrMatrix::from_triplets(2, &[(0, 0, f64::NAN)]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteEntry { .. }));
    }

    #[test]
    fn assembly_is_order_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (mut triplets, b) = random_dd_system(&mut rng, 12);
        let m1 = CsrMatrix::from_triplets(12, &triplets).unwrap();
        let x1 = SparseSystem::new(m1.clone(), b.clone()).solve_direct().unwrap();
        for i in (1..triplets.len()).rev() {
            let j = rng.gen_range(0..=i);
            triplets.swap(i, j);
        }
        let m2 = CsrMatrix::from_triplets(12, &triplets).unwrap();
        assert_eq!(m1.pattern(), m2.pattern());
        for (a, b) in m1.raw_values().iter().zip(m2.raw_values()) {
            assert_eq!(a.to_bits(), b.to_bits(), "canonical assembly must be bitwise stable");
        }
        let x2 = SparseSystem::new(m2, b).solve_direct().unwrap();
        for (a, b) in x1.iter().zip(&x2) {
            assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
        }
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let triplets: Vec<_> = (0..5).map(|i| (i, i, 1.0)).collect();
        let m = CsrMatrix::from_triplets(5, &triplets).unwrap();
        let b = vec![1.0, -2.0, 3.0, 0.5, 9.0];
        let x = SparseSystem::new(m, b.clone()).solve_direct().unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn direct_matches_dense_oracle_on_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..20 {
            let n = 10;
            let (triplets, b) = random_dd_system(&mut rng, n);
            let m = CsrMatrix::from_triplets(n, &triplets).unwrap();
            let mut dense = vec![vec![0.0; n]; n];
            for &(r, c, v) in &triplets {
                dense[r][c] += v;
            }
            let x_ref = dense_solve(dense, b.clone());
            let x = SparseSystem::new(m, b).solve_direct().unwrap();
            for (a, r) in x.iter().zip(&x_ref) {
                assert!((a - r).abs() <= 1e-12 * r.abs().max(1.0), "trial {trial}: {a} vs {r}");
            }
        }
    }

    #[test]
    fn direct_residual_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 40;
        let (triplets, b) = random_dd_system(&mut rng, n);
        let m = CsrMatrix::from_triplets(n, &triplets).unwrap();
        let sys = SparseSystem::new(m, b);
        let x = sys.solve_direct().unwrap();
        let ax = sys.matrix.matvec(&x);
        let res = ax
            .iter()
            .zip(&sys.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let xinf = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let binf = sys.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(res <= 1e-10 * (sys.matrix.norm_inf() * xinf + binf));
    }

    #[test]
    fn dirichlet_laplacian_quadratic_solution() {
        // -u'' = 2 on (0,1), u(0) = u(1) = 0  =>  u(x) = x(1-x).
        let n = 33;
        let h = 1.0 / (n as f64 - 1.0);
        let mut triplets = Vec::new();
        let mut b = vec![0.0; n];
        triplets.push((0, 0, 1.0));
        triplets.push((n - 1, n - 1, 1.0));
        for i in 1..n - 1 {
            triplets.push((i, i - 1, -1.0 / (h * h)));
            triplets.push((i, i, 2.0 / (h * h)));
            triplets.push((i, i + 1, -1.0 / (h * h)));
            b[i] = 2.0;
        }
        let m = CsrMatrix::from_triplets(n, &triplets).unwrap();
        let x = SparseSystem::new(m, b).solve_direct().unwrap();
        for (i, &xi) in x.iter().enumerate() {
            let t = i as f64 * h;
            assert!((xi - t * (1.0 - t)).abs() <= 1e-10, "node {i}");
        }
    }

    #[test]
    fn singular_matrix_reports_column() {
        let triplets = vec![(0, 0, 1.0), (0, 1, 1.0), (1, 0, 2.0), (1, 1, 2.0)];
        let m = CsrMatrix::from_triplets(2, &triplets).unwrap();
        let err = SparseSystem::new(m, vec![1.0, 2.0]).solve_direct().unwrap_err();
        assert!(matches!(err, Error::SingularFactorization { .. }), "{err}");
    }

    #[test]
    fn gmres_identity_converges_in_one_iteration() {
        let triplets: Vec<(usize, usize, f64)> = (0..6).map(|i| (i, i, 1.0)).collect();
        let m = CsrMatrix::from_triplets(6, &triplets).unwrap();
        let b = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let pre = Ilu0::factor(&m).unwrap();
        let (x, iters) = gmres(&m, &b, &pre, 1e-12, 100).unwrap();
        assert_eq!(iters, 1);
        for (a, r) in x.iter().zip(&b) {
            assert!((a - r).abs() <= 1e-12_f64);
        }
    }

    #[test]
    fn gmres_agrees_with_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 50;
        let (triplets, b) = random_dd_system(&mut rng, n);
        let m = CsrMatrix::from_triplets(n, &triplets).unwrap();
        let sys = SparseSystem::new(m, b);
        let xd = sys.solve_direct().unwrap();
        let xk = sys.solve_krylov(1e-12, 10_000).unwrap();
        for (a, r) in xk.iter().zip(&xd) {
            assert!((a - r).abs() <= 1e-8 * r.abs().max(1.0));
        }
    }
}
