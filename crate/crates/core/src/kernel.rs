//! Fixed-size arithmetic for algebras of dimension at most 3 over `F_p` with
//! `p < 256`. Everything exhaustive (isomorphism search, extension
//! enumeration, orbit sweeps) runs here instead of on [`FieldValue`]s.

use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{inv_mod, FieldSpec, FieldValue};
use crate::msc::{Matrix, StructureMatrix};

/// Largest modulus the kernel handles.
pub const MAX_KERNEL_PRIME: u32 = 251;
pub const MAX_DIM: usize = 3;

/// Structure constants packed as `c[(i·n + j)·n + k]` = coefficient of `e_k` in `e_i e_j`.
pub type Key = [u8; 27];

/// An `n × n` matrix over `F_p`, row-major in the first `n²` slots.
pub type Grid = [u8; 9];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpAlg {
    n: u8,
    p: u8,
    c: Key,
}

impl FpAlg {
    pub fn zero(n: usize, p: u32) -> Self {
        assert!(n <= MAX_DIM && p <= MAX_KERNEL_PRIME);
        FpAlg { n: n as u8, p: p as u8, c: [0; 27] }
    }

    pub fn from_structure(a: &StructureMatrix) -> Result<Self> {
        let p = a.spec().require_finite()?;
        if p > MAX_KERNEL_PRIME || a.dim() > MAX_DIM {
            return Err(Error::UnsupportedField(format!(
                "fast kernel needs p <= {MAX_KERNEL_PRIME} and n <= {MAX_DIM}"
            )));
        }
        let n = a.dim();
        let mut out = FpAlg::zero(n, p);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.set(i, j, k, a.constant(i, j, k).as_residue().expect("finite field"));
                }
            }
        }
        Ok(out)
    }

    pub fn to_structure(&self) -> StructureMatrix {
        let spec = FieldSpec::prime(self.p as u64).expect("kernel prime is valid");
        let n = self.dim();
        let mut m = Matrix::zeros(spec, n, n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    m.set(k, i * n + j, FieldValue::residue_unchecked(self.p(), self.get(i, j, k)));
                }
            }
        }
        StructureMatrix::new(m).expect("n x n^2")
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    pub fn p(&self) -> u32 {
        self.p as u32
    }

    pub fn key(&self) -> &Key {
        &self.c
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> u32 {
        let n = self.n as usize;
        self.c[(i * n + j) * n + k] as u32
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: u32) {
        let n = self.n as usize;
        self.c[(i * n + j) * n + k] = (v % self.p as u32) as u8;
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0)
    }

    /// `(e_i e_j) e_k = e_i (e_j e_k)` on every basis triple.
    pub fn is_associative(&self) -> bool {
        let n = self.dim();
        let p = self.p() as u64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for r in 0..n {
                        let mut lhs = 0u64;
                        let mut rhs = 0u64;
                        for s in 0..n {
                            lhs += (self.get(i, j, s) * self.get(s, k, r)) as u64;
                            rhs += (self.get(j, k, s) * self.get(i, s, r)) as u64;
                        }
                        if lhs % p != rhs % p {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Coordinates of `x · y`.
    #[inline]
    pub fn mul_vec(&self, x: &[u8; 3], y: &[u8; 3]) -> [u8; 3] {
        let n = self.dim();
        let p = self.p() as u64;
        let mut out = [0u8; 3];
        for (k, slot) in out.iter_mut().enumerate().take(n) {
            let mut acc = 0u64;
            for a in 0..n {
                if x[a] == 0 {
                    continue;
                }
                let mut inner = 0u64;
                for b in 0..n {
                    inner += y[b] as u64 * self.get(a, b, k) as u64;
                }
                acc += x[a] as u64 * (inner % p);
            }
            *slot = (acc % p) as u8;
        }
        out
    }

    /// `g⁻¹ A (g ⊗ g)`; `inv` must be the inverse of `g`.
    pub fn act(&self, g: &Grid, inv: &Grid) -> FpAlg {
        let n = self.dim();
        let p = self.p() as u64;
        // u[i][b][c] = Σ_a g[a][i] A_ab^c
        let mut u = [0u64; 27];
        for i in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut acc = 0u64;
                    for a in 0..n {
                        acc += g[a * n + i] as u64 * self.get(a, b, c) as u64;
                    }
                    u[(i * n + b) * n + c] = acc % p;
                }
            }
        }
        // t[i][j][c] = Σ_b g[b][j] u[i][b][c]
        let mut t = [0u64; 27];
        for i in 0..n {
            for j in 0..n {
                for c in 0..n {
                    let mut acc = 0u64;
                    for b in 0..n {
                        acc += g[b * n + j] as u64 * u[(i * n + b) * n + c];
                    }
                    t[(i * n + j) * n + c] = acc % p;
                }
            }
        }
        let mut out = FpAlg { n: self.n, p: self.p, c: [0; 27] };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = 0u64;
                    for c in 0..n {
                        acc += inv[k * n + c] as u64 * t[(i * n + j) * n + c];
                    }
                    out.c[(i * n + j) * n + k] = (acc % p) as u8;
                }
            }
        }
        out
    }
}

/// Inverse of an `n × n` grid over `F_p`, if it is invertible.
pub fn invert(n: usize, p: u32, g: &Grid) -> Option<Grid> {
    let mut a = [[0u32; 6]; 3];
    for r in 0..n {
        for c in 0..n {
            a[r][c] = g[r * n + c] as u32;
        }
        a[r][n + r] = 1;
    }
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        let s = inv_mod(a[col][col], p);
        for c in 0..2 * n {
            a[col][c] = a[col][c] * s % p;
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let f = a[r][col];
                for c in 0..2 * n {
                    a[r][c] = (a[r][c] + (p - f) * a[col][c]) % p;
                }
            }
        }
    }
    let mut out = [0u8; 9];
    for r in 0..n {
        for c in 0..n {
            out[r * n + c] = a[r][n + c] as u8;
        }
    }
    Some(out)
}

/// Rank of up to three vectors of length `n`.
pub fn rank(n: usize, p: u32, vs: &[[u8; 3]]) -> usize {
    let mut rows: Vec<[u32; 3]> = vs.iter().map(|v| [v[0] as u32, v[1] as u32, v[2] as u32]).collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else { continue };
        rows.swap(rank, piv);
        let s = inv_mod(rows[rank][col], p);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let f = rows[r][col] * s % p;
                for c in 0..n {
                    rows[r][c] = (rows[r][c] + (p - f) * rows[rank][c]) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn grid_to_matrix(n: usize, p: u32, g: &Grid) -> Matrix {
    let spec = FieldSpec::prime(p as u64).expect("kernel prime is valid");
    let data = g[..n * n].iter().map(|&v| FieldValue::residue_unchecked(p, v as u32)).collect();
    Matrix::new(spec, n, n, data).expect("n x n")
}

pub fn grid_from_matrix(m: &Matrix) -> Result<Grid> {
    let p = m.spec().require_finite()?;
    if p > MAX_KERNEL_PRIME || m.rows() > MAX_DIM || m.rows() != m.cols() {
        return Err(Error::UnsupportedField(format!("fast kernel needs square n <= {MAX_DIM}, p <= {MAX_KERNEL_PRIME}")));
    }
    let mut g = [0u8; 9];
    for (slot, v) in g.iter_mut().zip(m.entries()) {
        *slot = v.as_residue().expect("finite field") as u8;
    }
    Ok(g)
}

/// All vectors of `F_p^n` in lexicographic order.
pub fn vectors(n: usize, p: u32) -> impl Iterator<Item = [u8; 3]> + Clone {
    let total = (p as usize).pow(n as u32);
    (0..total).map(move |mut idx| {
        let mut v = [0u8; 3];
        for slot in v[..n].iter_mut().rev() {
            *slot = (idx % p as usize) as u8;
            idx /= p as usize;
        }
        v
    })
}

/// Visit every invertible `n × n` grid whose first row is `first`, in
/// row-major lexicographic order, with its inverse.
pub fn for_each_gl_with_first_row<F>(n: usize, p: u32, first: [u8; 3], mut f: F) -> ControlFlow<()>
where
    F: FnMut(&Grid, &Grid) -> ControlFlow<()>,
{
    if rank(n, p, &[first]) == 0 {
        return ControlFlow::Continue(());
    }
    let mut rows = [first, [0; 3], [0; 3]];
    gl_rows(n, p, &mut rows, 1, &mut f)
}

fn gl_rows<F>(n: usize, p: u32, rows: &mut [[u8; 3]; 3], level: usize, f: &mut F) -> ControlFlow<()>
where
    F: FnMut(&Grid, &Grid) -> ControlFlow<()>,
{
    if level == n {
        let mut g = [0u8; 9];
        for r in 0..n {
            g[r * n..r * n + n].copy_from_slice(&rows[r][..n]);
        }
        let inv = invert(n, p, &g).expect("rows are independent");
        return f(&g, &inv);
    }
    for v in vectors(n, p) {
        rows[level] = v;
        if rank(n, p, &rows[..=level]) == level + 1 {
            gl_rows(n, p, rows, level + 1, f)?;
        }
    }
    ControlFlow::Continue(())
}

/// Every invertible grid in row-major lexicographic order.
pub fn for_each_gl<F>(n: usize, p: u32, mut f: F) -> ControlFlow<()>
where
    F: FnMut(&Grid, &Grid) -> ControlFlow<()>,
{
    for first in vectors(n, p) {
        for_each_gl_with_first_row(n, p, first, &mut f)?;
    }
    ControlFlow::Continue(())
}

/// `|GL_n(F_p)|`.
pub fn gl_order(n: usize, p: u64) -> u64 {
    let pn = p.pow(n as u32);
    (0..n as u32).map(|i| pn - p.pow(i)).product()
}

/// Lexicographically least (row-major) `g` with `act(g, a) = b`, by a plain
/// sweep of the whole group. Slow; kept to audit [`find_witness`].
pub fn sweep_witness(a: &FpAlg, b: &FpAlg) -> Option<Grid> {
    let (n, p) = (a.dim(), a.p());
    let firsts: Vec<[u8; 3]> = vectors(n, p).collect();
    firsts
        .par_iter()
        .map(|&first| {
            let mut found = None;
            let _ = for_each_gl_with_first_row(n, p, first, |g, inv| {
                if a.act(g, inv) == *b {
                    found = Some(*g);
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            found
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .next()
}

/// One step of the column search: which column is fixed next and how.
#[derive(Clone, Debug)]
struct Level {
    col: usize,
    /// `(i, j)` such that `e_i e_j` (in `b`) pins the new column directly.
    solve: Option<(usize, usize)>,
    /// Products `(i, j)` whose equation becomes fully checkable here.
    checks: Vec<(usize, usize)>,
}

fn support(b: &FpAlg, i: usize, j: usize) -> Vec<usize> {
    (0..b.dim()).filter(|&k| b.get(i, j, k) != 0).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out.sort();
    out
}

fn plan(b: &FpAlg) -> Vec<Level> {
    let n = b.dim();
    let mut best: Option<(usize, Vec<Level>)> = None;
    for order in permutations(n) {
        let mut levels = Vec::with_capacity(n);
        let mut assigned = vec![false; n];
        let mut checked = vec![false; n * n];
        let mut score = 0;
        for &m in &order {
            let mut solve = None;
            'find: for i in 0..n {
                for j in 0..n {
                    if assigned[i] && assigned[j] && b.get(i, j, m) != 0 {
                        if support(b, i, j).iter().all(|&k| assigned[k] || k == m) {
                            solve = Some((i, j));
                            break 'find;
                        }
                    }
                }
            }
            assigned[m] = true;
            let mut checks = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if !checked[i * n + j]
                        && assigned[i]
                        && assigned[j]
                        && support(b, i, j).iter().all(|&k| assigned[k])
                    {
                        checked[i * n + j] = true;
                        if solve != Some((i, j)) {
                            checks.push((i, j));
                        }
                    }
                }
            }
            score += solve.is_some() as usize;
            levels.push(Level { col: m, solve, checks });
        }
        if best.as_ref().map_or(true, |(s, _)| score > *s) {
            best = Some((score, levels));
        }
    }
    best.expect("at least one order").1
}

struct Search<'a> {
    a: &'a FpAlg,
    b: &'a FpAlg,
    levels: Vec<Level>,
    n: usize,
    p: u32,
}

impl Search<'_> {
    fn holds(&self, cols: &[[u8; 3]; 3], i: usize, j: usize) -> bool {
        let lhs = self.a.mul_vec(&cols[i], &cols[j]);
        let p = self.p as u64;
        (0..self.n).all(|r| {
            let rhs: u64 = (0..self.n).map(|k| self.b.get(i, j, k) as u64 * cols[k][r] as u64).sum();
            rhs % p == lhs[r] as u64
        })
    }

    fn pinned(&self, cols: &[[u8; 3]; 3], i: usize, j: usize, m: usize) -> [u8; 3] {
        let p = self.p as u64;
        let lhs = self.a.mul_vec(&cols[i], &cols[j]);
        let s = inv_mod(self.b.get(i, j, m), self.p) as u64;
        let mut out = [0u8; 3];
        for r in 0..self.n {
            let mut acc = lhs[r] as u64;
            for k in 0..self.n {
                if k != m {
                    acc += (p - self.b.get(i, j, k) as u64) * cols[k][r] as u64;
                }
            }
            out[r] = ((acc % p) * s % p) as u8;
        }
        out
    }

    fn grid(&self, cols: &[[u8; 3]; 3]) -> Grid {
        let n = self.n;
        let mut g = [0u8; 9];
        for r in 0..n {
            for c in 0..n {
                g[r * n + c] = cols[c][r];
            }
        }
        g
    }

    fn try_column(&self, cols: &mut [[u8; 3]; 3], depth: usize, v: [u8; 3], best: &mut Option<Grid>) {
        let level = &self.levels[depth];
        cols[level.col] = v;
        let placed: Vec<[u8; 3]> = self.levels[..=depth].iter().map(|l| cols[l.col]).collect();
        if rank(self.n, self.p, &placed) != depth + 1 {
            return;
        }
        if let Some((i, j)) = level.solve {
            // the pinning equation holds by construction, but only if it was solvable
            debug_assert!(self.holds(cols, i, j));
        }
        if !level.checks.iter().all(|&(i, j)| self.holds(cols, i, j)) {
            return;
        }
        if depth + 1 == self.n {
            let g = self.grid(cols);
            if best.map_or(true, |b| g < b) {
                *best = Some(g);
            }
            return;
        }
        self.descend(cols, depth + 1, best);
    }

    fn descend(&self, cols: &mut [[u8; 3]; 3], depth: usize, best: &mut Option<Grid>) {
        let level = &self.levels[depth];
        if let Some((i, j)) = level.solve {
            let v = self.pinned(cols, i, j, level.col);
            self.try_column(cols, depth, v, best);
        } else {
            for v in vectors(self.n, self.p) {
                self.try_column(cols, depth, v, best);
            }
        }
        cols[level.col] = [0; 3];
    }
}

/// Lexicographically least (row-major) `g` with `act(g, a) = b`.
///
/// Columns of `g` are fixed one at a time, since `A (g ⊗ g) = g B` reads
/// column-wise as `a(v_i, v_j) = Σ_k b_ij^k v_k`; a column is solved for
/// outright whenever some product of already-fixed columns determines it.
pub fn find_witness(a: &FpAlg, b: &FpAlg) -> Option<Grid> {
    assert_eq!((a.n, a.p), (b.n, b.p), "same dimension and field");
    let n = a.dim();
    let p = a.p();
    let search = Search { a, b, levels: plan(b), n, p };
    let firsts: Vec<[u8; 3]> = vectors(n, p).collect();
    firsts
        .par_iter()
        .map(|&v| {
            let mut cols = [[0u8; 3]; 3];
            let mut best = None;
            search.try_column(&mut cols, 0, v, &mut best);
            best
        })
        .reduce(|| None, |x, y| match (x, y) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        })
}
