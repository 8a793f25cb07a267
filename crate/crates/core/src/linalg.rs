//! Exact linear algebra over prime fields: sparse echelon forms, ranks,
//! kernels, and small dense matrices.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Arithmetic in Z/p for a prime `p < 2³¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp {
    pub p: u32,
}

impl Fp {
    pub fn new(p: u32) -> Result<Fp> {
        if p < 2 || !crate::coset::is_prime(p as u64) || p >= 1 << 31 {
            return Err(Error::NotPrime(p as u64));
        }
        Ok(Fp { p })
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        self.pow(a, self.p as u64 - 2)
    }

    pub fn from_i64(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    /// Representative in `(-p/2, p/2]`.
    pub fn symmetric(&self, a: u32) -> i64 {
        if a as u64 * 2 > self.p as u64 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

/// Sparse vector: `(index, value)` pairs sorted by index, no zero values.
pub type SparseVec = Vec<(u32, u32)>;

/// Sparse matrix over F_p stored by rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> SparseMatrix {
        SparseMatrix { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(f: &Fp, nrows: usize, ncols: usize, entries: &[(usize, usize, i64)]) -> SparseMatrix {
        let mut rows: Vec<Vec<(u32, u32)>> = vec![Vec::new(); nrows];
        for &(r, c, v) in entries {
            assert!(r < nrows && c < ncols, "triplet index out of range");
            rows[r].push((c as u32, f.from_i64(v)));
        }
        for row in &mut rows {
            *row = normalize(f, std::mem::take(row));
        }
        SparseMatrix { nrows, ncols, rows }
    }

    pub fn from_dense(f: &Fp, d: &[Vec<u32>], ncols: usize) -> SparseMatrix {
        let rows = d
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, &v)| v % f.p != 0).map(|(c, &v)| (c as u32, v % f.p)).collect())
            .collect();
        SparseMatrix { nrows: d.len(), ncols, rows }
    }

    pub fn to_dense(&self) -> Vec<Vec<u32>> {
        let mut d = vec![vec![0u32; self.ncols]; self.nrows];
        for (i, r) in self.rows.iter().enumerate() {
            for &(c, v) in r {
                d[i][c as usize] = v;
            }
        }
        d
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for &(c, v) in r {
                rows[c as usize].push((i as u32, v));
            }
        }
        SparseMatrix { nrows: self.ncols, ncols: self.nrows, rows }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// Row vector times matrix: `Σ v_i row_i`.
    pub fn left_mul(&self, f: &Fp, v: &SparseVec) -> SparseVec {
        let mut acc = vec![0u32; self.ncols];
        for &(i, a) in v {
            for &(c, b) in &self.rows[i as usize] {
                acc[c as usize] = f.add(acc[c as usize], f.mul(a, b));
            }
        }
        acc.into_iter().enumerate().filter(|(_, x)| *x != 0).map(|(c, x)| (c as u32, x)).collect()
    }
}

/// Sorts by index, merges duplicates and drops zeros.
pub fn normalize(f: &Fp, mut v: Vec<(u32, u32)>) -> SparseVec {
    v.sort_unstable_by_key(|e| e.0);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (c, x) in v {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 = f.add(last.1, x),
            _ => out.push((c, x)),
        }
    }
    out.retain(|e| e.1 != 0);
    out
}

/// Dense scratch accumulator reused across reductions.
struct Workspace {
    acc: Vec<u32>,
    touched: Vec<u32>,
    mark: Vec<bool>,
}

impl Workspace {
    fn new(n: usize) -> Workspace {
        Workspace { acc: vec![0; n], touched: Vec::new(), mark: vec![false; n] }
    }

    fn load(&mut self, v: &SparseVec) {
        for &(c, x) in v {
            self.touch(c);
            self.acc[c as usize] = x;
        }
    }

    #[inline]
    fn touch(&mut self, c: u32) {
        if !self.mark[c as usize] {
            self.mark[c as usize] = true;
            self.touched.push(c);
        }
    }

    fn drain(&mut self) -> SparseVec {
        let mut out = Vec::new();
        for &c in &self.touched {
            let x = self.acc[c as usize];
            if x != 0 {
                out.push((c, x));
            }
            self.acc[c as usize] = 0;
            self.mark[c as usize] = false;
        }
        self.touched.clear();
        out.sort_unstable_by_key(|e| e.0);
        out
    }
}

/// Outcome of inserting a row into an [`Echelon`].
#[derive(Debug, Clone, PartialEq)]
pub enum Insert {
    Pivot(u32),
    /// The row was dependent. With tracking enabled, the payload is the
    /// combination of inserted row ids that sums to zero.
    Dependent(SparseVec),
}

/// Incremental row echelon form. Each stored row has a pivot column whose
/// entry is 1 and which appears in no row stored earlier or later.
/// Reductions are applied in insertion order, so the form is only
/// semi-reduced for speed.
pub struct Echelon {
    f: Fp,
    ncols: usize,
    rows: Vec<SparseVec>,
    tags: Vec<SparseVec>,
    pivots: Vec<u32>,
    row_of_col: Vec<u32>,
    col_weight: Vec<u32>,
    track: Option<usize>,
    ws: Workspace,
    tag_ws: Option<Workspace>,
}

impl Echelon {
    pub fn new(f: Fp, ncols: usize) -> Echelon {
        Echelon {
            f,
            ncols,
            rows: Vec::new(),
            tags: Vec::new(),
            pivots: Vec::new(),
            row_of_col: vec![u32::MAX; ncols],
            col_weight: vec![0; ncols],
            track: None,
            ws: Workspace::new(ncols),
            tag_ws: None,
        }
    }

    /// Echelon that records, for every stored row, the combination of input
    /// rows (ids below `max_inputs`) producing it.
    pub fn tracked(f: Fp, ncols: usize, max_inputs: usize) -> Echelon {
        let mut e = Echelon::new(f, ncols);
        e.track = Some(max_inputs);
        e.tag_ws = Some(Workspace::new(max_inputs));
        e
    }

    /// Static column weights used for pivot choice (Markowitz-style).
    pub fn set_column_weights(&mut self, w: Vec<u32>) {
        assert_eq!(w.len(), self.ncols);
        self.col_weight = w;
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.row_of_col[c] != u32::MAX
    }

    pub fn pivot_columns(&self) -> &[u32] {
        &self.pivots
    }

    pub fn stored_entries(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// Appends a row known to contain no earlier pivot column, with entry 1
    /// at its pivot `pc`.
    fn push_reduced(&mut self, row: SparseVec, pc: u32) {
        debug_assert!(row.iter().all(|&(c, _)| !self.is_pivot(c as usize)));
        self.row_of_col[pc as usize] = self.rows.len() as u32;
        self.pivots.push(pc);
        self.rows.push(row);
    }

    /// Reduces the contents of `ws`, mirroring the operations on `tag_ws`.
    fn reduce_in(&self, ws: &mut Workspace, mut tag_ws: Option<&mut Workspace>) {
        let f = self.f;
        let mut heap: BinaryHeap<Reverse<u32>> = BinaryHeap::new();
        for &c in &ws.touched {
            let r = self.row_of_col[c as usize];
            if r != u32::MAX {
                heap.push(Reverse(r));
            }
        }
        let mut last = u32::MAX;
        while let Some(Reverse(r)) = heap.pop() {
            if r == last {
                continue;
            }
            last = r;
            let pc = self.pivots[r as usize] as usize;
            let x = ws.acc[pc];
            if x == 0 {
                continue;
            }
            let nx = f.neg(x);
            for &(c, y) in &self.rows[r as usize] {
                let cu = c as usize;
                let fresh = !ws.mark[cu] || ws.acc[cu] == 0;
                ws.touch(c);
                ws.acc[cu] = f.add(ws.acc[cu], f.mul(nx, y));
                if fresh {
                    let rr = self.row_of_col[cu];
                    if rr != u32::MAX && rr > r {
                        heap.push(Reverse(rr));
                    }
                }
            }
            if let Some(tw) = tag_ws.as_deref_mut() {
                for &(c, y) in &self.tags[r as usize] {
                    tw.touch(c);
                    tw.acc[c as usize] = f.add(tw.acc[c as usize], f.mul(nx, y));
                }
            }
        }
    }

    /// Reduces `v` against the stored rows without using the internal
    /// scratch space (safe to call concurrently).
    pub fn reduce_shared(&self, v: &SparseVec) -> SparseVec {
        let mut ws = Workspace::new(self.ncols);
        ws.load(v);
        self.reduce_in(&mut ws, None);
        ws.drain()
    }

    /// Reduces `v` against the stored rows.
    pub fn reduce(&mut self, v: &SparseVec) -> SparseVec {
        let mut ws = std::mem::replace(&mut self.ws, Workspace::new(0));
        ws.load(v);
        self.reduce_in(&mut ws, None);
        let out = ws.drain();
        self.ws = ws;
        out
    }

    pub fn contains(&mut self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Inserts a row. With tracking, `id` names it in combinations.
    pub fn insert(&mut self, v: &SparseVec, id: usize) -> Insert {
        let tracking = self.track.is_some();
        if let Some(max) = self.track {
            assert!(id < max, "row id exceeds tracked range");
            let tw = self.tag_ws.as_mut().unwrap();
            tw.touch(id as u32);
            tw.acc[id] = 1;
        }
        let mut ws = std::mem::replace(&mut self.ws, Workspace::new(0));
        let mut tag_ws = self.tag_ws.take();
        ws.load(v);
        self.reduce_in(&mut ws, tag_ws.as_mut());
        let row = ws.drain();
        let tag = tag_ws.as_mut().map(|t| t.drain()).unwrap_or_default();
        self.ws = ws;
        self.tag_ws = tag_ws;
        if row.is_empty() {
            return Insert::Dependent(tag);
        }
        let f = self.f;
        let &(pc, px) = row.iter().min_by_key(|&&(c, _)| (self.col_weight[c as usize], c)).unwrap();
        let s = f.inv(px);
        let row: SparseVec = row.into_iter().map(|(c, x)| (c, f.mul(x, s))).collect();
        let tag: SparseVec = tag.into_iter().map(|(c, x)| (c, f.mul(x, s))).collect();
        self.row_of_col[pc as usize] = self.rows.len() as u32;
        self.pivots.push(pc);
        self.rows.push(row);
        if tracking {
            self.tags.push(tag);
        }
        Insert::Pivot(pc)
    }
}

/// Rank over F_p.
pub fn rank_mod_p(f: &Fp, m: &SparseMatrix) -> usize {
    markowitz_echelon(f, m).rank()
}

/// Row echelon form of the row space of `m` by right-looking elimination
/// with Markowitz pivoting: among the few sparsest active columns, the pivot
/// minimizing `(row weight - 1)(column weight - 1)` is chosen, ties broken
/// by lowest column then lowest row index.
pub fn markowitz_echelon(f: &Fp, m: &SparseMatrix) -> Echelon {
    markowitz_partial(f, m, u64::MAX)
}

/// Like [`markowitz_echelon`], but stops once the cheapest available pivot
/// costs more than `max_cost`. The stored rows still span a subspace of the
/// row space in echelon form.
pub fn markowitz_partial(f: &Fp, m: &SparseMatrix, max_cost: u64) -> Echelon {
    const SEARCH: usize = 4;
    let mut rows: Vec<SparseVec> = m.rows.clone();
    let mut active = vec![true; m.nrows];
    let mut count = vec![0u32; m.ncols];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); m.ncols];
    for (i, r) in rows.iter().enumerate() {
        for &(c, _) in r {
            count[c as usize] += 1;
            col_rows[c as usize].push(i as u32);
        }
    }
    let mut queue: std::collections::BTreeSet<(u32, u32)> =
        (0..m.ncols).filter(|&c| count[c] > 0).map(|c| (count[c], c as u32)).collect();
    let mut ech = Echelon::new(*f, m.ncols);
    let has = |row: &SparseVec, c: u32| row.binary_search_by_key(&c, |e| e.0).is_ok();
    let mut visited = vec![0u32; m.nrows];
    let mut step = 0u32;
    while !queue.is_empty() {
        let mut best: Option<(u64, u32, u32)> = None;
        for &(cnt, c) in queue.iter().take(SEARCH) {
            for &r in &col_rows[c as usize] {
                let ru = r as usize;
                if !active[ru] || !has(&rows[ru], c) {
                    continue;
                }
                let cost = (rows[ru].len() as u64 - 1) * (cnt as u64 - 1);
                if best.map_or(true, |b| (cost, c, r) < b) {
                    best = Some((cost, c, r));
                }
            }
            if best.is_some_and(|b| b.0 == 0) {
                break;
            }
        }
        let (cost, pc, pr) = best.expect("queued column has an active row");
        if cost > max_cost {
            break;
        }
        let pri = pr as usize;
        active[pri] = false;
        let prow = std::mem::take(&mut rows[pri]);
        let px = prow[prow.binary_search_by_key(&pc, |e| e.0).unwrap()].1;
        let s = f.inv(px);
        let prow: SparseVec = prow.into_iter().map(|(c, x)| (c, f.mul(x, s))).collect();
        let adjust = |count: &mut Vec<u32>, queue: &mut std::collections::BTreeSet<(u32, u32)>, c: u32, up: bool| {
            let cu = c as usize;
            queue.remove(&(count[cu], c));
            if up {
                count[cu] += 1;
            } else {
                count[cu] -= 1;
            }
            if count[cu] > 0 {
                queue.insert((count[cu], c));
            }
        };
        for &(c, _) in &prow {
            adjust(&mut count, &mut queue, c, false);
        }
        let targets: Vec<u32> = std::mem::take(&mut col_rows[pc as usize]);
        step += 1;
        for t in targets {
            let ti = t as usize;
            if !active[ti] || visited[ti] == step {
                continue;
            }
            let Ok(pos) = rows[ti].binary_search_by_key(&pc, |e| e.0) else { continue };
            visited[ti] = step;
            let factor = f.neg(rows[ti][pos].1);
            let old = std::mem::take(&mut rows[ti]);
            let mut merged: SparseVec = Vec::with_capacity(old.len() + prow.len());
            let (mut x, mut y) = (0, 0);
            while x < old.len() || y < prow.len() {
                let cx = old.get(x).map_or(u32::MAX, |e| e.0);
                let cy = prow.get(y).map_or(u32::MAX, |e| e.0);
                if cx < cy {
                    merged.push(old[x]);
                    x += 1;
                } else if cy < cx {
                    merged.push((cy, f.mul(factor, prow[y].1)));
                    adjust(&mut count, &mut queue, cy, true);
                    col_rows[cy as usize].push(t);
                    y += 1;
                } else {
                    let v = f.add(old[x].1, f.mul(factor, prow[y].1));
                    if v != 0 {
                        merged.push((cx, v));
                    } else {
                        adjust(&mut count, &mut queue, cx, false);
                    }
                    x += 1;
                    y += 1;
                }
            }
            rows[ti] = merged;
        }
        ech.push_reduced(prow, pc);
    }
    ech
}

pub fn column_weights(m: &SparseMatrix) -> Vec<u32> {
    let mut w = vec![0u32; m.ncols];
    for r in &m.rows {
        for &(c, _) in r {
            w[c as usize] += 1;
        }
    }
    w
}

/// Basis of the left kernel `{x : x M = 0}`, as sparse combinations of rows.
pub fn left_kernel(f: &Fp, m: &SparseMatrix) -> Vec<SparseVec> {
    let mut e = Echelon::tracked(*f, m.ncols, m.nrows);
    e.set_column_weights(column_weights(m));
    let mut out = Vec::new();
    for i in 0..m.nrows {
        if let Insert::Dependent(tag) = e.insert(&m.rows[i], i) {
            out.push(tag);
        }
    }
    out
}

/// Dense matrices over F_p, row-major.
pub type Dense = Vec<Vec<u32>>;

pub fn dense_identity(n: usize) -> Dense {
    (0..n).map(|i| (0..n).map(|j| (i == j) as u32).collect()).collect()
}

pub fn dense_mul(f: &Fp, a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![0u32; m]; n];
    for i in 0..n {
        for (k, &x) in a[i].iter().enumerate() {
            if x == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] = f.add(out[i][j], f.mul(x, b[k][j]));
            }
        }
    }
    out
}

pub fn dense_sub(f: &Fp, a: &Dense, b: &Dense) -> Dense {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(&x, &y)| f.sub(x, y)).collect()).collect()
}

pub fn dense_is_zero(a: &Dense) -> bool {
    a.iter().flatten().all(|&x| x == 0)
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(f: &Fp, a: &mut Dense) -> Vec<usize> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        let s = f.inv(a[r][c]);
        a[r].iter_mut().for_each(|x| *x = f.mul(*x, s));
        for i in 0..nrows {
            if i != r && a[i][c] != 0 {
                let t = a[i][c];
                for j in 0..ncols {
                    let v = f.mul(t, a[r][j]);
                    a[i][j] = f.sub(a[i][j], v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn dense_rank(f: &Fp, a: &Dense) -> usize {
    let mut m = a.clone();
    rref(f, &mut m).len()
}

/// Basis of the right kernel `{x : A x = 0}` as column vectors.
pub fn dense_kernel(f: &Fp, a: &Dense, ncols: usize) -> Vec<Vec<u32>> {
    let mut m = a.clone();
    let pivots = rref(f, &mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut x = vec![0u32; ncols];
            x[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = f.neg(m[r][fc]);
            }
            x
        })
        .collect()
}

pub fn dense_inverse(f: &Fp, a: &Dense) -> Option<Dense> {
    let n = a.len();
    let mut m: Dense = a.iter().enumerate().map(|(i, r)| {
        let mut row = r.clone();
        row.extend((0..n).map(|j| (i == j) as u32));
        row
    }).collect();
    let piv = rref(f, &mut m);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn dense_transpose(a: &Dense) -> Dense {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f() -> Fp {
        Fp::new(31991).unwrap()
    }

    #[test]
    fn identity_and_zero_rank() {
        let f = f();
        let id = SparseMatrix::from_dense(&f, &dense_identity(7), 7);
        assert_eq!(rank_mod_p(&f, &id), 7);
        assert_eq!(rank_mod_p(&f, &SparseMatrix::zero(5, 4)), 0);
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(matches!(Fp::new(31989), Err(Error::NotPrime(31989))));
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let f = f();
        let d: Dense = vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1], vec![2, 2, 4]];
        let m = SparseMatrix::from_dense(&f, &d, 3);
        let k = left_kernel(&f, &m);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.left_mul(&f, v).is_empty());
        }
    }

    fn arb_matrix() -> impl Strategy<Value = (usize, usize, Vec<Vec<u32>>)> {
        (1usize..12, 1usize..12).prop_flat_map(|(r, c)| {
            let cell = prop_oneof![3 => Just(0u32), 1 => 0u32..5, 1 => 0u32..31991];
            (Just(r), Just(c), proptest::collection::vec(proptest::collection::vec(cell, c), r))
        })
    }

    proptest! {
        #[test]
        fn sparse_rank_matches_dense((_, c, d) in arb_matrix()) {
            let f = f();
            let m = SparseMatrix::from_dense(&f, &d, c);
            prop_assert_eq!(rank_mod_p(&f, &m), dense_rank(&f, &d));
            prop_assert_eq!(rank_mod_p(&f, &m), rank_mod_p(&f, &m.transpose()));
        }

        #[test]
        fn reduction_detects_membership((_, c, d) in arb_matrix(), coef in proptest::collection::vec(0u32..31991, 12)) {
            let f = f();
            let m = SparseMatrix::from_dense(&f, &d, c);
            let mut e = Echelon::new(f, c);
            for (i, r) in m.rows.iter().enumerate() {
                e.insert(r, i);
            }
            let comb: SparseVec = (0..m.nrows).map(|i| (i as u32, coef[i])).filter(|x| x.1 != 0).collect();
            let v = m.left_mul(&f, &comb);
            prop_assert!(e.contains(&v));
        }
    }
}
