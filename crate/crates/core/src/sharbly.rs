//! Hecke operators on `H⁵(Γ₀(N))` through the sharbly complex.
//!
//! A 1-sharbly is a 5-tuple of lines in Q⁴ (alternating in the entries and
//! zero unless the lines span). Cells of cone dimension 5 all have exactly
//! five minimal vectors, so each one is a 1-sharbly; a cycle of the
//! equivariant complex lifts to a sharbly cycle by writing its cells in the
//! sorted order of their vectors. The Hecke translates of such a cycle are
//! brought back to cells by repeatedly coning off 4-subsets of determinant
//! above 1.
//!
//! Coning uses a *reducing point* `u` of a 4-subset `F` with determinant
//! `D`: writing `u = Σ t_j v_j`, the new 4-subsets have determinants
//! `|t_j| D ≤ D/2`. The candidates minimize `(max |t_j|, Σ |t_j|)` over
//! the nonzero classes of `Z⁴ / ⟨F⟩`; all minimizers are used with equal
//! weight, so the choice depends only on the lattice of `F`. Since every
//! occurrence of a face is coned from the same point, the cone terms over
//! the face itself cancel across the cycle and are omitted.
//!
//! Once every 4-subset of a sharbly has determinant in `{-1, 0, 1}`, the
//! sharbly is either degenerate or, in a unimodular basis taken from four of
//! its vectors, has fifth vector with two, three or four entries `±1`;
//! these three shapes are exactly the three cell orbits of cone dimension 5.

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::complex::{retract, EquivariantComplex, HomologyBasis};
use crate::coset::{is_prime, CosetSpace};
use crate::error::{Error, Result};
use crate::lattice::{det_columns, normalize_sign, primitive, Mat4, Vec4};
use crate::linalg::{normalize, Dense, Fp, SparseVec};

/// Double coset `SL(4,Z) D(ℓ,k) SL(4,Z)` as a disjoint union of right
/// cosets `SL(4,Z) δ`.
#[derive(Clone, Debug)]
pub struct DoubleCoset {
    pub ell: u64,
    pub k: usize,
    pub reps: Vec<Mat4>,
}

/// `D(ℓ,k) = diag(1,…,1,ℓ,…,ℓ)` with `k` entries `ℓ`.
pub fn d_matrix(ell: u64, k: usize) -> Mat4 {
    let mut d = [1i64; 4];
    for x in d.iter_mut().skip(4 - k) {
        *x = ell as i64;
    }
    Mat4::diag(d)
}

/// Hermite normal forms under left multiplication: upper triangular, the
/// diagonal has `k` entries `ℓ`, entries above a diagonal `ℓ` lie in
/// `[0, ℓ)` and vanish in rows whose diagonal entry is `ℓ` (so that the
/// matrix has rank `4 - k` mod `ℓ`).
pub fn double_coset_reps(ell: u64, k: usize) -> Result<DoubleCoset> {
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidOperator { ell, k });
    }
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    let l = ell as i64;
    let mut reps = Vec::new();
    for mask in 0u32..16 {
        if mask.count_ones() as usize != k {
            continue;
        }
        let diag: Vec<i64> = (0..4).map(|i| if mask >> i & 1 == 1 { l } else { 1 }).collect();
        // free slots: (i, j) with i < j, diag[j] = ℓ, diag[i] = 1
        let slots: Vec<(usize, usize)> =
            (0..4).flat_map(|j| (0..j).map(move |i| (i, j))).filter(|&(i, j)| diag[j] == l && diag[i] == 1).collect();
        let total = (l as u64).pow(slots.len() as u32);
        for code in 0..total {
            let mut m = Mat4::diag([diag[0], diag[1], diag[2], diag[3]]);
            let mut c = code;
            for &(i, j) in &slots {
                m.0[i][j] = (c % ell) as i64;
                c /= ell;
            }
            reps.push(m);
        }
    }
    Ok(DoubleCoset { ell, k, reps })
}

/// Gaussian binomial coefficient `(4 choose k)_q`.
pub fn gaussian_binomial4(q: u64, k: usize) -> u64 {
    let num: u64 = (0..k as u32).map(|i| q.pow(4 - i) - 1).product();
    let den: u64 = (0..k as u32).map(|i| q.pow(i + 1) - 1).product();
    num / den
}

/// A signed 1-sharbly with its coset point, normalized: lines sorted, the
/// sign of the sorting permutation moved into the coefficient.
pub type Key = ([Vec4; 5], u32);

fn normalize_term(vs: [Vec4; 5]) -> Option<([Vec4; 5], i8)> {
    let mut v = vs.map(normalize_sign);
    let mut sign = 1i8;
    // insertion sort tracking parity
    for i in 1..5 {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// The 4-tuple left after omitting one vector.
pub fn face(vs: &[Vec4; 5], omit: usize) -> [Vec4; 4] {
    let mut out = [[0; 4]; 4];
    let mut k = 0;
    for (i, v) in vs.iter().enumerate() {
        if i != omit {
            out[k] = *v;
            k += 1;
        }
    }
    out
}

fn sorted_face(f: &[Vec4; 4]) -> [Vec4; 4] {
    let mut g = f.map(normalize_sign);
    g.sort();
    g
}

/// Reducing points of a 4-subset with `|det| > 1`.
pub fn reducing_points(f: &[Vec4; 4]) -> Vec<Vec4> {
    let b = Mat4::from_columns(f);
    let d = b.det();
    assert!(d.abs() > 1, "reducing point requested for a unimodular face");
    let adj = b.adjugate();
    let h = hermite_diagonal(f);
    let mut best: Option<(Ratio<i64>, Ratio<i64>)> = None;
    let mut cands: Vec<Vec4> = Vec::new();
    for y0 in 0..h[0] {
        for y1 in 0..h[1] {
            for y2 in 0..h[2] {
                for y3 in 0..h[3] {
                    let y = [y0, y1, y2, y3];
                    // t = B^{-1} y = adj(B) y / d
                    let num = adj.apply(&y);
                    if num.iter().all(|&x| x % d == 0) {
                        continue;
                    }
                    // nearest representatives; both ends at ±1/2
                    let mut choices: Vec<Vec<i64>> = Vec::with_capacity(4);
                    for &x in &num {
                        let r = Ratio::new(x, d);
                        let base = r.floor().to_integer();
                        let frac = r - Ratio::from_integer(base);
                        let half = Ratio::new(1, 2);
                        choices.push(if frac < half {
                            vec![base]
                        } else if frac > half {
                            vec![base + 1]
                        } else {
                            vec![base, base + 1]
                        });
                    }
                    for a in &choices[0] {
                        for b1 in &choices[1] {
                            for c in &choices[2] {
                                for e in &choices[3] {
                                    let shift = [*a, *b1, *c, *e];
                                    let t: Vec<Ratio<i64>> =
                                        (0..4).map(|j| Ratio::new(num[j], d) - Ratio::from_integer(shift[j])).collect();
                                    let mx = t.iter().map(|x| x.abs()).max().unwrap();
                                    let sm = t.iter().map(|x| x.abs()).fold(Ratio::zero(), |s, x| s + x);
                                    let score = (mx, sm);
                                    let u = sub(&y, &b.apply(&shift));
                                    match best {
                                        Some(bs) if score > bs => continue,
                                        Some(bs) if score == bs => {}
                                        _ => {
                                            best = Some(score);
                                            cands.clear();
                                        }
                                    }
                                    cands.push(primitive(u).expect("nonzero class"));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    cands.sort();
    cands.dedup();
    cands
}

fn sub(a: &Vec4, b: &Vec4) -> Vec4 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

/// Diagonal of a triangular basis of the lattice spanned by the columns, so
/// that the box `Π [0, h_i)` holds one representative per class of `Z⁴/L`.
fn hermite_diagonal(f: &[Vec4; 4]) -> [i64; 4] {
    // column-style HNF by integer row reduction of the transpose
    let mut m: Vec<[i64; 4]> = f.to_vec();
    let mut diag = [0i64; 4];
    for (col, dg) in diag.iter_mut().enumerate() {
        // gcd-combine rows col.. on coordinate col
        loop {
            let nz: Vec<usize> = (col..4).filter(|&r| m[r][col] != 0).collect();
            if nz.len() <= 1 {
                if let Some(&r) = nz.first() {
                    m.swap(col, r);
                }
                break;
            }
            let piv = *nz.iter().min_by_key(|&&r| m[r][col].abs()).unwrap();
            for &r in &nz {
                if r != piv {
                    let q = m[r][col] / m[piv][col];
                    for c in 0..4 {
                        m[r][c] -= q * m[piv][c];
                    }
                }
            }
        }
        *dg = m[col][col].abs();
    }
    diag
}

/// Lookup from reduced sharblies to cell orbits of cone dimension 5.
pub struct CellTable {
    /// Fifth-vector coordinates (sign normalized) to `(orbit, basis)`.
    table: FxHashMap<Vec4, (usize, Mat4, [usize; 5])>,
    frames: Vec<[Vec4; 5]>,
}

/// First ordered 4-subset with `|det| = 1`, turned into a determinant-one
/// basis by flipping its first vector if needed; returns the basis, the
/// index order used, and the fifth vector's coordinates.
fn unimodular_frame(vs: &[Vec4; 5]) -> Option<(Mat4, [usize; 5], Vec4)> {
    for omit in (0..5).rev() {
        let idx: Vec<usize> = (0..5).filter(|&i| i != omit).collect();
        let mut cols = [vs[idx[0]], vs[idx[1]], vs[idx[2]], vs[idx[3]]];
        let d = det_columns(&cols);
        if d.abs() != 1 {
            continue;
        }
        if d < 0 {
            cols[0] = cols[0].map(|x| -x);
        }
        let b = Mat4::from_columns(&cols);
        let c = b.inverse_unimodular().unwrap().apply(&vs[omit]);
        let order = [idx[0], idx[1], idx[2], idx[3], omit];
        return Some((b, order, normalize_sign(c)));
    }
    None
}

impl CellTable {
    pub fn new() -> CellTable {
        let cells = retract().degree(1);
        let mut table = FxHashMap::default();
        let mut frames = Vec::new();
        for (orbit, c) in cells.iter().enumerate() {
            assert_eq!(c.vectors.len(), 5, "cells of cone dimension 5 have five vectors");
            let w: [Vec4; 5] = [c.vectors.0[0], c.vectors.0[1], c.vectors.0[2], c.vectors.0[3], c.vectors.0[4]];
            frames.push(w);
            // every permutation gives a table entry for its first frame
            for perm in permutations5() {
                let p = perm.map(|i| w[i]);
                if let Some((b, order, coords)) = unimodular_frame(&p) {
                    let order_in_w = order.map(|i| perm[i]);
                    table.entry(coords).or_insert((orbit, b, order_in_w));
                }
            }
        }
        CellTable { table, frames }
    }

    /// Writes a nondegenerate sharbly whose 4-subsets are all unimodular or
    /// degenerate as `sign · g·σ₀` for a cell orbit `σ₀`.
    pub fn identify(&self, vs: &[Vec4; 5]) -> Option<(usize, Mat4, i8)> {
        let (b, order, coords) = unimodular_frame(vs)?;
        let &(orbit, b0, order0) = self.table.get(&coords)?;
        let g = b.mul(&b0.inverse_unimodular().unwrap());
        let w = &self.frames[orbit];
        // vs[order[a]] = ± g w[order0[a]], so the permutation taking the
        // sorted cell order to the sharbly order has the parity below
        let mut pos = [0usize; 5];
        for a in 0..5 {
            pos[order[a]] = order0[a];
        }
        debug_assert!((0..5).all(|i| normalize_sign(g.apply(&w[pos[i]])) == normalize_sign(vs[i])));
        Some((orbit, g, permutation_sign(&pos)))
    }
}

impl Default for CellTable {
    fn default() -> Self {
        Self::new()
    }
}

fn permutations5() -> Vec<[usize; 5]> {
    let mut out = Vec::new();
    let mut a = [0usize, 1, 2, 3, 4];
    fn rec(k: usize, a: &mut [usize; 5], out: &mut Vec<[usize; 5]>) {
        if k == 5 {
            out.push(*a);
            return;
        }
        for i in k..5 {
            a.swap(k, i);
            rec(k + 1, a, out);
            a.swap(k, i);
        }
    }
    rec(0, &mut a, &mut out);
    out
}

fn permutation_sign(p: &[usize; 5]) -> i8 {
    let mut s = 1i8;
    for i in 0..5 {
        for j in i + 1..5 {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

/// Formal F_p-combination of 1-sharblies tensored with coset points.
#[derive(Clone, Debug, Default)]
pub struct SharblyChain {
    pub terms: FxHashMap<Key, u32>,
}

impl SharblyChain {
    pub fn add(&mut self, f: &Fp, vs: [Vec4; 5], x: u32, c: u32) {
        if c == 0 {
            return;
        }
        let Some((v, s)) = normalize_term(vs) else { return };
        if !spans(&v) {
            return;
        }
        let c = if s < 0 { f.neg(c) } else { c };
        let e = self.terms.entry((v, x)).or_insert(0);
        *e = f.add(*e, c);
        if *e == 0 {
            self.terms.remove(&(v, x));
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Deterministically ordered terms.
    pub fn sorted_terms(&self) -> Vec<(Key, u32)> {
        let mut v: Vec<(Key, u32)> = self.terms.iter().map(|(k, c)| (*k, *c)).collect();
        v.sort_unstable();
        v
    }
}

fn spans(v: &[Vec4; 5]) -> bool {
    (0..5).any(|i| det_columns(&face(v, i)) != 0)
}

/// Lift of an equivariant 1-chain: `σ₀ ⊗ x ↦ [w₁ … w₅] ⊗ x`.
pub fn lift_chain(f: &Fp, complex: &EquivariantComplex, chain: &SparseVec) -> SharblyChain {
    let cells = retract().degree(1);
    let mut out = SharblyChain::default();
    for &(i, c) in chain {
        let (cell, x) = complex.bases[1].element(i as usize);
        let w = &cells[cell].vectors.0;
        out.add(f, [w[0], w[1], w[2], w[3], w[4]], x as u32, c);
    }
    out
}

/// Hecke translate: `[v] ⊗ x ↦ Σ_δ [δ v] ⊗ x·adj(δ)`.
pub fn hecke_image(f: &Fp, space: &CosetSpace, chain: &SharblyChain, dc: &DoubleCoset) -> Result<SharblyChain> {
    if space.level() % dc.ell == 0 {
        return Err(Error::BadPrime { ell: dc.ell, level: space.level() });
    }
    let mut out = SharblyChain::default();
    let adj: Vec<Mat4> = dc.reps.iter().map(|d| d.adjugate()).collect();
    for ((vs, x), c) in chain.sorted_terms() {
        for (d, a) in dc.reps.iter().zip(&adj) {
            let img = vs.map(|v| primitive(d.apply(&v)).expect("nonzero"));
            let y = space.act(x as usize, a);
            out.add(f, img, y as u32, c);
        }
    }
    Ok(out)
}

/// Statistics of one reduction.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReductionStats {
    pub splits: usize,
    pub max_terms: usize,
}

/// Reduces a sharbly cycle to a combination of cells and returns it as a
/// chain of the equivariant complex.
pub fn reduce_cycle(
    f: &Fp,
    complex: &EquivariantComplex,
    table: &CellTable,
    chain: &SharblyChain,
    max_steps: usize,
) -> Result<(SparseVec, ReductionStats)> {
    let mut stats = ReductionStats::default();
    let mut cache: FxHashMap<[Vec4; 4], (Vec<Vec4>, u32)> = FxHashMap::default();
    let mut current = chain.clone();
    let mut done: Vec<(u32, u32)> = Vec::new();
    let basis = &complex.bases[1];
    while !current.is_empty() {
        stats.max_terms = stats.max_terms.max(current.len());
        let mut next = SharblyChain::default();
        for ((vs, x), c) in current.sorted_terms() {
            // cone off the largest face first; ties go to the lowest index
            let bad = (0..5)
                .map(|i| (i, det_columns(&face(&vs, i)).abs()))
                .filter(|&(_, d)| d > 1)
                .max_by_key(|&(i, d)| (d, std::cmp::Reverse(i)))
                .map(|(i, _)| i);
            let Some(i) = bad else {
                let (orbit, g, s) = table.identify(&vs).ok_or_else(|| {
                    Error::Consistency(format!("reduced sharbly {vs:?} is not a cell"))
                })?;
                let y = complex.space.act(x as usize, &g);
                if let Some((j, t)) = basis.locate(orbit, y) {
                    let coef = if (s * t) < 0 { f.neg(c) } else { c };
                    done.push((j as u32, coef));
                }
                continue;
            };
            stats.splits += 1;
            if stats.splits > max_steps {
                return Err(Error::ReductionCap { steps: max_steps, sharbly: format!("{vs:?} ⊗ {x}") });
            }
            let fc = face(&vs, i);
            let key = sorted_face(&fc);
            let (points, weight) = cache
                .entry(key)
                .or_insert_with(|| {
                    let pts = reducing_points(&fc);
                    let w = f.inv((pts.len() as u64 % f.p as u64) as u32);
                    (pts, w)
                })
                .clone();
            let cw = f.mul(c, weight);
            for u in &points {
                for j in 0..5 {
                    if j == i {
                        continue;
                    }
                    let mut child = [*u, [0; 4], [0; 4], [0; 4], [0; 4]];
                    let rest = face(&vs, j);
                    child[1..].copy_from_slice(&rest);
                    let coef = if j % 2 == 1 { f.neg(cw) } else { cw };
                    next.add(f, child, x, coef);
                }
            }
        }
        current = next;
    }
    Ok((normalize(f, done), stats))
}

/// Matrix of the Hecke operator on the homology basis: column `j` holds the
/// coordinates of `T z_j`.
pub fn hecke_matrix(
    complex: &EquivariantComplex,
    basis: &HomologyBasis,
    ell: u64,
    k: usize,
    max_steps: usize,
) -> Result<Dense> {
    let f = basis.field;
    let dc = double_coset_reps(ell, k)?;
    if complex.level % ell == 0 {
        return Err(Error::BadPrime { ell, level: complex.level });
    }
    let table = CellTable::new();
    let cols: Vec<Result<Vec<u32>>> = basis
        .cycles
        .par_iter()
        .map(|z| {
            let lifted = lift_chain(&f, complex, z);
            let img = hecke_image(&f, &complex.space, &lifted, &dc)?;
            let (reduced, stats) = reduce_cycle(&f, complex, &table, &img, max_steps)?;
            log::debug!("T({ell},{k}) column: {} splits, peak {} terms", stats.splits, stats.max_terms);
            check_cycle(&f, complex, &reduced)?;
            basis.coordinates(&reduced)
        })
        .collect();
    let b = basis.dim();
    let mut m = vec![vec![0u32; b]; b];
    for (j, col) in cols.into_iter().enumerate() {
        for (i, x) in col?.into_iter().enumerate() {
            m[i][j] = x;
        }
    }
    Ok(m)
}

/// Verifies `∂ z = 0` in the equivariant complex.
pub fn check_cycle(f: &Fp, complex: &EquivariantComplex, z: &SparseVec) -> Result<()> {
    let d1 = &complex.boundaries[1];
    let mut acc: Vec<(u32, u32)> = Vec::new();
    for &(i, c) in z {
        for &(j, v) in &d1.rows[i as usize] {
            acc.push((j, f.mul(c, f.from_i64(v))));
        }
    }
    if normalize(f, acc).is_empty() {
        Ok(())
    } else {
        Err(Error::Consistency("reduced Hecke image is not a cycle".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Ring;
    use crate::linalg::dense_mul;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const CAP: usize = 10_000_000;

    #[test]
    fn hecke_operators_commute_at_level_11() {
        let c = EquivariantComplex::build(11, Ring::DEFAULT, 4).unwrap();
        let hb = c.homology_basis().unwrap();
        let ops: Vec<Dense> = (1..=3).map(|k| hecke_matrix(&c, &hb, 2, k, CAP).unwrap()).collect();
        let f = hb.field;
        for a in &ops {
            for b in &ops {
                assert_eq!(dense_mul(&f, a, b), dense_mul(&f, b, a));
            }
        }
    }

    #[test]
    fn bad_prime_is_rejected() {
        let c = EquivariantComplex::build(10, Ring::DEFAULT, 4).unwrap();
        let hb = c.homology_basis().unwrap();
        assert!(matches!(hecke_matrix(&c, &hb, 2, 1, CAP), Err(Error::BadPrime { .. })));
    }

    #[test]
    fn reduction_cap_is_reported() {
        let c = EquivariantComplex::build(11, Ring::DEFAULT, 4).unwrap();
        let hb = c.homology_basis().unwrap();
        assert!(matches!(hecke_matrix(&c, &hb, 2, 2, 3), Err(Error::ReductionCap { .. })));
    }

    /// Random cycles plus boundaries, lifted, re-coned from random points
    /// and reduced, keep their coordinates.
    #[test]
    fn reduction_preserves_homology_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [9u64, 11, 13, 14] {
            let c = EquivariantComplex::build(n, Ring::DEFAULT, 4).unwrap();
            let hb = c.homology_basis().unwrap();
            let f = hb.field;
            let table = CellTable::new();
            for _ in 0..3 {
                let coeffs: Vec<u32> = (0..hb.dim()).map(|_| rng.gen_range(0..f.p)).collect();
                let mut z: Vec<(u32, u32)> = Vec::new();
                for (a, cyc) in coeffs.iter().zip(&hb.cycles) {
                    z.extend(cyc.iter().map(|&(i, x)| (i, f.mul(*a, x))));
                }
                let d2 = &c.boundaries[2];
                for _ in 0..5 {
                    let r = rng.gen_range(0..d2.nrows);
                    let a = rng.gen_range(1..f.p);
                    z.extend(d2.rows[r].iter().map(|&(j, v)| (j, f.mul(a, f.from_i64(v)))));
                }
                let z = normalize(&f, z);
                let lifted = lift_chain(&f, &c, &z);
                let mut coned = SharblyChain::default();
                for ((vs, x), a) in lifted.sorted_terms() {
                    let u = loop {
                        let u: Vec4 = [0; 4].map(|_| rng.gen_range(-3i64..=3));
                        if let Some(u) = primitive(u) {
                            break u;
                        }
                    };
                    for j in 0..5 {
                        let mut child = [u, [0; 4], [0; 4], [0; 4], [0; 4]];
                        child[1..].copy_from_slice(&face(&vs, j));
                        coned.add(&f, child, x, if j % 2 == 1 { f.neg(a) } else { a });
                    }
                }
                let (back, _) = reduce_cycle(&f, &c, &table, &coned, CAP).unwrap();
                check_cycle(&f, &c, &back).unwrap();
                assert_eq!(hb.coordinates(&back).unwrap(), coeffs, "level {n}");
            }
        }
    }

    #[test]
    fn coset_counts_are_gaussian_binomials() {
        for ell in [2u64, 3, 5] {
            for k in 1..=3 {
                let dc = double_coset_reps(ell, k).unwrap();
                assert_eq!(dc.reps.len() as u64, gaussian_binomial4(ell, k));
            }
        }
        assert_eq!(double_coset_reps(2, 1).unwrap().reps.len(), 15);
        assert_eq!(double_coset_reps(2, 2).unwrap().reps.len(), 35);
        assert_eq!(d_matrix(2, 1), Mat4::diag([1, 1, 1, 2]));
        assert!(matches!(double_coset_reps(2, 4), Err(Error::InvalidOperator { .. })));
    }

    #[test]
    fn reducing_points_shrink_determinants() {
        let f = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [1, 1, 1, 4]];
        for u in reducing_points(&f) {
            for j in 0..4 {
                let mut g = f;
                g[j] = u;
                assert!(det_columns(&g).abs() <= 2);
            }
        }
    }

    #[test]
    fn cells_identify_as_themselves() {
        let t = CellTable::new();
        for (orbit, c) in retract().degree(1).iter().enumerate() {
            let w = &c.vectors.0;
            let (o, g, s) = t.identify(&[w[0], w[1], w[2], w[3], w[4]]).unwrap();
            assert_eq!(o, orbit);
            assert_eq!(g.det(), 1);
            let swapped = [w[1], w[0], w[2], w[3], w[4]];
            let (_, _, s2) = t.identify(&swapped).unwrap();
            // orientation of g relative to the identity must be absorbed by s
            let chi = c.stabilizer.iter().find(|(h, _)| *h == g).map(|(_, x)| *x).unwrap();
            assert_eq!(s * chi, 1);
            let g2 = t.identify(&swapped).unwrap().1;
            let chi2 = c.stabilizer.iter().find(|(h, _)| *h == g2).map(|(_, x)| *x).unwrap();
            assert_eq!(s2 * chi2, -1);
        }
    }
}
