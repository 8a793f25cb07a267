//! Modular symbols for `Γ₀(N) ⊂ SL(3,Z)` at prime level, used to produce
//! eigenvalue data of non-selfdual cuspidal classes in `H³(Γ₀(N); C)`.
//!
//! The space is `H_0(Γ₀(N); St ⊗ F)`, presented on generators `e(y)` for
//! `y ∈ P²(Z/N)` (the symbol `[I] ⊗ y`) with relations `e(yS) = sgn(S) e(y)`
//! for signed permutation matrices `S ∈ SL(3,Z)` and the three-term
//! relation `e(y) = e(y B₁) + e(y B₂)`. A unimodular symbol `[A] ⊗ x` of
//! determinant one is `e(xA)`. Hecke operators `T(ℓ,1)` act by
//! `[I] ⊗ x ↦ Σ_δ [δ] ⊗ x·adj(δ)` over Hermite representatives of
//! determinant `ℓ`, with `[δ]` rewritten as unimodular symbols through
//! reducing points.
//!
//! Non-selfdual cuspidal classes are singled out as the `T(2,1)`-invariant
//! summands whose integer characteristic polynomial has no real root.

use num_traits::{Signed, ToPrimitive};

use crate::coset::is_prime;
use crate::eigen::restrict;
use crate::error::{Error, Result};
use crate::linalg::{dense_kernel, dense_transpose, normalize, Dense, Echelon, Fp, SparseVec};
use crate::modsym::CRT_PRIMES;
use crate::poly::{self, charpoly, crt_poly, eval_matrix, z_factor, PolyFp, PolyZ};

type V3 = [i64; 3];
type M3 = [[i64; 3]; 3];

fn det3(m: &M3) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn adj3(m: &M3) -> M3 {
    let mut a = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            a[i][j] = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        }
    }
    a
}

fn columns(cols: &[V3; 3]) -> M3 {
    let mut m = [[0i64; 3]; 3];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..3 {
            m[i][j] = c[i];
        }
    }
    m
}

/// Hermite representatives of the matrices of determinant `ℓ` with
/// elementary divisors `(1, 1, ℓ)`.
pub fn hermite_reps(ell: i64) -> Vec<M3> {
    let mut out = Vec::new();
    for pos in 0..3 {
        let mut diag = [1i64; 3];
        diag[pos] = ell;
        // free entries: (i, j) with i < j, diag[j] = ℓ, diag[i] = 1
        let free: Vec<(usize, usize)> = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| diag[j] == ell && diag[i] == 1).collect();
        let count = (ell as usize).pow(free.len() as u32);
        for mut code in 0..count {
            let mut m = [[0i64; 3]; 3];
            for i in 0..3 {
                m[i][i] = diag[i];
            }
            for &(i, j) in &free {
                m[i][j] = (code % ell as usize) as i64;
                code /= ell as usize;
            }
            out.push(m);
        }
    }
    out
}

/// `[v1, v2, v3]` as a combination of symbols of determinant ±1.
pub fn unimodular_expansion(cols: [V3; 3]) -> Vec<([V3; 3], i64)> {
    let mut out = Vec::new();
    let mut stack = vec![(cols, 1i64)];
    while let Some((c, coef)) = stack.pop() {
        let m = columns(&c);
        let d = det3(&m);
        if d == 0 {
            continue;
        }
        if d.abs() == 1 {
            out.push((c, coef));
            continue;
        }
        let u = reducing_point(&m, d);
        for i in 0..3 {
            let mut next = c;
            next[i] = u;
            stack.push((next, coef));
        }
    }
    out
}

/// A lattice point `u = Σ t_i v_i` with `0 < max |t_i| ≤ 1/2`.
fn reducing_point(m: &M3, d: i64) -> V3 {
    let a = adj3(m);
    let h = d.abs() / 2;
    let mut best: Option<((i64, i64), V3)> = None;
    for n0 in -h..=h {
        for n1 in -h..=h {
            for n2 in -h..=h {
                if (n0, n1, n2) == (0, 0, 0) {
                    continue;
                }
                let n = [n0, n1, n2];
                // u = M n / d must be integral
                let mut u = [0i64; 3];
                let mut ok = true;
                for i in 0..3 {
                    let s: i64 = (0..3).map(|j| m[i][j] * n[j]).sum();
                    if s % d != 0 {
                        ok = false;
                        break;
                    }
                    u[i] = s / d;
                }
                if !ok {
                    continue;
                }
                debug_assert_eq!((0..3).map(|j| a[0][j] * u[j]).sum::<i64>(), n0);
                let key = (n.iter().map(|x| x.abs()).max().unwrap(), n.iter().map(|x| x.abs()).sum());
                if best.as_ref().is_none_or(|(k, _)| key < *k) {
                    best = Some((key, u));
                }
            }
        }
    }
    best.expect("a nontrivial class exists when |det| > 1").1
}

/// The coinvariant space modulo one prime.
pub struct Sl3Symbols {
    pub level: u64,
    pub field: Fp,
    relations: Echelon,
    pub free: Vec<u32>,
    coord: Vec<Option<usize>>,
}

fn signed_permutations() -> Vec<(M3, i64)> {
    let perms: [([usize; 3], i64); 6] = [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([1, 0, 2], -1), ([0, 2, 1], -1), ([2, 1, 0], -1)];
    let mut out = Vec::new();
    for (p, sgn) in perms {
        for signs in 0..8 {
            let mut m = [[0i64; 3]; 3];
            for j in 0..3 {
                m[p[j]][j] = if signs >> j & 1 == 1 { -1 } else { 1 };
            }
            if det3(&m) == 1 {
                out.push((m, sgn));
            }
        }
    }
    out
}

impl Sl3Symbols {
    pub fn new(level: u64, field: Fp) -> Result<Sl3Symbols> {
        if !is_prime(level) {
            return Err(Error::CompositeLevel(level));
        }
        let n = level as usize;
        let npts = n * n + n + 1;
        let mut s = Sl3Symbols { level, field, relations: Echelon::new(field, npts), free: Vec::new(), coord: Vec::new() };
        let f = field;
        let b1: M3 = [[1, 0, 0], [1, 1, 0], [0, 0, 1]];
        let b2: M3 = [[1, 1, 0], [0, 1, 0], [0, 0, 1]];
        let perms = signed_permutations();
        for i in 0..npts {
            let y = s.point(i);
            for (m, sgn) in &perms {
                let j = s.index(&row_times(&y, m)).unwrap();
                s.relations.insert(&normalize(&f, vec![(j as u32, 1), (i as u32, f.from_i64(-sgn))]), 0);
            }
            let j1 = s.index(&row_times(&y, &b1)).unwrap();
            let j2 = s.index(&row_times(&y, &b2)).unwrap();
            let minus = f.neg(1);
            s.relations.insert(&normalize(&f, vec![(i as u32, 1), (j1 as u32, minus), (j2 as u32, minus)]), 0);
        }
        s.free = (0..npts as u32).filter(|&c| !s.relations.is_pivot(c as usize)).collect();
        s.coord = vec![None; npts];
        for (i, &c) in s.free.iter().enumerate() {
            s.coord[c as usize] = Some(i);
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    fn point(&self, i: usize) -> V3 {
        let n = self.level as usize;
        if i < n * n {
            [1, (i / n) as i64, (i % n) as i64]
        } else if i < n * n + n {
            [0, 1, (i - n * n) as i64]
        } else {
            [0, 0, 1]
        }
    }

    fn index(&self, y: &V3) -> Option<usize> {
        let n = self.level as i64;
        let fnn = Fp { p: n as u32 };
        let y: Vec<i64> = y.iter().map(|c| c.rem_euclid(n)).collect();
        let lead = y.iter().position(|&c| c != 0)?;
        let inv = fnn.inv(y[lead] as u32) as i64;
        let z: Vec<i64> = y.iter().map(|c| c * inv % n).collect();
        let nu = n as usize;
        Some(match lead {
            0 => z[1] as usize * nu + z[2] as usize,
            1 => nu * nu + z[2] as usize,
            _ => nu * nu + nu,
        })
    }

    fn project(&self, v: &SparseVec) -> Vec<u32> {
        let w = self.relations.reduce_shared(v);
        let mut out = vec![0u32; self.dim()];
        for (c, x) in w {
            if let Some(i) = self.coord[c as usize] {
                out[i] = x;
            }
        }
        out
    }

    /// Matrix of `T(ℓ,1)`; columns are images of basis vectors.
    pub fn hecke(&self, ell: u64) -> Result<Dense> {
        if !is_prime(ell) {
            return Err(Error::NotPrime(ell));
        }
        if self.level % ell == 0 {
            return Err(Error::BadPrime { ell, level: self.level });
        }
        let f = self.field;
        // (adj δ · A) for every unimodular term of every representative
        let mut terms: Vec<(M3, i64)> = Vec::new();
        for delta in hermite_reps(ell as i64) {
            let ad = adj3(&delta);
            let cols = [0, 1, 2].map(|j| [delta[0][j], delta[1][j], delta[2][j]]);
            for (mut c, coef) in unimodular_expansion(cols) {
                if det3(&columns(&c)) < 0 {
                    c[0] = c[0].map(|x| -x);
                }
                terms.push((mat_mul(&ad, &columns(&c)), coef));
            }
        }
        let d = self.dim();
        let mut m = vec![vec![0u32; d]; d];
        for (j, &g) in self.free.iter().enumerate() {
            let y = self.point(g as usize);
            let v: Vec<(u32, u32)> =
                terms.iter().map(|(t, coef)| (self.index(&row_times(&y, t)).unwrap() as u32, f.from_i64(*coef))).collect();
            for (i, x) in self.project(&normalize(&f, v)).into_iter().enumerate() {
                m[i][j] = x;
            }
        }
        Ok(m)
    }
}

fn row_times(y: &V3, m: &M3) -> V3 {
    [0, 1, 2].map(|j| (0..3).map(|i| y[i] * m[i][j]).sum())
}

fn mat_mul(a: &M3, b: &M3) -> M3 {
    let mut c = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// Eigenvalue data of one conjugate pair of non-selfdual classes: `γ(ℓ) =
/// x + y ω` in the ring of integers of `Q(√D)`, with `ω = (1 + √D)/2` when
/// `D ≡ 1 mod 4` and `ω = √D` otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairData {
    pub level: u64,
    pub discriminant: i64,
    pub eigenvalues: Vec<(u64, i64, i64)>,
}

fn squarefree_part(mut n: i64) -> (i64, i64) {
    // n = s * f^2 with s squarefree
    let sign = n.signum();
    n = n.abs();
    let mut f = 1;
    let mut s = 1;
    let mut p = 2;
    while p * p <= n {
        while n % (p * p) == 0 {
            n /= p * p;
            f *= p;
        }
        if n % p == 0 {
            n /= p;
            s *= p;
        }
        p += 1;
    }
    (sign * s * n, f)
}

/// `ω` as a root of its minimal polynomial `x² - t x + n`.
pub fn omega_trace_norm(disc: i64) -> (i64, i64) {
    if disc.rem_euclid(4) == 1 {
        (1, (1 - disc) / 4)
    } else {
        (0, -disc / 4)
    }
}

fn sqrt_mod(f: &Fp, a: u32) -> Option<u32> {
    let roots = poly::factor(f, &[f.neg(a), 0, 1]);
    roots.iter().find(|(g, _)| g.len() == 2).map(|(g, _)| f.neg(g[0]))
}

/// Non-selfdual cuspidal pairs at prime level, with `γ(ℓ)` for `ℓ` in
/// `primes` other than the level. Of the two conjugate classes, the one
/// reported has negative `ω`-coordinate at the first prime where it is
/// nonzero.
pub fn cuspidal_pairs(level: u64, primes: &[u64]) -> Result<Vec<PairData>> {
    let primes: Vec<u64> = primes.iter().copied().filter(|&l| l != level).collect();
    if primes.is_empty() {
        return Err(Error::Consistency("no Hecke primes".into()));
    }
    let mut per: Vec<(Fp, Vec<Dense>)> = Vec::new();
    for &q in &CRT_PRIMES {
        let f = Fp::new(q)?;
        let s = Sl3Symbols::new(level, f)?;
        let ops = primes.iter().map(|&l| s.hecke(l)).collect::<Result<Vec<_>>>()?;
        per.push((f, ops));
    }
    let lift = |mats: &[(Fp, Dense)]| -> Result<PolyZ> {
        let images: Vec<(PolyFp, u32)> = mats.iter().map(|(f, m)| (charpoly(f, m), f.p)).collect();
        crt_poly(&images).ok_or_else(|| Error::Resource("Hecke characteristic polynomial exceeds the CRT range".into()))
    };
    // a separating combination Σ c^i T(ℓ_i, 1)
    let mut chosen = None;
    for c in 0..20i64 {
        let combo: Vec<(Fp, Dense)> = per
            .iter()
            .map(|(f, ops)| {
                let mut m = ops[0].clone();
                let mut w = 1u32;
                for op in &ops[1..] {
                    w = f.mul(w, f.from_i64(c));
                    for (row, orow) in m.iter_mut().zip(op) {
                        for (x, &y) in row.iter_mut().zip(orow) {
                            *x = f.add(*x, f.mul(w, y));
                        }
                    }
                }
                (*f, m)
            })
            .collect();
        let (_, fac) = z_factor(&lift(&combo)?)?;
        if fac.iter().all(|(_, m)| *m == 1) {
            chosen = Some((combo, fac));
            break;
        }
    }
    let (combo, fac) = chosen.ok_or_else(|| Error::Consistency(format!("no separating Hecke combination at level {level}")))?;
    let mut out = Vec::new();
    for (g, _) in fac {
        if has_real_root(&g) {
            continue;
        }
        if g.len() != 3 {
            return Err(Error::Consistency(format!("non-real Hecke orbit of degree {} at level {level}", g.len() - 1)));
        }
        let (c0, c1) = (g[0].to_i64().unwrap(), g[1].to_i64().unwrap());
        let (disc, _) = squarefree_part(c1 * c1 - 4 * c0);
        let disc = if disc.rem_euclid(4) == 1 { disc } else { 4 * disc };
        let (t, nrm) = omega_trace_norm(disc);
        // the orbit subspace modulo each prime
        let blocks: Vec<(Fp, Dense, Vec<Dense>)> = per
            .iter()
            .zip(&combo)
            .map(|((f, ops), (_, l))| {
                let w = dense_transpose(&dense_kernel(f, &eval_matrix(f, &poly::z_mod(f, &g), l), l.len()));
                let r = ops.iter().map(|op| restrict(f, op, &w)).collect();
                (*f, restrict(f, l, &w), r)
            })
            .collect();
        if blocks.iter().any(|(_, l, _)| l.len() != 2) {
            return Err(Error::Consistency("orbit subspace has the wrong dimension".into()));
        }
        let (f, l, ops) = blocks
            .iter()
            .find(|(f, _, _)| sqrt_mod(f, f.from_i64(disc)).is_some())
            .ok_or_else(|| Error::Consistency("no split prime among the CRT primes".into()))?;
        let f = *f;
        let root = poly::factor(&f, &poly::z_mod(&f, &g))[0].0[0];
        let lambda = f.neg(root);
        let shifted: Dense = l
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().enumerate().map(|(j, &x)| if i == j { f.sub(x, lambda) } else { x }).collect())
            .collect();
        let ker = dense_kernel(&f, &shifted, 2);
        if ker.len() != 1 {
            return Err(Error::Consistency("eigenline is not one-dimensional".into()));
        }
        let v = &ker[0];
        let k = if v[0] != 0 { 0 } else { 1 };
        let om = poly::factor(&f, &[f.from_i64(nrm), f.from_i64(-t), 1])[0].0[0];
        let om = f.neg(om);
        let mut eigenvalues = Vec::new();
        for (i, &ell) in primes.iter().enumerate() {
            let chi = lift(&blocks.iter().map(|(f, _, r)| (*f, r[i].clone())).collect::<Vec<_>>())?;
            let mu = f.mul(f.add(f.mul(ops[i][k][0], v[0]), f.mul(ops[i][k][1], v[1])), f.inv(v[k]));
            let hit = integer_pairs(&chi, disc)
                .into_iter()
                .find(|&(x, y)| f.add(f.from_i64(x), f.mul(f.from_i64(y), om)) == mu)
                .ok_or_else(|| Error::Consistency(format!("T({ell},1) eigenvalue is not in the order at level {level}")))?;
            eigenvalues.push((ell, hit.0, hit.1));
        }
        if eigenvalues.iter().find(|e| e.2 != 0).is_some_and(|e| e.2 > 0) {
            for e in eigenvalues.iter_mut() {
                *e = (e.0, e.1 + e.2 * t, -e.2);
            }
        }
        out.push(PairData { level, discriminant: disc, eigenvalues });
    }
    out.sort_by(|a, b| a.eigenvalues.cmp(&b.eigenvalues));
    Ok(out)
}

fn has_real_root(g: &PolyZ) -> bool {
    // odd degree always does; otherwise look for a sign change on a grid
    if (g.len() - 1) % 2 == 1 {
        return true;
    }
    let eval = |x: f64| g.iter().rev().fold(0f64, |acc, c| acc * x + c.to_f64().unwrap());
    let bound = 1.0 + g.iter().map(|c| c.abs().to_f64().unwrap()).fold(0f64, f64::max);
    let steps = 200_000;
    let mut prev = eval(-bound);
    for i in 1..=steps {
        let x = -bound + 2.0 * bound * i as f64 / steps as f64;
        let y = eval(x);
        if y == 0.0 || (y > 0.0) != (prev > 0.0) {
            return true;
        }
        prev = y;
    }
    false
}

/// The elements `x + y ω` (both roots) of a monic integer polynomial of
/// degree at most 2, or its rational roots when linear.
fn integer_pairs(chi: &PolyZ, disc: i64) -> Vec<(i64, i64)> {
    let c: Vec<i64> = chi.iter().map(|x| x.to_i64().unwrap()).collect();
    if c.len() == 2 {
        return vec![(-c[0], 0)];
    }
    let (s, n) = (-c[1], c[0]);
    let (t, _) = omega_trace_norm(disc);
    // γ = x + y ω has trace 2x + y t; its discriminant is y² disc
    let d2 = s * s - 4 * n;
    if d2 == 0 {
        return vec![(s / 2, 0)];
    }
    if d2 % disc != 0 {
        return Vec::new();
    }
    let q = d2 / disc;
    let y = (q as f64).sqrt().round() as i64;
    if y * y != q {
        return Vec::new();
    }
    let mut out = Vec::new();
    for yy in [y, -y] {
        let twice_x = s - yy * t;
        if twice_x % 2 == 0 {
            out.push((twice_x / 2, yy));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_counts() {
        assert_eq!(hermite_reps(2).len(), 7);
        assert_eq!(hermite_reps(3).len(), 13);
        assert!(hermite_reps(5).iter().all(|m| det3(m) == 5));
    }

    #[test]
    fn expansion_is_unimodular() {
        for m in hermite_reps(5) {
            let cols = [0, 1, 2].map(|j| [m[0][j], m[1][j], m[2][j]]);
            for (c, _) in unimodular_expansion(cols) {
                assert_eq!(det3(&columns(&c)).abs(), 1);
            }
        }
    }

    #[test]
    fn hecke_operators_commute() {
        let f = Fp::new(CRT_PRIMES[0]).unwrap();
        let s = Sl3Symbols::new(17, f).unwrap();
        let t2 = s.hecke(2).unwrap();
        let t3 = s.hecke(3).unwrap();
        let a = crate::linalg::dense_mul(&f, &t2, &t3);
        let b = crate::linalg::dense_mul(&f, &t3, &t2);
        assert_eq!(a, b);
    }
}
