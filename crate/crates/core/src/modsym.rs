//! Modular symbols for `Γ₀(N) ⊂ SL(2,Z)` at prime level and even weight,
//! used to generate newform data: Galois orbits of cuspidal Hecke
//! eigenforms, the integer characteristic polynomial of `T_ℓ` on each
//! orbit, and the sign of the functional equation.
//!
//! Manin symbols `[X^i Y^(k-2-i), (c:d)]` modulo the two-term, three-term
//! and star relations span `M_k(Γ₀(N))^+`; Hecke operators are Merel's sums
//! over `{[[a,b],[c,d]] : ad - bc = n, a > b ≥ 0, d > c ≥ 0}`. At prime
//! level every cusp form is new, and the Eisenstein part is the
//! generalized `T_2`-eigenspace for `1 + 2^(k-1)`, which lies outside the
//! Ramanujan window of cusp forms. Computations run modulo several
//! 31-bit primes; integer characteristic polynomials come from Chinese
//! remaindering and are checked for stability with one extra prime.

use num_bigint::BigInt;


use crate::coset::is_prime;
use crate::eigen::restrict;
use crate::error::{Error, Result};
use crate::linalg::{dense_kernel, dense_transpose, normalize, Dense, Echelon, Fp, SparseVec};
use crate::poly::{self, charpoly, crt_poly, eval_matrix, z_factor, PolyFp, PolyZ};

type M2 = [[i64; 2]; 2];

const SIGMA: M2 = [[0, -1], [1, 0]];
const TAU: M2 = [[0, -1], [1, -1]];
const STAR: M2 = [[-1, 0], [0, 1]];

/// Primes used for modular computations.
pub const CRT_PRIMES: [u32; 5] = [2_147_483_629, 2_147_483_587, 2_147_483_579, 2_147_483_563, 2_147_483_549];

/// The plus quotient of weight-`k` modular symbols modulo one prime.
pub struct ModularSymbols {
    pub level: u64,
    pub weight: u32,
    pub field: Fp,
    relations: Echelon,
    /// Generators surviving as quotient basis, in order.
    pub free: Vec<u32>,
    coord: Vec<Option<usize>>,
}

fn binomials(n: usize) -> Vec<Vec<i64>> {
    let mut c = vec![vec![0i64; n + 1]; n + 1];
    for i in 0..=n {
        c[i][0] = 1;
        for j in 1..=i {
            c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
        }
    }
    c
}

impl ModularSymbols {
    pub fn new(level: u64, weight: u32, field: Fp) -> Result<ModularSymbols> {
        if !is_prime(level) {
            return Err(Error::CompositeLevel(level));
        }
        if weight < 2 || weight % 2 == 1 {
            return Err(Error::Consistency(format!("unsupported weight {weight}")));
        }
        let ngens = (weight as usize - 1) * (level as usize + 1);
        let mut ms = ModularSymbols {
            level,
            weight,
            field,
            relations: Echelon::new(field, ngens),
            free: Vec::new(),
            coord: Vec::new(),
        };
        let f = field;
        for g in 0..ngens {
            let x = vec![(g as u32, 1u32)];
            let s = ms.act(g, &SIGMA);
            ms.relations.insert(&normalize(&f, [x.clone(), s].concat()), 0);
            let t1 = ms.act(g, &TAU);
            let t2 = ms.act(g, &mul2(&TAU, &TAU));
            ms.relations.insert(&normalize(&f, [x.clone(), t1, t2].concat()), 0);
            let st: Vec<(u32, u32)> = ms.act(g, &STAR).into_iter().map(|(i, c)| (i, f.neg(c))).collect();
            ms.relations.insert(&normalize(&f, [x, st].concat()), 0);
        }
        ms.free = (0..ngens as u32).filter(|&c| !ms.relations.is_pivot(c as usize)).collect();
        ms.coord = vec![None; ngens];
        for (i, &c) in ms.free.iter().enumerate() {
            ms.coord[c as usize] = Some(i);
        }
        Ok(ms)
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    fn p1_index(&self, u: i64, v: i64) -> Option<usize> {
        let n = self.level as i64;
        let (u, v) = (u.rem_euclid(n), v.rem_euclid(n));
        if v != 0 {
            let inv = Fp { p: n as u32 }.inv(v as u32) as i64;
            Some((u * inv % n) as usize)
        } else if u != 0 {
            Some(n as usize)
        } else {
            None
        }
    }

    fn p1_point(&self, i: usize) -> (i64, i64) {
        if i == self.level as usize {
            (1, 0)
        } else {
            (i as i64, 1)
        }
    }

    /// `[P, (u:v)]·g = [P(aX + bY, cX + dY), (u:v) g]`.
    pub fn act(&self, gen: usize, g: &M2) -> SparseVec {
        let f = self.field;
        let w = self.weight as usize - 2;
        let npts = self.level as usize + 1;
        let (i, pt) = (gen / npts, gen % npts);
        let (u, v) = self.p1_point(pt);
        let [[a, b], [c, d]] = *g;
        let Some(target) = self.p1_index(u * a + v * c, u * b + v * d) else { return Vec::new() };
        let binom = binomials(w);
        // (aX + bY)^i (cX + dY)^(w-i) = Σ coeff_j X^j Y^(w-j)
        let mut coeff = vec![0i128; w + 1];
        for s in 0..=i {
            let left = binom[i][s] as i128 * (a as i128).pow(s as u32) * (b as i128).pow((i - s) as u32);
            for t in 0..=(w - i) {
                let right = binom[w - i][t] as i128 * (c as i128).pow(t as u32) * (d as i128).pow((w - i - t) as u32);
                coeff[s + t] += left * right;
            }
        }
        let out: Vec<(u32, u32)> = coeff
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(j, &x)| ((j * npts + target) as u32, f.from_i64((x % f.p as i128) as i64)))
            .collect();
        normalize(&f, out)
    }

    /// Coordinates of a combination of generators in the quotient basis.
    pub fn project(&self, v: &SparseVec) -> Vec<u32> {
        let w = self.relations.reduce_shared(v);
        let mut out = vec![0u32; self.dim()];
        for (c, x) in w {
            if let Some(i) = self.coord[c as usize] {
                out[i] = x;
            }
        }
        out
    }

    /// Matrix of `T_n` (columns are images of basis vectors).
    pub fn hecke(&self, n: u64) -> Dense {
        let f = self.field;
        let mats = heilbronn(n as i64);
        let d = self.dim();
        let mut m = vec![vec![0u32; d]; d];
        for (j, &g) in self.free.iter().enumerate() {
            let mut acc: Vec<(u32, u32)> = Vec::new();
            for h in &mats {
                acc.extend(self.act(g as usize, h));
            }
            let col = self.project(&normalize(&f, acc));
            for (i, x) in col.into_iter().enumerate() {
                m[i][j] = x;
            }
        }
        m
    }
}

fn mul2(a: &M2, b: &M2) -> M2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// Merel's matrices of determinant `n`.
pub fn heilbronn(n: i64) -> Vec<M2> {
    let mut out = Vec::new();
    for a in 1..=n {
        for b in 0..a {
            for d in 1..=n {
                for c in 0..d {
                    if a * d - b * c == n {
                        out.push([[a, b], [c, d]]);
                    }
                }
            }
        }
    }
    out
}

/// `dim S_k(Γ₀(p))` for prime `p` and even `k ≥ 2`.
pub fn cusp_form_dimension(p: u64, k: u64) -> u64 {
    let p = p as i64;
    let k = k as i64;
    // elliptic points of order 2 and 3
    let nu2 = match p {
        2 => 1,
        _ if p % 4 == 1 => 2,
        _ => 0,
    };
    let nu3 = match p {
        3 => 1,
        _ if p % 3 == 1 => 2,
        _ => 0,
    };
    let index = p + 1;
    let cusps = 2;
    // genus via Riemann–Hurwitz, times 12
    let g12 = 12 + index - 3 * nu2 - 4 * nu3 - 6 * cusps;
    let g = g12 / 12;
    if k == 2 {
        return g as u64;
    }
    ((k - 1) * (g - 1) + (k / 2 - 1) * cusps + nu2 * (k / 4) + nu3 * (k / 3)) as u64
}

/// Galois orbit of newforms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitData {
    pub level: u64,
    pub weight: u32,
    /// Integer characteristic polynomial of `T_ℓ` on the orbit, high degree
    /// first, monic.
    pub charpolys: Vec<(u64, Vec<BigInt>)>,
    pub sign: i8,
}

impl OrbitData {
    pub fn degree(&self) -> usize {
        self.charpolys.first().map_or(0, |c| c.1.len() - 1)
    }
}

struct PerPrime {
    f: Fp,
    ops: Vec<Dense>,
    atkin_lehner: Dense,
}

/// Newform orbits at prime level with charpolys at the given primes.
pub fn newform_orbits(level: u64, weight: u32, primes: &[u64]) -> Result<Vec<OrbitData>> {
    let expected = cusp_form_dimension(level, weight as u64) as usize;
    if expected == 0 {
        return Ok(Vec::new());
    }
    let eis = 1 + 2i64.pow(weight - 1);
    let mut per: Vec<PerPrime> = Vec::new();
    for &q in &CRT_PRIMES {
        let f = Fp::new(q)?;
        let ms = ModularSymbols::new(level, weight, f)?;
        let t2 = ms.hecke(2);
        let chi = charpoly(&f, &t2);
        let root = f.from_i64(eis);
        let mut h = chi.clone();
        loop {
            let (qt, r) = poly::divrem(&f, &h, &[f.neg(root), 1]);
            if !r.is_empty() {
                break;
            }
            h = qt;
        }
        let k = dense_transpose(&dense_kernel(&f, &eval_matrix(&f, &h, &t2), t2.len()));
        if k.first().map_or(0, |r| r.len()) != expected {
            return Err(Error::Consistency(format!(
                "cuspidal modular symbols at level {level}, weight {weight} have the wrong dimension"
            )));
        }
        let ops = primes.iter().map(|&l| restrict(&f, &ms.hecke(l), &k)).collect();
        let atkin_lehner = restrict(&f, &ms.hecke(level), &k);
        per.push(PerPrime { f, ops, atkin_lehner });
    }
    // a separating operator: T_2 + c T_3 + …
    let nops = primes.len();
    let mut chosen = None;
    for c in 0..20u32 {
        let combo: Vec<Dense> = per
            .iter()
            .map(|pp| {
                let f = pp.f;
                let mut m = pp.ops[0].clone();
                if nops > 1 {
                    for (i, row) in m.iter_mut().enumerate() {
                        for (j, x) in row.iter_mut().enumerate() {
                            *x = f.add(*x, f.mul(c, pp.ops[1][i][j]));
                        }
                    }
                }
                m
            })
            .collect();
        let chi = integer_charpoly(&per, &combo)?;
        let (_, fac) = z_factor(&chi)?;
        if fac.iter().all(|(_, m)| *m == 1) {
            chosen = Some((combo, fac));
            break;
        }
    }
    let (combo, fac) = chosen.ok_or_else(|| Error::Consistency("no separating Hecke combination".into()))?;
    let mut out = Vec::new();
    for (g, _) in fac {
        let mut restricted: Vec<Vec<Dense>> = Vec::new();
        let mut signs = Vec::new();
        for (pp, l) in per.iter().zip(&combo) {
            let f = pp.f;
            let gm = poly::z_mod(&f, &g);
            let w = dense_transpose(&dense_kernel(&f, &eval_matrix(&f, &gm, l), l.len()));
            if w.first().map_or(0, |r| r.len()) != g.len() - 1 {
                return Err(Error::Consistency("orbit subspace has the wrong dimension".into()));
            }
            restricted.push(pp.ops.iter().map(|op| restrict(&f, op, &w)).collect());
            let al = restrict(&f, &pp.atkin_lehner, &w);
            let scalar = level.pow(weight / 2 - 1) as i64;
            let s = if is_scalar(&al, f.from_i64(scalar)) {
                1i8
            } else if is_scalar(&al, f.from_i64(-scalar)) {
                -1
            } else {
                return Err(Error::Consistency("U_p is not ±p^(k/2-1) on an orbit".into()));
            };
            signs.push(s);
        }
        if signs.iter().any(|&s| s != signs[0]) {
            return Err(Error::Consistency("sign differs across primes".into()));
        }
        // a_p = -w p^(k/2-1), and the functional-equation sign is w (-1)^(k/2)
        let w = -signs[0];
        let sign = if (weight / 2) % 2 == 0 { w } else { -w };
        let mut charpolys = Vec::new();
        for (i, &l) in primes.iter().enumerate() {
            let mats: Vec<Dense> = restricted.iter().map(|r| r[i].clone()).collect();
            let chi = integer_charpoly(&per, &mats)?;
            charpolys.push((l, chi.into_iter().rev().collect()));
        }
        out.push(OrbitData { level, weight, charpolys, sign });
    }
    out.sort_by(|a, b| (a.degree(), &a.charpolys).cmp(&(b.degree(), &b.charpolys)));
    Ok(out)
}

fn is_scalar(m: &Dense, s: u32) -> bool {
    m.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &x)| x == if i == j { s } else { 0 }))
}

/// Integer characteristic polynomial (low degree first) from the matrices of
/// one operator modulo each prime.
fn integer_charpoly(per: &[PerPrime], mats: &[Dense]) -> Result<PolyZ> {
    let images: Vec<(PolyFp, u32)> = per.iter().zip(mats).map(|(pp, m)| (charpoly(&pp.f, m), pp.f.p)).collect();
    crt_poly(&images).ok_or_else(|| Error::Resource("characteristic polynomial exceeds the CRT range".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn as_i64(c: &[BigInt]) -> Vec<i64> {
        c.iter().map(|x| x.to_i64().unwrap()).collect()
    }

    #[test]
    fn dimension_formula() {
        // genus of X_0(p)
        let genus: Vec<u64> = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 53, 61, 73, 79]
            .iter()
            .map(|&p| cusp_form_dimension(p, 2))
            .collect();
        assert_eq!(genus, vec![0, 0, 0, 0, 1, 0, 1, 1, 2, 2, 2, 2, 4, 4, 5, 6]);
        assert_eq!(cusp_form_dimension(5, 4), 1);
        assert_eq!(cusp_form_dimension(11, 4), 2);
        assert_eq!(cusp_form_dimension(2, 4), 0);
    }

    #[test]
    fn level_11_weight_2() {
        let orbits = newform_orbits(11, 2, &[2, 3, 5, 7]).unwrap();
        assert_eq!(orbits.len(), 1);
        let o = &orbits[0];
        let a: Vec<Vec<i64>> = o.charpolys.iter().map(|(_, c)| as_i64(c)).collect();
        assert_eq!(a, vec![vec![1, 2], vec![1, 1], vec![1, -1], vec![1, 2]]);
        // a_11 = 1 for 11a, so the sign is +1
        assert_eq!(o.sign, 1);
    }

    #[test]
    fn level_37_weight_2_signs() {
        // 37a has rank 1 (sign -1), 37b rank 0 (sign +1)
        let orbits = newform_orbits(37, 2, &[2]).unwrap();
        let mut got: Vec<(Vec<i64>, i8)> = orbits.iter().map(|o| (as_i64(&o.charpolys[0].1), o.sign)).collect();
        got.sort();
        assert_eq!(got, vec![(vec![1, -0], 1), (vec![1, 2], -1)]);
    }

    #[test]
    fn hecke_multiplicativity_weight_4() {
        let f = Fp::new(CRT_PRIMES[0]).unwrap();
        let ms = ModularSymbols::new(13, 4, f).unwrap();
        let t2 = ms.hecke(2);
        let t3 = ms.hecke(3);
        let t4 = ms.hecke(4);
        let t6 = ms.hecke(6);
        let t2sq = crate::linalg::dense_mul(&f, &t2, &t2);
        let eight: Dense = (0..t2.len()).map(|i| (0..t2.len()).map(|j| if i == j { 8 } else { 0 }).collect()).collect();
        assert_eq!(crate::linalg::dense_sub(&f, &t2sq, &eight), t4);
        assert_eq!(crate::linalg::dense_mul(&f, &t2, &t3), t6);
    }
}
