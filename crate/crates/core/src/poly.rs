//! Univariate polynomials over F_p and over Z, stored low degree first.
//!
//! Factoring over F_p is distinct-degree followed by Cantor–Zassenhaus with
//! the deterministic splitting sequence `(x + a)^((p^d - 1)/2) - 1`,
//! `a = 0, 1, 2, …`. Factoring over Z lifts a factorization modulo a
//! prime with Hensel steps and recombines.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Dense, Fp};

/// Polynomial over F_p; no trailing zeros, the zero polynomial is empty.
pub type PolyFp = Vec<u32>;

/// Polynomial over Z; no trailing zeros.
pub type PolyZ = Vec<BigInt>;

pub fn trim(mut a: PolyFp) -> PolyFp {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn degree(a: &[u32]) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn add(f: &Fp, a: &[u32], b: &[u32]) -> PolyFp {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| f.add(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0))).collect())
}

pub fn sub(f: &Fp, a: &[u32], b: &[u32]) -> PolyFp {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| f.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0))).collect())
}

pub fn scale(f: &Fp, a: &[u32], c: u32) -> PolyFp {
    trim(a.iter().map(|&x| f.mul(x, c)).collect())
}

pub fn mul(f: &Fp, a: &[u32], b: &[u32]) -> PolyFp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    let p = f.p as u64;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p;
        }
    }
    trim(out.into_iter().map(|x| x as u32).collect())
}

/// Quotient and remainder; panics on division by zero.
pub fn divrem(f: &Fp, a: &[u32], b: &[u32]) -> (PolyFp, PolyFp) {
    let db = degree(b).expect("division by the zero polynomial");
    let inv = f.inv(b[db]);
    let mut r: Vec<u32> = a.to_vec();
    if r.len() <= db {
        return (Vec::new(), trim(r));
    }
    let mut q = vec![0u32; r.len() - db];
    for i in (0..q.len()).rev() {
        let c = f.mul(r[i + db], inv);
        q[i] = c;
        if c != 0 {
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = f.sub(r[i + j], f.mul(c, y));
            }
        }
    }
    r.truncate(db);
    (trim(q), trim(r))
}

pub fn rem(f: &Fp, a: &[u32], b: &[u32]) -> PolyFp {
    divrem(f, a, b).1
}

pub fn monic(f: &Fp, a: &[u32]) -> PolyFp {
    match a.last() {
        None => Vec::new(),
        Some(&l) => scale(f, a, f.inv(l)),
    }
}

/// Monic greatest common divisor.
pub fn gcd(f: &Fp, a: &[u32], b: &[u32]) -> PolyFp {
    let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    monic(f, &x)
}

pub fn eval(f: &Fp, a: &[u32], x: u32) -> u32 {
    a.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

pub fn derivative(f: &Fp, a: &[u32]) -> PolyFp {
    trim(a.iter().enumerate().skip(1).map(|(i, &c)| f.mul(c, (i as u64 % f.p as u64) as u32)).collect())
}

fn mulmod(f: &Fp, a: &[u32], b: &[u32], m: &[u32]) -> PolyFp {
    rem(f, &mul(f, a, b), m)
}

/// `base^e mod m`.
pub fn powmod(f: &Fp, base: &[u32], e: &BigUint, m: &[u32]) -> PolyFp {
    let mut result: PolyFp = rem(f, &[1], m);
    let b = rem(f, base, m);
    for i in (0..e.bits()).rev() {
        result = mulmod(f, &result, &result, m);
        if e.bit(i) {
            result = mulmod(f, &result, &b, m);
        }
    }
    result
}

/// Monic polynomial with the given roots.
pub fn from_roots(f: &Fp, roots: &[u32]) -> PolyFp {
    roots.iter().fold(vec![1], |acc, &r| mul(f, &acc, &[f.neg(r), 1]))
}

/// Monic irreducible factors with multiplicities, sorted by (degree,
/// coefficients).
pub fn factor(f: &Fp, a: &[u32]) -> Vec<(PolyFp, usize)> {
    let a = monic(f, a);
    let mut out = Vec::new();
    if degree(&a).unwrap_or(0) == 0 {
        return out;
    }
    for (sq, mult) in squarefree(f, &a) {
        for (g, d) in distinct_degree(f, &sq) {
            for h in equal_degree(f, &g, d) {
                out.push((h, mult));
            }
        }
    }
    out.sort_by(|x, y| (x.0.len(), &x.0, x.1).cmp(&(y.0.len(), &y.0, y.1)));
    out
}

/// Square-free decomposition `a = Π s_i^i` of a monic polynomial.
fn squarefree(f: &Fp, a: &[u32]) -> Vec<(PolyFp, usize)> {
    let mut out = Vec::new();
    let d = derivative(f, a);
    if d.is_empty() {
        // a(x) = b(x^p) = b(x)^p
        let b: PolyFp = a.iter().step_by(f.p as usize).copied().collect();
        for (s, m) in squarefree(f, &b) {
            out.push((s, m * f.p as usize));
        }
        return out;
    }
    let mut c = gcd(f, a, &d);
    let mut w = divrem(f, a, &c).0;
    let mut i = 1;
    while degree(&w).unwrap_or(0) > 0 {
        let y = gcd(f, &w, &c);
        let z = divrem(f, &w, &y).0;
        if degree(&z).unwrap_or(0) > 0 {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = divrem(f, &c, &w).0;
    }
    if degree(&c).unwrap_or(0) > 0 {
        for (s, m) in squarefree(f, &c) {
            let merged = out.iter_mut().find(|(t, _)| *t == s);
            match merged {
                Some(e) => e.1 += m,
                None => out.push((s, m)),
            }
        }
    }
    out
}

fn distinct_degree(f: &Fp, a: &[u32]) -> Vec<(PolyFp, usize)> {
    let mut out = Vec::new();
    let mut rest = a.to_vec();
    let p = BigUint::from(f.p);
    let mut h: PolyFp = vec![0, 1];
    let mut d = 0;
    while degree(&rest).unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = powmod(f, &h, &p, &rest);
        let g = gcd(f, &rest, &sub(f, &h, &[0, 1]));
        if degree(&g).unwrap_or(0) > 0 {
            rest = divrem(f, &rest, &g).0;
            h = rem(f, &h, &rest);
            out.push((g, d));
        }
    }
    if let Some(dr) = degree(&rest) {
        if dr > 0 {
            out.push((rest, dr));
        }
    }
    out
}

fn equal_degree(f: &Fp, a: &[u32], d: usize) -> Vec<PolyFp> {
    let n = degree(a).unwrap_or(0);
    if n == d {
        return vec![a.to_vec()];
    }
    let e = (BigUint::from(f.p).pow(d as u32) - 1u32) / 2u32;
    let mut shift = 0u32;
    loop {
        let w = sub(f, &powmod(f, &[shift, 1], &e, a), &[1]);
        let g = gcd(f, a, &w);
        let dg = degree(&g).unwrap_or(0);
        if dg > 0 && dg < n {
            let mut out = equal_degree(f, &g, d);
            out.extend(equal_degree(f, &divrem(f, a, &g).0, d));
            return out;
        }
        shift += 1;
        assert!(shift < f.p, "equal-degree splitting exhausted the field");
    }
}

/// Characteristic polynomial `det(x I - A)` via Hessenberg reduction.
pub fn charpoly(f: &Fp, a: &Dense) -> PolyFp {
    let n = a.len();
    let mut h = a.clone();
    for j in 0..n.saturating_sub(2) {
        let Some(i) = (j + 1..n).find(|&i| h[i][j] != 0) else { continue };
        if i != j + 1 {
            h.swap(i, j + 1);
            for row in h.iter_mut() {
                row.swap(i, j + 1);
            }
        }
        let inv = f.inv(h[j + 1][j]);
        for r in j + 2..n {
            let u = f.mul(h[r][j], inv);
            if u == 0 {
                continue;
            }
            for c in 0..n {
                let v = f.mul(u, h[j + 1][c]);
                h[r][c] = f.sub(h[r][c], v);
            }
            for row in h.iter_mut() {
                let v = f.mul(u, row[r]);
                row[j + 1] = f.add(row[j + 1], v);
            }
        }
    }
    let mut p: Vec<PolyFp> = vec![vec![1]];
    for m in 0..n {
        let mut next = mul(f, &[f.neg(h[m][m]), 1], &p[m]);
        let mut t = 1u32;
        for i in (0..m).rev() {
            t = f.mul(t, h[i + 1][i]);
            let c = f.mul(h[i][m], t);
            next = sub(f, &next, &scale(f, &p[i], c));
        }
        p.push(next);
    }
    p.pop().unwrap()
}

/// `g(A)` by Horner's rule.
pub fn eval_matrix(f: &Fp, g: &[u32], a: &Dense) -> Dense {
    let n = a.len();
    let mut acc = vec![vec![0u32; n]; n];
    for &c in g.iter().rev() {
        acc = crate::linalg::dense_mul(f, &acc, a);
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] = f.add(row[i], c);
        }
    }
    if g.is_empty() {
        return vec![vec![0u32; n]; n];
    }
    acc
}

/// Lagrange interpolation through `(x_i, y_i)` with distinct `x_i`.
pub fn interpolate(f: &Fp, xs: &[u32], ys: &[u32]) -> PolyFp {
    let mut out: PolyFp = Vec::new();
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        if yi == 0 {
            continue;
        }
        let mut basis: PolyFp = vec![1];
        let mut denom = 1u32;
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                basis = mul(f, &basis, &[f.neg(xj), 1]);
                denom = f.mul(denom, f.sub(xi, xj));
            }
        }
        out = add(f, &out, &scale(f, &basis, f.mul(yi, f.inv(denom))));
    }
    out
}

/// Determinant of a square matrix over F_p.
pub fn det(f: &Fp, a: &Dense) -> u32 {
    let n = a.len();
    let mut m = a.clone();
    let mut d = 1u32;
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| m[r][c] != 0) else { return 0 };
        if r != c {
            m.swap(r, c);
            d = f.neg(d);
        }
        d = f.mul(d, m[c][c]);
        let inv = f.inv(m[c][c]);
        for r in c + 1..n {
            let u = f.mul(m[r][c], inv);
            if u != 0 {
                for k in c..n {
                    let v = f.mul(u, m[c][k]);
                    m[r][k] = f.sub(m[r][k], v);
                }
            }
        }
    }
    d
}

/// Determinant of a matrix whose entries are polynomials over F_p, given the
/// degree bound of the result; computed by evaluation and interpolation.
pub fn det_poly_matrix(f: &Fp, entries: &[Vec<PolyFp>], degree_bound: usize) -> PolyFp {
    let n = entries.len();
    assert!((degree_bound as u64) < f.p as u64, "too few evaluation points");
    let xs: Vec<u32> = (0..=degree_bound as u32).collect();
    let ys: Vec<u32> = xs
        .iter()
        .map(|&x| {
            let m: Dense = (0..n).map(|i| (0..n).map(|j| eval(f, &entries[i][j], x)).collect()).collect();
            det(f, &m)
        })
        .collect();
    interpolate(f, &xs, &ys)
}

// ---------------------------------------------------------------- over Z

pub fn z_trim(mut a: PolyZ) -> PolyZ {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

pub fn z_from_i64(c: &[i64]) -> PolyZ {
    z_trim(c.iter().map(|&x| BigInt::from(x)).collect())
}

pub fn z_mul(a: &[BigInt], b: &[BigInt]) -> PolyZ {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    z_trim(out)
}

pub fn z_add(a: &[BigInt], b: &[BigInt]) -> PolyZ {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    z_trim((0..n).map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).collect())
}

pub fn z_scale(a: &[BigInt], c: &BigInt) -> PolyZ {
    z_trim(a.iter().map(|x| x * c).collect())
}

pub fn z_mod(f: &Fp, a: &[BigInt]) -> PolyFp {
    let p = BigInt::from(f.p);
    trim(a.iter().map(|x| x.mod_floor(&p).to_u32().unwrap()).collect())
}

/// Exact division over Z, or `None` if `b` does not divide `a`.
pub fn z_divexact(a: &[BigInt], b: &[BigInt]) -> Option<PolyZ> {
    let db = b.len().checked_sub(1)?;
    let lead = &b[db];
    let mut r: Vec<BigInt> = a.to_vec();
    if r.len() <= db {
        return r.iter().all(|x| x.is_zero()).then(Vec::new);
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let (c, m) = r[i + db].div_rem(lead);
        if !m.is_zero() {
            return None;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] -= &c * y;
        }
        q[i] = c;
    }
    r.iter().all(|x| x.is_zero()).then(|| z_trim(q))
}

pub fn content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Primitive part with positive leading coefficient.
pub fn primitive_part(a: &[BigInt]) -> PolyZ {
    let c = content(a);
    if c.is_zero() {
        return Vec::new();
    }
    let s = if a.last().unwrap().is_negative() { -c } else { c };
    a.iter().map(|x| x / &s).collect()
}

/// Symmetric lift of an F_p polynomial.
pub fn z_lift(f: &Fp, a: &[u32]) -> PolyZ {
    a.iter().map(|&x| BigInt::from(f.symmetric(x))).collect()
}

fn q_gcd(a: &[BigInt], b: &[BigInt]) -> PolyZ {
    let to_q = |v: &[BigInt]| -> Vec<BigRational> { v.iter().map(|x| BigRational::from_integer(x.clone())).collect() };
    let mut x = to_q(a);
    let mut y = to_q(b);
    let trim_q = |mut v: Vec<BigRational>| {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        v
    };
    x = trim_q(x);
    y = trim_q(y);
    while !y.is_empty() {
        let mut r = x.clone();
        let dy = y.len() - 1;
        while r.len() > dy {
            let c = r.last().unwrap() / y.last().unwrap();
            let off = r.len() - 1 - dy;
            for (j, v) in y.iter().enumerate() {
                r[off + j] -= &c * v;
            }
            r.pop();
            r = trim_q(r);
        }
        x = y;
        y = r;
    }
    // clear denominators
    let l = x.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    primitive_part(&x.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect::<Vec<_>>())
}

fn z_derivative(a: &[BigInt]) -> PolyZ {
    z_trim(a.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
}

/// Irreducible factors over Z (primitive, positive leading coefficient)
/// with multiplicities, plus the content.
pub fn z_factor(a: &[BigInt]) -> Result<(BigInt, Vec<(PolyZ, usize)>)> {
    let a = z_trim(a.to_vec());
    if a.is_empty() {
        return Err(Error::Consistency("cannot factor the zero polynomial".into()));
    }
    let c = content(&a) * if a.last().unwrap().is_negative() { -1 } else { 1 };
    let prim = primitive_part(&a);
    let mut out: Vec<(PolyZ, usize)> = Vec::new();
    // square-free decomposition over Q (Yun)
    let mut mult = 1;
    let mut g = q_gcd(&prim, &z_derivative(&prim));
    let mut w = z_divexact(&prim, &g).ok_or_else(|| Error::Consistency("square-free split".into()))?;
    while w.len() > 1 {
        let y = q_gcd(&w, &g);
        let z = z_divexact(&w, &y).unwrap();
        if z.len() > 1 {
            for h in factor_squarefree(&z)? {
                out.push((h, mult));
            }
        }
        mult += 1;
        g = z_divexact(&g, &y).unwrap();
        w = y;
    }
    debug_assert!(g.len() <= 1);
    out.sort();
    Ok((c, out))
}

const HENSEL_PRIMES: [u32; 8] = [2_147_483_629, 2_147_483_587, 2_147_483_579, 2_147_483_563, 2_147_483_549, 2_147_483_543, 2_147_483_497, 2_147_483_489];

/// Factors of a primitive square-free polynomial.
fn factor_squarefree(a: &[BigInt]) -> Result<Vec<PolyZ>> {
    let n = a.len() - 1;
    if n == 1 {
        return Ok(vec![primitive_part(a)]);
    }
    let lc = a[n].clone();
    let (f, modular) = HENSEL_PRIMES
        .iter()
        .find_map(|&q| {
            let f = Fp::new(q).ok()?;
            let am = z_mod(&f, a);
            if am.len() != a.len() {
                return None;
            }
            let fac = factor(&f, &am);
            fac.iter().all(|(_, m)| *m == 1).then_some((f, fac))
        })
        .ok_or_else(|| Error::Consistency("no prime keeps the polynomial square-free".into()))?;
    let mods: Vec<PolyFp> = modular.into_iter().map(|(g, _)| g).collect();
    if mods.len() == 1 {
        return Ok(vec![primitive_part(a)]);
    }
    // coefficient bound for factors (Mignotte), times the leading coefficient
    let norm2: BigInt = a.iter().map(|x| x * x).sum();
    let norm = norm2.sqrt() + 1;
    let bound = (BigInt::one() << n) * norm * lc.abs() * 2;
    let q = BigInt::from(f.p);
    let mut modulus = q.clone();
    let mut k = 1;
    while modulus <= bound {
        modulus *= &q;
        k += 1;
    }
    let lifted = hensel_lift(&f, a, &mods, k);
    Ok(recombine(a, lifted, &modulus))
}

fn zmod(a: &[BigInt], m: &BigInt) -> PolyZ {
    z_trim(a.iter().map(|x| x.mod_floor(m)).collect())
}

fn symmetric(x: &BigInt, m: &BigInt) -> BigInt {
    let r = x.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

/// Division by a monic polynomial modulo `m`.
fn zdivrem_monic(a: &[BigInt], b: &[BigInt], m: &BigInt) -> (PolyZ, PolyZ) {
    let db = b.len() - 1;
    let mut r = zmod(a, m);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut qv = vec![BigInt::zero(); r.len() - db];
    for i in (0..qv.len()).rev() {
        let c = r[i + db].clone();
        if !c.is_zero() {
            for (j, y) in b.iter().enumerate() {
                r[i + j] = (&r[i + j] - &c * y).mod_floor(m);
            }
        }
        qv[i] = c;
    }
    r.truncate(db);
    (z_trim(qv), z_trim(r))
}

/// Lifts monic modular factors of `a / lc(a)` to modulus `q^k`.
fn hensel_lift(f: &Fp, a: &[BigInt], mods: &[PolyFp], k: u32) -> Vec<PolyZ> {
    let q = BigInt::from(f.p);
    let target = q.pow(k);
    let lc = a.last().unwrap().clone();
    // monic version of a modulo q^k
    let inv_lc = lc.modinv(&target).expect("leading coefficient invertible");
    let monic_a = zmod(&z_scale(a, &inv_lc), &target);
    let mut out = Vec::new();
    let mut rest = monic_a;
    let mut rest_mod: PolyFp = mods.iter().skip(1).fold(vec![1], |acc, g| mul(f, &acc, g));
    for (idx, g) in mods.iter().enumerate() {
        if idx + 1 == mods.len() {
            out.push(rest.clone());
            break;
        }
        let (gl, hl) = hensel_pair(f, &rest, g, &rest_mod, k);
        out.push(gl);
        rest = hl;
        if idx + 1 < mods.len() {
            rest_mod = divrem(f, &rest_mod, &mods[idx + 1]).0;
        }
    }
    out
}

/// Lifts `a ≡ g h (mod q)` with `g, h` monic to modulus `q^k`.
fn hensel_pair(f: &Fp, a: &[BigInt], g: &[u32], h: &[u32], k: u32) -> (PolyZ, PolyZ) {
    let q = BigInt::from(f.p);
    // s g + t h = 1 mod q
    let (s, t) = bezout(f, g, h);
    let (s, t) = (z_lift(f, &s), z_lift(f, &t));
    let mut gz: PolyZ = g.iter().map(|&x| BigInt::from(x)).collect();
    let mut hz: PolyZ = h.iter().map(|&x| BigInt::from(x)).collect();
    let mut m = q.clone();
    for _ in 1..k {
        let next = &m * &q;
        let prod = z_mul(&gz, &hz);
        let diff: PolyZ = z_add(a, &z_scale(&prod, &BigInt::from(-1)));
        let e: PolyZ = diff.iter().map(|x| (x / &m).mod_floor(&q)).collect();
        // g' = g + m (t e mod g), h' = h + m (s e mod h)
        let dg = zdivrem_monic(&z_mul(&t, &e), &gz.iter().map(|x| x.mod_floor(&q)).collect::<Vec<_>>(), &q).1;
        let dh = zdivrem_monic(&z_mul(&s, &e), &hz.iter().map(|x| x.mod_floor(&q)).collect::<Vec<_>>(), &q).1;
        gz = zmod(&z_add(&gz, &z_scale(&dg, &m)), &next);
        hz = zmod(&z_add(&hz, &z_scale(&dh, &m)), &next);
        m = next;
    }
    (gz, hz)
}

/// `s, t` with `s g + t h = 1` over F_p for coprime `g, h`.
fn bezout(f: &Fp, g: &[u32], h: &[u32]) -> (PolyFp, PolyFp) {
    let (mut r0, mut r1) = (g.to_vec(), h.to_vec());
    let (mut s0, mut s1): (PolyFp, PolyFp) = (vec![1], Vec::new());
    let (mut t0, mut t1): (PolyFp, PolyFp) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (qq, r) = divrem(f, &r0, &r1);
        let s = sub(f, &s0, &mul(f, &qq, &s1));
        let t = sub(f, &t0, &mul(f, &qq, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    let inv = f.inv(r0[0]);
    (scale(f, &s0, inv), scale(f, &t0, inv))
}

fn recombine(a: &[BigInt], mut lifted: Vec<PolyZ>, modulus: &BigInt) -> Vec<PolyZ> {
    let mut out = Vec::new();
    let mut rest = a.to_vec();
    let mut size = 1;
    'sizes: while 2 * size <= lifted.len() {
        let n = lifted.len();
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            let lc = rest.last().unwrap().clone();
            let mut cand: PolyZ = vec![lc];
            for &i in &subset {
                cand = zmod(&z_mul(&cand, &lifted[i]), modulus);
            }
            let cand = primitive_part(&z_trim(cand.iter().map(|x| symmetric(x, modulus)).collect()));
            if let Some(qt) = z_divexact(&rest, &cand) {
                out.push(cand);
                rest = qt;
                for &i in subset.iter().rev() {
                    lifted.remove(i);
                }
                continue 'sizes;
            }
            if !next_subset(&mut subset, n) {
                break;
            }
        }
        size += 1;
    }
    out.push(primitive_part(&rest));
    out
}

/// Advances to the next `k`-subset of `0..n` in lexicographic order.
fn next_subset(s: &mut [usize], n: usize) -> bool {
    let k = s.len();
    for i in (0..k).rev() {
        if s[i] < n - k + i {
            s[i] += 1;
            for j in i + 1..k {
                s[j] = s[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Chinese remaindering of residues for pairwise coprime moduli; returns
/// the symmetric representative.
pub fn crt(residues: &[(u32, u32)]) -> BigInt {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for &(r, p) in residues {
        let pb = BigInt::from(p);
        // x' = x + m * ((r - x) * m^{-1} mod p)
        let inv = m.modinv(&pb).expect("coprime moduli");
        let t = ((BigInt::from(r) - &x) * inv).mod_floor(&pb);
        x += &m * t;
        m *= pb;
    }
    symmetric(&x, &m)
}

/// Integer polynomial from its images modulo distinct primes, in the
/// symmetric range; `None` unless dropping the last prime gives the same
/// answer.
pub fn crt_poly(images: &[(PolyFp, u32)]) -> Option<PolyZ> {
    let n = images.iter().map(|(a, _)| a.len()).max()?;
    let lift = |count: usize| -> PolyZ {
        let c = (0..n)
            .map(|i| crt(&images[..count].iter().map(|(a, p)| (*a.get(i).unwrap_or(&0), *p)).collect::<Vec<_>>()))
            .collect();
        z_trim(c)
    };
    let all = lift(images.len());
    (images.len() >= 2 && lift(images.len() - 1) == all).then_some(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fp() -> Fp {
        Fp::new(31991).unwrap()
    }

    #[test]
    fn charpoly_of_companion() {
        let f = fp();
        // companion of x^3 - 2x + 5
        let c: Dense = vec![vec![0, 0, f.from_i64(-5)], vec![1, 0, 2], vec![0, 1, 0]];
        assert_eq!(charpoly(&f, &c), vec![5, f.from_i64(-2), 0, 1]);
    }

    #[test]
    fn factors_multiply_back() {
        let f = fp();
        let a = mul(&f, &mul(&f, &[1, 0, 1], &[1, 0, 1]), &from_roots(&f, &[3, 4, 4]));
        let fac = factor(&f, &a);
        let back = fac.iter().fold(vec![1], |acc, (g, m)| (0..*m).fold(acc, |x, _| mul(&f, &x, g)));
        assert_eq!(back, monic(&f, &a));
        assert!(fac.contains(&(vec![f.from_i64(-4), 1], 2)));
    }

    #[test]
    fn integer_factoring() {
        // (1 - T)(1 - 2T)(1 + 8T + 32T^2)
        let p = z_mul(&z_mul(&z_from_i64(&[1, -1]), &z_from_i64(&[1, -2])), &z_from_i64(&[1, 8, 32]));
        let (_, fac) = z_factor(&p).unwrap();
        assert_eq!(fac.len(), 3);
        let irr = z_from_i64(&[1, 7, 24, 56, 64]);
        let (_, fac) = z_factor(&irr).unwrap();
        assert_eq!(fac, vec![(irr.clone(), 1)]);
        // x^4 + 4 = (x^2 + 2x + 2)(x^2 - 2x + 2): irreducible mod every prime
        let (_, fac) = z_factor(&z_from_i64(&[4, 0, 0, 0, 1])).unwrap();
        assert_eq!(fac.len(), 2);
    }

    #[test]
    fn crt_recovers_negative() {
        assert_eq!(crt(&[(31991 - 7, 31991), (12379 - 7, 12379)]), BigInt::from(-7));
    }

    proptest! {
        #[test]
        fn charpoly_annihilates(entries in proptest::collection::vec(0u32..31991, 16)) {
            let f = fp();
            let a: Dense = entries.chunks(4).map(|r| r.to_vec()).collect();
            let chi = charpoly(&f, &a);
            prop_assert_eq!(chi.len(), 5);
            prop_assert!(crate::linalg::dense_is_zero(&eval_matrix(&f, &chi, &a)));
        }

        #[test]
        fn integer_factorization_round_trips(
            a in proptest::collection::vec(-6i64..=6, 1..4),
            b in proptest::collection::vec(-6i64..=6, 1..4),
            c in proptest::collection::vec(-6i64..=6, 1..3),
        ) {
            let (pa, pb, pc) = (z_from_i64(&a), z_from_i64(&b), z_from_i64(&c));
            prop_assume!(!pa.is_empty() && !pb.is_empty() && !pc.is_empty());
            let prod = z_mul(&z_mul(&pa, &pb), &pc);
            let (cont, fac) = z_factor(&prod).unwrap();
            let mut back = vec![cont];
            for (g, m) in &fac {
                for _ in 0..*m {
                    back = z_mul(&back, g);
                }
            }
            prop_assert_eq!(back, prod);
        }
    }
}
