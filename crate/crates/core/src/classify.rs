//! Hecke polynomials of eigenpackets and their classification as Eisenstein
//! or cuspidal.
//!
//! Matching is done on polynomials modulo the working prime: each
//! joint eigenspace of `T(ℓ,1), T(ℓ,2), T(ℓ,3)` carries the polynomial
//! `det(1 - B₁T + ℓB₂T² - ℓ³B₃T³ + ℓ⁶T⁴)` of its restricted operators,
//! and an Eisenstein template (a product over one Galois orbit) claims a
//! set of eigenspaces whose polynomials multiply to it. Whatever is left is
//! tested as a cuspidal candidate. Agreement is only established at the
//! primes computed, so a label means "consistent with".

use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::eigen::EigenBlock;
use crate::error::{Error, Result};
use crate::forms::Template;
use crate::linalg::{dense_is_zero, dense_mul, dense_sub, Dense, Fp};
use crate::poly::{self, det_poly_matrix, z_factor, z_from_i64, z_mod, PolyFp, PolyZ};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Label {
    IIa,
    IIb,
    IV,
    IIIa,
    IIIb,
    #[serde(rename = "cuspidal-selfdual")]
    CuspidalSelfdual,
    #[serde(rename = "cuspidal-nonselfdual")]
    CuspidalNonselfdual,
    #[serde(rename = "unidentified")]
    Unidentified,
}

impl Label {
    pub fn is_eisenstein(self) -> bool {
        matches!(self, Label::IIa | Label::IIb | Label::IV | Label::IIIa | Label::IIIb)
    }

    pub fn is_cuspidal(self) -> bool {
        matches!(self, Label::CuspidalSelfdual | Label::CuspidalNonselfdual)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Label::IIa => "IIa",
            Label::IIb => "IIb",
            Label::IV => "IV",
            Label::IIIa => "IIIa",
            Label::IIIb => "IIIb",
            Label::CuspidalSelfdual => "cuspidal-selfdual",
            Label::CuspidalNonselfdual => "cuspidal-nonselfdual",
            Label::Unidentified => "unidentified",
        };
        f.pad(s)
    }
}

/// Eigenvalues of `T(ℓ,1), T(ℓ,2), T(ℓ,3)` on one eigenspace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeckeEigenPacket {
    pub level: u64,
    pub ell: u64,
    pub a: [i64; 3],
    pub multiplicity: usize,
}

/// `1 - a₁T + a₂ℓT² - a₃ℓ³T³ + ℓ⁶T⁴`, constant term first.
pub fn hecke_polynomial(packet: &HeckeEigenPacket) -> [i64; 5] {
    hecke_coefficients(packet.ell, packet.a)
}

pub fn hecke_coefficients(ell: u64, a: [i64; 3]) -> [i64; 5] {
    let l = ell as i64;
    [1, -a[0], a[1] * l, -a[2] * l * l * l, l.pow(6)]
}

pub fn hecke_polynomial_mod(f: &Fp, ell: u64, a: [u32; 3]) -> PolyFp {
    let l = f.from_i64(ell as i64);
    let l3 = f.pow(l, 3);
    poly::trim(vec![1, f.neg(a[0]), f.mul(a[1], l), f.neg(f.mul(a[2], l3)), f.pow(l, 6)])
}

/// Largest `a` with `a² ≤ 16ℓ³` and largest `b` with `b ≤ 6ℓ²`.
pub fn weil_windows(ell: u64) -> (i64, i64) {
    let target = 16 * (ell as i64).pow(3);
    let mut a = (target as f64).sqrt() as i64;
    while a * a > target {
        a -= 1;
    }
    while (a + 1) * (a + 1) <= target {
        a += 1;
    }
    (a, 6 * (ell as i64).pow(2))
}

/// The unique integers in the Weil windows congruent to the residues.
pub fn lift_mod_p(residues: [u32; 3], p: u32, ell: u64) -> Result<[i64; 3]> {
    let (wa, wb) = weil_windows(ell);
    if 2 * wa >= p as i64 || 2 * wb >= p as i64 {
        return Err(Error::OutOfBounds(format!("modulus {p} does not separate the Weil windows at ℓ = {ell}")));
    }
    let f = Fp::new(p)?;
    let mut out = [0i64; 3];
    for (i, &r) in residues.iter().enumerate() {
        let s = f.symmetric(r % p);
        let w = if i == 1 { wb } else { wa };
        if s.abs() > w {
            return Err(Error::OutOfBounds(format!("residue {r} of T({ell},{}) has no lift with |x| ≤ {w}", i + 1)));
        }
        out[i] = s;
    }
    Ok(out)
}

pub fn is_selfdual(a: &[i64; 3]) -> bool {
    a[0] == a[2]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Irreducible,
    Factor(PolyZ),
}

/// Irreducibility over `Q` of an integer polynomial (constant term first).
pub fn irreducibility_certificate(coeffs: &[i64]) -> Result<Certificate> {
    let (_, fac) = z_factor(&z_from_i64(coeffs))?;
    match fac.as_slice() {
        [(_, 1)] => Ok(Certificate::Irreducible),
        [(g, _), ..] => Ok(Certificate::Factor(g.clone())),
        [] => Ok(Certificate::Irreducible),
    }
}

/// A joint eigenspace prepared for classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eigenspace {
    pub dim: usize,
    /// Degree of the irreducible factors of the operators on the block.
    pub factor_degree: usize,
    pub residues: Option<[u32; 3]>,
    /// Constant term first, degree `4 · dim`.
    pub poly: PolyFp,
    /// `a = c` on every joint eigenvalue of the block.
    pub selfdual: bool,
}

impl Eigenspace {
    pub fn multiplicity(&self) -> usize {
        self.dim / self.factor_degree
    }
}

fn nilpotent(f: &Fp, m: &Dense) -> bool {
    let mut p = m.clone();
    for _ in 1..m.len().max(1) {
        if dense_is_zero(&p) {
            return true;
        }
        p = dense_mul(f, &p, m);
    }
    dense_is_zero(&p)
}

/// Builds the classification input from a block of `T(ℓ,1), T(ℓ,2), T(ℓ,3)`.
pub fn eigenspace(f: &Fp, ell: u64, block: &EigenBlock) -> Result<Eigenspace> {
    if block.restricted.len() != 3 {
        return Err(Error::Consistency("an eigenspace needs T(ℓ,1), T(ℓ,2) and T(ℓ,3)".into()));
    }
    let d = block.dim();
    let l = f.from_i64(ell as i64);
    let (c1, c2, c3) = (f.neg(1), l, f.neg(f.pow(l, 3)));
    let l6 = f.pow(l, 6);
    let entries: Vec<Vec<PolyFp>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let b = |k: usize| block.restricted[k][i][j];
                    let diag = if i == j { 1 } else { 0 };
                    poly::trim(vec![
                        diag,
                        f.mul(c1, b(0)),
                        f.mul(c2, b(1)),
                        f.mul(c3, b(2)),
                        if i == j { l6 } else { 0 },
                    ])
                })
                .collect()
        })
        .collect();
    let poly = det_poly_matrix(f, &entries, 4 * d);
    let factor_degree = block.factors.iter().map(|g| g.len() - 1).max().unwrap_or(1);
    let selfdual = nilpotent(f, &dense_sub(f, &block.restricted[0], &block.restricted[2]));
    Ok(Eigenspace { dim: d, factor_degree, residues: block.eigenvalues(f).map(|v| [v[0], v[1], v[2]]), poly, selfdual })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassifiedSpace {
    pub dim: usize,
    /// Symmetric residues of the eigenvalues, if the block is split.
    pub residues: Option<[i64; 3]>,
    /// Integer eigenvalues, for lifted cuspidal packets.
    pub lifted: Option<[i64; 3]>,
    /// Hecke polynomial in symmetric residues, constant term first.
    pub poly: Vec<i64>,
    pub label: Label,
    pub provenance: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub level: u64,
    pub ell: u64,
    pub modulus: u32,
    pub betti: usize,
    pub spaces: Vec<ClassifiedSpace>,
    pub unmatched_templates: Vec<String>,
    pub eisenstein: usize,
    pub cuspidal: usize,
    pub unidentified: usize,
}

/// Indices of `spaces` (restricted to `free`) whose polynomials multiply to
/// `target`; the lexicographically first such set.
fn cover(f: &Fp, spaces: &[Eigenspace], free: &[usize], target: &PolyFp) -> Option<Vec<usize>> {
    let cands: Vec<usize> = free
        .iter()
        .copied()
        .filter(|&i| spaces[i].poly.len() <= target.len() && poly::rem(f, target, &spaces[i].poly).is_empty())
        .collect();
    fn go(f: &Fp, spaces: &[Eigenspace], cands: &[usize], rest: &PolyFp, chosen: &mut Vec<usize>) -> bool {
        if rest.len() == 1 {
            return rest[0] == 1;
        }
        for (k, &i) in cands.iter().enumerate() {
            let p = &spaces[i].poly;
            if p.len() > rest.len() {
                continue;
            }
            let (q, r) = poly::divrem(f, rest, p);
            if !r.is_empty() {
                continue;
            }
            chosen.push(i);
            if go(f, spaces, &cands[k + 1..], &q, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::new();
    go(f, spaces, &cands, target, &mut chosen).then_some(chosen)
}

/// Labels every eigenspace at one level and reconciles against the Betti
/// number.
pub fn classify_level(
    f: &Fp,
    level: u64,
    ell: u64,
    spaces: &[Eigenspace],
    templates: &[Template],
    betti: usize,
) -> Result<LevelReport> {
    let total: usize = spaces.iter().map(|s| s.dim).sum();
    if total != betti {
        return Err(Error::DimensionMismatch { packets: total, betti });
    }
    let mut spaces = spaces.to_vec();
    spaces.sort_by(|a, b| (&a.poly, a.dim, a.residues, a.selfdual).cmp(&(&b.poly, b.dim, b.residues, b.selfdual)));
    let mut templates: Vec<&Template> = templates.iter().filter(|t| t.ell == ell).collect();
    templates.sort_by(|a, b| (a.label, &a.source).cmp(&(b.label, &b.source)));
    let n = spaces.len();
    let mut labels: Vec<Option<(Label, Option<String>)>> = vec![None; n];
    let mut unmatched = Vec::new();
    for t in templates {
        let target = z_mod(f, &t.poly);
        let free: Vec<usize> = (0..n).filter(|&i| labels[i].is_none()).collect();
        match cover(f, &spaces, &free, &target) {
            Some(set) => {
                for i in set {
                    labels[i] = Some((t.label, Some(t.source.clone())));
                }
            }
            None => unmatched.push(format!("{} {}", t.label, t.source)),
        }
    }
    // cuspidal candidates
    let lifts: Vec<Option<[i64; 3]>> = (0..n)
        .map(|i| {
            if labels[i].is_some() {
                return None;
            }
            spaces[i].residues.and_then(|r| lift_mod_p(r, f.p, ell).ok())
        })
        .collect();
    for i in 0..n {
        if labels[i].is_some() {
            continue;
        }
        let s = &spaces[i];
        let even = s.multiplicity() % 2 == 0;
        let label = if !even {
            Label::Unidentified
        } else if s.residues.is_some() {
            match lifts[i] {
                None => Label::Unidentified,
                Some(a) if is_selfdual(&a) => Label::CuspidalSelfdual,
                Some(a) => {
                    let dual = [a[2], a[1], a[0]];
                    let paired = (0..n).any(|j| j != i && labels[j].as_ref().is_none_or(|l| l.0.is_cuspidal()) && lifts[j] == Some(dual) && spaces[j].dim == s.dim);
                    if paired {
                        Label::CuspidalNonselfdual
                    } else {
                        Label::Unidentified
                    }
                }
            }
        } else if s.selfdual {
            Label::CuspidalSelfdual
        } else {
            Label::CuspidalNonselfdual
        };
        labels[i] = Some((label, None));
    }
    let mut out = Vec::new();
    for (i, s) in spaces.iter().enumerate() {
        let (label, provenance) = labels[i].clone().unwrap();
        let lifted = if label.is_cuspidal() { lifts[i] } else { None };
        out.push(ClassifiedSpace {
            dim: s.dim,
            residues: s.residues.map(|r| r.map(|x| f.symmetric(x))),
            lifted,
            poly: (0..=4 * s.dim).map(|k| f.symmetric(*s.poly.get(k).unwrap_or(&0))).collect(),
            label,
            provenance,
        });
    }
    let sum = |pred: fn(Label) -> bool| out.iter().filter(|c| pred(c.label)).map(|c| c.dim).sum();
    Ok(LevelReport {
        level,
        ell,
        modulus: f.p,
        betti,
        eisenstein: sum(Label::is_eisenstein),
        cuspidal: sum(Label::is_cuspidal),
        unidentified: sum(|l| l == Label::Unidentified),
        spaces: out,
        unmatched_templates: unmatched,
    })
}

/// Exhaustive search for an integer factor of degree 1 or 2 of a quartic;
/// returns one if it exists.
pub fn small_factor_search(p: &[i64; 5]) -> Option<PolyZ> {
    let divisors = |n: i64| -> Vec<i64> {
        let n = n.abs();
        (1..=n).filter(|d| n % d == 0).flat_map(|d| [d, -d]).collect()
    };
    let target = z_from_i64(p);
    let norm = (p.iter().map(|&c| (c as f64) * (c as f64)).sum::<f64>()).sqrt().ceil() as i64;
    let try_div = |q: PolyZ| poly::z_divexact(&target, &q).map(|_| q);
    for q0 in divisors(p[0]) {
        for q1 in divisors(p[4]) {
            if let Some(q) = try_div(z_from_i64(&[q0, q1])) {
                return Some(q);
            }
        }
    }
    for q0 in divisors(p[0]) {
        for q2 in divisors(p[4]) {
            for q1 in -2 * norm..=2 * norm {
                if let Some(q) = try_div(z_from_i64(&[q0, q1, q2])) {
                    return Some(q);
                }
            }
        }
    }
    None
}

pub fn integer_hecke_polynomial(ell: u64, a: [i64; 3]) -> PolyZ {
    hecke_coefficients(ell, a).iter().map(|&c| BigInt::from(c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::split_eigenspaces;
    use crate::forms::{eisenstein_templates, FormsData};
    use crate::linalg::{dense_identity, dense_inverse, dense_kernel};
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};

    fn packet(a: [i64; 3]) -> HeckeEigenPacket {
        HeckeEigenPacket { level: 61, ell: 2, a, multiplicity: 2 }
    }

    #[test]
    fn polynomial_examples() {
        assert_eq!(hecke_polynomial(&packet([-7, 12, -7])), [1, 7, 24, 56, 64]);
        assert_eq!(hecke_polynomial(&packet([-5, 7, -5])), [1, 5, 14, 40, 64]);
        assert_eq!(hecke_polynomial(&packet([0, 0, 0])), [1, 0, 0, 0, 64]);
    }

    #[test]
    fn lift_examples() {
        assert_eq!(lift_mod_p([31984, 12, 31984], 31991, 2).unwrap(), [-7, 12, -7]);
        assert_eq!(lift_mod_p([5, 5, 5], 31991, 2).unwrap(), [5, 5, 5]);
        assert!(matches!(lift_mod_p([16000, 0, 0], 31991, 2), Err(Error::OutOfBounds(_))));
        assert_eq!(weil_windows(2), (11, 24));
    }

    #[test]
    fn selfduality() {
        assert!(is_selfdual(&[-7, 12, -7]));
        assert!(!is_selfdual(&[10, 5, -5]));
        assert!(is_selfdual(&[0, 0, 0]));
    }

    #[test]
    fn irreducibility_examples() {
        let p = [1, 7, 24, 56, 64];
        assert_eq!(irreducibility_certificate(&p).unwrap(), Certificate::Irreducible);
        assert_eq!(small_factor_search(&p), None);
        // (1-T)(1-2T)(1+8T+32T²)
        let q = hecke_coefficients(2, [-5, 5, 10]);
        let Certificate::Factor(g) = irreducibility_certificate(&q).unwrap() else { panic!("reducible") };
        assert!(poly::z_divexact(&z_from_i64(&q), &g).is_some());
        assert!(small_factor_search(&q).is_some());
        let r = [1, 0, 0, 0, 64];
        let oracle = small_factor_search(&r).is_none();
        assert_eq!(irreducibility_certificate(&r).unwrap() == Certificate::Irreducible, oracle);
    }

    /// Operators with prescribed joint eigenvalues, in a scrambled basis.
    fn synthetic(f: &Fp, packets: &[([i64; 3], usize)], seed: u64) -> Vec<Dense> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n: usize = packets.iter().map(|p| p.1).sum();
        let diag: Vec<[i64; 3]> = packets.iter().flat_map(|&(a, m)| std::iter::repeat_n(a, m)).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let mut p = dense_identity(n);
        let p = loop {
            for r in p.iter_mut() {
                for x in r.iter_mut() {
                    *x = rng.gen_range(0..5);
                }
            }
            if let Some(inv) = dense_inverse(f, &p) {
                break (p.clone(), inv);
            }
        };
        (0..3)
            .map(|k| {
                let d: Dense = (0..n).map(|i| (0..n).map(|j| if i == j { f.from_i64(diag[perm[i]][k]) } else { 0 }).collect()).collect();
                dense_mul(f, &dense_mul(f, &p.0, &d), &p.1)
            })
            .collect()
    }

    fn classify_synthetic(packets: &[([i64; 3], usize)], seed: u64) -> LevelReport {
        let f = Fp::new(31991).unwrap();
        let ops = synthetic(&f, packets, seed);
        let blocks = split_eigenspaces(&f, &ops).unwrap();
        let spaces: Vec<Eigenspace> = blocks.iter().map(|b| eigenspace(&f, 2, b).unwrap()).collect();
        let templates = eisenstein_templates(11, 2, &FormsData::builtin()).unwrap();
        let betti = packets.iter().map(|p| p.1).sum();
        classify_level(&f, 11, 2, &spaces, &templates, betti).unwrap()
    }

    #[test]
    fn level_11_shape() {
        let r = classify_synthetic(&[([10, 5, -5], 1), ([-5, 5, 10], 1)], 1);
        let labels: Vec<Label> = r.spaces.iter().map(|s| s.label).collect();
        assert_eq!(labels.iter().filter(|&&l| l == Label::IIa).count(), 1);
        assert_eq!(labels.iter().filter(|&&l| l == Label::IIb).count(), 1);
        assert_eq!(r.eisenstein, 2);
        assert!(r.unmatched_templates.is_empty());
    }

    #[test]
    fn cuspidal_packets() {
        let r = classify_synthetic(&[([10, 5, -5], 1), ([-5, 5, 10], 1), ([-7, 12, -7], 2), ([3, 1, -2], 2), ([-2, 1, 3], 2), ([4, 4, 4], 1)], 2);
        let find = |a: [i64; 3]| r.spaces.iter().find(|s| s.residues == Some(a)).unwrap().label;
        assert_eq!(find([-7, 12, -7]), Label::CuspidalSelfdual);
        assert_eq!(find([3, 1, -2]), Label::CuspidalNonselfdual);
        assert_eq!(find([-2, 1, 3]), Label::CuspidalNonselfdual);
        assert_eq!(find([4, 4, 4]), Label::Unidentified);
        assert_eq!((r.eisenstein, r.cuspidal, r.unidentified), (2, 6, 1));
        let lone = classify_synthetic(&[([3, 1, -2], 2)], 3);
        assert_eq!(lone.spaces[0].label, Label::Unidentified);
    }

    #[test]
    fn unsplit_nonselfdual_block() {
        // T(2,1) and T(2,3) acting on a 4-dimensional space by conjugate
        // eigenvalues from Q(i), which 31991 leaves inert
        let f = Fp::new(31991).unwrap();
        let j: Dense = vec![vec![0, f.neg(1)], vec![1, 0]];
        let blockdiag = |a: &Dense| -> Dense {
            (0..4).map(|r| (0..4).map(|c| if r / 2 == c / 2 { a[r % 2][c % 2] } else { 0 }).collect()).collect()
        };
        let nj: Dense = j.iter().map(|r| r.iter().map(|&x| f.neg(x)).collect()).collect();
        let ops = vec![blockdiag(&j), dense_identity(4), blockdiag(&nj)];
        let blocks = split_eigenspaces(&f, &ops).unwrap();
        assert_eq!(blocks.len(), 1);
        let s = eigenspace(&f, 2, &blocks[0]).unwrap();
        assert_eq!((s.dim, s.factor_degree, s.selfdual), (4, 2, false));
        let r = classify_level(&f, 11, 2, &[s], &[], 4).unwrap();
        assert_eq!(r.spaces[0].label, Label::CuspidalNonselfdual);
        let _ = dense_kernel(&f, &j, 2);
    }

    #[test]
    fn dimension_mismatch() {
        let f = Fp::new(31991).unwrap();
        let s = Eigenspace { dim: 1, factor_degree: 1, residues: Some([0, 0, 0]), poly: hecke_polynomial_mod(&f, 2, [0, 0, 0]), selfdual: true };
        assert!(matches!(classify_level(&f, 11, 2, &[s], &[], 2), Err(Error::DimensionMismatch { packets: 1, betti: 2 })));
    }

    proptest! {
        #[test]
        fn hecke_polynomial_is_linear(a in proptest::array::uniform3(-50i64..50), i in 0usize..3, ell in prop::sample::select(vec![2u64, 3, 5])) {
            let base = hecke_coefficients(ell, a);
            let mut b = a;
            b[i] += 1;
            let bumped = hecke_coefficients(ell, b);
            let l = ell as i64;
            let pattern = [[0, -1, 0, 0, 0], [0, 0, l, 0, 0], [0, 0, 0, -l * l * l, 0]][i];
            for k in 0..5 {
                prop_assert_eq!(bumped[k] - base[k], pattern[k]);
            }
        }

        #[test]
        fn weil_window_lifts_are_unique(a in -11i64..=11, b in -24i64..=24, c in -11i64..=11, p in prop::sample::select(vec![31991u32, 12379])) {
            let f = Fp::new(p).unwrap();
            let r = [f.from_i64(a), f.from_i64(b), f.from_i64(c)];
            prop_assert_eq!(lift_mod_p(r, p, 2).unwrap(), [a, b, c]);
            // no second candidate in the window
            let (wa, wb) = weil_windows(2);
            for (x, w) in [(a, wa), (b, wb), (c, wa)] {
                let n = (-w..=w).filter(|y| (y - x).rem_euclid(p as i64) == 0).count();
                prop_assert_eq!(n, 1);
            }
        }

        #[test]
        fn cuspidal_labels_have_even_multiplicity(
            packs in proptest::collection::vec((proptest::array::uniform3(-4i64..4), 1usize..4), 1..4),
            seed in 0u64..1000,
        ) {
            let mut seen = std::collections::BTreeSet::new();
            let packs: Vec<([i64; 3], usize)> = packs.into_iter().filter(|p| seen.insert(p.0)).collect();
            let r = classify_synthetic(&packs, seed);
            for s in &r.spaces {
                if s.label.is_cuspidal() {
                    prop_assert_eq!(s.dim % 2, 0);
                }
            }
        }

        #[test]
        fn classification_ignores_basis_and_order(seed in 0u64..1000) {
            let packs = [([10, 5, -5], 1), ([-7, 12, -7], 2), ([-5, 5, 10], 1), ([1, 2, 3], 2), ([3, 2, 1], 2)];
            let a = classify_synthetic(&packs, seed);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut shuffled = packs.to_vec();
            shuffled.shuffle(&mut rng);
            let b = classify_synthetic(&shuffled, seed.wrapping_add(rng.gen::<u64>()));
            prop_assert_eq!(a, b);
        }
    }
}
