//! Newform and GL(3) eigenvalue data, predicted Eisenstein dimensions, and
//! Eisenstein Hecke-polynomial templates.
//!
//! # Record format
//!
//! UTF-8 text, one record per line. Fields are separated by runs of ASCII
//! whitespace. Blank lines and lines whose first non-blank character is `#`
//! are ignored.
//!
//! ```text
//! level <p>
//! newform <level> <weight> <d> <sign> <ell>:<c_d>,<c_(d-1)>,...,<c_0> ...
//! gl3 <level> <d> <disc> <ell>:<x>,<y> ...
//! ```
//!
//! * `level p` declares that the file lists every weight-2 and weight-4
//!   newform orbit and every GL(3) pair of level `p`.
//! * `newform`: `weight` is 2 or 4, `d` the orbit degree, `sign` is `+1` or
//!   `-1` (the sign of the functional equation of the completed
//!   L-function). Each `ell:` group gives the monic characteristic
//!   polynomial of `T_ell` on the orbit, leading coefficient first, so it
//!   has `d + 1` entries, the first being `1`.
//! * `gl3`: a conjugate pair of non-selfdual cuspidal classes, `d = 2`.
//!   `disc` is the discriminant `D < 0` of the imaginary quadratic field,
//!   and `ω = (1 + √D)/2` if `D ≡ 1 mod 4`, `ω = √D/2` if `D ≡ 0 mod 4`.
//!   Each `ell:x,y` gives the `T(ell,1)` eigenvalue `x + yω` of one member;
//!   the other member has the conjugate eigenvalue.
//!
//! All integers are decimal with an optional leading `-` or `+`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::classify::Label;
use crate::coset::is_prime;
use crate::error::{Error, Result};
use crate::poly::{z_add, z_mul, z_scale, z_trim, PolyZ};

static FIXTURE: &str = include_str!("../data/forms.txt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewformOrbit {
    pub level: u64,
    pub weight: u32,
    pub degree: usize,
    pub sign: i8,
    /// Characteristic polynomial of `T_ℓ`, constant term first.
    pub charpolys: BTreeMap<u64, PolyZ>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gl3Pair {
    pub level: u64,
    pub degree: usize,
    pub discriminant: i64,
    /// `γ(ℓ) = x + yω`.
    pub eigenvalues: BTreeMap<u64, (i64, i64)>,
}

impl Gl3Pair {
    /// `(trace, norm)` of `ω`.
    pub fn omega(&self) -> (i64, i64) {
        crate::gl3::omega_trace_norm(self.discriminant)
    }

    pub fn describe(&self, ell: u64) -> Option<String> {
        let &(x, y) = self.eigenvalues.get(&ell)?;
        Some(match (x, y) {
            (x, 0) => format!("{x}"),
            (0, y) => format!("{y}ω"),
            (x, y) if y < 0 => format!("{x}{y}ω"),
            (x, y) => format!("{x}+{y}ω"),
        })
    }
}

/// The level-53 pair, with `ω = (1+√-11)/2`.
pub fn level53_pair() -> Gl3Pair {
    Gl3Pair {
        level: 53,
        degree: 2,
        discriminant: -11,
        eigenvalues: [(2, (-1, -2)), (3, (-2, 2)), (5, (1, 0)), (7, (-3, 0)), (11, (1, 0)), (13, (-2, -12))].into_iter().collect(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormsData {
    pub newforms: Vec<NewformOrbit>,
    pub pairs: Vec<Gl3Pair>,
    pub covered: BTreeSet<u64>,
}

fn parse_int<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.strip_prefix('+').unwrap_or(s).parse().map_err(|_| Error::Parse { line, msg: format!("not an integer: {s:?}") })
}

fn split_group(tok: &str, line: usize) -> Result<(u64, Vec<&str>)> {
    let (ell, rest) = tok.split_once(':').ok_or_else(|| Error::Parse { line, msg: format!("expected ell:values, got {tok:?}") })?;
    Ok((parse_int(ell, line)?, rest.split(',').collect()))
}

impl FormsData {
    /// The bundled data for prime levels up to 83.
    pub fn builtin() -> FormsData {
        FormsData::parse(FIXTURE).expect("bundled forms data is valid")
    }

    pub fn load(path: &Path) -> Result<FormsData> {
        FormsData::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<FormsData> {
        let mut data = FormsData::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = body.split_ascii_whitespace().collect();
            let need = |n: usize| -> Result<()> {
                if toks.len() < n {
                    Err(Error::Parse { line, msg: format!("{} record needs at least {} fields", toks[0], n - 1) })
                } else {
                    Ok(())
                }
            };
            match toks[0] {
                "level" => {
                    if toks.len() != 2 {
                        return Err(Error::Parse { line, msg: "level record takes one field".into() });
                    }
                    let p: u64 = parse_int(toks[1], line)?;
                    if !is_prime(p) {
                        return Err(Error::Validation { line, msg: format!("level {p} is not prime") });
                    }
                    data.covered.insert(p);
                }
                "newform" => {
                    need(5)?;
                    let level: u64 = parse_int(toks[1], line)?;
                    let weight: u32 = parse_int(toks[2], line)?;
                    let degree: usize = parse_int(toks[3], line)?;
                    let sign: i8 = parse_int(toks[4], line)?;
                    if weight != 2 && weight != 4 {
                        return Err(Error::Validation { line, msg: format!("weight {weight} is not 2 or 4") });
                    }
                    if sign != 1 && sign != -1 {
                        return Err(Error::Validation { line, msg: format!("sign {sign} is not ±1") });
                    }
                    if degree == 0 {
                        return Err(Error::Validation { line, msg: "orbit degree is zero".into() });
                    }
                    let mut charpolys = BTreeMap::new();
                    for tok in &toks[5..] {
                        let (ell, vals) = split_group(tok, line)?;
                        let mut c: PolyZ = vals.iter().map(|v| parse_int::<BigInt>(v, line)).collect::<Result<_>>()?;
                        if c.len() != degree + 1 {
                            return Err(Error::Validation {
                                line,
                                msg: format!("T_{ell} charpoly has degree {} but the orbit degree is {degree}", c.len() - 1),
                            });
                        }
                        if !c[0].is_one() {
                            return Err(Error::Validation { line, msg: format!("T_{ell} charpoly is not monic") });
                        }
                        c.reverse();
                        if charpolys.insert(ell, c).is_some() {
                            return Err(Error::Validation { line, msg: format!("prime {ell} repeated") });
                        }
                    }
                    data.newforms.push(NewformOrbit { level, weight, degree, sign, charpolys });
                }
                "gl3" => {
                    need(4)?;
                    let level: u64 = parse_int(toks[1], line)?;
                    let degree: usize = parse_int(toks[2], line)?;
                    let discriminant: i64 = parse_int(toks[3], line)?;
                    if degree != 2 {
                        return Err(Error::Validation { line, msg: format!("GL(3) pair degree {degree} is not 2") });
                    }
                    if discriminant >= 0 || !matches!(discriminant.rem_euclid(4), 0 | 1) {
                        return Err(Error::Validation { line, msg: format!("{discriminant} is not an imaginary quadratic discriminant") });
                    }
                    let mut eigenvalues = BTreeMap::new();
                    for tok in &toks[4..] {
                        let (ell, vals) = split_group(tok, line)?;
                        if vals.len() != 2 {
                            return Err(Error::Validation { line, msg: format!("eigenvalue at {ell} needs two coordinates") });
                        }
                        let xy = (parse_int(vals[0], line)?, parse_int(vals[1], line)?);
                        if eigenvalues.insert(ell, xy).is_some() {
                            return Err(Error::Validation { line, msg: format!("prime {ell} repeated") });
                        }
                    }
                    data.pairs.push(Gl3Pair { level, degree, discriminant, eigenvalues });
                }
                other => return Err(Error::Parse { line, msg: format!("unknown record type {other:?}") }),
            }
        }
        Ok(data)
    }

    /// Serializes in the record format.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        for &p in &self.covered {
            out.push_str(&format!("level {p}\n"));
            for o in self.newforms.iter().filter(|o| o.level == p) {
                out.push_str(&format!("newform {} {} {} {:+}", o.level, o.weight, o.degree, o.sign));
                for (ell, c) in &o.charpolys {
                    let cs: Vec<String> = c.iter().rev().map(|x| x.to_string()).collect();
                    out.push_str(&format!(" {ell}:{}", cs.join(",")));
                }
                out.push('\n');
            }
            for g in self.pairs.iter().filter(|g| g.level == p) {
                out.push_str(&format!("gl3 {} {} {}", g.level, g.degree, g.discriminant));
                for (ell, (x, y)) in &g.eigenvalues {
                    out.push_str(&format!(" {ell}:{x},{y}"));
                }
                out.push('\n');
            }
        }
        out
    }

    fn require(&self, p: u64) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::CompositeLevel(p));
        }
        if !self.covered.contains(&p) {
            return Err(Error::DataGap(format!("no forms data for level {p}")));
        }
        Ok(())
    }
}

/// Primes at which eigenvalue data is recorded.
pub const RECORDED_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// Computes the complete data for one prime level from modular symbols.
pub fn compute(p: u64) -> Result<FormsData> {
    if !is_prime(p) {
        return Err(Error::CompositeLevel(p));
    }
    let primes: Vec<u64> = RECORDED_PRIMES.iter().copied().filter(|&l| l != p).collect();
    let mut data = FormsData::default();
    data.covered.insert(p);
    for weight in [2, 4] {
        for o in crate::modsym::newform_orbits(p, weight, &primes)? {
            let degree = o.degree();
            let charpolys = o.charpolys.into_iter().map(|(l, mut c)| {
                c.reverse();
                (l, c)
            });
            data.newforms.push(NewformOrbit { level: p, weight, degree, sign: o.sign, charpolys: charpolys.collect() });
        }
    }
    if p > 3 {
        for g in crate::gl3::cuspidal_pairs(p, &primes)? {
            let eigenvalues = g.eigenvalues.iter().map(|&(l, x, y)| (l, (x, y))).collect();
            data.pairs.push(Gl3Pair { level: p, degree: 2, discriminant: g.discriminant, eigenvalues });
        }
    }
    Ok(data)
}

impl FormsData {
    pub fn merge(&mut self, other: FormsData) {
        self.newforms.extend(other.newforms);
        self.pairs.extend(other.pairs);
        self.covered.extend(other.covered);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub level: u64,
    pub weight2: usize,
    pub weight4: usize,
    pub gl3: usize,
}

impl Prediction {
    pub fn total(&self) -> usize {
        self.weight2 + self.weight4 + self.gl3
    }
}

/// Predicted dimension of the Eisenstein part of `H⁵` at prime level.
pub fn predict_dimension(p: u64, data: &FormsData) -> Result<Prediction> {
    data.require(p)?;
    let weight2 = data.newforms.iter().filter(|o| o.level == p && o.weight == 2).map(|o| 2 * o.degree).sum();
    let weight4 = data.newforms.iter().filter(|o| o.level == p && o.weight == 4 && o.sign == -1).map(|o| o.degree).sum();
    let gl3 = data.pairs.iter().filter(|g| g.level == p).map(|g| 2 * g.degree).sum();
    Ok(Prediction { level: p, weight2, weight4, gl3 })
}

/// An Eisenstein Hecke polynomial: a product over one orbit, of degree
/// `4 · multiplicity`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub label: Label,
    pub source: String,
    pub ell: u64,
    /// Constant term first.
    pub poly: PolyZ,
    pub multiplicity: usize,
}

fn zi(x: i64) -> BigInt {
    BigInt::from(x)
}

fn zpow(b: i64, e: u32) -> BigInt {
    num_traits::pow(zi(b), e as usize)
}

fn zpoly_pow(a: &[BigInt], e: usize) -> PolyZ {
    (0..e).fold(vec![BigInt::one()], |acc, _| z_mul(&acc, a))
}

/// `Σ χ_i c^i (s T)^(d-i)` = `Π_α (c - s α T)` over the roots of `χ`.
fn orbit_product(chi: &[BigInt], c: &[BigInt], s: &BigInt) -> PolyZ {
    let d = chi.len() - 1;
    let st = vec![BigInt::zero(), s.clone()];
    let mut out = vec![BigInt::zero()];
    for (i, ci) in chi.iter().enumerate() {
        let term = z_mul(&zpoly_pow(c, i), &zpoly_pow(&st, d - i));
        out = z_add(&out, &z_scale(&term, ci));
    }
    z_trim(out)
}

/// `(1 - x T)`.
fn linear(x: BigInt) -> PolyZ {
    vec![BigInt::one(), -x]
}

/// Eisenstein templates at prime level `p` for the prime `ℓ`.
pub fn eisenstein_templates(p: u64, ell: u64, data: &FormsData) -> Result<Vec<Template>> {
    data.require(p)?;
    let l = ell as i64;
    let mut out = Vec::new();
    let mut orbits: Vec<&NewformOrbit> = data.newforms.iter().filter(|o| o.level == p).collect();
    orbits.sort_by(|a, b| (a.weight, a.degree, &a.charpolys).cmp(&(b.weight, b.degree, &b.charpolys)));
    let mut counter: BTreeMap<u32, usize> = BTreeMap::new();
    for o in orbits {
        let idx = counter.entry(o.weight).or_default();
        *idx += 1;
        let name = format!("{}.{}.{}", p, o.weight, idx);
        if o.weight == 4 && o.sign != -1 {
            continue;
        }
        let chi = o.charpolys.get(&ell).ok_or_else(|| Error::DataGap(format!("orbit {name} has no T_{ell} eigenvalues")))?;
        let d = o.degree;
        if o.weight == 2 {
            let lin = zpoly_pow(&z_mul(&linear(zpow(l, 2)), &linear(zpow(l, 3))), d);
            let quad = orbit_product(chi, &[BigInt::one(), BigInt::zero(), zi(l)], &BigInt::one());
            out.push(Template { label: Label::IIa, source: name.clone(), ell, poly: z_mul(&lin, &quad), multiplicity: d });
            let lin = zpoly_pow(&z_mul(&linear(BigInt::one()), &linear(zi(l))), d);
            let quad = orbit_product(chi, &[BigInt::one(), BigInt::zero(), zpow(l, 5)], &zpow(l, 2));
            out.push(Template { label: Label::IIb, source: name, ell, poly: z_mul(&lin, &quad), multiplicity: d });
        } else {
            let lin = zpoly_pow(&z_mul(&linear(zi(l)), &linear(zpow(l, 2))), d);
            let quad = orbit_product(chi, &[BigInt::one(), BigInt::zero(), zpow(l, 3)], &BigInt::one());
            out.push(Template { label: Label::IV, source: name, ell, poly: z_mul(&lin, &quad), multiplicity: d });
        }
    }
    for (i, g) in data.pairs.iter().filter(|g| g.level == p).enumerate() {
        let name = format!("{}.gl3.{}", p, i + 1);
        let &(x, y) = g.eigenvalues.get(&ell).ok_or_else(|| Error::DataGap(format!("GL(3) pair {name} has no T({ell},1) eigenvalue")))?;
        let (t, nrm) = g.omega();
        // γ + γ̄ and γ γ̄
        let s = zi(2 * x + y * t);
        let n = zi(x * x + t * x * y + nrm * y * y);
        let pair = |u: BigInt, v: BigInt, a: PolyZ| -> PolyZ {
            // (A - uγT + vγ̄T²)(A - uγ̄T + vγT²)
            let a2 = z_mul(&a, &a);
            let sq = &s * &s - zi(2) * &n;
            let terms = [
                z_mul(&a, &[BigInt::zero(), -(&u * &s)]),
                z_mul(&a, &[BigInt::zero(), BigInt::zero(), &v * &s]),
                vec![BigInt::zero(), BigInt::zero(), &u * &u * &n, -(&u * &v * sq), &v * &v * &n],
            ];
            terms.iter().fold(a2, |acc, t| z_add(&acc, t))
        };
        let cubic = |c: BigInt| vec![BigInt::one(), BigInt::zero(), BigInt::zero(), -c];
        let lin = zpoly_pow(&linear(zpow(l, 3)), 2);
        let poly = z_mul(&lin, &pair(BigInt::one(), zi(l), cubic(zpow(l, 3))));
        out.push(Template { label: Label::IIIa, source: name.clone(), ell, poly, multiplicity: 2 });
        let lin = zpoly_pow(&linear(BigInt::one()), 2);
        let poly = z_mul(&lin, &pair(zi(l), zpow(l, 3), cubic(zpow(l, 6))));
        out.push(Template { label: Label::IIIb, source: name, ell, poly, multiplicity: 2 });
    }
    Ok(out)
}
