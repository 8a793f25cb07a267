//! Voronoi's reduction theory of perfect quaternary forms and the induced
//! SL(4,Z)-equivariant cell structure.
//!
//! A cell is a finite set `S` of primitive vectors (up to sign) that is the set
//! of minimal vectors of some positive definite form. It spans the cone of
//! positive semidefinite forms generated by the rank-one forms `v v^T`,
//! `v ∈ S`; we call the dimension of that cone the *cone dimension*. Cells whose
//! vectors span Q⁴ (well-rounded cells) have cone dimension 4..=10, and each
//! corresponds to a cell of the well-rounded retract of dimension
//! `10 - cone_dim`. Perfect forms give cone dimension 10.
//!
//! The cellular chain complex used downstream is graded by the chain degree
//! `cone_dim - 4`, with boundary going from a cell to its facets.

use std::collections::BTreeMap;

use log::debug;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::lattice::{det_columns, normalize_sign, rank_i64, Mat4, Vec4};
use crate::quadform::{rat, Gram, QuadForm, Rat};

pub type Sym = [i64; 10];

/// Coordinates of the rank-one form `v v^T`: entries `v_i v_j`, `i <= j`.
pub fn sym2(v: &Vec4) -> Sym {
    let mut out = [0i64; 10];
    let mut k = 0;
    for i in 0..4 {
        for j in i..4 {
            out[k] = v[i] * v[j];
            k += 1;
        }
    }
    out
}

/// Evaluates the symmetric form with pairing coordinates `r` on `v`, where
/// `r · sym2(v) = v^T R v`.
fn pair(r: &[i128; 10], v: &Vec4) -> i128 {
    sym2(v).iter().zip(r).map(|(&a, &b)| a as i128 * b).sum()
}

pub fn cone_dim(vectors: &[Vec4]) -> usize {
    let rows: Vec<Vec<i64>> = vectors.iter().map(|v| sym2(v).to_vec()).collect();
    rank_i64(&rows)
}

pub fn spans_q4(vectors: &[Vec4]) -> bool {
    let rows: Vec<Vec<i64>> = vectors.iter().map(|v| v.to_vec()).collect();
    rank_i64(&rows) == 4
}

/// Determinant of a square integer matrix (Bareiss, exact in i128).
pub fn det_i128(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Sign of the determinant of the change of basis from `frame` to `other`,
/// two bases of the same subspace of Sym².
pub fn relative_orientation(frame: &[Sym], other: &[Sym]) -> i8 {
    let d = frame.len();
    debug_assert_eq!(d, other.len());
    let cols = pivot_columns(frame);
    let sub = |vs: &[Sym]| -> Vec<Vec<i128>> { vs.iter().map(|v| cols.iter().map(|&c| v[c] as i128).collect()).collect() };
    let a = det_i128(sub(frame));
    let b = det_i128(sub(other));
    assert!(a != 0 && b != 0, "degenerate frame in orientation comparison");
    if (a > 0) == (b > 0) {
        1
    } else {
        -1
    }
}

fn pivot_columns(frame: &[Sym]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for c in 0..10 {
        let mut trial = chosen.clone();
        trial.push(c);
        let cols_mat: Vec<Vec<i64>> = trial.iter().map(|&cc| frame.iter().map(|v| v[cc]).collect()).collect();
        if rank_i64(&cols_mat) == trial.len() {
            chosen = trial;
            if chosen.len() == frame.len() {
                break;
            }
        }
    }
    chosen
}

/// Indices of a greedy basis (in list order) of the span of `sym2(v)`.
fn greedy_frame(vectors: &[Vec4]) -> Vec<usize> {
    let mut idx: Vec<usize> = Vec::new();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        rows.push(sym2(v).to_vec());
        if rank_i64(&rows) == rows.len() {
            idx.push(i);
        } else {
            rows.pop();
        }
    }
    idx
}

/// Invariant used to prefilter SL(4,Z)-equivalence tests: for every vector,
/// the histogram of |det| over the 4-subsets containing it.
fn vector_invariants(vs: &[Vec4]) -> Vec<Vec<(i64, u32)>> {
    let n = vs.len();
    let mut out = vec![BTreeMap::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let det = det_columns(&[vs[a], vs[b], vs[c], vs[d]]).abs();
                    for &i in &[a, b, c, d] {
                        *out[i].entry(det).or_insert(0u32) += 1;
                    }
                }
            }
        }
    }
    out.into_iter().map(|m| m.into_iter().collect()).collect()
}

/// A configuration of sign classes of primitive vectors, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Config(pub Vec<Vec4>);

impl Config {
    pub fn new(vs: impl IntoIterator<Item = Vec4>) -> Config {
        let mut v: Vec<Vec4> = vs.into_iter().map(normalize_sign).collect();
        v.sort();
        v.dedup();
        Config(v)
    }

    pub fn contains(&self, v: &Vec4) -> bool {
        self.0.binary_search(&normalize_sign(*v)).is_ok()
    }

    pub fn transform(&self, g: &Mat4) -> Config {
        Config::new(self.0.iter().map(|v| g.apply(v)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Precomputed data for repeated equivalence tests against one configuration.
struct Matcher {
    vectors: Vec<Vec4>,
    invariants: Vec<Vec<(i64, u32)>>,
    basis: [usize; 4],
    basis_det: i64,
}

impl Matcher {
    fn new(c: &Config) -> Matcher {
        let vs = c.0.clone();
        let invariants = vector_invariants(&vs);
        let n = vs.len();
        let mut best: Option<([usize; 4], i64)> = None;
        for a in 0..n {
            for b in a + 1..n {
                for cc in b + 1..n {
                    for d in cc + 1..n {
                        let det = det_columns(&[vs[a], vs[b], vs[cc], vs[d]]).abs();
                        if det != 0 && best.map_or(true, |(_, bd)| det < bd) {
                            best = Some(([a, b, cc, d], det));
                        }
                    }
                }
            }
        }
        let (basis, basis_det) = best.expect("configuration spans Q^4");
        Matcher { vectors: vs, invariants, basis, basis_det }
    }

    /// All `g ∈ SL(4,Z)` with `g · self = target` (as sign-class sets). Both
    /// `g` and `-g` are returned. Stops after the first hit if `all` is false.
    fn isometries(&self, target: &Matcher, all: bool) -> Vec<Mat4> {
        let mut out = Vec::new();
        if self.vectors.len() != target.vectors.len() {
            return out;
        }
        let mut inv_a = self.invariants.clone();
        let mut inv_b = target.invariants.clone();
        inv_a.sort();
        inv_b.sort();
        if inv_a != inv_b {
            return out;
        }
        let a_cols = [
            self.vectors[self.basis[0]],
            self.vectors[self.basis[1]],
            self.vectors[self.basis[2]],
            self.vectors[self.basis[3]],
        ];
        let a_mat = Mat4::from_columns(&a_cols);
        let a_adj = a_mat.adjugate();
        let a_det = a_mat.det();
        let cand: Vec<Vec<usize>> = self
            .basis
            .iter()
            .map(|&i| (0..target.vectors.len()).filter(|&j| target.invariants[j] == self.invariants[i]).collect())
            .collect();
        let tv = &target.vectors;
        for &j0 in &cand[0] {
            for &j1 in &cand[1] {
                if j1 == j0 {
                    continue;
                }
                for &j2 in &cand[2] {
                    if j2 == j0 || j2 == j1 {
                        continue;
                    }
                    for &j3 in &cand[3] {
                        if j3 == j0 || j3 == j1 || j3 == j2 {
                            continue;
                        }
                        if det_columns(&[tv[j0], tv[j1], tv[j2], tv[j3]]).abs() != self.basis_det {
                            continue;
                        }
                        for signs in 0..8u32 {
                            let e = |k: u32| if signs >> k & 1 == 1 { -1 } else { 1 };
                            let b_cols = [
                                tv[j0],
                                tv[j1].map(|x| x * e(0)),
                                tv[j2].map(|x| x * e(1)),
                                tv[j3].map(|x| x * e(2)),
                            ];
                            let prod = Mat4::from_columns(&b_cols).mul(&a_adj);
                            if prod.0.iter().flatten().any(|&x| x % a_det != 0) {
                                continue;
                            }
                            let mut g = prod;
                            g.0.iter_mut().flatten().for_each(|x| *x /= a_det);
                            if g.det() != 1 {
                                continue;
                            }
                            let ok = self.vectors.iter().all(|v| {
                                let w = normalize_sign(g.apply(v));
                                target.vectors.binary_search(&w).is_ok()
                            });
                            if ok {
                                out.push(g);
                                out.push(g.neg());
                                if !all {
                                    return out;
                                }
                            }
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Some `g ∈ SL(4,Z)` with `g · a = b`, if it exists.
pub fn find_equivalence(a: &Config, b: &Config) -> Option<Mat4> {
    Matcher::new(a).isometries(&Matcher::new(b), false).into_iter().next()
}

/// The full setwise stabilizer of a spanning configuration in SL(4,Z).
pub fn stabilizer(c: &Config) -> Vec<Mat4> {
    let m = Matcher::new(c);
    m.isometries(&m, true)
}

/// A facet normal, oriented to be nonnegative on the cone, together with the
/// set of generators on which it vanishes.
#[derive(Clone, Debug)]
pub struct Facet {
    pub normal: [i128; 10],
    pub members: u64,
}

/// Facets of the cone generated by `sym2(v)`, `v ∈ vectors`, assumed to be
/// full-dimensional in Sym².
pub fn perfect_cone_facets(vectors: &[Vec4]) -> Vec<Facet> {
    let n = vectors.len();
    let syms: Vec<Sym> = vectors.iter().map(sym2).collect();
    let mut seen: BTreeMap<u64, Facet> = BTreeMap::new();
    let mut subset = Vec::with_capacity(9);
    fn rec(
        start: usize,
        n: usize,
        subset: &mut Vec<usize>,
        syms: &[Sym],
        vectors: &[Vec4],
        seen: &mut BTreeMap<u64, Facet>,
    ) {
        if subset.len() == 9 {
            let m: Vec<Vec<i128>> = subset.iter().map(|&i| syms[i].iter().map(|&x| x as i128).collect()).collect();
            let mut normal = [0i128; 10];
            for j in 0..10 {
                let minor: Vec<Vec<i128>> =
                    m.iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
                let d = det_i128(minor);
                normal[j] = if j % 2 == 0 { d } else { -d };
            }
            if normal.iter().all(|&x| x == 0) {
                return;
            }
            let g = normal.iter().fold(0i128, |g, &x| num_integer::gcd(g, x));
            normal.iter_mut().for_each(|x| *x /= g);
            let vals: Vec<i128> = vectors.iter().map(|v| pair(&normal, v)).collect();
            let pos = vals.iter().any(|&x| x > 0);
            let neg = vals.iter().any(|&x| x < 0);
            if pos && neg {
                return;
            }
            if neg {
                normal.iter_mut().for_each(|x| *x = -*x);
            }
            let members = vals.iter().enumerate().filter(|(_, &x)| x == 0).fold(0u64, |m, (i, _)| m | 1 << i);
            seen.entry(members).or_insert(Facet { normal, members });
            return;
        }
        for i in start..n {
            if n - i < 9 - subset.len() {
                break;
            }
            subset.push(i);
            rec(i + 1, n, subset, syms, vectors, seen);
            subset.pop();
        }
    }
    rec(0, n, &mut subset, &syms, vectors, &mut seen);
    seen.into_values().collect()
}

/// All nonempty faces of a cone as generator bitmasks (intersections of facets,
/// and the whole cone).
pub fn face_lattice(n: usize, facets: &[Facet]) -> Vec<u64> {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut faces: std::collections::BTreeSet<u64> = facets.iter().map(|f| f.members).collect();
    faces.insert(full);
    let mut frontier: Vec<u64> = faces.iter().copied().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &a in &frontier {
            for f in facets {
                let b = a & f.members;
                if b != 0 && faces.insert(b) {
                    next.push(b);
                }
            }
        }
        frontier = next;
    }
    faces.into_iter().collect()
}

fn form_plus(a: &Gram, r: &[i128; 10], t: Rat) -> Gram {
    let mut out = *a;
    let mut k = 0;
    for i in 0..4 {
        for j in i..4 {
            if i == j {
                out[i][i] += t * rat(r[k]);
            } else {
                let half = t * Rat::new(r[k], 2);
                out[i][j] += half;
                out[j][i] += half;
            }
            k += 1;
        }
    }
    out
}

/// Voronoi neighbor of the perfect form `a` (minimum `m`) across a facet with
/// normal `r`: the form `a + ρ r` for the least `ρ > 0` at which new minimal
/// vectors appear.
pub fn voronoi_neighbor(a: &QuadForm, m: Rat, facet: &Facet, vectors: &[Vec4]) -> QuadForm {
    let r = facet.normal;
    let in_facet = |x: &Vec4| pair(&r, x) == 0 && vectors.iter().any(|v| v == x);
    let mut lo = Rat::zero();
    let mut hi = rat(1);
    loop {
        match QuadForm::new(form_plus(a.gram(), &r, hi)) {
            Ok(q) if q.minimal_vectors().0 >= m => {
                lo = hi;
                hi = hi * rat(2);
            }
            _ => break,
        }
    }
    loop {
        let q = match QuadForm::new(form_plus(a.gram(), &r, hi)) {
            Ok(q) => q,
            Err(_) => {
                let mid = (lo + hi) / rat(2);
                match QuadForm::new(form_plus(a.gram(), &r, mid)) {
                    Ok(qm) => {
                        let (mm, vs) = qm.minimal_vectors();
                        if mm < m {
                            hi = mid;
                        } else if mm == m && vs.iter().any(|x| !in_facet(x)) {
                            return qm;
                        } else {
                            lo = mid;
                        }
                    }
                    Err(_) => hi = mid,
                }
                continue;
            }
        };
        let below: Vec<Vec4> = q.short_vectors(m).into_iter().filter(|(_, v)| *v < m).map(|(x, _)| x).collect();
        if below.is_empty() {
            let (mm, vs) = q.minimal_vectors();
            debug_assert_eq!(mm, m);
            if vs.iter().any(|x| !in_facet(x)) {
                return q;
            }
            lo = hi;
            hi = hi * rat(2);
            continue;
        }
        let mut best: Option<Rat> = None;
        for x in &below {
            let rx = pair(&r, x);
            debug_assert!(rx < 0);
            let rho = (a.eval(x) - m) / rat(-rx);
            if best.map_or(true, |b| rho < b) {
                best = Some(rho);
            }
        }
        hi = best.unwrap();
        debug_assert!(hi.is_positive());
    }
}

/// Reference from a cell to one of its facets `τ = g · τ₀` with `τ₀` the
/// orbit representative; `sign` is the incidence number including the
/// orientation comparison between `τ` and `g · τ₀`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FaceRef {
    pub orbit: usize,
    pub transform: Mat4,
    pub sign: i8,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Cell {
    pub vectors: Config,
    pub cone_dim: usize,
    /// Indices into `vectors` whose rank-one forms orient the cell.
    pub frame: Vec<usize>,
    /// Setwise stabilizer in SL(4,Z) with the orientation character.
    pub stabilizer: Vec<(Mat4, i8)>,
    pub faces: Vec<FaceRef>,
}

impl Cell {
    /// Dimension of the corresponding cell of the well-rounded retract.
    pub fn retract_dim(&self) -> usize {
        10 - self.cone_dim
    }

    pub fn chain_degree(&self) -> usize {
        self.cone_dim - 4
    }

    pub fn frame_syms(&self) -> Vec<Sym> {
        self.frame.iter().map(|&i| sym2(&self.vectors.0[i])).collect()
    }

    pub fn is_orientable(&self) -> bool {
        self.stabilizer.iter().all(|(_, c)| *c == 1)
    }

    pub fn stabilizer_order(&self) -> usize {
        self.stabilizer.len()
    }
}

/// Orientation character of `g` on a cell with the given frame.
pub fn orientation_character(frame: &[Sym], vectors: &[Vec4], frame_idx: &[usize], g: &Mat4) -> i8 {
    let image: Vec<Sym> = frame_idx.iter().map(|&i| sym2(&g.apply(&vectors[i]))).collect();
    relative_orientation(frame, &image)
}

/// SL(4,Z)-orbit representatives of well-rounded cells, indexed by cone
/// dimension (entries 0..=3 are empty).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RetractComplex {
    pub perfect_forms: Vec<Config>,
    pub cells: Vec<Vec<Cell>>,
}

struct Pending {
    config: Config,
    parent: usize,
    mask: u64,
}

impl RetractComplex {
    /// Runs Voronoi's algorithm from the D4 form and enumerates all cells.
    pub fn enumerate() -> RetractComplex {
        let mut perfect: Vec<(QuadForm, Config)> = Vec::new();
        let d4 = QuadForm::d4();
        let (_, mv) = d4.minimal_vectors();
        perfect.push((d4, Config::new(mv)));
        let mut idx = 0;
        let mut facets_of: Vec<Vec<Facet>> = Vec::new();
        while idx < perfect.len() {
            let (form, config) = perfect[idx].clone();
            let (m, _) = form.minimal_vectors();
            let facets = perfect_cone_facets(&config.0);
            debug!("perfect form {idx}: {} minimal vectors, {} facets", config.len(), facets.len());
            for f in &facets {
                let nb = voronoi_neighbor(&form, m, f, &config.0);
                let (_, nv) = nb.minimal_vectors();
                let nc = Config::new(nv);
                assert_eq!(cone_dim(&nc.0), 10, "neighbor is not perfect");
                if !perfect.iter().any(|(_, c)| find_equivalence(&nc, c).is_some()) {
                    perfect.push((nb, nc));
                }
            }
            facets_of.push(facets);
            idx += 1;
        }

        let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); 11];
        let mut matchers: Vec<Vec<Matcher>> = (0..11).map(|_| Vec::new()).collect();
        let mut lattices: Vec<Vec<u64>> = Vec::new();
        // cells found through (perfect form, mask) with their orbit
        let mut pending: Vec<Pending> = Vec::new();
        for (pi, (_, config)) in perfect.iter().enumerate() {
            let lat = face_lattice(config.len(), &facets_of[pi]);
            for &mask in &lat {
                let vs: Vec<Vec4> = (0..config.len()).filter(|&i| mask >> i & 1 == 1).map(|i| config.0[i]).collect();
                if spans_q4(&vs) {
                    pending.push(Pending { config: Config::new(vs), parent: pi, mask });
                }
            }
            lattices.push(lat);
        }
        // Deterministic order: by cone dimension, then vector configuration.
        pending.sort_by(|a, b| (cone_dim(&a.config.0), &a.config).cmp(&(cone_dim(&b.config.0), &b.config)));
        let mut origin: Vec<Vec<(usize, u64)>> = vec![Vec::new(); 11];
        for p in &pending {
            let d = cone_dim(&p.config.0);
            let mt = Matcher::new(&p.config);
            if matchers[d].iter().any(|m| !m.isometries(&mt, false).is_empty()) {
                continue;
            }
            let frame = greedy_frame(&p.config.0);
            let frame_s: Vec<Sym> = frame.iter().map(|&i| sym2(&p.config.0[i])).collect();
            let stab = mt
                .isometries(&mt, true)
                .into_iter()
                .map(|g| {
                    let c = orientation_character(&frame_s, &p.config.0, &frame, &g);
                    (g, c)
                })
                .collect();
            cells[d].push(Cell { vectors: p.config.clone(), cone_dim: d, frame, stabilizer: stab, faces: Vec::new() });
            origin[d].push((p.parent, p.mask));
            matchers[d].push(mt);
        }

        // Facet incidences.
        for d in 5..=10 {
            for ci in 0..cells[d].len() {
                let (pi, mask) = origin[d][ci];
                let config = &perfect[pi].1;
                let sigma = cells[d][ci].clone();
                let sframe = sigma.frame_syms();
                let mut faces = Vec::new();
                for &sub in &lattices[pi] {
                    if sub & mask != sub || sub == mask {
                        continue;
                    }
                    let vs: Vec<Vec4> = (0..config.len()).filter(|&i| sub >> i & 1 == 1).map(|i| config.0[i]).collect();
                    if cone_dim(&vs) != d - 1 || !spans_q4(&vs) {
                        continue;
                    }
                    let tau = Config::new(vs);
                    let mt = Matcher::new(&tau);
                    let (orbit, g) = matchers[d - 1]
                        .iter()
                        .enumerate()
                        .find_map(|(oi, m)| m.isometries(&mt, false).into_iter().next().map(|g| (oi, g)))
                        .expect("facet has a representative");
                    let rep = &cells[d - 1][orbit];
                    // frame of tau as its own cell, and g applied to the rep frame
                    let tframe_idx = greedy_frame(&tau.0);
                    let tframe: Vec<Sym> = tframe_idx.iter().map(|&i| sym2(&tau.0[i])).collect();
                    let moved: Vec<Sym> = rep.frame.iter().map(|&i| sym2(&g.apply(&rep.vectors.0[i]))).collect();
                    let s = relative_orientation(&tframe, &moved);
                    let w = sigma.vectors.0.iter().find(|v| !tau.contains(v)).unwrap();
                    let mut with_w = vec![sym2(w)];
                    with_w.extend(tframe.iter().copied());
                    let inc = relative_orientation(&sframe, &with_w);
                    faces.push(FaceRef { orbit, transform: g, sign: s * inc });
                }
                cells[d][ci].faces = faces;
            }
        }
        RetractComplex { perfect_forms: perfect.into_iter().map(|(_, c)| c).collect(), cells }
    }

    pub fn orbit_counts(&self) -> Vec<(usize, usize)> {
        (4..=10).map(|d| (d, self.cells[d].len())).collect()
    }

    /// Cells in chain degree `k` (cone dimension `k + 4`).
    pub fn degree(&self, k: usize) -> &[Cell] {
        &self.cells[k + 4]
    }

    /// Least common multiple of the stabilizer orders, modulo `±1`.
    pub fn stabilizer_primes(&self) -> Vec<u64> {
        let mut primes = std::collections::BTreeSet::new();
        for c in self.cells.iter().flatten() {
            let mut n = c.stabilizer.len() as u64;
            let mut p = 2;
            while n > 1 {
                while n % p == 0 {
                    primes.insert(p);
                    n /= p;
                }
                p += 1;
            }
        }
        primes.into_iter().collect()
    }
}
