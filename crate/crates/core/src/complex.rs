//! The equivariant chain complex `V_* ⊗_Γ F[P³(Z/N)]` whose degree-1
//! homology is `H⁵(Γ₀(N))`.
//!
//! `V_k` has one generator per SL(4,Z)-orbit of well-rounded cells of cone
//! dimension `k + 4`. For a cell orbit `σ` the tensor product is spanned by
//! `σ ⊗ x`, `x ∈ P³`, subject to `σ ⊗ x·h = χ(h) σ ⊗ x` for `h ∈ Stab(σ)`.
//! The basis therefore consists of one element per `Stab(σ)`-orbit on `P³`,
//! except orbits containing a point fixed by an orientation-reversing
//! element, which vanish when 2 is invertible.

use std::sync::{Arc, OnceLock};

use log::info;
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coset::CosetSpace;
use crate::error::{Error, Result};
use crate::lattice::Mat4;
use crate::linalg::{markowitz_echelon, markowitz_partial, Echelon, Fp, Insert, SparseMatrix, SparseVec};
use crate::smith::{smith_normal_form, Budget, IntMatrix};
use crate::voronoi::RetractComplex;

/// Coefficient ring of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    Fp(u32),
    Z,
}

impl Ring {
    pub const DEFAULT: Ring = Ring::Fp(31991);

    pub fn parse(s: &str) -> Option<Ring> {
        match s {
            "z" | "Z" => Some(Ring::Z),
            _ => s.strip_prefix("zp:").and_then(|p| p.parse().ok()).map(Ring::Fp),
        }
    }
}

impl std::fmt::Display for Ring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ring::Fp(p) => write!(f, "zp:{p}"),
            Ring::Z => write!(f, "z"),
        }
    }
}

/// The cell poset, enumerated once per process.
pub fn retract() -> &'static RetractComplex {
    static CELLS: OnceLock<RetractComplex> = OnceLock::new();
    CELLS.get_or_init(RetractComplex::enumerate)
}

/// `Stab(σ)`-orbits on `P³` for one cell orbit.
#[derive(Clone, Debug)]
pub struct CellOrbits {
    /// Local basis index of each point's orbit, or `u32::MAX` if it vanishes.
    pub slot: Vec<u32>,
    /// `σ ⊗ x = sign[x] · σ ⊗ rep(x)`.
    pub sign: Vec<i8>,
    /// Representative points of the surviving orbits, in increasing order.
    pub reps: Vec<u32>,
}

pub const KILLED: u32 = u32::MAX;

pub fn cell_orbits(space: &CosetSpace, stabilizer: &[(Mat4, i8)]) -> CellOrbits {
    let n = space.len();
    let mut slot = vec![u32::MAX - 1; n];
    let mut sign = vec![0i8; n];
    let mut reps = Vec::new();
    let mut members = Vec::new();
    for x in 0..n {
        if slot[x] != u32::MAX - 1 {
            continue;
        }
        members.clear();
        let mut killed = false;
        for (h, chi) in stabilizer {
            let y = space.act(x, h);
            if slot[y] == u32::MAX - 1 {
                slot[y] = 0;
                sign[y] = *chi;
                members.push(y);
            } else if sign[y] != *chi {
                killed = true;
            }
        }
        let id = if killed {
            KILLED
        } else {
            reps.push(x as u32);
            reps.len() as u32 - 1
        };
        for &y in &members {
            slot[y] = id;
            if killed {
                sign[y] = 0;
            }
        }
    }
    CellOrbits { slot, sign, reps }
}

/// Basis of one chain degree.
#[derive(Clone, Debug)]
pub struct DegreeBasis {
    pub orbits: Vec<CellOrbits>,
    /// Global index of the first basis element of each cell orbit.
    pub offsets: Vec<usize>,
    pub dim: usize,
}

impl DegreeBasis {
    /// Global index and sign of `σ ⊗ x`, or `None` if it vanishes.
    pub fn locate(&self, cell: usize, x: usize) -> Option<(usize, i8)> {
        let o = &self.orbits[cell];
        let s = o.slot[x];
        (s != KILLED).then(|| (self.offsets[cell] + s as usize, o.sign[x]))
    }

    /// Cell orbit and representative point of a global basis index.
    pub fn element(&self, i: usize) -> (usize, usize) {
        let cell = self.offsets.partition_point(|&o| o <= i) - 1;
        (cell, self.orbits[cell].reps[i - self.offsets[cell]] as usize)
    }
}

pub struct EquivariantComplex {
    pub level: u64,
    pub ring: Ring,
    pub space: Arc<CosetSpace>,
    /// Bases for degrees `0..=top`.
    pub bases: Vec<DegreeBasis>,
    /// `boundaries[k]` maps degree `k` to `k - 1` (rows are images); entry 0 is empty.
    pub boundaries: Vec<IntMatrix>,
}

/// Stabilizer orders primes; fields of these characteristics are rejected.
pub fn excluded_primes() -> Vec<u64> {
    retract().stabilizer_primes()
}

impl EquivariantComplex {
    /// Builds degrees `0..=top` (`top ≤ 6`).
    pub fn build(level: u64, ring: Ring, top: usize) -> Result<EquivariantComplex> {
        let space = Arc::new(CosetSpace::new(level)?);
        Self::build_on(space, ring, top)
    }

    pub fn build_on(space: Arc<CosetSpace>, ring: Ring, top: usize) -> Result<EquivariantComplex> {
        let cells = retract();
        if let Ring::Fp(p) = ring {
            Fp::new(p)?;
            if cells.stabilizer_primes().contains(&(p as u64)) {
                return Err(Error::UnsupportedCharacteristic { p: p as u64 });
            }
        }
        let top = top.min(6);
        let bases: Vec<DegreeBasis> = (0..=top)
            .map(|k| {
                let orbits: Vec<CellOrbits> =
                    cells.degree(k).par_iter().map(|c| cell_orbits(&space, &c.stabilizer)).collect();
                let mut offsets = Vec::with_capacity(orbits.len());
                let mut dim = 0;
                for o in &orbits {
                    offsets.push(dim);
                    dim += o.reps.len();
                }
                DegreeBasis { orbits, offsets, dim }
            })
            .collect();
        let mut boundaries = vec![IntMatrix::zero(0, 0)];
        for k in 1..=top {
            boundaries.push(boundary_matrix(&space, cells, &bases, k));
        }
        info!(
            "level {}: basis dims {:?}",
            space.level(),
            bases.iter().map(|b| b.dim).collect::<Vec<_>>()
        );
        Ok(EquivariantComplex { level: space.level(), ring, space, bases, boundaries })
    }

    pub fn dim(&self, k: usize) -> usize {
        self.bases[k].dim
    }

    fn field(&self) -> Result<Fp> {
        match self.ring {
            Ring::Fp(p) => Fp::new(p),
            Ring::Z => Err(Error::NeedsField),
        }
    }

    /// Echelon form of `im ∂_k ⊂ C_{k-1}` over the complex's field.
    ///
    /// Rows of `∂_k` are first thinned using the boundaries above: pivot
    /// columns of any echelon subset of `im ∂_{j+1}` index rows of `∂_j`
    /// that are combinations of the remaining ones. These subsets come from
    /// eliminations of the higher boundaries restricted to cheap pivots.
    pub fn image_echelon(&self, k: usize) -> Result<Echelon> {
        let f = self.field()?;
        let top = self.boundaries.len() - 1;
        if k == 0 || k > top {
            return Ok(Echelon::new(f, if k == 0 { 0 } else { self.dim(k - 1) }));
        }
        let mut drop: Vec<u32> = Vec::new();
        for j in (k + 1..=top).rev() {
            let m = without_rows(&self.boundaries[j].to_fp(&f), &drop);
            drop = markowitz_partial(&f, &m, PRUNE_COST).pivot_columns().to_vec();
        }
        Ok(markowitz_echelon(&f, &without_rows(&self.boundaries[k].to_fp(&f), &drop)))
    }

    /// Rank of `∂_k` over the complex's field.
    pub fn boundary_rank(&self, k: usize) -> Result<usize> {
        Ok(self.image_echelon(k)?.rank())
    }

    /// Dimension of `H_k`, which is `H^{5}` for `k = 1`.
    pub fn homology_rank(&self, k: usize) -> Result<usize> {
        self.field()?;
        if k + 1 >= self.bases.len() {
            return Err(Error::Consistency(format!("degree {} not built", k + 1)));
        }
        Ok(self.dim(k) - self.boundary_rank(k)? - self.boundary_rank(k + 1)?)
    }

    /// Cycles representing a basis of `H_1`, with the data that reads off
    /// coordinates of arbitrary cycles.
    pub fn homology_basis(&self) -> Result<HomologyBasis> {
        let f = self.field()?;
        if self.bases.len() < 3 {
            return Err(Error::Consistency("degree 2 not built".into()));
        }
        let image = self.image_echelon(2)?;
        let d1 = self.boundaries[1].to_fp(&f);
        let mut e = Echelon::tracked(f, d1.ncols, d1.nrows);
        let mut cycles = Vec::new();
        let mut keys = Vec::new();
        for c in 0..d1.nrows {
            if image.is_pivot(c) {
                continue;
            }
            if let Insert::Dependent(tag) = e.insert(&d1.rows[c], c) {
                debug_assert!(tag.iter().any(|&(i, x)| i as usize == c && x == 1));
                cycles.push(tag);
                keys.push(c as u32);
            }
        }
        Ok(HomologyBasis { field: f, image, cycles, keys })
    }
}

/// Cost bound for the cheap eliminations used to thin boundary matrices.
const PRUNE_COST: u64 = 10_000;

fn without_rows(m: &SparseMatrix, drop: &[u32]) -> SparseMatrix {
    let mut skip = vec![false; m.nrows];
    for &d in drop {
        skip[d as usize] = true;
    }
    let rows: Vec<SparseVec> = (0..m.nrows).filter(|&i| !skip[i]).map(|i| m.rows[i].clone()).collect();
    SparseMatrix { nrows: rows.len(), ncols: m.ncols, rows }
}

/// A basis `z_1, …, z_b` of `H_1` over F_p. Each `z_j` has coefficient 1
/// at its key column and 0 at the other keys; after reducing a cycle
/// modulo boundaries, its entries at the keys are its coordinates.
pub struct HomologyBasis {
    pub field: Fp,
    pub image: Echelon,
    pub cycles: Vec<SparseVec>,
    pub keys: Vec<u32>,
}

impl HomologyBasis {
    pub fn dim(&self) -> usize {
        self.cycles.len()
    }

    /// Coordinates of the class of a cycle. Fails if the input is not
    /// homologous to a combination of the basis (i.e. not a cycle).
    pub fn coordinates(&self, z: &SparseVec) -> Result<Vec<u32>> {
        let f = self.field;
        let w = self.image.reduce_shared(z);
        let coords: Vec<u32> = self
            .keys
            .iter()
            .map(|k| w.binary_search_by_key(k, |e| e.0).map_or(0, |i| w[i].1))
            .collect();
        let mut rest: Vec<(u32, u32)> = w;
        for (j, &a) in coords.iter().enumerate() {
            if a != 0 {
                rest.extend(self.cycles[j].iter().map(|&(c, x)| (c, f.neg(f.mul(a, x)))));
            }
        }
        if !crate::linalg::normalize(&f, rest).is_empty() {
            return Err(Error::Consistency("chain is not a cycle modulo boundaries".into()));
        }
        Ok(coords)
    }
}

/// `∂(σ ⊗ x) = Σ_τ sign · τ₀ ⊗ x·g` for faces `τ = g·τ₀`.
pub fn boundary_matrix(space: &CosetSpace, cells: &RetractComplex, bases: &[DegreeBasis], k: usize) -> IntMatrix {
    let src = &bases[k];
    let dst = &bases[k - 1];
    let faces: Vec<_> = cells.degree(k).iter().map(|c| &c.faces).collect();
    let rows: Vec<Vec<(u32, i64)>> = (0..src.dim)
        .into_par_iter()
        .map(|i| {
            let (cell, x) = src.element(i);
            let mut entries = Vec::new();
            for fr in faces[cell] {
                let y = space.act(x, &fr.transform);
                if let Some((j, s)) = dst.locate(fr.orbit, y) {
                    entries.push((j as u32, (fr.sign * s) as i64));
                }
            }
            entries
        })
        .collect();
    let mut m = IntMatrix::zero(src.dim, dst.dim);
    for (i, r) in rows.into_iter().enumerate() {
        m.set_row(i, r);
    }
    m
}

/// Degrees built for Betti computations; degrees 3 and 4 only serve to thin
/// the matrices.
pub const DEFAULT_TOP: usize = 4;

/// Betti number of `H⁵(Γ₀(N); F_p)`.
pub fn cohomology_rank(level: u64, ring: Ring) -> Result<usize> {
    if let Ring::Z = ring {
        return Err(Error::NeedsField);
    }
    EquivariantComplex::build(level, ring, DEFAULT_TOP)?.homology_rank(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralCohomology {
    pub free_rank: usize,
    /// Elementary divisors greater than one.
    pub torsion: Vec<String>,
    /// Primes at which the torsion statement is unreliable.
    pub excluded_primes: Vec<u64>,
}

/// Free rank and torsion divisors of `H⁵(Γ₀(N); Z)` away from the stabilizer
/// primes.
pub fn integral_cohomology(level: u64, budget: Budget) -> Result<IntegralCohomology> {
    let c = EquivariantComplex::build(level, Ring::Z, 2)?;
    let d1 = smith_normal_form(&c.boundaries[1], budget)?;
    let d2 = smith_normal_form(&c.boundaries[2], budget)?;
    let one = BigInt::from(1);
    Ok(IntegralCohomology {
        free_rank: c.dim(1) - d1.len() - d2.len(),
        torsion: d2.into_iter().filter(|d| *d != one).map(|d| d.to_string()).collect(),
        excluded_primes: excluded_primes(),
    })
}
