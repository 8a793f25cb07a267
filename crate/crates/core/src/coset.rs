//! The coset space Γ₀(N)\SL(4,Z), realized as P³(Z/N): unimodular rows mod N
//! up to unit scaling. A coset `Γ₀(N) g` corresponds to the last row of `g`,
//! and SL(4,Z) acts on the right by `x ↦ x g`.
//!
//! The canonical representative of a row is the lexicographically smallest of
//! its unit multiples. Points are indexed in lexicographic order of their
//! canonical rows, so the base point `(0,0,0,1)` always has index 0.

use num_integer::Integer;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::lattice::Mat4;

pub type Row = [u32; 4];

pub const BASE_POINT: usize = 0;

const DENSE_LIMIT: u64 = 64;

enum Lookup {
    /// Every row of (Z/N)⁴, packed, to its point index (or `u32::MAX`).
    Dense(Vec<u32>),
    Sparse(FxHashMap<u64, u32>),
}

pub struct CosetSpace {
    n: u64,
    units: Vec<u64>,
    /// Inverses mod N when N is prime (first nonzero entry scaled to 1).
    inverses: Option<Vec<u32>>,
    points: Vec<Row>,
    lookup: Lookup,
}

fn pack(n: u64, r: &Row) -> u64 {
    ((r[0] as u64 * n + r[1] as u64) * n + r[2] as u64) * n + r[3] as u64
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl CosetSpace {
    pub fn new(n: u64) -> Result<CosetSpace> {
        if n == 0 || n > 4096 {
            return Err(Error::InvalidLevel(n));
        }
        let units: Vec<u64> = (1..=n.max(1)).filter(|&u| u.gcd(&n) == 1 || n == 1).map(|u| u % n.max(1)).collect();
        let inverses = is_prime(n).then(|| {
            let mut inv = vec![0u32; n as usize];
            for a in 1..n {
                inv[a as usize] = (1..n).find(|b| a * b % n == 1).unwrap() as u32;
            }
            inv
        });
        let mut sp = CosetSpace { n, units, inverses, points: Vec::new(), lookup: Lookup::Sparse(FxHashMap::default()) };
        if n == 1 {
            sp.points.push([0, 0, 0, 0]);
            return Ok(sp);
        }
        let mut pts = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let r = [a as u32, b as u32, c as u32, d as u32];
                        if a.gcd(&b).gcd(&c).gcd(&d).gcd(&n) != 1 {
                            continue;
                        }
                        if sp.canonical_slow(&r) == r {
                            pts.push(r);
                        }
                    }
                }
            }
        }
        pts.sort();
        sp.points = pts;
        sp.lookup = if n <= DENSE_LIMIT {
            let mut table = vec![u32::MAX; (n * n * n * n) as usize];
            for (i, p) in sp.points.iter().enumerate() {
                for &u in &sp.units {
                    let q = p.map(|x| ((x as u64 * u) % n) as u32);
                    table[pack(n, &q) as usize] = i as u32;
                }
            }
            Lookup::Dense(table)
        } else {
            Lookup::Sparse(sp.points.iter().enumerate().map(|(i, p)| (pack(n, p), i as u32)).collect())
        };
        Ok(sp)
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> Row {
        self.points[i]
    }

    pub fn points(&self) -> &[Row] {
        &self.points
    }

    fn canonical_slow(&self, r: &Row) -> Row {
        let n = self.n;
        if let Some(inv) = &self.inverses {
            let Some(&lead) = r.iter().find(|&&x| x % n as u32 != 0) else {
                return *r;
            };
            let s = inv[(lead as u64 % n) as usize] as u64;
            return r.map(|x| ((x as u64 * s) % n) as u32);
        }
        self.units.iter().map(|&u| r.map(|x| ((x as u64 * u) % n) as u32)).min().unwrap()
    }

    pub fn canonicalize(&self, r: &Row) -> Row {
        if self.n == 1 {
            return [0; 4];
        }
        self.points[self.index_of(r).expect("row is unimodular")]
    }

    /// Index of the point represented by an arbitrary unimodular row.
    pub fn index_of(&self, r: &Row) -> Option<usize> {
        if self.n == 1 {
            return Some(0);
        }
        match &self.lookup {
            Lookup::Dense(t) => {
                let i = t[pack(self.n, r) as usize];
                (i != u32::MAX).then_some(i as usize)
            }
            Lookup::Sparse(m) => {
                let c = self.canonical_slow(r);
                m.get(&pack(self.n, &c)).map(|&i| i as usize)
            }
        }
    }

    /// Row vector times integer matrix, reduced mod N.
    pub fn row_times(&self, r: &Row, g: &Mat4) -> Row {
        let n = self.n as i64;
        let mut out = [0u32; 4];
        for (j, o) in out.iter_mut().enumerate() {
            let mut s = 0i64;
            for k in 0..4 {
                s += r[k] as i64 * g.0[k][j].rem_euclid(n);
            }
            *o = s.rem_euclid(n) as u32;
        }
        out
    }

    /// Right action `x ↦ x g` of an integral matrix whose determinant is prime to N.
    pub fn act(&self, x: usize, g: &Mat4) -> usize {
        if self.n == 1 {
            return 0;
        }
        let r = self.row_times(&self.points[x], g);
        self.index_of(&r).expect("matrix determinant must be prime to the level")
    }

    /// Table of `act(·, g)` over all points.
    pub fn action_table(&self, g: &Mat4) -> Vec<u32> {
        (0..self.len()).map(|x| self.act(x, g) as u32).collect()
    }
}

/// Expected number of points: N³ ∏_{p | N} (1 + 1/p + 1/p² + 1/p³).
pub fn expected_count(n: u64) -> u64 {
    let mut count = 1u64;
    let mut m = n;
    let mut p = 2;
    while m > 1 {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            count *= p.pow(3 * (e - 1)) * (p * p * p + p * p + p + 1);
        }
        p += 1;
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force: all rows, keep unimodular, quotient by unit scaling.
    fn oracle_count(n: u64) -> usize {
        let mut classes = std::collections::HashSet::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        if a.gcd(&b).gcd(&c).gcd(&d).gcd(&n) != 1 {
                            continue;
                        }
                        let orbit: std::collections::BTreeSet<[u64; 4]> = (1..n)
                            .filter(|u| u.gcd(&n) == 1)
                            .map(|u| [a * u % n, b * u % n, c * u % n, d * u % n])
                            .collect();
                        classes.insert(orbit);
                    }
                }
            }
        }
        classes.len()
    }

    #[test]
    fn small_levels_match_oracle() {
        for (n, expect) in [(2, 15), (3, 40), (4, 120)] {
            assert_eq!(CosetSpace::new(n).unwrap().len(), expect);
            assert_eq!(oracle_count(n), expect);
        }
        for n in 5..=12 {
            assert_eq!(CosetSpace::new(n).unwrap().len(), oracle_count(n));
        }
    }

    #[test]
    fn multiplicative_and_prime_formula() {
        for n in 2..=30u64 {
            let c = CosetSpace::new(n).unwrap().len() as u64;
            assert_eq!(c, expected_count(n));
            for a in 2..n {
                let b = n / a;
                if a * b == n && a.gcd(&b) == 1 {
                    assert_eq!(c, CosetSpace::new(a).unwrap().len() as u64 * CosetSpace::new(b).unwrap().len() as u64);
                }
            }
        }
        for p in (2..=83).filter(|&p| is_prime(p)) {
            assert_eq!(CosetSpace::new(p).unwrap().len() as u64, p * p * p + p * p + p + 1);
        }
    }

    #[test]
    fn zero_level_rejected() {
        assert!(matches!(CosetSpace::new(0), Err(Error::InvalidLevel(0))));
    }

    #[test]
    fn base_point_is_first() {
        let sp = CosetSpace::new(6).unwrap();
        assert_eq!(sp.point(BASE_POINT), [0, 0, 0, 1]);
    }

    #[test]
    fn canonicalize_idempotent() {
        let sp = CosetSpace::new(12).unwrap();
        for &p in sp.points() {
            assert_eq!(sp.canonicalize(&p), p);
            let scaled = p.map(|x| (x * 5) % 12);
            assert_eq!(sp.canonicalize(&sp.canonicalize(&scaled)), p);
        }
    }
}
