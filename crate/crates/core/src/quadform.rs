//! Positive definite quaternary quadratic forms with exact rational Gram
//! matrices, and their short vectors.

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{normalize_sign, Vec4};

pub type Rat = Ratio<i128>;

/// Symmetric 4×4 rational matrix. `QuadForm` values are positive definite.
pub type Gram = [[Rat; 4]; 4];

pub fn rat(n: i128) -> Rat {
    Rat::from_integer(n)
}

pub fn eval(gram: &Gram, x: &Vec4) -> Rat {
    let mut s = Rat::zero();
    for i in 0..4 {
        if x[i] == 0 {
            continue;
        }
        for j in 0..4 {
            if x[j] != 0 {
                s += gram[i][j] * rat(x[i] as i128 * x[j] as i128);
            }
        }
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadForm {
    gram: Gram,
}

impl QuadForm {
    pub fn new(gram: Gram) -> Result<Self> {
        for i in 0..4 {
            for j in 0..4 {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotPositiveDefinite("gram matrix is not symmetric".into()));
                }
            }
        }
        for k in 1..=4 {
            if leading_minor(&gram, k) <= Rat::zero() {
                return Err(Error::NotPositiveDefinite(format!("leading minor {k} is not positive")));
            }
        }
        Ok(QuadForm { gram })
    }

    pub fn from_integers(g: [[i64; 4]; 4]) -> Result<Self> {
        let mut gram: Gram = Default::default();
        for i in 0..4 {
            for j in 0..4 {
                gram[i][j] = rat(g[i][j] as i128);
            }
        }
        Self::new(gram)
    }

    pub fn identity() -> Self {
        Self::from_integers([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]).unwrap()
    }

    /// Gram matrix of the root lattice D4 in a basis of simple roots.
    pub fn d4() -> Self {
        Self::from_integers([[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]]).unwrap()
    }

    /// Gram matrix of the root lattice A4 in a basis of simple roots.
    pub fn a4() -> Self {
        Self::from_integers([[2, -1, 0, 0], [-1, 2, -1, 0], [0, -1, 2, -1], [0, 0, -1, 2]]).unwrap()
    }

    pub fn gram(&self) -> &Gram {
        &self.gram
    }

    pub fn eval(&self, x: &Vec4) -> Rat {
        eval(&self.gram, x)
    }

    /// All nonzero `x` (one per sign class) with `Q[x] <= bound`.
    ///
    /// The search box is `|x_i| <= sqrt(bound * (Q^{-1})_{ii})`, which holds for
    /// every vector in the ellipsoid.
    pub fn short_vectors(&self, bound: Rat) -> Vec<(Vec4, Rat)> {
        let inv = invert(&self.gram).expect("positive definite form is invertible");
        let mut lim = [0i64; 4];
        for i in 0..4 {
            lim[i] = floor_sqrt(bound * inv[i][i]);
        }
        let mut out = Vec::new();
        for a in -lim[0]..=lim[0] {
            for b in -lim[1]..=lim[1] {
                for c in -lim[2]..=lim[2] {
                    for d in -lim[3]..=lim[3] {
                        let x = [a, b, c, d];
                        if x == [0; 4] || normalize_sign(x) != x {
                            continue;
                        }
                        let v = self.eval(&x);
                        if v <= bound {
                            out.push((x, v));
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Arithmetic minimum and the sign classes of vectors attaining it, sorted.
    pub fn minimal_vectors(&self) -> (Rat, Vec<Vec4>) {
        let diag_min = (0..4).map(|i| self.gram[i][i]).min().unwrap();
        let short = self.short_vectors(diag_min);
        let m = short.iter().map(|(_, v)| *v).min().unwrap();
        let mut vs: Vec<Vec4> = short.into_iter().filter(|(_, v)| *v == m).map(|(x, _)| x).collect();
        vs.sort();
        (m, vs)
    }

    /// The form `g^T Q g`, whose minimal vectors are `g^{-1}` of those of `Q`.
    pub fn transform(&self, g: &crate::lattice::Mat4) -> QuadForm {
        let mut out: Gram = Default::default();
        for i in 0..4 {
            for j in 0..4 {
                let mut s = Rat::zero();
                for k in 0..4 {
                    for l in 0..4 {
                        s += rat(g.0[k][i] as i128) * self.gram[k][l] * rat(g.0[l][j] as i128);
                    }
                }
                out[i][j] = s;
            }
        }
        QuadForm { gram: out }
    }
}

fn leading_minor(g: &Gram, k: usize) -> Rat {
    let mut m: Vec<Vec<Rat>> = (0..k).map(|i| g[i][..k].to_vec()).collect();
    let mut det = Rat::one();
    for c in 0..k {
        let Some(p) = (c..k).find(|&r| !m[r][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..k {
            let f = m[r][c] / m[c][c];
            for cc in c..k {
                let t = m[c][cc];
                m[r][cc] -= f * t;
            }
        }
    }
    det
}

pub fn invert(g: &Gram) -> Option<Gram> {
    let mut a: Vec<Vec<Rat>> = (0..4)
        .map(|i| {
            let mut row = g[i].to_vec();
            row.extend((0..4).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    for c in 0..4 {
        let p = (c..4).find(|&r| !a[r][c].is_zero())?;
        a.swap(p, c);
        let piv = a[c][c];
        a[c].iter_mut().for_each(|x| *x /= piv);
        for r in 0..4 {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c];
                for cc in 0..8 {
                    let t = a[c][cc];
                    a[r][cc] -= f * t;
                }
            }
        }
    }
    let mut out: Gram = Default::default();
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i][4 + j];
        }
    }
    Some(out)
}

/// Largest integer `n >= 0` with `n^2 <= r` (for `r >= 0`).
pub fn floor_sqrt(r: Rat) -> i64 {
    if !r.is_positive() {
        return 0;
    }
    let fl = (r.numer() / r.denom()) as f64;
    let mut n = fl.sqrt() as i128 + 2;
    while rat(n * n) > r {
        n -= 1;
    }
    while rat((n + 1) * (n + 1)) <= r {
        n += 1;
    }
    n as i64
}
