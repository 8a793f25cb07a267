//! Small fixed-size integer linear algebra in rank 4.
//!
//! Vectors are columns; a matrix `g` acts on a vector by `g * v`. Matrices are
//! stored row-major.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

pub type Vec4 = [i64; 4];

/// A primitive integer vector up to sign, normalized so that its first
/// nonzero coordinate is positive.
pub fn normalize_sign(v: Vec4) -> Vec4 {
    match v.iter().find(|&&x| x != 0) {
        Some(&x) if x < 0 => [-v[0], -v[1], -v[2], -v[3]],
        _ => v,
    }
}

/// Divides out the content and normalizes the sign. Returns `None` for zero.
pub fn primitive(v: Vec4) -> Option<Vec4> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g == 0 {
        return None;
    }
    Some(normalize_sign([v[0] / g, v[1] / g, v[2] / g, v[3] / g]))
}

pub fn is_zero(v: &Vec4) -> bool {
    v.iter().all(|&x| x == 0)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mat4(pub [[i64; 4]; 4]);

impl fmt::Debug for Mat4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Mat4 {
    pub const IDENTITY: Mat4 = Mat4([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);

    pub fn diag(d: [i64; 4]) -> Mat4 {
        let mut m = [[0; 4]; 4];
        for i in 0..4 {
            m[i][i] = d[i];
        }
        Mat4(m)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec4; 4]) -> Mat4 {
        let mut m = [[0; 4]; 4];
        for (j, c) in cols.iter().enumerate() {
            for i in 0..4 {
                m[i][j] = c[i];
            }
        }
        Mat4(m)
    }

    pub fn column(&self, j: usize) -> Vec4 {
        [self.0[0][j], self.0[1][j], self.0[2][j], self.0[3][j]]
    }

    pub fn row(&self, i: usize) -> Vec4 {
        self.0[i]
    }

    pub fn transpose(&self) -> Mat4 {
        let mut m = [[0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = self.0[j][i];
            }
        }
        Mat4(m)
    }

    pub fn mul(&self, other: &Mat4) -> Mat4 {
        let mut m = [[0i64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut s = 0i64;
                for k in 0..4 {
                    s += self.0[i][k] * other.0[k][j];
                }
                m[i][j] = s;
            }
        }
        Mat4(m)
    }

    pub fn apply(&self, v: &Vec4) -> Vec4 {
        let mut out = [0i64; 4];
        for i in 0..4 {
            out[i] = (0..4).map(|k| self.0[i][k] * v[k]).sum();
        }
        out
    }

    pub fn neg(&self) -> Mat4 {
        let mut m = self.0;
        m.iter_mut().flatten().for_each(|x| *x = -*x);
        Mat4(m)
    }

    pub fn det(&self) -> i64 {
        det4(&self.0)
    }

    /// Adjugate: `adj(g) * g = det(g) * I`.
    pub fn adjugate(&self) -> Mat4 {
        let a = &self.0;
        let mut out = [[0i64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut minor = [[0i64; 3]; 3];
                let mut r = 0;
                for ii in 0..4 {
                    if ii == j {
                        continue;
                    }
                    let mut c = 0;
                    for jj in 0..4 {
                        if jj == i {
                            continue;
                        }
                        minor[r][c] = a[ii][jj];
                        c += 1;
                    }
                    r += 1;
                }
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                out[i][j] = sign * det3(&minor);
            }
        }
        Mat4(out)
    }

    /// Exact inverse for unimodular matrices.
    pub fn inverse_unimodular(&self) -> Option<Mat4> {
        match self.det() {
            1 => Some(self.adjugate()),
            -1 => Some(self.adjugate().neg()),
            _ => None,
        }
    }
}

pub fn det3(a: &[[i64; 3]; 3]) -> i64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

pub fn det4(a: &[[i64; 4]; 4]) -> i64 {
    let mut s = 0i64;
    for c in 0..4 {
        let mut minor = [[0i64; 3]; 3];
        for r in 1..4 {
            let mut k = 0;
            for cc in 0..4 {
                if cc != c {
                    minor[r - 1][k] = a[r][cc];
                    k += 1;
                }
            }
        }
        let term = a[0][c] * det3(&minor);
        s += if c % 2 == 0 { term } else { -term };
    }
    s
}

/// Determinant of the matrix with the given columns.
pub fn det_columns(cols: &[Vec4; 4]) -> i64 {
    Mat4::from_columns(cols).det()
}

/// Solves `B c = D v` for integer `c`, where `D = det(B)`. Returns `(c, D)`.
pub fn cramer(cols: &[Vec4; 4], v: &Vec4) -> ([i64; 4], i64) {
    let b = Mat4::from_columns(cols);
    let adj = b.adjugate();
    (adj.apply(v), b.det())
}

/// Rank over Q of a list of integer vectors of arbitrary length (fraction-free
/// elimination in i128).
pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let a = m[rank][col];
                let b = m[r][col];
                let g = a.gcd(&b);
                let (fa, fb) = (a / g, b / g);
                for c in 0..ncols {
                    m[r][c] = m[r][c] * fa - m[rank][c] * fb;
                }
                let cg = m[r].iter().fold(0i128, |g, &x| g.gcd(&x));
                if cg > 1 {
                    m[r].iter_mut().for_each(|x| *x /= cg);
                }
            }
        }
        rank += 1;
    }
    rank
}
