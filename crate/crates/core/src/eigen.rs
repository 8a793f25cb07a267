//! Simultaneous generalized eigenspaces of commuting operators over F_p.
//!
//! The ambient space is split by the characteristic polynomial of each
//! operator in turn; every resulting block is a joint generalized eigenspace
//! on which each operator's characteristic polynomial is a power of one
//! irreducible factor. Blocks whose factors all have degree 1 carry an
//! eigenvalue tuple; the others are returned unsplit together with their
//! factors.

use crate::error::{Error, Result};
use crate::linalg::{dense_identity, dense_kernel, dense_mul, dense_transpose, rref, Dense, Fp};
use crate::poly::{self, charpoly, eval_matrix, factor, PolyFp};

/// A joint generalized eigenspace.
#[derive(Clone, Debug)]
pub struct EigenBlock {
    /// Basis vectors as columns, in ambient coordinates (`n × dim`).
    pub basis: Dense,
    /// Each operator restricted to the block, in that basis.
    pub restricted: Vec<Dense>,
    /// Monic irreducible factor of each operator's characteristic polynomial
    /// on the block.
    pub factors: Vec<PolyFp>,
}

impl EigenBlock {
    pub fn dim(&self) -> usize {
        self.restricted.first().map_or(self.basis.first().map_or(0, |r| r.len()), |m| m.len())
    }

    pub fn is_split(&self) -> bool {
        self.factors.iter().all(|g| g.len() == 2)
    }

    /// Eigenvalue tuple, if every factor is linear.
    pub fn eigenvalues(&self, f: &Fp) -> Option<Vec<u32>> {
        self.is_split().then(|| self.factors.iter().map(|g| f.neg(g[0])).collect())
    }
}

pub fn commute(f: &Fp, a: &Dense, b: &Dense) -> bool {
    dense_mul(f, a, b) == dense_mul(f, b, a)
}

/// Splits the space into joint generalized eigenspaces of `ops`.
pub fn split_eigenspaces(f: &Fp, ops: &[Dense]) -> Result<Vec<EigenBlock>> {
    let n = ops.first().map_or(0, |m| m.len());
    for (i, a) in ops.iter().enumerate() {
        if a.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(Error::Consistency("operators of different sizes".into()));
        }
        for b in &ops[i + 1..] {
            if !commute(f, a, b) {
                return Err(Error::NonCommuting);
            }
        }
    }
    let mut blocks = vec![EigenBlock { basis: dense_identity(n), restricted: ops.to_vec(), factors: Vec::new() }];
    if n == 0 {
        return Ok(Vec::new());
    }
    for i in 0..ops.len() {
        let mut next = Vec::new();
        for b in blocks {
            let chi = charpoly(f, &b.restricted[i]);
            let fac = factor(f, &chi);
            if fac.len() == 1 {
                let mut b = b;
                b.factors.push(fac[0].0.clone());
                next.push(b);
                continue;
            }
            for (g, e) in fac {
                let ge = (1..e).fold(g.clone(), |acc, _| poly::mul(f, &acc, &g));
                let m = eval_matrix(f, &ge, &b.restricted[i]);
                let d = m.len();
                let kernel = dense_kernel(f, &m, d);
                let k: Dense = dense_transpose(&kernel); // d × dim
                let restricted = b.restricted.iter().map(|op| restrict(f, op, &k)).collect();
                let basis = dense_mul(f, &b.basis, &k);
                let mut factors = b.factors.clone();
                factors.push(g);
                next.push(EigenBlock { basis, restricted, factors });
            }
        }
        blocks = next;
    }
    Ok(blocks)
}

/// Matrix of `op` on the invariant subspace spanned by the columns of `k`.
pub fn restrict(f: &Fp, op: &Dense, k: &Dense) -> Dense {
    let m = k.first().map_or(0, |r| r.len());
    let mut kt = dense_transpose(k);
    let rows = rref(f, &mut kt); // independent rows of k
    let ks: Dense = rows.iter().map(|&r| k[r].clone()).collect();
    let inv = crate::linalg::dense_inverse(f, &ks).expect("independent rows");
    let ok = dense_mul(f, op, k);
    let oks: Dense = rows.iter().map(|&r| ok[r].clone()).collect();
    let out = dense_mul(f, &inv, &oks);
    debug_assert_eq!(out.len(), m);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fp() -> Fp {
        Fp::new(31991).unwrap()
    }

    fn diag(v: &[u32]) -> Dense {
        (0..v.len()).map(|i| (0..v.len()).map(|j| if i == j { v[i] } else { 0 }).collect()).collect()
    }

    #[test]
    fn diagonal_matrix() {
        let f = fp();
        let blocks = split_eigenspaces(&f, &[diag(&[1, 1, 2])]).unwrap();
        let mut got: Vec<(Vec<u32>, usize)> = blocks.iter().map(|b| (b.eigenvalues(&f).unwrap(), b.dim())).collect();
        got.sort();
        assert_eq!(got, vec![(vec![1], 2), (vec![2], 1)]);
    }

    #[test]
    fn functional_dependence() {
        let f = fp();
        let a: Dense = vec![vec![2, 1, 0], vec![0, 2, 0], vec![0, 0, 5]];
        let a2 = dense_mul(&f, &a, &a);
        for b in split_eigenspaces(&f, &[a, a2]).unwrap() {
            let ev = b.eigenvalues(&f).unwrap();
            assert_eq!(f.mul(ev[0], ev[0]), ev[1]);
        }
    }

    #[test]
    fn non_commuting_rejected() {
        let f = fp();
        let a: Dense = vec![vec![1, 1], vec![0, 1]];
        let b: Dense = vec![vec![1, 0], vec![1, 1]];
        assert!(matches!(split_eigenspaces(&f, &[a, b]), Err(Error::NonCommuting)));
    }

    #[test]
    fn irreducible_factor_stays_unsplit() {
        let f = fp();
        // x^2 + 1 is irreducible mod 31991 (31991 ≡ 3 mod 4)
        let a: Dense = vec![vec![0, f.neg(1)], vec![1, 0]];
        let blocks = split_eigenspaces(&f, &[a]).unwrap();
        assert_eq!(blocks.len(), 1);
        assert!(!blocks[0].is_split());
        assert_eq!(blocks[0].factors[0], vec![1, 0, 1]);
    }

    proptest! {
        /// Commuting pairs built as polynomials in one matrix; each block's
        /// eigenvalue is confirmed by a direct kernel computation.
        #[test]
        fn polynomial_pairs_match_kernel_oracle(
            entries in proptest::collection::vec(0u32..6, 25),
            c in proptest::collection::vec(0u32..5, 3),
        ) {
            let f = fp();
            let a: Dense = entries.chunks(5).map(|r| r.to_vec()).collect();
            let b = eval_matrix(&f, &c, &a);
            let blocks = split_eigenspaces(&f, &[a.clone(), b.clone()]).unwrap();
            let total: usize = blocks.iter().map(|b| b.dim()).sum();
            prop_assert_eq!(total, 5);
            for blk in blocks.iter().filter(|b| b.is_split()) {
                let ev = blk.eigenvalues(&f).unwrap();
                for (op, &lambda) in [&a, &b].iter().zip(&ev) {
                    let shifted: Dense = op.iter().enumerate()
                        .map(|(i, r)| r.iter().enumerate().map(|(j, &x)| if i == j { f.sub(x, lambda) } else { x }).collect())
                        .collect();
                    prop_assert!(!dense_kernel(&f, &shifted, 5).is_empty());
                }
                prop_assert_eq!(poly::eval(&f, &c, ev[0]), ev[1]);
            }
        }
    }
}
