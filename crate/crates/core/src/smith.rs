//! Sparse integer matrices and Smith normal form.
//!
//! Elimination first removes unit pivots sparsely in checked `i64`
//! arithmetic, then finishes the remaining block densely with big integers.
//! Both stages honor a bit-size budget and fail with [`Error::Resource`]
//! instead of wrapping.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Fp, SparseMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub nrows: usize,
    pub ncols: usize,
    /// Rows as `(col, value)` sorted by column, no zeros.
    pub rows: Vec<Vec<(u32, i64)>>,
}

impl IntMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> IntMatrix {
        IntMatrix { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn from_dense(d: &[Vec<i64>]) -> IntMatrix {
        let ncols = d.first().map_or(0, |r| r.len());
        let rows = d
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, &v)| v != 0).map(|(c, &v)| (c as u32, v)).collect())
            .collect();
        IntMatrix { nrows: d.len(), ncols, rows }
    }

    /// Sets row `i` from unsorted entries, merging duplicates.
    pub fn set_row(&mut self, i: usize, mut entries: Vec<(u32, i64)>) {
        entries.sort_unstable_by_key(|e| e.0);
        let mut out: Vec<(u32, i64)> = Vec::with_capacity(entries.len());
        for (c, v) in entries {
            match out.last_mut() {
                Some(l) if l.0 == c => l.1 += v,
                _ => out.push((c, v)),
            }
        }
        out.retain(|e| e.1 != 0);
        self.rows[i] = out;
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.ncols]; self.nrows];
        for (i, r) in self.rows.iter().enumerate() {
            for &(c, v) in r {
                d[i][c as usize] = v;
            }
        }
        d
    }

    pub fn to_fp(&self, f: &Fp) -> SparseMatrix {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&(c, v)| (c, f.from_i64(v))).filter(|e| e.1 != 0).collect())
            .collect();
        SparseMatrix { nrows: self.nrows, ncols: self.ncols, rows }
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut rows = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for &(c, v) in r {
                rows[c as usize].push((i as u32, v));
            }
        }
        IntMatrix { nrows: self.ncols, ncols: self.nrows, rows }
    }

    /// Product `self * other` (used for composed boundaries).
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut out = IntMatrix::zero(self.nrows, other.ncols);
        for (i, r) in self.rows.iter().enumerate() {
            let mut acc: Vec<(u32, i64)> = Vec::new();
            for &(k, a) in r {
                for &(j, b) in &other.rows[k as usize] {
                    acc.push((j, a * b));
                }
            }
            out.set_row(i, acc);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }
}

/// Budget on the bit length of any intermediate entry.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_bits: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_bits: 4096 }
    }
}

/// Nonzero invariant factors `d₁ | d₂ | …` (positive), in order.
pub fn smith_normal_form(m: &IntMatrix, budget: Budget) -> Result<Vec<BigInt>> {
    let (units, rest) = eliminate_units(m)?;
    let mut divisors = vec![BigInt::one(); units];
    divisors.extend(dense_smith(rest, budget)?);
    Ok(divisors)
}

/// Removes rows and columns through ±1 pivots. Returns the number of
/// pivots and the remaining block.
fn eliminate_units(m: &IntMatrix) -> Result<(usize, Vec<Vec<BigInt>>)> {
    let mut rows: Vec<Vec<(u32, i64)>> = m.rows.clone();
    let mut alive_row = vec![true; m.nrows];
    let mut alive_col = vec![true; m.ncols];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); m.ncols];
    for (i, r) in rows.iter().enumerate() {
        for &(c, _) in r {
            col_rows[c as usize].push(i as u32);
        }
    }
    let mut count = 0;
    loop {
        // lightest unit pivot by Markowitz cost, lowest indices on ties
        let mut best: Option<(usize, usize, u32, i64)> = None;
        for (i, r) in rows.iter().enumerate() {
            if !alive_row[i] {
                continue;
            }
            for &(c, v) in r {
                if v.abs() == 1 {
                    // column support lists may hold stale rows; the cost is a heuristic
                    let cost = (r.len() - 1) * (col_rows[c as usize].len().saturating_sub(1));
                    if best.map_or(true, |b| cost < b.0) {
                        best = Some((cost, i, c, v));
                    }
                }
            }
            if best.is_some_and(|b| b.0 == 0) {
                break;
            }
        }
        let Some((_, pi, pc, pv)) = best else { break };
        let prow = std::mem::take(&mut rows[pi]);
        alive_row[pi] = false;
        alive_col[pc as usize] = false;
        let targets: Vec<u32> = col_rows[pc as usize].iter().copied().filter(|&r| r as usize != pi && alive_row[r as usize]).collect();
        for t in targets {
            let ti = t as usize;
            let Some(&(_, a)) = rows[ti].iter().find(|e| e.0 == pc) else { continue };
            // row_t -= (a / pv) * prow, with pv = ±1
            let factor = a * pv;
            let mut merged: Vec<(u32, i64)> = Vec::with_capacity(rows[ti].len() + prow.len());
            let (mut x, mut y) = (0, 0);
            let old = std::mem::take(&mut rows[ti]);
            while x < old.len() || y < prow.len() {
                let cx = old.get(x).map_or(u32::MAX, |e| e.0);
                let cy = prow.get(y).map_or(u32::MAX, |e| e.0);
                if cx < cy {
                    merged.push(old[x]);
                    x += 1;
                } else {
                    let sub = factor.checked_mul(prow[y].1).ok_or_else(overflow)?;
                    let v = if cx == cy {
                        let v = old[x].1.checked_sub(sub).ok_or_else(overflow)?;
                        x += 1;
                        v
                    } else {
                        if !col_rows[cy as usize].contains(&t) {
                            col_rows[cy as usize].push(t);
                        }
                        -sub
                    };
                    if v != 0 {
                        merged.push((cy, v));
                    }
                    y += 1;
                }
            }
            rows[ti] = merged;
        }
        for &(c, _) in &prow {
            col_rows[c as usize].retain(|&r| r as usize != pi);
        }
        col_rows[pc as usize].clear();
        count += 1;
    }
    let live_cols: Vec<usize> = (0..m.ncols).filter(|&c| alive_col[c]).collect();
    let mut index = vec![usize::MAX; m.ncols];
    for (k, &c) in live_cols.iter().enumerate() {
        index[c] = k;
    }
    let rest: Vec<Vec<BigInt>> = (0..m.nrows)
        .filter(|&i| alive_row[i] && !rows[i].is_empty())
        .map(|i| {
            let mut r = vec![BigInt::zero(); live_cols.len()];
            for &(c, v) in &rows[i] {
                r[index[c as usize]] = BigInt::from(v);
            }
            r
        })
        .collect();
    Ok((count, rest))
}

fn overflow() -> Error {
    Error::Resource("64-bit overflow during sparse integer elimination".into())
}

fn check(x: &BigInt, budget: Budget) -> Result<()> {
    if x.bits() > budget.max_bits {
        return Err(Error::Resource(format!("entry exceeds {} bits", budget.max_bits)));
    }
    Ok(())
}

/// Dense Smith normal form over Z.
pub fn dense_smith(mut a: Vec<Vec<BigInt>>, budget: Budget) -> Result<Vec<BigInt>> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        // pivot: smallest nonzero absolute value in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nrows {
            for j in t..ncols {
                if !a[i][j].is_zero() && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..nrows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..ncols {
                    let v = &a[i][j] - &q * &a[t][j];
                    check(&v, budget)?;
                    a[i][j] = v;
                }
                if !a[i][t].is_zero() {
                    clean = false;
                    if a[i][t].abs() < a[t][t].abs() {
                        a.swap(t, i);
                    }
                }
            }
            for j in t + 1..ncols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for i in t..nrows {
                    let v = &a[i][j] - &q * &a[i][t];
                    check(&v, budget)?;
                    a[i][j] = v;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                    if a[t][j].abs() < a[t][t].abs() {
                        for row in a.iter_mut() {
                            row.swap(t, j);
                        }
                    }
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold a row that the pivot does not divide
            let bad = (t + 1..nrows).find(|&i| (t + 1..ncols).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    for j in t..ncols {
                        let v = &a[t][j] + &a[i][j];
                        a[t][j] = v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    Ok(diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn divisors(d: &[Vec<i64>]) -> Vec<i64> {
        smith_normal_form(&IntMatrix::from_dense(d), Budget::default())
            .unwrap()
            .into_iter()
            .map(|x| i64::try_from(x).unwrap())
            .collect()
    }

    #[test]
    fn textbook_examples() {
        assert_eq!(divisors(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(divisors(&[vec![2, 4], vec![6, 8]]), vec![2, 4]);
        assert_eq!(divisors(&[vec![0, 0], vec![0, 0]]), Vec::<i64>::new());
    }

    #[test]
    fn budget_is_enforced() {
        let d = vec![vec![3i64.pow(30), 2i64.pow(40)], vec![5i64.pow(20), 7i64.pow(15)]];
        let r = smith_normal_form(&IntMatrix::from_dense(&d), Budget { max_bits: 8 });
        assert!(matches!(r, Err(Error::Resource(_))));
    }

    /// Determinantal divisors oracle: d_k = gcd of k×k minors.
    fn minors_gcd(d: &[Vec<i64>], k: usize) -> i128 {
        let n = d.len();
        let m = d[0].len();
        let mut g = 0i128;
        let rows: Vec<Vec<usize>> = subsets(n, k);
        let cols: Vec<Vec<usize>> = subsets(m, k);
        for r in &rows {
            for c in &cols {
                let sub: Vec<Vec<i128>> = r.iter().map(|&i| c.iter().map(|&j| d[i][j] as i128).collect()).collect();
                g = g.gcd(&crate::voronoi::det_i128(sub));
            }
        }
        g
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for last in k - 1..n {
            for mut s in subsets(last, k - 1) {
                s.push(last);
                out.push(s);
            }
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]
        #[test]
        fn matches_minor_oracle(d in (1usize..5, 1usize..5).prop_flat_map(|(r, c)|
            proptest::collection::vec(proptest::collection::vec(-6i64..7, c), r))) {
            let divs = divisors(&d);
            for w in divs.windows(2) {
                prop_assert_eq!(w[1] % w[0], 0);
            }
            let mut prod = 1i128;
            for k in 1..=d.len().min(d[0].len()) {
                let g = minors_gcd(&d, k);
                if k <= divs.len() {
                    prod *= divs[k - 1] as i128;
                    prop_assert_eq!(prod, g);
                } else {
                    prop_assert_eq!(g, 0);
                }
            }
            let f = Fp::new(31991).unwrap();
            let m = IntMatrix::from_dense(&d);
            prop_assert_eq!(crate::linalg::rank_mod_p(&f, &m.to_fp(&f)), divs.len());
        }
    }
}
