//! Integer linear systems via Smith normal form, with infeasibility
//! certificates.
//!
//! The gauge solver reduces multiplicative matching of unit scalars to many
//! systems `A x = b` over the integers (one per prime and per formal
//! parameter) sharing one coefficient matrix `A`, plus one system over GF(2)
//! for the signs.  We therefore compute a Smith normal form `U A V = D` once
//! and reuse it for every right-hand side.  When a system is infeasible the
//! corresponding row of `U` is an integer functional vanishing on the column
//! lattice of `A` but not on `b`: the violated lattice congruence.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for j in 0..self.cols {
                    acc += &self[(i, j)] * &v[j];
                }
                acc
            })
            .collect()
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        (0..self.cols).map(|j| self[(i, j)].clone()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[a] -= k * row[b]
    fn row_sub(&mut self, a: usize, b: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(a, j)] - k * &self[(b, j)];
            self[(a, j)] = v;
        }
    }

    /// col[a] -= k * col[b]
    fn col_sub(&mut self, a: usize, b: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, a)] - k * &self[(i, b)];
            self[(i, a)] = v;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self[(a, j)].clone();
            self[(a, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// `U A V = D` with `U`, `V` unimodular and `D` diagonal, `d_1 | d_2 | ...`.
pub struct SmithForm {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub diag: Vec<BigInt>,
    pub rank: usize,
    pub rows: usize,
    pub cols: usize,
}

/// Smith normal form with transformation matrices.  Pivot selection scans
/// lexicographically for the entry of least absolute value.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let mut d = a.clone();
    let mut u = IntMatrix::identity(a.rows);
    let mut v = IntMatrix::identity(a.cols);
    let n = a.rows.min(a.cols);
    let mut t = 0;
    while t < n {
        let Some((pi, pj)) = pivot(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..d.rows {
                if !d[(i, t)].is_zero() {
                    let q = d[(i, t)].div_floor(&d[(t, t)]);
                    d.row_sub(i, t, &q);
                    u.row_sub(i, t, &q);
                    if !d[(i, t)].is_zero() {
                        d.swap_rows(t, i);
                        u.swap_rows(t, i);
                        clean = false;
                    }
                }
            }
            for j in t + 1..d.cols {
                if !d[(t, j)].is_zero() {
                    let q = d[(t, j)].div_floor(&d[(t, t)]);
                    d.col_sub(j, t, &q);
                    v.col_sub(j, t, &q);
                    if !d[(t, j)].is_zero() {
                        d.swap_cols(t, j);
                        v.swap_cols(t, j);
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    // Enforce the divisibility chain d_i | d_{i+1} by fixing adjacent pairs.
    let mut stable = false;
    while !stable {
        stable = true;
        for i in 0..n.saturating_sub(1) {
            let di = d[(i, i)].clone();
            let dj = d[(i + 1, i + 1)].clone();
            if di.is_zero() {
                if !dj.is_zero() {
                    d.swap_rows(i, i + 1);
                    u.swap_rows(i, i + 1);
                    d.swap_cols(i, i + 1);
                    v.swap_cols(i, i + 1);
                    stable = false;
                }
                continue;
            }
            if dj.is_zero() || (&dj % &di).is_zero() {
                continue;
            }
            stable = false;
            // Fold column i+1 into column i, then re-diagonalize the 2x2 block.
            for r in 0..d.rows {
                let val = d[(r, i + 1)].clone();
                d[(r, i)] += val;
            }
            for r in 0..v.rows {
                let val = v[(r, i + 1)].clone();
                v[(r, i)] += val;
            }
            fix_block(&mut d, &mut u, &mut v, i);
        }
    }
    let rank = (0..n).take_while(|&i| !d[(i, i)].is_zero()).count();
    let diag = (0..n).map(|i| d[(i, i)].clone()).collect();
    SmithForm {
        u,
        v,
        diag,
        rank,
        rows: a.rows,
        cols: a.cols,
    }
}

/// Re-diagonalize the 2x2 block at rows/columns {i, i+1}; all other entries
/// of these rows and columns are zero, so the operations stay block-local.
fn fix_block(d: &mut IntMatrix, u: &mut IntMatrix, v: &mut IntMatrix, i: usize) {
    loop {
        while !d[(i + 1, i)].is_zero() {
            if d[(i, i)].is_zero() {
                d.swap_rows(i, i + 1);
                u.swap_rows(i, i + 1);
                continue;
            }
            let q = d[(i + 1, i)].div_floor(&d[(i, i)]);
            d.row_sub(i + 1, i, &q);
            u.row_sub(i + 1, i, &q);
            if !d[(i + 1, i)].is_zero() {
                d.swap_rows(i, i + 1);
                u.swap_rows(i, i + 1);
            }
        }
        while !d[(i, i + 1)].is_zero() {
            if d[(i, i)].is_zero() {
                d.swap_cols(i, i + 1);
                v.swap_cols(i, i + 1);
                continue;
            }
            let q = d[(i, i + 1)].div_floor(&d[(i, i)]);
            d.col_sub(i + 1, i, &q);
            v.col_sub(i + 1, i, &q);
            if !d[(i, i + 1)].is_zero() {
                d.swap_cols(i, i + 1);
                v.swap_cols(i, i + 1);
            }
        }
        if d[(i + 1, i)].is_zero() && d[(i, i + 1)].is_zero() {
            break;
        }
    }
    if d[(i, i)].is_negative() {
        d.negate_row(i);
        u.negate_row(i);
    }
    if d[(i + 1, i + 1)].is_negative() {
        d.negate_row(i + 1);
        u.negate_row(i + 1);
    }
}

fn pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows {
        for j in t..d.cols {
            if d[(i, j)].is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if d[(i, j)].abs() < d[(bi, bj)].abs() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

/// Why `A x = b` has no integer solution.
#[derive(Clone, Debug)]
pub struct Infeasibility {
    /// Integer functional `y` with `y^T A ≡ 0 (mod modulus)` but
    /// `y^T b ≠ 0 (mod modulus)`.
    pub functional: Vec<BigInt>,
    /// Zero modulus means equality over the integers is violated outright.
    pub modulus: BigInt,
    pub residue: BigInt,
}

impl SmithForm {
    /// Solve `A x = b` over the integers; on failure return the violated
    /// lattice congruence.
    pub fn solve(&self, b: &[BigInt]) -> Result<Vec<BigInt>, Infeasibility> {
        assert_eq!(b.len(), self.rows);
        let ub = self.u.apply(b);
        let mut y = vec![BigInt::zero(); self.cols];
        for i in 0..self.rows.min(self.cols) {
            if i < self.rank {
                let (q, r) = ub[i].div_rem(&self.diag[i]);
                if !r.is_zero() {
                    return Err(Infeasibility {
                        functional: self.u.row(i),
                        modulus: self.diag[i].clone(),
                        residue: r,
                    });
                }
                y[i] = q;
            }
        }
        for (i, ubi) in ub.iter().enumerate().take(self.rows).skip(self.rank) {
            if !ubi.is_zero() {
                return Err(Infeasibility {
                    functional: self.u.row(i),
                    modulus: BigInt::zero(),
                    residue: ubi.clone(),
                });
            }
        }
        Ok(self.v.apply(&y))
    }
}

/// Solve `A x = b` over GF(2).  `Ok` holds one solution; `Err` holds the
/// indices of equations whose XOR is inconsistent.
pub fn solve_gf2(a: &[Vec<bool>], b: &[bool]) -> Result<Vec<bool>, Vec<usize>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    // Augment with the provenance of each row for certificates.
    let mut m: Vec<(Vec<bool>, bool, Vec<usize>)> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, &rhs))| (row.clone(), rhs, vec![i]))
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| m[i].0[c]) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..rows {
            if i != r && m[i].0[c] {
                let (head, tail) = if i < r {
                    let (h, t) = m.split_at_mut(r);
                    (&mut h[i], &t[0])
                } else {
                    let (h, t) = m.split_at_mut(i);
                    (&mut t[0], &h[r])
                };
                for j in 0..cols {
                    head.0[j] ^= tail.0[j];
                }
                head.1 ^= tail.1;
                let mut prov = head.2.clone();
                for x in &tail.2 {
                    if let Some(pos) = prov.iter().position(|v| v == x) {
                        prov.remove(pos);
                    } else {
                        prov.push(*x);
                    }
                }
                head.2 = prov;
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == rows {
            break;
        }
    }
    for row in m.iter().skip(r) {
        if row.1 {
            let mut prov = row.2.clone();
            prov.sort_unstable();
            return Err(prov);
        }
    }
    let mut x = vec![false; cols];
    for &(ri, c) in &pivots {
        x[c] = m[ri].1;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        let mut m = IntMatrix::zeros(rows.len(), rows[0].len());
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m[(i, j)] = BigInt::from(v);
            }
        }
        m
    }

    fn check_snf(a: &IntMatrix) {
        let s = smith_normal_form(a);
        // U A V should be diagonal with the computed invariant factors.
        let ua = {
            let mut out = IntMatrix::zeros(a.rows, a.cols);
            for i in 0..a.rows {
                for j in 0..a.cols {
                    let mut acc = BigInt::zero();
                    for k in 0..a.rows {
                        acc += &s.u[(i, k)] * &a[(k, j)];
                    }
                    out[(i, j)] = acc;
                }
            }
            out
        };
        let mut uav = IntMatrix::zeros(a.rows, a.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                let mut acc = BigInt::zero();
                for k in 0..a.cols {
                    acc += &ua[(i, k)] * &s.v[(k, j)];
                }
                uav[(i, j)] = acc;
            }
        }
        for i in 0..a.rows {
            for j in 0..a.cols {
                if i == j && i < s.diag.len() {
                    assert_eq!(uav[(i, j)], s.diag[i]);
                } else {
                    assert!(uav[(i, j)].is_zero(), "not diagonal at {i},{j}");
                }
            }
        }
        for i in 0..s.rank.saturating_sub(1) {
            assert!((&s.diag[i + 1] % &s.diag[i]).is_zero());
        }
    }

    #[test]
    fn snf_small() {
        check_snf(&mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]));
        check_snf(&mat(&[&[1, 1, -1], &[1, 0, 1]]));
        check_snf(&mat(&[&[0, 0], &[0, 0]]));
        check_snf(&mat(&[&[6], &[10], &[15]]));
    }

    #[test]
    fn solve_and_certificate() {
        let a = mat(&[&[1, 1], &[1, -1]]);
        let s = smith_normal_form(&a);
        let x = s
            .solve(&[BigInt::from(4), BigInt::from(0)])
            .expect("solvable");
        assert_eq!(a.apply(&x), vec![BigInt::from(4), BigInt::from(0)]);
        // x + y = 1, x - y = 0 has no integer solution: 2x = 1.
        let err = s
            .solve(&[BigInt::from(1), BigInt::from(0)])
            .expect_err("infeasible");
        let yta: Vec<BigInt> = (0..2)
            .map(|j| {
                let mut acc = BigInt::zero();
                for i in 0..2 {
                    acc += &err.functional[i] * &a[(i, j)];
                }
                acc
            })
            .collect();
        let ytb = &err.functional[0] * BigInt::from(1) + &err.functional[1] * BigInt::from(0);
        assert!(!err.modulus.is_zero());
        for v in yta {
            assert!((v % &err.modulus).is_zero());
        }
        assert!(!(ytb % &err.modulus).is_zero());
    }

    #[test]
    fn gf2_solver() {
        let a = vec![
            vec![true, true, false],
            vec![false, true, true],
            vec![true, false, true],
        ];
        // Consistent: sum of all three rows is 0, rhs xor must be 0.
        let x = solve_gf2(&a, &[true, false, true]).expect("solvable");
        for (row, &rhs) in a.iter().zip(&[true, false, true]) {
            let lhs = row.iter().zip(&x).fold(false, |acc, (&c, &v)| acc ^ (c && v));
            assert_eq!(lhs, rhs);
        }
        let err = solve_gf2(&a, &[true, false, false]).expect_err("infeasible");
        assert_eq!(err, vec![0, 1, 2]);
    }
}
