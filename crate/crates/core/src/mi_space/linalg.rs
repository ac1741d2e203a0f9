//! Exact dense linear algebra over Gaussian rationals.

#![allow(clippy::needless_range_loop)]

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::op_algebra::Coefficient;

pub type Matrix = Vec<Vec<Coefficient>>;

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(m: &mut Matrix, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].inv().expect("pivot is nonzero");
        for x in m[row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in 0..m[r].len() {
                    let delta = &factor * &m[row][c];
                    m[r][c] = &m[r][c] - &delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut work = m.clone();
    rref(&mut work, cols).len()
}

/// A solution of `A x = b` (free variables set to zero), if one exists.
/// `rows` are the rows of the augmented matrix `[A | b]`.
pub fn solve(rows: Vec<Vec<Coefficient>>, unknowns: usize) -> Option<Vec<Coefficient>> {
    let mut work = rows;
    let pivots = rref(&mut work, unknowns + 1);
    if pivots.last() == Some(&unknowns) {
        return None;
    }
    let mut x = vec![Coefficient::zero(); unknowns];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = work[r][unknowns].clone();
    }
    Some(x)
}

pub fn is_hermitian(m: &Matrix) -> bool {
    (0..m.len()).all(|j| (0..m.len()).all(|k| m[j][k] == m[k][j].conj()))
}

/// Positive semidefiniteness of a Hermitian matrix by symmetric
/// elimination: every pivot must be nonnegative, and a zero pivot must have
/// a zero row.
pub fn is_psd(m: &Matrix) -> bool {
    if !is_hermitian(m) {
        return false;
    }
    let mut work = m.clone();
    let n = work.len();
    for k in 0..n {
        let pivot = work[k][k].re().clone();
        if pivot.is_negative() {
            return false;
        }
        if pivot.is_zero() {
            if (k + 1..n).any(|j| !work[k][j].is_zero()) {
                return false;
            }
            continue;
        }
        let pinv = Coefficient::from_real(BigRational::from_integer(1.into()) / pivot);
        for i in k + 1..n {
            let factor = &work[i][k] * &pinv;
            for j in k + 1..n {
                let delta = &factor * &work[k][j];
                work[i][j] = &work[i][j] - &delta;
            }
        }
    }
    true
}

/// Determinants of the leading principal submatrices.
pub fn leading_minors(m: &Matrix) -> Vec<Coefficient> {
    (1..=m.len())
        .map(|k| {
            let sub: Matrix = m[..k].iter().map(|row| row[..k].to_vec()).collect();
            determinant(sub)
        })
        .collect()
}

pub fn determinant(mut m: Matrix) -> Coefficient {
    let n = m.len();
    let mut det = Coefficient::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Coefficient::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det = &det * &m[col][col];
        let inv = m[col][col].inv().expect("pivot is nonzero");
        for r in col + 1..n {
            let factor = &m[r][col] * &inv;
            for c in col..n {
                let delta = &factor * &m[col][c];
                m[r][c] = &m[r][c] - &delta;
            }
        }
    }
    det
}
