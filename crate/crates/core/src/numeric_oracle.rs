//! Floating-point truncations `P_N A P_N`, used as an independent check on
//! the exact algebra.

use num_complex::Complex64;

use crate::op_algebra::{ColumnAccess, Operator};

const NORM_TOLERANCE: f64 = 1e-12;

/// The top-left `N×N` block of an operator, stored by sparse columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    size: usize,
    /// `columns[i]` holds the entries `(row, value)` of column `i` with
    /// `row < size`, sorted by row.
    columns: Vec<Vec<(usize, Complex64)>>,
    /// Columns whose full image lies inside the block.
    safe: Vec<bool>,
}

impl Truncation {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn column(&self, i: usize) -> &[(usize, Complex64)] {
        &self.columns[i]
    }

    pub fn is_safe(&self, i: usize) -> bool {
        self.safe[i]
    }

    pub fn safe_columns(&self) -> Vec<usize> {
        (0..self.size).filter(|&i| self.safe[i]).collect()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.columns[col]
            .iter()
            .find(|(r, _)| *r == row)
            .map_or(Complex64::new(0.0, 0.0), |(_, v)| *v)
    }

    pub fn nonzeros(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let mut m = vec![vec![Complex64::new(0.0, 0.0); self.size]; self.size];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                m[i][j] = v;
            }
        }
        m
    }

    /// Rows `i,j,re,im` (row index, column index) for every nonzero entry,
    /// column-major, after a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,re,im\n");
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                out.push_str(&format!("{i},{j},{},{}\n", v.re, v.im));
            }
        }
        out
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.size];
        for (j, col) in self.columns.iter().enumerate() {
            if x[j] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for &(i, v) in col {
                y[i] += v * x[j];
            }
        }
        y
    }

    fn apply_adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.columns
            .iter()
            .map(|col| col.iter().map(|&(i, v)| v.conj() * y[i]).sum())
            .collect()
    }
}

pub fn truncate(op: &impl ColumnAccess, n: usize) -> Truncation {
    let mut columns = Vec::with_capacity(n);
    let mut safe = Vec::with_capacity(n);
    for i in 0..n {
        let col = op.column(i as u64);
        safe.push(col.iter().all(|(r, _)| (*r as usize) < n));
        columns.push(
            col.into_iter()
                .filter(|(r, _)| (*r as usize) < n)
                .map(|(r, c)| {
                    let (re, im) = c.to_f64_pair();
                    (r as usize, Complex64::new(re, im))
                })
                .collect(),
        );
    }
    Truncation {
        size: n,
        columns,
        safe,
    }
}

/// Groups columns that share a row; `M*M` is block diagonal over the groups.
fn column_components(t: &Truncation) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..t.size).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = x;
        while parent[c] != r {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    let mut owner: Vec<Option<usize>> = vec![None; t.size];
    for (j, col) in t.columns.iter().enumerate() {
        for &(i, _) in col {
            match owner[i] {
                None => owner[i] = Some(j),
                Some(k) => {
                    let (a, b) = (find(&mut parent, j), find(&mut parent, k));
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for j in 0..t.size {
        if !t.columns[j].is_empty() {
            let r = find(&mut parent, j);
            groups.entry(r).or_default().push(j);
        }
    }
    groups.into_values().collect()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value of one column group by power iteration on `M*M`.
fn component_norm(t: &Truncation, cols: &[usize]) -> f64 {
    if let [j] = cols {
        return norm(&t.columns[*j].iter().map(|(_, v)| *v).collect::<Vec<_>>());
    }
    let mut x = vec![Complex64::new(0.0, 0.0); t.size];
    for (n, &j) in cols.iter().enumerate() {
        // a generic start vector avoids starting orthogonal to the top one
        x[j] = Complex64::new(1.0 + (n as f64 * 0.618_033_988_75).fract(), 0.0);
    }
    let mut sigma2 = 0.0;
    for _ in 0..10 * t.size.max(1) {
        let nx = norm(&x);
        if nx == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|z| *z /= nx);
        let y = t.apply_adjoint(&t.apply(&x));
        let next = norm(&y);
        let done = (next - sigma2).abs() <= NORM_TOLERANCE * next.max(1.0);
        sigma2 = next;
        x = y;
        if done {
            break;
        }
    }
    sigma2.sqrt()
}

/// Spectral norm of the `N×N` truncation.
pub fn norm_estimate(op: &impl ColumnAccess, n: usize) -> f64 {
    let t = truncate(op, n);
    column_components(&t)
        .iter()
        .map(|cols| component_norm(&t, cols))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossValidation {
    pub max_difference: f64,
    pub columns_compared: usize,
}

/// Compares the truncation of `AB` with the product of truncations on the
/// columns where truncation commutes with multiplication: columns safe for
/// `B` whose image lies in columns safe for `A`.
pub fn cross_validate(a: &Operator, b: &Operator, n: usize) -> CrossValidation {
    let ta = truncate(a, n);
    let tb = truncate(b, n);
    let tab = truncate(&a.mul(b), n);
    let mut max_difference: f64 = 0.0;
    let mut columns_compared = 0;
    for j in 0..n {
        if !tb.is_safe(j) || !tb.column(j).iter().all(|&(k, _)| ta.is_safe(k)) {
            continue;
        }
        columns_compared += 1;
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[j] = Complex64::new(1.0, 0.0);
        let product = ta.apply(&tb.apply(&e));
        for (i, v) in product.iter().enumerate() {
            max_difference = max_difference.max((v - tab.entry(i, j)).norm());
        }
    }
    CrossValidation {
        max_difference,
        columns_compared,
    }
}
