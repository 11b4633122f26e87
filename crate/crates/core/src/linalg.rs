//! Exact dense linear algebra over the Gaussian rationals.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gaussian::GaussianRational as G;

pub type GVec = Vec<G>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<G>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![G::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, G::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<GVec>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix with the given vectors as columns.
    pub fn from_columns(cols: &[GVec]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        if cols.iter().any(|x| x.len() != r) {
            return Err(Error::DimensionMismatch("ragged columns".into()));
        }
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &G {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: G) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[G] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> GVec {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<GVec> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[G]) -> Result<GVec> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = G::zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect())
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_complex())
    }
}

/// Incrementally maintained reduced row echelon basis of a subspace of `Q(i)^n`.
#[derive(Clone, Debug)]
pub struct Echelon {
    n: usize,
    rows: Vec<GVec>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Residual of `v` after elimination against the current rows.
    pub fn reduce(&self, v: &[G]) -> GVec {
        assert_eq!(v.len(), self.n, "vector length");
        let mut v = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if v[c].is_zero() {
                continue;
            }
            let f = v[c].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &(&f * r);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[G]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &[G]) -> bool {
        let mut r = self.reduce(v);
        let Some(c) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[c].inv().expect("nonzero pivot");
        for x in r.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        for row in self.rows.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&r) {
                if !y.is_zero() {
                    *x -= &(&f * y);
                }
            }
        }
        self.rows.push(r);
        self.pivots.push(c);
        true
    }

    pub fn rows(&self) -> &[GVec] {
        &self.rows
    }
}

pub fn rank(vectors: &[GVec]) -> usize {
    let Some(n) = vectors.first().map(|v| v.len()) else {
        return 0;
    };
    let mut e = Echelon::new(n);
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// Coordinates of each target in the (linearly independent) basis, or `None`
/// if some target lies outside the span.
pub fn solve_in_basis(basis: &[GVec], targets: &[GVec]) -> Option<Vec<GVec>> {
    let d = basis.len();
    let t = targets.len();
    if d == 0 {
        return targets
            .iter()
            .all(|y| y.iter().all(|x| x.is_zero()))
            .then(|| vec![Vec::new(); t]);
    }
    let n = basis[0].len();
    // Augmented n × (d + t) system [B | Y].
    let mut a: Vec<GVec> = (0..n)
        .map(|i| {
            basis
                .iter()
                .map(|b| b[i].clone())
                .chain(targets.iter().map(|y| y[i].clone()))
                .collect()
        })
        .collect();
    let mut r = 0;
    for c in 0..d {
        let p = (r..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(r, p);
        let inv = a[r][c].inv().expect("nonzero pivot");
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &(&f * y);
                }
            }
        }
        r += 1;
    }
    if a[d..].iter().any(|row| row[d..].iter().any(|x| !x.is_zero())) {
        return None;
    }
    Some(
        (0..t)
            .map(|k| (0..d).map(|i| a[i][d + k].clone()).collect())
            .collect(),
    )
}
