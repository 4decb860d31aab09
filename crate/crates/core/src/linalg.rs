//! Dense exact linear algebra over any [`Field`].

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use crate::field::Field;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_cols(rows: usize, cols: &[Vec<F>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scale(&self, s: F) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| *x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-F::one()))
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(F::zero(), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix<F>) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                m[(i, j)] = self[(r, c)];
            }
        }
        m
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv().expect("nonzero pivot");
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)] * inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)];
                    for j in c..m.cols {
                        let t = m[(r, j)];
                        m[(i, j)] = m[(i, j)] - f * t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : self * x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![F::zero(); self.cols];
                v[fc] = F::one();
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r[(i, fc)];
                }
                v
            })
            .collect()
    }

    /// One solution of `self * x = b`, if any.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        aug.set_block(0, 0, self);
        for (i, v) in b.iter().enumerate() {
            aug[(i, self.cols)] = *v;
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(i, self.cols)];
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        aug.set_block(0, 0, self);
        aug.set_block(0, n, &Matrix::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Some(r.submatrix(&rows, &cols))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

impl<F: Field> Mul for &Matrix<F> {
    type Output = Matrix<F>;
    fn mul(self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<F: fmt::Debug> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:?}", self[(i, j)])?;
            }
        }
        write!(f, "]")
    }
}

/// A subspace of `F^dim` kept as an echelon basis, supporting membership
/// tests and coordinates relative to an ordered spanning family.
#[derive(Clone, Debug)]
pub struct Span<F> {
    dim: usize,
    basis: Vec<Vec<F>>,
}

impl<F: Field> Span<F> {
    pub fn new(dim: usize) -> Self {
        Span {
            dim,
            basis: Vec::new(),
        }
    }

    pub fn of(dim: usize, vectors: &[Vec<F>]) -> Self {
        let mut s = Self::new(dim);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    fn reduce(&self, v: &[F]) -> Vec<F> {
        let mut w = v.to_vec();
        for b in &self.basis {
            let lead = b.iter().position(|x| !x.is_zero()).expect("nonzero basis vector");
            if !w[lead].is_zero() {
                let f = w[lead];
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi = *wi - f * *bi;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Adds `v`; returns whether the span grew.
    pub fn insert(&mut self, v: &[F]) -> bool {
        assert_eq!(v.len(), self.dim);
        let w = self.reduce(v);
        let Some(lead) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[lead].inv().expect("nonzero lead");
        let w: Vec<F> = w.into_iter().map(|x| x * inv).collect();
        // keep basis fully reduced at the new pivot
        for b in &mut self.basis {
            if !b[lead].is_zero() {
                let f = b[lead];
                for (bi, wi) in b.iter_mut().zip(&w) {
                    *bi = *bi - f * *wi;
                }
            }
        }
        self.basis.push(w);
        true
    }
}

/// Coordinates of vectors in the quotient `V / sub` relative to a chosen
/// family `reps` whose images form a basis of the quotient.
#[derive(Clone, Debug)]
pub struct QuotientCoords<F> {
    system: Matrix<F>,
    sub_dim: usize,
    quot_dim: usize,
}

impl<F: Field> QuotientCoords<F> {
    pub fn new(ambient: usize, sub: &[Vec<F>], reps: &[Vec<F>]) -> Self {
        let mut cols: Vec<Vec<F>> = sub.to_vec();
        cols.extend_from_slice(reps);
        QuotientCoords {
            system: Matrix::from_cols(ambient, &cols),
            sub_dim: sub.len(),
            quot_dim: reps.len(),
        }
    }

    pub fn quotient_dim(&self) -> usize {
        self.quot_dim
    }

    /// Coordinates of the class of `v`; `None` when `v` is outside the
    /// span of `sub` and `reps`.
    pub fn coords(&self, v: &[F]) -> Option<Vec<F>> {
        if self.system.cols() == 0 {
            return v.iter().all(|x| x.is_zero()).then(Vec::new);
        }
        let x = self.system.solve(v)?;
        Some(x[self.sub_dim..].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use num_rational::Rational64;

    type F3 = Fp<3>;

    fn f3(rows: &[&[u32]]) -> Matrix<F3> {
        Matrix::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&v| F3::new(v)).collect())
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn rank_and_kernel() {
        let m = f3(&[&[1, 2, 0], &[2, 1, 0]]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(m.mul_vec(&v).iter().all(|x| x.value() == 0));
        }
    }

    #[test]
    fn rational_inverse() {
        let r = |n: i64| Rational64::from_integer(n);
        let m = Matrix::from_rows(&[vec![r(2), r(1)], vec![r(1), r(1)]]);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Matrix::identity(2));
    }

    #[test]
    fn solve_inconsistent() {
        let m = f3(&[&[1, 0], &[1, 0]]);
        assert!(m.solve(&[F3::new(1), F3::new(2)]).is_none());
        assert!(m.solve(&[F3::new(1), F3::new(1)]).is_some());
    }

    #[test]
    fn span_membership() {
        let v = |a: u32, b: u32, c: u32| vec![F3::new(a), F3::new(b), F3::new(c)];
        let s = Span::of(3, &[v(1, 1, 0), v(0, 1, 1)]);
        assert_eq!(s.dim(), 2);
        assert!(s.contains(&v(1, 2, 1)));
        assert!(!s.contains(&v(1, 0, 0)));
    }

    #[test]
    fn quotient_coordinates() {
        let v = |a: u32, b: u32| vec![F3::new(a), F3::new(b)];
        let q = QuotientCoords::new(2, &[v(1, 1)], &[v(1, 0)]);
        assert_eq!(q.coords(&v(0, 1)), Some(vec![F3::new(2)]));
    }
}
