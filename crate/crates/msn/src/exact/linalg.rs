use std::fmt;

use super::scalar::Scalar;
use crate::error::{Error, Result};

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut s = T::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s = s + x.clone() * y.clone();
        }
    }
    s
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn scale<T: Scalar>(c: &T, a: &[T]) -> Vec<T> {
    a.iter().map(|x| c.clone() * x.clone()).collect()
}

pub fn neg<T: Scalar>(a: &[T]) -> Vec<T> {
    a.iter().map(|x| -x.clone()).collect()
}

pub fn is_zero_vec<T: Scalar>(a: &[T]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn unit<T: Scalar>(dim: usize, i: usize) -> Vec<T> {
    let mut v = vec![T::zero(); dim];
    v[i] = T::one();
    v
}

/// Flips the sign so that the first nonzero coordinate is positive.
pub fn sign_canonical<T: Scalar>(a: Vec<T>) -> Vec<T> {
    match a.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => neg(&a),
        _ => a,
    }
}

/// Scales by a positive factor so that the first nonzero coordinate has
/// absolute value one.
pub fn normalize_direction<T: Scalar>(a: Vec<T>) -> Vec<T> {
    match a.iter().find(|x| !x.is_zero()) {
        Some(x) => {
            let c = T::one() / x.abs();
            scale(&c, &a)
        }
        None => a,
    }
}

/// Dense row-major matrix; column-vector convention (`y = A x`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}[", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols, data })
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<T>]) -> Result<Self> {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: c.len() });
            }
            for (i, x) in c.iter().enumerate() {
                m.data[i * cols.len() + j] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols, "vector length does not match matrix columns");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// Row vector times matrix: the pullback `φ ∘ A` of a functional.
    pub fn pullback(&self, phi: &[T]) -> Vec<T> {
        assert_eq!(phi.len(), self.rows, "functional length does not match matrix rows");
        let mut out = vec![T::zero(); self.cols];
        for (i, p) in phi.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let a = self.get(i, j);
                if !a.is_zero() {
                    *o = o.clone() + p.clone() * a.clone();
                }
            }
        }
        out
    }

    /// `self ∘ rhs`.
    pub fn mul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Matrix::<T>::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let idx = i * rhs.cols + j;
                        out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix<T> {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: sub(&self.data, &rhs.data),
        }
    }

    pub fn scaled(&self, c: &T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: scale(c, &self.data) }
    }

    /// Block-diagonal-free vertical stacking.
    pub fn vstack(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.cols, "column counts differ");
        let mut data = self.data.clone();
        data.extend(rhs.data.iter().cloned());
        Matrix { rows: self.rows + rhs.rows, cols: self.cols, data }
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix<T>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = T::one() / m.get(r, c).clone();
            for j in c..m.cols {
                let v = m.get(r, j).clone() * inv.clone();
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let b = m.get(r, j).clone();
                    if !b.is_zero() {
                        let v = m.get(i, j).clone() - f.clone() * b;
                        m.set(i, j, v);
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

    /// Basis of `{x : A x = 0}`, one vector per free column, sign-canonical.
    pub fn kernel(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for free in (0..self.cols).filter(|&j| !is_pivot[j]) {
            let mut v = vec![T::zero(); self.cols];
            v[free] = T::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(i, free).clone();
            }
            basis.push(sign_canonical(v));
        }
        basis
    }

    /// Nonzero rows of the RREF: a canonical basis of the row space.
    pub fn row_space(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
    }

    pub fn inverse(&self) -> Option<Matrix<T>> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Matrix::zeros(0, 0));
        }
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, T::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(out)
    }

    /// Some solution of `A x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![T::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.cols).clone();
        }
        Some(x)
    }

    pub fn determinant(&self) -> T {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return T::zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let pv = m.get(c, c).clone();
            det = det * pv.clone();
            for i in c + 1..n {
                let f = m.get(i, c).clone() / pv.clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j).clone() - f.clone() * m.get(c, j).clone();
                    m.set(i, j, v);
                }
            }
        }
        det
    }
}

/// Canonical basis (RREF rows) of the span of `vectors` in ambient dimension `dim`.
pub fn span_basis<T: Scalar>(dim: usize, vectors: &[Vec<T>]) -> Vec<Vec<T>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    Matrix::from_rows(dim, vectors.to_vec()).expect("vector lengths").row_space()
}

/// Basis of the annihilator `{x : ⟨v,x⟩ = 0 for all v}`.
pub fn annihilator<T: Scalar>(dim: usize, vectors: &[Vec<T>]) -> Vec<Vec<T>> {
    if vectors.is_empty() {
        return (0..dim).map(|i| unit(dim, i)).collect();
    }
    Matrix::from_rows(dim, vectors.to_vec()).expect("vector lengths").kernel()
}

pub fn rank_of<T: Scalar>(dim: usize, vectors: &[Vec<T>]) -> usize {
    span_basis(dim, vectors).len()
}

pub fn in_span<T: Scalar>(dim: usize, basis: &[Vec<T>], v: &[T]) -> bool {
    let r = rank_of(dim, basis);
    let mut all = basis.to_vec();
    all.push(v.to_vec());
    rank_of(dim, &all) == r
}

/// Canonical basis of `span(U) ∩ span(V)`.
pub fn intersect<T: Scalar>(dim: usize, u: &[Vec<T>], v: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut ann = annihilator(dim, u);
    ann.extend(annihilator(dim, v));
    span_basis(dim, &annihilator(dim, &ann))
}

/// Lexicographically first set of coordinates whose unit vectors complement
/// `span(basis)`.
pub fn complement_coordinates<T: Scalar>(dim: usize, basis: &[Vec<T>]) -> Vec<usize> {
    let mut acc: Vec<Vec<T>> = span_basis(dim, basis);
    let mut chosen = Vec::new();
    for i in 0..dim {
        if acc.len() == dim {
            break;
        }
        let e = unit(dim, i);
        if !in_span(dim, &acc, &e) {
            acc.push(e);
            chosen.push(i);
        }
    }
    chosen
}

/// Outcome of [`subspace_ops`]: spans are row spans of the inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceReport<T> {
    pub kernel_a: Vec<Vec<T>>,
    pub kernel_b: Vec<Vec<T>>,
    pub kernel_intersection: Vec<Vec<T>>,
    pub span_a: Vec<Vec<T>>,
    pub span_b: Vec<Vec<T>>,
    pub intersection: Vec<Vec<T>>,
    pub sum: Vec<Vec<T>>,
    pub dim_span_a: usize,
    pub dim_span_b: usize,
    pub dim_intersection: usize,
    pub dim_sum: usize,
}

/// Kernels, row spans, their intersection and sum for two matrices sharing
/// the ambient (column) dimension.
pub fn subspace_ops<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<SubspaceReport<T>> {
    if a.cols() != b.cols() {
        return Err(Error::DimensionMismatch { expected: a.cols(), found: b.cols() });
    }
    let dim = a.cols();
    let span_a = a.row_space();
    let span_b = b.row_space();
    let intersection = intersect(dim, &span_a, &span_b);
    let mut all = span_a.clone();
    all.extend(span_b.iter().cloned());
    let sum = span_basis(dim, &all);
    Ok(SubspaceReport {
        kernel_a: a.kernel(),
        kernel_b: b.kernel(),
        kernel_intersection: a.vstack(b).kernel(),
        dim_span_a: span_a.len(),
        dim_span_b: span_b.len(),
        dim_intersection: intersection.len(),
        dim_sum: sum.len(),
        span_a,
        span_b,
        intersection,
        sum,
    })
}
