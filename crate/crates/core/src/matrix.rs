//! Dense matrices over the Gaussian rationals and the exact elimination
//! kernel (RREF, nullspace, inverse) shared by every other module.
//!
//! Vectorization is column-stacking throughout, so that
//! `vec(A·X·B) = kron(Bᵀ, A)·vec(X)`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::GaussianRational;

pub type Scalar = GaussianRational;
pub type Vector = Vec<GaussianRational>;

pub fn zero_vector(len: usize) -> Vector {
    vec![Scalar::zero(); len]
}

/// Standard basis vector `e_{index+1}` of `C^len` (0-based `index`).
pub fn unit_vector(len: usize, index: usize) -> Vector {
    let mut v = zero_vector(len);
    v[index] = Scalar::one();
    v
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// `⟨u, v⟩ = Σ uᵢ·conj(vᵢ)`.
pub fn inner(u: &[Scalar], v: &[Scalar]) -> Scalar {
    debug_assert_eq!(u.len(), v.len());
    let mut acc = Scalar::zero();
    for (a, b) in u.iter().zip(v) {
        if !a.is_zero() && !b.is_zero() {
            acc += &(a * &b.conj());
        }
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::shape("Matrix::new", rows * cols, entries.len()));
        }
        Ok(Matrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: zero_vector(rows * cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Scalar::one();
        }
        m
    }

    /// Matrix unit with a single 1 at 0-based `(i, j)`: sends `e_j` to `e_i`.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        m.entries[i * cols + j] = Scalar::one();
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::shape("Matrix::from_rows", c, bad.len()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor for integer matrices. Panics on ragged input.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let rows: Vec<Vec<Scalar>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| Scalar::from_int(x)).collect())
            .collect();
        Matrix::from_rows(rows).expect("ragged integer matrix")
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vector]) -> Self {
        let cols = columns.len();
        let mut m = Matrix::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m.entries[i * cols + j] = x.clone();
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

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vector(&self.entries)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    /// Hermitian adjoint: conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        t
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x * s).collect(),
        }
    }

    pub fn trace(&self) -> Scalar {
        let mut acc = Scalar::zero();
        for i in 0..self.rows.min(self.cols) {
            acc += self.get(i, i);
        }
        acc
    }

    pub fn try_mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::shape(
                "matrix product",
                format!("{} rows on the right", self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * rhs.cols + j] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vector {
        assert_eq!(v.len(), self.cols, "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    /// Kronecker product with the block convention `(a ⊗ b)[i·p + k, j·q + l] = a[i,j]·b[k,l]`.
    pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
        let (p, q) = b.shape();
        let mut out = Matrix::zeros(a.rows * p, a.cols * q);
        let width = out.cols;
        for i in 0..a.rows {
            for j in 0..a.cols {
                let x = a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                for k in 0..p {
                    for l in 0..q {
                        let y = b.get(k, l);
                        if !y.is_zero() {
                            out.entries[(i * p + k) * width + j * q + l] = x * y;
                        }
                    }
                }
            }
        }
        out
    }

    /// Column-stacking vectorization: columns top-to-bottom, left-to-right.
    pub fn vec(&self) -> Vector {
        let mut v = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self.get(i, j).clone());
            }
        }
        v
    }

    /// Inverse of [`Matrix::vec`].
    pub fn unvec(v: &[Scalar], rows: usize, cols: usize) -> Result<Matrix> {
        if v.len() != rows * cols {
            return Err(Error::shape("unvec", rows * cols, v.len()));
        }
        let mut m = Matrix::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.entries[i * cols + j] = v[j * rows + i].clone();
            }
        }
        Ok(m)
    }

    /// Stacks blocks with a common column count vertically.
    pub fn vstack(width: usize, blocks: &[Matrix]) -> Matrix {
        let mut entries = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, width, "vstack width mismatch");
            rows += b.rows;
            entries.extend(b.entries.iter().cloned());
        }
        Matrix {
            rows,
            cols: width,
            entries,
        }
    }

    /// Reduced row echelon form together with its pivot columns.
    pub fn rref_with_pivots(&self) -> (Matrix, Vec<usize>) {
        let mut a = self.row_vectors();
        let pivots = rref_in_place(&mut a, self.cols);
        let mut out = Matrix::zeros(self.rows, self.cols);
        for (i, row) in a.into_iter().enumerate() {
            out.entries[i * self.cols..(i + 1) * self.cols].clone_from_slice(&row);
        }
        (out, pivots)
    }

    /// The unique reduced row echelon form (zero rows at the bottom).
    pub fn rref(&self) -> Matrix {
        self.rref_with_pivots().0
    }

    pub fn rank(&self) -> usize {
        Echelon::from_rows(self.cols, self.row_vectors()).rank()
    }

    /// Canonical basis of `{x : self·x = 0}`: one vector per free column,
    /// ordered by that column.
    pub fn nullspace(&self) -> Vec<Vector> {
        Echelon::from_rows(self.cols, self.row_vectors()).nullspace()
    }

    /// Exact inverse via Gauss–Jordan; `None` when singular or non-square.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug: Vec<Vector> = (0..n)
            .map(|i| {
                let mut row = self.row(i).to_vec();
                row.extend(unit_vector(n, i));
                row
            })
            .collect();
        let pivots = rref_in_place(&mut aug, 2 * n);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for (i, row) in aug.into_iter().enumerate() {
            inv.entries[i * n..(i + 1) * n].clone_from_slice(&row[n..]);
        }
        Some(inv)
    }
}

/// Gauss–Jordan elimination of `rows` (each of length `width`) into RREF.
/// Returns the pivot columns; the first `pivots.len()` rows are the nonzero ones.
fn rref_in_place(rows: &mut [Vector], width: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        if r >= rows.len() {
            break;
        }
        let Some(found) = (r..rows.len()).find(|&k| !rows[k][col].is_zero()) else {
            continue;
        };
        rows.swap(r, found);
        let inv = rows[r][col].inv().expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            axpy_neg(row, &factor, &pivot_row);
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// `row -= factor · other`.
fn axpy_neg(row: &mut [Scalar], factor: &Scalar, other: &[Scalar]) {
    for (x, y) in row.iter_mut().zip(other) {
        if !y.is_zero() {
            *x -= &(factor * y);
        }
    }
}

/// An incrementally maintained reduced row echelon basis of a row space.
///
/// Rows are kept fully reduced and sorted by pivot column, so two
/// `Echelon`s span the same space iff they are structurally equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Echelon {
    width: usize,
    pivots: Vec<usize>,
    rows: Vec<Vector>,
}

impl Echelon {
    pub fn empty(width: usize) -> Self {
        Echelon {
            width,
            pivots: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn from_rows<I: IntoIterator<Item = Vector>>(width: usize, rows: I) -> Self {
        let mut e = Echelon::empty(width);
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub fn full(width: usize) -> Self {
        Echelon {
            width,
            pivots: (0..width).collect(),
            rows: (0..width).map(|i| unit_vector(width, i)).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn into_rows(self) -> Vec<Vector> {
        self.rows
    }

    /// Residual of `v` after eliminating every pivot coordinate.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        assert_eq!(v.len(), self.width, "echelon width mismatch");
        let mut out = v.to_vec();
        for (p, row) in self.pivots.iter().zip(&self.rows) {
            if !out[*p].is_zero() {
                let factor = out[*p].clone();
                axpy_neg(&mut out, &factor, row);
            }
        }
        out
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        is_zero_vector(&self.reduce(v))
    }

    /// Adds `v` to the spanning set; returns whether the rank grew.
    pub fn insert(&mut self, v: Vector) -> bool {
        let mut residual = self.reduce(&v);
        let Some(p) = residual.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = residual[p].inv().expect("nonzero pivot");
        for x in residual.iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        for row in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let factor = row[p].clone();
                axpy_neg(row, &factor, &residual);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, residual);
        true
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.width
    }

    /// Canonical basis of the solution space `{x : row·x = 0 for every row}`.
    pub fn nullspace(&self) -> Vec<Vector> {
        let mut is_pivot = vec![false; self.width];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.width)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = unit_vector(self.width, free);
                for (p, row) in self.pivots.iter().zip(&self.rows) {
                    v[*p] = -&row[free];
                }
                v
            })
            .collect()
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix {
            rows: self.rows.len(),
            cols: self.width,
            entries: self.rows.iter().flat_map(|r| r.iter().cloned()).collect(),
        }
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(
            self.shape(),
            rhs.shape(),
            "matrix difference shape mismatch"
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(rows: &[&[i64]]) -> Matrix {
        Matrix::from_ints(rows)
    }

    #[test]
    fn rref_examples() {
        assert_eq!(ints(&[&[2, 4], &[1, 2]]).rref(), ints(&[&[1, 2], &[0, 0]]));
        assert_eq!(Matrix::identity(3).rref(), Matrix::identity(3));
        assert_eq!(ints(&[&[0, 1], &[1, 0]]).rref(), Matrix::identity(2));
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(
            ints(&[&[1, 1]]).nullspace(),
            vec![vec![Scalar::from_int(-1), Scalar::from_int(1)]]
        );
        assert!(Matrix::identity(4).nullspace().is_empty());
        assert_eq!(Matrix::zeros(2, 3).nullspace().len(), 3);
    }

    #[test]
    fn vec_convention_and_kron() {
        let m = ints(&[&[1, 2], &[3, 4]]);
        assert_eq!(m.vec(), [1, 3, 2, 4].map(Scalar::from_int).to_vec());
        let k = Matrix::kron(&Matrix::identity(2), &m);
        let expected = ints(&[&[1, 2, 0, 0], &[3, 4, 0, 0], &[0, 0, 1, 2], &[0, 0, 3, 4]]);
        assert_eq!(k, expected);
        assert!(Matrix::unvec(&[Scalar::one()], 2, 2).is_err());
    }

    #[test]
    fn inverse_of_complex_matrix() {
        let m = Matrix::from_rows(vec![
            vec!["1+i".parse().unwrap(), "2".parse().unwrap()],
            vec!["0".parse().unwrap(), "-1/3i".parse().unwrap()],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Matrix::identity(2));
        assert!(ints(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn echelon_matches_rref() {
        let m = ints(&[&[0, 2, 4, 1], &[1, 1, 0, 0], &[1, 3, 4, 1], &[0, 0, 0, 5]]);
        let (r, pivots) = m.rref_with_pivots();
        let e = Echelon::from_rows(4, m.row_vectors());
        assert_eq!(e.pivots(), &pivots[..]);
        assert_eq!(
            e.to_matrix(),
            Matrix::new(pivots.len(), 4, r.entries()[..pivots.len() * 4].to_vec()).unwrap()
        );
    }

    fn small_scalar() -> impl Strategy<Value = Scalar> {
        (-4i64..=4, 1i64..=3, -2i64..=2, 1i64..=2)
            .prop_map(|(a, b, c, d)| Scalar::from_fractions(a, b, c, d))
    }

    fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec(small_scalar(), rows * cols)
            .prop_map(move |e| Matrix::new(rows, cols, e).unwrap())
    }

    fn any_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| matrix(r, c))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rref_is_idempotent(m in any_matrix()) {
            let r = m.rref();
            prop_assert_eq!(r.rref(), r);
        }

        #[test]
        fn rank_nullity(m in any_matrix()) {
            let basis = m.nullspace();
            prop_assert_eq!(m.rank() + basis.len(), m.cols());
            for v in &basis {
                prop_assert!(is_zero_vector(&m.mul_vec(v)));
            }
        }

        #[test]
        fn vec_unvec_and_kron_identity(t in matrix(3, 2), a in matrix(2, 4)) {
            prop_assert_eq!(Matrix::unvec(&t.vec(), 3, 2).unwrap(), t.clone());
            let lhs = (&t * &a).vec();
            let rhs = Matrix::kron(&Matrix::identity(4), &t).mul_vec(&a.vec());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn left_factor_kron_identity(b in matrix(3, 3), t in matrix(3, 2)) {
            let lhs = (&b * &t).vec();
            let rhs = Matrix::kron(&t.transpose(), &Matrix::identity(3)).mul_vec(&b.vec());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
