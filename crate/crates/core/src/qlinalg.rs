//! Exact linear algebra over the multi-quadratic field, over Q and over Z.
//!
//! Pivoting is always "first nonzero entry in scan order". Exact arithmetic
//! needs no magnitude pivoting, and a fixed scan order keeps every result
//! reproducible.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactnum::{Rational, RealElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("right-hand side is not in the column space")]
    NoSolution,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type MatrixF = Matrix<RealElement>;
pub type MatrixQ = Matrix<Rational>;
pub type MatrixZ = Matrix<BigInt>;

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds from row vectors. `cols` is only consulted when `rows` is empty.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(cols, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        let n = rows.len();
        Ok(Self {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds from column vectors. `rows` is only consulted when `cols` is empty.
    pub fn from_columns(columns: &[Vec<T>], rows: usize) -> Result<Self, LinalgError> {
        let rows = columns.first().map_or(rows, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(LinalgError::DimensionMismatch("ragged columns".into()));
        }
        Ok(Self::from_fn(rows, columns.len(), |r, c| {
            columns[c][r].clone()
        }))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn map<U: Clone>(&self, mut f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(&mut f).collect(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| self.data[r * self.cols + c].to_string())
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl MatrixZ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| BigInt::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| {
            if r == c {
                BigInt::one()
            } else {
                BigInt::zero()
            }
        })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(rows.len(), cols, |r, c| BigInt::from(rows[r][c]))
    }

    pub fn to_rational(&self) -> MatrixQ {
        self.map(|x| Rational::from_integer(x.clone()))
    }

    pub fn mul(&self, rhs: &MatrixZ) -> MatrixZ {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        Self::from_fn(self.rows, rhs.cols, |r, c| {
            (0..self.cols).map(|k| &self[(r, k)] * &rhs[(k, c)]).sum()
        })
    }
}

impl MatrixF {
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| {
            if r == c {
                RealElement::one()
            } else {
                RealElement::zero()
            }
        })
    }

    pub fn mul_vec(&self, x: &[RealElement]) -> Vec<RealElement> {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(RealElement::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }
}

/// Arithmetic needed by the exact elimination routines.
pub trait FieldElement: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Only called on nonzero values.
    fn inv(&self) -> Self;
}

impl FieldElement for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn inv(&self) -> Self {
        self.recip()
    }
}

impl FieldElement for RealElement {
    fn zero() -> Self {
        RealElement::zero()
    }
    fn one() -> Self {
        RealElement::one()
    }
    fn is_zero(&self) -> bool {
        RealElement::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn inv(&self) -> Self {
        self.inverse().expect("pivot is nonzero")
    }
}

/// Reduced row echelon form of `m`, with the pivot column list.
pub fn rref<T: FieldElement>(m: &Matrix<T>) -> (Matrix<T>, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(row, p);
        let inv = a[(row, col)].inv();
        for c in col..a.cols {
            a[(row, c)] = a[(row, c)].mul(&inv);
        }
        for r in 0..a.rows {
            if r != row && !a[(r, col)].is_zero() {
                let f = a[(r, col)].clone();
                for c in col..a.cols {
                    let delta = f.mul(&a[(row, c)]);
                    a[(r, c)] = a[(r, c)].sub(&delta);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

/// Rank by forward elimination only.
pub fn rank_generic<T: FieldElement>(m: &Matrix<T>) -> usize {
    let mut a = m.clone();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(row, p);
        let inv = a[(row, col)].inv();
        for r in row + 1..a.rows {
            if !a[(r, col)].is_zero() {
                let f = a[(r, col)].mul(&inv);
                for c in col..a.cols {
                    let delta = f.mul(&a[(row, c)]);
                    a[(r, c)] = a[(r, c)].sub(&delta);
                }
            }
        }
        row += 1;
    }
    row
}

/// Rank of a matrix with exact real entries.
pub fn rank_field(m: &MatrixF) -> usize {
    rank_generic(m)
}

pub fn rank_rational(m: &MatrixQ) -> usize {
    rank_generic(m)
}

/// Rank over Q of an integer matrix, by fraction-free (Bareiss) elimination.
pub fn rank_int(m: &MatrixZ) -> usize {
    let mut a = m.clone();
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(row, p);
        let pivot = a[(row, col)].clone();
        for r in row + 1..a.rows {
            let lead = a[(r, col)].clone();
            for c in col..a.cols {
                let v = &pivot * &a[(r, c)] - &lead * &a[(row, c)];
                // Exact by Sylvester's identity.
                a[(r, c)] = v / &prev;
            }
        }
        prev = pivot;
        row += 1;
    }
    row
}

/// Solves `A·x = b` exactly. Free variables are set to zero, so the result
/// is unique whenever `A` has full column rank.
pub fn solve_generic<T: FieldElement>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>, LinalgError> {
    if b.len() != a.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "matrix has {} rows, right-hand side has {}",
            a.rows,
            b.len()
        )));
    }
    let aug = Matrix::from_fn(a.rows, a.cols + 1, |r, c| {
        if c < a.cols {
            a[(r, c)].clone()
        } else {
            b[r].clone()
        }
    });
    let (red, pivots) = rref(&aug);
    if pivots.last() == Some(&a.cols) {
        return Err(LinalgError::NoSolution);
    }
    let mut x = vec![T::zero(); a.cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = red[(r, a.cols)].clone();
    }
    // Back-substitution check.
    for r in 0..a.rows {
        let lhs = (0..a.cols).fold(T::zero(), |acc, c| acc.add(&a[(r, c)].mul(&x[c])));
        if !lhs.sub(&b[r]).is_zero() {
            return Err(LinalgError::NoSolution);
        }
    }
    Ok(x)
}

pub fn solve_field(a: &MatrixF, b: &[RealElement]) -> Result<Vec<RealElement>, LinalgError> {
    solve_generic(a, b)
}

/// Greedy left-to-right maximal independent column set.
pub fn select_basis_columns<T: FieldElement>(m: &Matrix<T>) -> Vec<usize> {
    rref(m).1
}

/// Basis of the right null space `{x : m·x = 0}`.
pub fn nullspace<T: FieldElement>(m: &Matrix<T>) -> Vec<Vec<T>> {
    let (red, pivots) = rref(m);
    (0..m.cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![T::zero(); m.cols];
            v[free] = T::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = T::zero().sub(&red[(r, free)]);
            }
            v
        })
        .collect()
}

/// Outcome of a greedy rational-dependence scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependenceReport {
    /// Positions of the selected independent vectors, ascending.
    pub independent_indices: Vec<usize>,
    /// For each dependent position, its coefficients over the independent
    /// vectors (in `independent_indices` order).
    pub expressions: BTreeMap<usize, Vec<Rational>>,
}

/// Scans `vectors` left to right, keeping each one that is not a Q-linear
/// combination of those already kept. Position 0 is kept whenever it is
/// nonzero. Every stored expression is checked to reproduce its vector.
pub fn rational_dependence(vectors: &[Vec<Rational>]) -> DependenceReport {
    let len = vectors.first().map_or(0, Vec::len);
    assert!(
        vectors.iter().all(|v| v.len() == len),
        "vectors must share a length"
    );
    let mut independent = Vec::new();
    let mut expressions = BTreeMap::new();
    for (i, v) in vectors.iter().enumerate() {
        match express(vectors, &independent, v) {
            Some(coeffs) => {
                expressions.insert(i, coeffs);
            }
            None => independent.push(i),
        }
    }
    DependenceReport {
        independent_indices: independent,
        expressions,
    }
}

/// Coefficients expressing `target` over `vectors[chosen]`, or `None` when
/// `target` lies outside their span.
pub fn express(
    vectors: &[Vec<Rational>],
    chosen: &[usize],
    target: &[Rational],
) -> Option<Vec<Rational>> {
    let cols: Vec<Vec<Rational>> = chosen.iter().map(|&i| vectors[i].clone()).collect();
    let a = MatrixQ::from_columns(&cols, target.len()).ok()?;
    let x = solve_generic(&a, target).ok()?;
    let rebuilt: Vec<Rational> = (0..target.len())
        .map(|r| cols.iter().zip(&x).map(|(col, c)| &col[r] * c).sum())
        .collect();
    debug_assert_eq!(rebuilt, target);
    (rebuilt == target).then_some(x)
}

/// Column echelon form over Z by unimodular column operations.
#[derive(Debug, Clone)]
pub struct ColumnEchelon {
    /// `input · transform`, lower echelon: the first `rank` columns are
    /// nonzero with strictly increasing pivot rows, the rest are zero.
    pub echelon: MatrixZ,
    /// Unimodular transform.
    pub transform: MatrixZ,
    pub rank: usize,
    /// Pivot row of each nonzero echelon column; the pivot is positive.
    pub pivot_rows: Vec<usize>,
}

impl ColumnEchelon {
    /// Z-basis of the lattice spanned by the input columns.
    pub fn image_basis(&self) -> Vec<Vec<BigInt>> {
        (0..self.rank).map(|c| self.echelon.column(c)).collect()
    }

    /// Z-basis of the integer kernel `{x ∈ Zᶜ : input·x = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        (self.rank..self.transform.cols())
            .map(|c| self.transform.column(c))
            .collect()
    }
}

/// Column-style Hermite reduction (without the off-pivot normalization).
pub fn column_echelon(m: &MatrixZ) -> ColumnEchelon {
    let mut a = m.clone();
    let mut u = MatrixZ::identity(m.cols);
    let mut col = 0;
    let mut pivot_rows = Vec::new();

    let col_op = |a: &mut MatrixZ, target: usize, source: usize, f: &BigInt| {
        for r in 0..a.rows {
            let delta = f * &a[(r, source)];
            a[(r, target)] -= delta;
        }
    };
    let swap_cols = |a: &mut MatrixZ, x: usize, y: usize| {
        for r in 0..a.rows {
            let i = r * a.cols;
            a.data.swap(i + x, i + y);
        }
    };

    for row in 0..a.rows {
        if col == a.cols {
            break;
        }
        loop {
            // Smallest nonzero magnitude in this row among remaining columns.
            let Some(p) = (col..a.cols)
                .filter(|&c| !a[(row, c)].is_zero())
                .min_by(|&x, &y| a[(row, x)].abs().cmp(&a[(row, y)].abs()))
            else {
                break;
            };
            swap_cols(&mut a, col, p);
            swap_cols(&mut u, col, p);
            let mut done = true;
            for c in col + 1..a.cols {
                if !a[(row, c)].is_zero() {
                    let f = a[(row, c)].div_floor(&a[(row, col)]);
                    col_op(&mut a, c, col, &f);
                    col_op(&mut u, c, col, &f);
                    if !a[(row, c)].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                if a[(row, col)].is_negative() {
                    for r in 0..a.rows {
                        a[(r, col)] = -&a[(r, col)];
                    }
                    for r in 0..u.rows {
                        u[(r, col)] = -&u[(r, col)];
                    }
                }
                pivot_rows.push(row);
                col += 1;
                break;
            }
        }
    }
    ColumnEchelon {
        echelon: a,
        transform: u,
        rank: col,
        pivot_rows,
    }
}

/// Determinant of a square integer matrix (Bareiss).
pub fn determinant_int(m: &MatrixZ) -> BigInt {
    assert_eq!(m.rows, m.cols, "determinant needs a square matrix");
    let n = m.rows;
    let mut a = m.clone();
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[(r, k)].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap_rows(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)];
                a[(i, j)] = v / &prev;
            }
        }
        prev = a[(k, k)].clone();
    }
    if n == 0 {
        BigInt::one()
    } else {
        sign * &a[(n - 1, n - 1)]
    }
}
