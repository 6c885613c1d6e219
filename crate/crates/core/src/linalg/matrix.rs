use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::vector::CVector;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a perfect square.
    pub fn from_row_major(entries: Vec<Complex64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() {
            return Err(Error::Malformed(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        Ok(Self { dim, data: entries })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(dim, row.len()));
            }
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = Complex64::new(x, 0.0);
            }
        }
        Ok(m)
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &x) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &CVector, v: &CVector) -> Self {
        debug_assert_eq!(u.dim(), v.dim());
        Self::from_fn(u.dim(), |i, j| u[i] * v[j].conj())
    }

    /// Orthogonal projector onto the line through `v` (need not be normalized).
    pub fn projector_onto(v: &CVector) -> Self {
        Self::outer(v, v).scale_real(1.0 / v.norm_sqr())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row_major(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector::new((0..self.dim).map(|i| self[(i, j)]).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[CVector]) -> Self {
        let dim = columns.len();
        Self::from_fn(dim, |i, j| columns[j][i])
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim != other {
            return Err(Error::DimensionMismatch(self.dim, other));
        }
        Ok(())
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        self.check_dim(v.dim())?;
        Ok(self.mul_vec(v))
    }

    pub(crate) fn mul_vec(&self, v: &CVector) -> CVector {
        debug_assert_eq!(self.dim, v.dim());
        let x = v.entries();
        CVector::new(
            self.data
                .chunks_exact(self.dim)
                .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_dim(other.dim)?;
        Ok(self.mul_mat(other))
    }

    pub(crate) fn mul_mat(&self, other: &CMatrix) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> CMatrix {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    fn zip_with(&self, other: &CMatrix, f: impl Fn(Complex64, Complex64) -> Complex64) -> CMatrix {
        debug_assert_eq!(self.dim, other.dim);
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// `self - shift * I`.
    pub fn shifted(&self, shift: f64) -> CMatrix {
        let mut m = self.clone();
        for i in 0..self.dim {
            m[(i, i)] -= shift;
        }
        m
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_dim(other.dim)?;
        Ok(&self.mul_mat(other) - &other.mul_mat(self))
    }

    /// Jordan product `(AB + BA) / 2`.
    pub fn jordan(&self, other: &CMatrix) -> Result<CMatrix> {
        self.check_dim(other.dim)?;
        Ok((&self.mul_mat(other) + &other.mul_mat(self)).scale_real(0.5))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |A - A^†|` entrywise.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Hermitian within `rel_tol` relative to the largest entry.
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_defect() <= rel_tol * self.max_abs()
    }

    /// `max |self - other|` entrywise.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Real expectation `<v|A v>` for a unit `v`, assuming `A` Hermitian.
    pub(crate) fn quadratic_form(&self, v: &CVector) -> f64 {
        v.dot(&self.mul_vec(v)).re
    }

    pub fn real_parts(&self) -> Vec<Vec<f64>> {
        self.data
            .chunks_exact(self.dim.max(1))
            .map(|row| row.iter().map(|z| z.re).collect())
            .collect()
    }

    pub fn imag_parts(&self) -> Vec<Vec<f64>> {
        self.data
            .chunks_exact(self.dim.max(1))
            .map(|row| row.iter().map(|z| z.im).collect())
            .collect()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        self.mul_mat(rhs)
    }
}

impl Mul<&CVector> for &CMatrix {
    type Output = CVector;

    fn mul(self, rhs: &CVector) -> CVector {
        assert_eq!(self.dim, rhs.dim(), "matrix-vector dimension mismatch");
        self.mul_vec(rhs)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl From<CMatrix> for MatrixJson {
    fn from(m: CMatrix) -> Self {
        MatrixJson {
            dim: m.dim,
            re: m.real_parts(),
            im: m.imag_parts(),
        }
    }
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(json: MatrixJson) -> Result<Self> {
        let n = json.dim;
        if n == 0 {
            return Err(Error::Malformed("matrix dimension is zero".into()));
        }
        if json.re.len() != n || json.im.len() != n {
            return Err(Error::Malformed(format!("expected {n} rows")));
        }
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            if json.re[i].len() != n || json.im[i].len() != n {
                return Err(Error::Malformed(format!(
                    "row {i} does not have {n} entries"
                )));
            }
            for j in 0..n {
                m[(i, j)] = Complex64::new(json.re[i][j], json.im[i][j]);
            }
        }
        Ok(m)
    }
}
