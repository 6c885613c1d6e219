use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense complex column vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorJson", into = "VectorJson")]
pub struct CVector {
    entries: Vec<Complex64>,
}

impl CVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); dim])
    }

    /// The `index`-th standard basis vector.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Builds a vector from separate real and imaginary parts.
    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch(re.len(), im.len()));
        }
        Ok(Self::new(
            re.iter()
                .zip(im)
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect(),
        ))
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    /// Hermitian inner product, conjugate-linear in `self`.
    pub fn inner(&self, other: &CVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self.dot(other))
    }

    /// Unchecked form of [`CVector::inner`] for internal use on matching dimensions.
    pub(crate) fn dot(&self, other: &CVector) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> CVector {
        CVector::new(self.entries.iter().map(|z| z * c).collect())
    }

    pub fn scale_real(&self, c: f64) -> CVector {
        CVector::new(self.entries.iter().map(|z| z * c).collect())
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: Complex64, other: &CVector) -> CVector {
        debug_assert_eq!(self.dim(), other.dim());
        CVector::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + c * b)
                .collect(),
        )
    }

    /// Component of `self` orthogonal to the unit vector `unit`.
    pub fn reject_from(&self, unit: &CVector) -> CVector {
        let overlap = unit.dot(self);
        self.axpy(-overlap, unit)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.entries.iter().map(|z| z.re).collect()
    }

    pub fn imag_parts(&self) -> Vec<f64> {
        self.entries.iter().map(|z| z.im).collect()
    }
}

/// Free-function form of [`CVector::inner`].
pub fn inner(x: &CVector, y: &CVector) -> Result<Complex64> {
    x.inner(y)
}

impl Index<usize> for CVector {
    type Output = Complex64;

    fn index(&self, index: usize) -> &Complex64 {
        &self.entries[index]
    }
}

impl Add for &CVector {
    type Output = CVector;

    fn add(self, rhs: &CVector) -> CVector {
        self.axpy(Complex64::new(1.0, 0.0), rhs)
    }
}

impl Sub for &CVector {
    type Output = CVector;

    fn sub(self, rhs: &CVector) -> CVector {
        self.axpy(Complex64::new(-1.0, 0.0), rhs)
    }
}

impl Neg for &CVector {
    type Output = CVector;

    fn neg(self) -> CVector {
        self.scale_real(-1.0)
    }
}

impl Mul<Complex64> for &CVector {
    type Output = CVector;

    fn mul(self, rhs: Complex64) -> CVector {
        self.scale(rhs)
    }
}

impl Mul<f64> for &CVector {
    type Output = CVector;

    fn mul(self, rhs: f64) -> CVector {
        self.scale_real(rhs)
    }
}

#[derive(Serialize, Deserialize)]
struct VectorJson {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<CVector> for VectorJson {
    fn from(v: CVector) -> Self {
        VectorJson {
            re: v.real_parts(),
            im: v.imag_parts(),
        }
    }
}

impl TryFrom<VectorJson> for CVector {
    type Error = Error;

    fn try_from(json: VectorJson) -> Result<Self> {
        CVector::from_parts(&json.re, &json.im)
    }
}
