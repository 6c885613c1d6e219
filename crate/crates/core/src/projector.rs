//! Orthogonal projectors, the common currency of totally geodesic
//! submanifolds, spectral subspaces and quantum-logic propositions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, CMatrix, CVector};
use crate::projective::Ray;

/// Pivot tolerance for Gram-Schmidt rank decisions.
pub const PIVOT_TOL: f64 = 1e-10;
const PROJECTOR_TOL: f64 = 1e-10;

/// Hermitian idempotent matrix together with an orthonormal basis of its range.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    matrix: CMatrix,
    basis: Vec<CVector>,
}

impl Projector {
    /// Validates `q` as a projector and extracts a basis of its range.
    pub fn from_matrix(q: CMatrix) -> Result<Self> {
        let defect = q.hermitian_defect();
        if defect > PROJECTOR_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let idem = q.mul_mat(&q).max_abs_diff(&q);
        if idem > PROJECTOR_TOL {
            return Err(Error::Malformed(format!(
                "matrix is not idempotent (defect {idem:e})"
            )));
        }
        let eig = eig_hermitian(&q)?;
        let basis = eig
            .eigenvalues
            .iter()
            .zip(eig.eigenvectors)
            .filter(|(l, _)| **l > 0.5)
            .map(|(_, v)| v)
            .collect();
        Ok(Self { matrix: q, basis })
    }

    /// Projector onto the span of an orthonormal family.
    pub fn from_orthonormal(dim: usize, basis: Vec<CVector>) -> Result<Self> {
        let mut matrix = CMatrix::zeros(dim);
        for v in &basis {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch(dim, v.dim()));
            }
            for i in 0..dim {
                for j in 0..dim {
                    matrix[(i, j)] += v[i] * v[j].conj();
                }
            }
        }
        Ok(Self { matrix, basis })
    }

    /// Projector onto the linear span of `vectors`.
    ///
    /// Vectors whose component outside the running span is at most
    /// `pivot_tol` times their norm are dropped.
    pub fn span(dim: usize, vectors: &[CVector], pivot_tol: f64) -> Result<Self> {
        let mut basis: Vec<CVector> = Vec::new();
        for v in vectors {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch(dim, v.dim()));
            }
            let norm = v.norm();
            if norm == 0.0 {
                continue;
            }
            let mut r = v.scale_real(1.0 / norm);
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for q in &basis {
                    r = r.reject_from(q);
                }
            }
            let rn = r.norm();
            if rn > pivot_tol {
                basis.push(r.scale_real(1.0 / rn));
            }
        }
        Self::from_orthonormal(dim, basis)
    }

    pub fn onto_ray(x: &Ray) -> Self {
        Self {
            matrix: x.projector(),
            basis: vec![x.rep().clone()],
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim),
            basis: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim),
            basis: (0..dim).map(|i| CVector::basis(dim, i)).collect(),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> &[CVector] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        self.matrix.apply(v)
    }

    /// `1 - Q`.
    pub fn complement(&self) -> Projector {
        let n = self.dim();
        let m = &CMatrix::identity(n) - &self.matrix;
        // pivoted Gram-Schmidt on the standard basis: the largest residual is
        // at least sqrt(missing / n), so every pivot is well conditioned
        let mut residuals: Vec<CVector> = (0..n)
            .map(|i| {
                let mut r = CVector::basis(n, i);
                for _ in 0..2 {
                    for q in &self.basis {
                        r = r.reject_from(q);
                    }
                }
                r
            })
            .collect();
        let mut basis: Vec<CVector> = Vec::with_capacity(n - self.rank());
        while basis.len() + self.rank() < n {
            let (best, norm) = residuals
                .iter()
                .map(CVector::norm)
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("dimension is positive");
            let mut q = residuals[best].scale_real(1.0 / norm);
            for b in self.basis.iter().chain(&basis) {
                q = q.reject_from(b);
            }
            let q = q.scale_real(1.0 / q.norm());
            for r in &mut residuals {
                *r = r.reject_from(&q);
            }
            basis.push(q);
        }
        Projector { matrix: m, basis }
    }

    /// `||Q v - v||` for a unit `v`.
    pub fn residual(&self, v: &CVector) -> Result<f64> {
        let qv = self.apply(v)?;
        Ok((&qv - v).norm())
    }

    /// Maps unit coordinates in the range basis to an ambient unit vector.
    pub fn embed(&self, coords: &[Complex64]) -> CVector {
        let n = self.dim();
        let mut out = CVector::zeros(n);
        for (c, q) in coords.iter().zip(&self.basis) {
            out = out.axpy(*c, q);
        }
        out
    }

    /// `Q <= other` in the lattice order: the range of `self` sits inside that of `other`.
    pub fn is_below(&self, other: &Projector, tol: f64) -> bool {
        self.basis
            .iter()
            .all(|v| other.residual(v).map(|r| r <= tol).unwrap_or(false))
    }
}
