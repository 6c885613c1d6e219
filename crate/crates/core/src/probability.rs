//! Quantum logic and quantum probability.
//!
//! Propositions are orthogonal projectors, states are density operators, and
//! the probability of a proposition in a pure state is a function of the
//! Fubini-Study distance from the state to the corresponding totally geodesic
//! submanifold.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geodesics::GeodesicSubmanifold;
#[cfg(test)]
use crate::linalg::CVector;
use crate::linalg::{eig_hermitian, CMatrix};
use crate::observables::Observable;
use crate::projective::{Config, Ray};
use crate::projector::Projector;
use crate::spectral::{spectral_submanifold_union, Interval};

/// Eigenvalues of `(1-P)+(1-Q)` (resp. `P+Q`) below this count as zero.
const LATTICE_TOL: f64 = 1e-9;

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(a, b));
    }
    Ok(())
}

/// Projector onto the kernel (eigenvalue zero) of a positive semidefinite matrix.
fn kernel_projector(m: &CMatrix) -> Result<Projector> {
    let eig = eig_hermitian(m)?;
    let basis = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors)
        .filter(|(l, _)| l.abs() <= LATTICE_TOL)
        .map(|(_, v)| v)
        .collect();
    Projector::from_orthonormal(m.dim(), basis)
}

/// Greatest lower bound: projector onto the intersection of the ranges.
pub fn logic_meet(p: &Projector, q: &Projector) -> Result<Projector> {
    check_dims(p.dim(), q.dim())?;
    let n = p.dim();
    let id = CMatrix::identity(n);
    let sum = &(&id - p.matrix()) + &(&id - q.matrix());
    kernel_projector(&sum)
}

/// Least upper bound: projector onto the span of the ranges.
pub fn logic_join(p: &Projector, q: &Projector) -> Result<Projector> {
    check_dims(p.dim(), q.dim())?;
    let sum = p.matrix() + q.matrix();
    Ok(kernel_projector(&sum)?.complement())
}

/// Orthocomplement `1 - P`.
pub fn logic_not(p: &Projector) -> Projector {
    p.complement()
}

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let defect = matrix.hermitian_defect();
        if defect > 1e-10 {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (defect {defect:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::InvalidDensity(format!("trace {trace} is not 1")));
        }
        let lowest = eig_hermitian(&matrix)?.eigenvalues[0];
        if lowest < -1e-12 {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {lowest:e}"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn pure(x: &Ray) -> Self {
        Self {
            matrix: x.projector(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// Convex combination `sum_i w_i |x_i><x_i|`.
    pub fn mixture(weights: &[f64], rays: &[Ray]) -> Result<Self> {
        let first = rays.first().ok_or(Error::EmptyInput)?;
        if weights.len() != rays.len() {
            return Err(Error::DimensionMismatch(weights.len(), rays.len()));
        }
        let mut m = CMatrix::zeros(first.dim());
        for (w, r) in weights.iter().zip(rays) {
            check_dims(first.dim(), r.dim())?;
            m = &m + &r.projector().scale_real(*w);
        }
        Self::new(m)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `Tr(W^2)`.
    pub fn purity(&self) -> f64 {
        trace_product(&self.matrix, &self.matrix).re
    }
}

/// `Tr(AB)` without forming the product.
fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Probability measure `mu(Q) = Tr(WQ)` of the proposition `Q`.
pub fn measure_eval(w: &DensityOperator, q: &Projector) -> Result<f64> {
    check_dims(w.dim(), q.dim())?;
    Ok(trace_product(w.matrix(), q.matrix()).re.clamp(0.0, 1.0))
}

/// Transition probability `|(x|y)|^2`.
pub fn transition_prob(x: &Ray, y: &Ray) -> Result<f64> {
    Ok(x.overlap(y)?.norm_sqr())
}

/// Fubini-Study distance from `x` to the nearest point of `m`.
///
/// The infimum is attained at the ray of `Q phi`, so the distance is
/// `sqrt(2 hbar)` times the angle between `phi` and its projection.
pub fn distance_to_submanifold(cfg: &Config, x: &Ray, m: &GeodesicSubmanifold) -> Result<f64> {
    check_dims(x.dim(), m.dim())?;
    if m.is_empty() {
        return Err(Error::EmptySubmanifold);
    }
    let q_phi = m.projector().apply(x.rep())?;
    let inside = q_phi.norm();
    let outside = (x.rep() - &q_phi).norm();
    Ok(cfg.scale() * outside.atan2(inside))
}

/// `cos^2(d(x, M) / sqrt(2 hbar))`.
pub fn geometric_born(cfg: &Config, x: &Ray, m: &GeodesicSubmanifold) -> Result<f64> {
    let d = distance_to_submanifold(cfg, x, m)?;
    Ok((d / cfg.scale()).cos().powi(2))
}

/// Born probability `Tr(W Q^A(X))` for a finite union of closed intervals.
pub fn born(a: &Observable, w: &DensityOperator, set: &[Interval]) -> Result<f64> {
    check_dims(a.dim(), w.dim())?;
    let m = spectral_submanifold_union(a, set)?;
    measure_eval(w, m.projector())
}

/// Born probability with the geometric breakdown over pure components.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BornReport {
    pub prob: f64,
    /// Rank of the spectral projector.
    pub rank: usize,
    pub weights: Vec<f64>,
    /// Distance from each pure component to the spectral submanifold;
    /// `None` when the submanifold is empty.
    pub distance_per_component: Vec<Option<f64>>,
    /// `sum_i w_i cos^2(d_i / sqrt(2 hbar))`.
    pub geometric_prob: f64,
}

pub fn born_report(
    cfg: &Config,
    a: &Observable,
    w: &DensityOperator,
    set: &[Interval],
) -> Result<BornReport> {
    check_dims(a.dim(), w.dim())?;
    let m = spectral_submanifold_union(a, set)?;
    let prob = measure_eval(w, m.projector())?;
    let parts = decompose(w)?;
    let mut distances = Vec::with_capacity(parts.rays.len());
    let mut geometric = 0.0;
    for (weight, ray) in parts.weights.iter().zip(&parts.rays) {
        if m.is_empty() {
            distances.push(None);
        } else {
            distances.push(Some(distance_to_submanifold(cfg, ray, &m)?));
            geometric += weight * geometric_born(cfg, ray, &m)?;
        }
    }
    Ok(BornReport {
        prob,
        rank: m.rank(),
        weights: parts.weights,
        distance_per_component: distances,
        geometric_prob: geometric,
    })
}

/// Spectral resolution of a density operator into weighted pure states.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PureDecomposition {
    pub weights: Vec<f64>,
    pub rays: Vec<Ray>,
}

impl PureDecomposition {
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.rays.first().map(|r| r.dim()).unwrap_or(0);
        let mut m = CMatrix::zeros(n);
        for (w, r) in self.weights.iter().zip(&self.rays) {
            m = &m + &r.projector().scale_real(*w);
        }
        m
    }
}

/// Eigen-decomposition of `W`, dropping weights below `1e-12`; largest weight first.
pub fn decompose(w: &DensityOperator) -> Result<PureDecomposition> {
    let eig = eig_hermitian(w.matrix())?;
    let mut weights = Vec::new();
    let mut rays = Vec::new();
    for (l, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors).rev() {
        if *l >= 1e-12 {
            weights.push(*l);
            rays.push(Ray::new(v)?);
        }
    }
    Ok(PureDecomposition { weights, rays })
}

/// `|Tr(W^2) - 1| <= tol`.
pub fn is_pure(w: &DensityOperator, tol: f64) -> bool {
    (w.purity() - 1.0).abs() <= tol
}
