//! Complex projective space with its Fubini-Study Kähler structure.
//!
//! A point is a [`Ray`], stored as a unit representative whose first
//! non-negligible entry is real and positive. Tangent vectors at a ray are
//! represented in the affine chart centred at that ray, so their
//! representatives live in the orthogonal complement of the base vector.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{canonical_phase, CMatrix, CVector};

/// Below this norm a vector does not define a ray.
pub const ZERO_NORM: f64 = 1e-12;
/// Overlap modulus below which two rays are treated as antipodal by chart maps.
pub const CHART_EPS: f64 = 1e-12;

/// Physical constants shared by all metric quantities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub hbar: f64,
    pub tol: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            tol: 1e-10,
        }
    }
}

impl Config {
    pub fn new(hbar: f64) -> Result<Self> {
        Self::with_tol(hbar, 1e-10)
    }

    pub fn with_tol(hbar: f64, tol: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::Malformed(format!(
                "hbar must be positive, got {hbar}"
            )));
        }
        if !(tol > 0.0) {
            return Err(Error::Malformed(format!("tol must be positive, got {tol}")));
        }
        Ok(Self { hbar, tol })
    }

    /// `sqrt(2 hbar)`, the factor converting Fubini-Study angles to distances.
    pub fn scale(&self) -> f64 {
        (2.0 * self.hbar).sqrt()
    }

    /// Riemannian metric `g(v, w) = 2 hbar Re(v|w)`.
    pub fn metric_g(&self, v: &TangentVector, w: &TangentVector) -> Result<f64> {
        same_base(v, w)?;
        Ok(2.0 * self.hbar * v.rep.dot(&w.rep).re)
    }

    /// Symplectic form `omega(v, w) = 2 hbar Im(v|w)`.
    pub fn omega(&self, v: &TangentVector, w: &TangentVector) -> Result<f64> {
        same_base(v, w)?;
        Ok(2.0 * self.hbar * v.rep.dot(&w.rep).im)
    }

    /// Length of `v` in the metric.
    pub fn norm_g(&self, v: &TangentVector) -> f64 {
        self.scale() * v.rep.norm()
    }

    /// Fubini-Study distance `sqrt(2 hbar) arccos |(x|y)|`.
    ///
    /// The angle is evaluated as `atan2(|y - (x|y) x|, |(x|y)|)`, which equals the
    /// arccos form but keeps full precision near coincident and antipodal rays.
    pub fn fs_distance(&self, x: &Ray, y: &Ray) -> Result<f64> {
        check_dims(x.dim(), y.dim())?;
        Ok(self.scale() * fs_angle(&x.rep, &y.rep))
    }

    /// Supremum of [`Config::fs_distance`], attained exactly on antipodal pairs.
    pub fn diameter(&self) -> f64 {
        self.scale() * std::f64::consts::FRAC_PI_2
    }

    /// Radius of the largest ball on which the exponential map is injective.
    pub fn injectivity_radius(&self) -> f64 {
        self.diameter()
    }

    /// True when `y` lies at half the diameter from `x`.
    pub fn equator_of(&self, x: &Ray, y: &Ray, tol: f64) -> Result<bool> {
        let d = self.fs_distance(x, y)?;
        Ok((d - 0.5 * self.diameter()).abs() <= tol)
    }
}

/// Fubini-Study angle between two unit vectors, in `[0, pi/2]`.
pub(crate) fn fs_angle(x: &CVector, y: &CVector) -> f64 {
    let overlap = x.dot(y);
    let orth = y.axpy(-overlap, x).norm();
    orth.atan2(overlap.norm())
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(a, b));
    }
    Ok(())
}

fn same_base(v: &TangentVector, w: &TangentVector) -> Result<()> {
    check_dims(v.rep.dim(), w.rep.dim())?;
    if v.base != w.base {
        return Err(Error::BaseMismatch);
    }
    Ok(())
}

/// A point of projective space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CVector", into = "CVector")]
pub struct Ray {
    rep: CVector,
}

impl Ray {
    /// Projects a nonzero vector to its ray.
    pub fn new(v: &CVector) -> Result<Self> {
        if v.dim() < 2 {
            return Err(Error::DimensionTooSmall(v.dim()));
        }
        let norm = v.norm();
        if !(norm > ZERO_NORM) {
            return Err(Error::ZeroVector(norm));
        }
        Ok(Self {
            rep: canonical_phase(v.scale_real(1.0 / norm)),
        })
    }

    pub fn from_entries(entries: Vec<Complex64>) -> Result<Self> {
        Self::new(&CVector::new(entries))
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(&CVector::from_real(values))
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        Self::new(&CVector::basis(dim, index))
    }

    /// Canonical unit representative.
    pub fn rep(&self) -> &CVector {
        &self.rep
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    /// `(self|other)` between canonical representatives.
    pub fn overlap(&self, other: &Ray) -> Result<Complex64> {
        self.rep.inner(&other.rep)
    }

    /// Rank-one projector onto this ray.
    pub fn projector(&self) -> CMatrix {
        CMatrix::outer(&self.rep, &self.rep)
    }

    /// Chordal gap `|y - (x|y) x|`, the sine of the Fubini-Study angle.
    pub fn gap(&self, other: &Ray) -> f64 {
        let overlap = self.rep.dot(&other.rep);
        other.rep.axpy(-overlap, &self.rep).norm()
    }

    /// Same ray up to a chordal gap of `tol`.
    pub fn approx_eq(&self, other: &Ray, tol: f64) -> bool {
        self.dim() == other.dim() && self.gap(other) <= tol
    }

    /// True iff the representatives are orthogonal within `tol`.
    pub fn is_antipodal(&self, other: &Ray, tol: f64) -> Result<bool> {
        Ok(self.overlap(other)?.norm() <= tol)
    }

    /// Zero tangent vector at this ray.
    pub fn zero_tangent(&self) -> TangentVector {
        TangentVector {
            base: self.clone(),
            rep: CVector::zeros(self.dim()),
        }
    }
}

impl TryFrom<CVector> for Ray {
    type Error = Error;

    fn try_from(v: CVector) -> Result<Self> {
        Ray::new(&v)
    }
}

impl From<Ray> for CVector {
    fn from(r: Ray) -> Self {
        r.rep
    }
}

/// Free-function form of [`Ray::is_antipodal`].
pub fn is_antipodal(x: &Ray, y: &Ray, tol: f64) -> Result<bool> {
    x.is_antipodal(y, tol)
}

/// Tangent vector at `base`, held as its chart representative in `base^⊥`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    base: Ray,
    #[serde(flatten)]
    rep: CVector,
}

impl TangentVector {
    /// Checked constructor; `rep` must be orthogonal to the base representative.
    pub fn new(base: Ray, rep: CVector) -> Result<Self> {
        check_dims(base.dim(), rep.dim())?;
        let overlap = base.rep.dot(&rep).norm();
        if overlap > 1e-12 * rep.norm().max(1.0) {
            return Err(Error::Malformed(format!(
                "tangent representative is not orthogonal to its base (overlap {overlap:e})"
            )));
        }
        Ok(Self { base, rep })
    }

    /// Projects an arbitrary ambient vector onto the tangent space at `base`.
    pub fn horizontal(base: &Ray, v: &CVector) -> Result<Self> {
        check_dims(base.dim(), v.dim())?;
        Ok(Self {
            base: base.clone(),
            rep: v.reject_from(&base.rep),
        })
    }

    pub(crate) fn from_parts_unchecked(base: Ray, rep: CVector) -> Self {
        Self { base, rep }
    }

    pub fn base(&self) -> &Ray {
        &self.base
    }

    pub fn rep(&self) -> &CVector {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.norm() == 0.0
    }

    /// Complex structure: multiplication of the representative by `i`.
    pub fn j(&self) -> TangentVector {
        TangentVector {
            base: self.base.clone(),
            rep: self.rep.scale(Complex64::i()),
        }
    }

    pub fn scale(&self, c: f64) -> TangentVector {
        TangentVector {
            base: self.base.clone(),
            rep: self.rep.scale_real(c),
        }
    }

    pub fn add(&self, other: &TangentVector) -> Result<TangentVector> {
        same_base(self, other)?;
        Ok(TangentVector {
            base: self.base.clone(),
            rep: &self.rep + &other.rep,
        })
    }

    /// `a * self + b * other` for real `a`, `b`.
    pub fn combine(&self, a: f64, other: &TangentVector, b: f64) -> Result<TangentVector> {
        same_base(self, other)?;
        Ok(TangentVector {
            base: self.base.clone(),
            rep: self
                .rep
                .scale_real(a)
                .axpy(Complex64::new(b, 0.0), &other.rep),
        })
    }
}

/// Affine chart at `base`: `y -> psi / (phi|psi) - phi`.
pub fn chart_to(base: &Ray, y: &Ray) -> Result<TangentVector> {
    let overlap = base.overlap(y)?;
    if overlap.norm() <= CHART_EPS {
        return Err(Error::OutsideChart);
    }
    let rep = y
        .rep
        .scale(overlap.inv())
        .axpy(Complex64::new(-1.0, 0.0), &base.rep);
    Ok(TangentVector {
        base: base.clone(),
        rep: rep.reject_from(&base.rep),
    })
}

/// Inverse of [`chart_to`]: the ray through `phi + v`.
pub fn chart_from(v: &TangentVector) -> Ray {
    Ray::new(&(&v.base.rep + &v.rep)).expect("phi + v has norm at least 1")
}

/// Ray on the equator of `base` reached by the geodesic leaving along `v`.
pub fn equator_point(v: &TangentVector) -> Result<Ray> {
    let norm = v.rep.norm();
    if !(norm > ZERO_NORM) {
        return Err(Error::ZeroVector(norm));
    }
    Ray::new(&v.base.rep.axpy(Complex64::new(1.0 / norm, 0.0), &v.rep))
}

/// Geodesic symmetry at `x`: the ray of `(1 - 2 P_x) y`.
pub fn symmetry_at(x: &Ray, y: &Ray) -> Result<Ray> {
    let overlap = x.overlap(y)?;
    Ray::new(&y.rep.axpy(overlap * -2.0, &x.rep))
}
