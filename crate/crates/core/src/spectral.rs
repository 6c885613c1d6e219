//! Spectral theory read off the geometry of projective space.
//!
//! A real number is an eigenvalue of `A` exactly when the variance functional
//! `<(A - lambda)^2>` vanishes somewhere, and eigenrays are the zeros of the
//! Killing field of `<A>`. Both are located here by Riemannian gradient
//! descent along closed-form geodesics and cross-checked against the Jacobi
//! eigensolver.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesics::GeodesicSubmanifold;
use crate::linalg::{CMatrix, CVector, Rng};
use crate::observables::Observable;
use crate::projective::{Config, Ray};
use crate::projector::Projector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SpectralTag {
    Regular,
    Eigenvalue,
    /// Never produced for finite-dimensional operators.
    ContinuousSpectrum,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralClass {
    pub tag: SpectralTag,
    pub witness: Option<Ray>,
    /// `inf_x <(A - lambda)^2>_x`.
    pub margin: f64,
}

/// Default classification tolerance `1e-10 * ||A||_max^2`.
pub fn default_eps(a: &Observable) -> f64 {
    1e-10 * a.matrix().max_abs().powi(2)
}

/// Classifies `lambda` as an eigenvalue or a regular value of `A`.
pub fn classify(a: &Observable, lambda: f64, eps: f64) -> Result<SpectralClass> {
    if !(eps > 0.0) {
        return Err(Error::Malformed(format!("eps must be positive, got {eps}")));
    }
    let eig = a.eigen();
    let (index, margin) = eig
        .eigenvalues
        .iter()
        .map(|mu| (mu - lambda).powi(2))
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("dimension is positive");
    if margin <= eps {
        Ok(SpectralClass {
            tag: SpectralTag::Eigenvalue,
            witness: Some(Ray::new(&eig.eigenvectors[index])?),
            margin,
        })
    } else {
        Ok(SpectralClass {
            tag: SpectralTag::Regular,
            witness: None,
            margin,
        })
    }
}

/// Gradient-descent settings shared by the spectral solvers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iters: usize,
    /// Stop once the metric norm of the gradient falls below this.
    pub grad_tol: f64,
    /// Backtracking shrink factor.
    pub shrink: f64,
    /// Armijo sufficient-decrease constant.
    pub sufficient_decrease: f64,
    /// Additional random starts besides the caller's `x0`.
    pub restarts: usize,
    /// Seed of the restart streams.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            grad_tol: 1e-10,
            shrink: 0.5,
            sufficient_decrease: 1e-4,
            restarts: 8,
            seed: 0,
        }
    }
}

/// Outcome of a descent over all starts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DescentResult {
    pub value: f64,
    pub argmin: Ray,
    /// Iterations used by the winning start.
    pub iters: usize,
    /// Metric norm of the gradient at `argmin`.
    pub grad_norm: f64,
    pub iters_per_restart: Vec<usize>,
}

struct Run {
    value: f64,
    argmin: CVector,
    iters: usize,
    grad_norm: f64,
}

/// Riemannian descent of `f(x) = <C>_x` for Hermitian `C`.
///
/// The metric gradient has chart representative `(1/hbar) (1 - P) C phi`.
/// Restricted to the geodesic `phi cos(s) + d sin(s)` the function is
/// `a cos^2 + 2 b sin cos + c sin^2`, so every step goes straight to the
/// minimum along the current geodesic, then checks the Armijo condition and
/// backtracks if rounding spoiled it. Search directions are Polak-Ribière
/// conjugate gradients; the previous direction is carried over exactly as the
/// velocity of the geodesic just travelled.
fn descend(cfg: &Config, c: &CMatrix, x0: &CVector, opts: &SolverOptions) -> Run {
    let hbar = cfg.hbar;
    let g_norm = |grad: &CVector| cfg.scale() * grad.norm();
    let gradient = |phi: &CVector| -> (f64, CVector) {
        let c_phi = c.mul_vec(phi);
        (
            phi.dot(&c_phi).re,
            c_phi.reject_from(phi).scale_real(1.0 / hbar),
        )
    };

    let mut phi = x0.clone();
    let (mut value, mut grad) = gradient(&phi);
    let mut dir = grad.scale_real(-1.0);
    let mut iters = 0;
    while iters < opts.max_iters && g_norm(&grad) > opts.grad_tol {
        iters += 1;
        if dir.dot(&grad).re >= 0.0 {
            dir = grad.scale_real(-1.0);
        }
        // small gradients carry relative rounding along phi; remove it after scaling
        let length = dir.norm();
        let unit = dir.scale_real(1.0 / length).reject_from(&phi);
        let unit = unit.scale_real(1.0 / unit.norm());
        let c_unit = c.mul_vec(&unit);
        let b = phi.dot(&c_unit).re;
        let far = unit.dot(&c_unit).re;
        // f(s) - f(0), written without cancellation
        let decrease = |s: f64| {
            let (sn, cs) = s.sin_cos();
            sn * (2.0 * b * cs + (far - value) * sn)
        };
        let slope = 2.0 * b;
        let mut s = 0.5 * (-b).atan2(0.5 * (far - value));
        while decrease(s) > opts.sufficient_decrease * s * slope && s > f64::MIN_POSITIVE {
            s *= opts.shrink;
        }
        if !(s > f64::MIN_POSITIVE) {
            break;
        }

        let (sn, cs) = s.sin_cos();
        let next = phi.scale_real(cs).axpy(Complex64::new(sn, 0.0), &unit);
        let next = next.scale_real(1.0 / next.norm());
        let (next_value, next_grad) = gradient(&next);
        let carried = phi
            .scale_real(-sn * length)
            .axpy(Complex64::new(cs * length, 0.0), &unit)
            .reject_from(&next);
        let old_grad = grad.reject_from(&next);
        let beta = (next_grad.dot(&(&next_grad - &old_grad)).re / grad.norm_sqr()).max(0.0);
        dir = next_grad
            .scale_real(-1.0)
            .axpy(Complex64::new(beta, 0.0), &carried);

        phi = next;
        value = next_value;
        grad = next_grad;
    }
    Run {
        value,
        grad_norm: g_norm(&grad),
        argmin: phi,
        iters,
    }
}

/// Runs [`descend`] from `x0` and from `opts.restarts` random rays; picks the
/// lowest value, breaking ties by start index.
fn descend_with_restarts(
    cfg: &Config,
    c: &CMatrix,
    x0: &Ray,
    opts: &SolverOptions,
) -> Result<DescentResult> {
    let root = Rng::new(opts.seed);
    let dim = x0.dim();
    let starts: Vec<CVector> = std::iter::once(Ok(x0.rep().clone()))
        .chain((0..opts.restarts).map(|r| root.split(r as u64).random_ray(dim)))
        .collect::<Result<_>>()?;
    let runs: Vec<Run> = starts
        .par_iter()
        .map(|s| descend(cfg, c, s, opts))
        .collect();
    let iters_per_restart = runs.iter().map(|r| r.iters).collect();
    let best = runs
        .into_iter()
        .reduce(|best, r| if r.value < best.value { r } else { best })
        .expect("at least one start");
    Ok(DescentResult {
        value: best.value,
        argmin: Ray::new(&best.argmin)?,
        iters: best.iters,
        grad_norm: best.grad_norm,
        iters_per_restart,
    })
}

fn check_dims(a: &Observable, x: &Ray) -> Result<()> {
    if a.dim() != x.dim() {
        return Err(Error::DimensionMismatch(a.dim(), x.dim()));
    }
    Ok(())
}

/// Minimizes `<(A - lambda)^2>` over projective space.
pub fn variance_minimize(
    cfg: &Config,
    a: &Observable,
    lambda: f64,
    x0: &Ray,
    opts: &SolverOptions,
) -> Result<DescentResult> {
    check_dims(a, x0)?;
    let shifted = a.matrix().shifted(lambda);
    let square = shifted.mul_mat(&shifted);
    descend_with_restarts(cfg, &square, x0, opts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalResult {
    pub lambda: f64,
    pub eigenray: Ray,
    pub iters: usize,
    pub iters_per_restart: Vec<usize>,
}

/// Least or greatest eigenvalue as the extremum of `<A>`.
pub fn extremal_eigen(
    cfg: &Config,
    a: &Observable,
    x0: &Ray,
    opts: &SolverOptions,
    sense: Sense,
) -> Result<ExtremalResult> {
    check_dims(a, x0)?;
    let c = match sense {
        Sense::Min => a.matrix().clone(),
        Sense::Max => a.matrix().scale_real(-1.0),
    };
    let run = descend_with_restarts(cfg, &c, x0, opts)?;
    let lambda = crate::observables::expectation(a, &run.argmin)?;
    Ok(ExtremalResult {
        lambda,
        eigenray: run.argmin,
        iters: run.iters,
        iters_per_restart: run.iters_per_restart,
    })
}

/// `A phi != 0`, i.e. `x` lies outside the projectivized kernel.
pub fn regularity_domain_contains(a: &CMatrix, x: &Ray) -> Result<bool> {
    Ok(a.apply(x.rep())?.norm() > 1e-12 * a.max_abs())
}

/// Projectivized operator `x -> ray(A phi)` on its regularity domain.
pub fn quotient_apply(a: &CMatrix, x: &Ray) -> Result<Ray> {
    if !regularity_domain_contains(a, x)? {
        return Err(Error::OutsideRegularityDomain);
    }
    Ray::new(&a.mul_vec(x.rep()))
}

/// `A - lambda` is boundedly invertible.
pub fn is_regular_value(a: &Observable, lambda: f64) -> bool {
    let scale = a.matrix().max_abs();
    a.eigen()
        .eigenvalues
        .iter()
        .all(|mu| (mu - lambda).abs() > 1e-10 * scale)
}

/// Closed real interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::InvalidInterval(lo, hi));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl std::str::FromStr for Interval {
    type Err = Error;

    /// Parses `"a,b"`.
    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(',')
            .ok_or_else(|| Error::Malformed(format!("interval {s:?} is not of the form a,b")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Malformed(format!("interval endpoint {t:?}: {e}")))
        };
        Interval::new(parse(lo)?, parse(hi)?)
    }
}

/// Spectral submanifold for a single closed interval.
pub fn spectral_submanifold(a: &Observable, x: Interval) -> Result<GeodesicSubmanifold> {
    spectral_submanifold_union(a, &[x])
}

/// Projective space of the range of the spectral projector of `A` on a finite
/// union of closed intervals. An empty result has rank zero.
pub fn spectral_submanifold_union(a: &Observable, set: &[Interval]) -> Result<GeodesicSubmanifold> {
    let eig = a.eigen();
    let basis: Vec<CVector> = eig
        .eigenvalues
        .iter()
        .zip(&eig.eigenvectors)
        .filter(|(mu, _)| set.iter().any(|i| i.contains(**mu)))
        .map(|(_, v)| v.clone())
        .collect();
    Ok(GeodesicSubmanifold::new(Projector::from_orthonormal(
        a.dim(),
        basis,
    )?))
}

/// Full spectrum by successive minimization of `<A>` on the orthogonal
/// complement of the eigenvectors found so far.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeflatedSpectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenrays: Vec<Ray>,
    /// Descent iterations of every start, one list per deflation step.
    pub iters_per_restart: Vec<Vec<usize>>,
}

pub fn riemannian_spectrum(
    cfg: &Config,
    a: &Observable,
    opts: &SolverOptions,
) -> Result<DeflatedSpectrum> {
    let n = a.dim();
    let mut found: Vec<CVector> = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let mut iters_per_restart = Vec::with_capacity(n);
    while found.len() < n {
        let rest = Projector::from_orthonormal(n, found.clone())?.complement();
        let basis = rest.basis();
        let k = basis.len();
        let images: Vec<CVector> = basis.iter().map(|v| a.matrix().mul_vec(v)).collect();
        let compressed = CMatrix::from_fn(k, |i, j| basis[i].dot(&images[j]));
        let (coords, iters) = if k == 1 {
            (CVector::from_real(&[1.0]), Vec::new())
        } else {
            let step_opts = SolverOptions {
                seed: opts.seed.wrapping_add(found.len() as u64),
                ..*opts
            };
            let start = Ray::new(&Rng::new(step_opts.seed).random_ray(k)?)?;
            let run = descend_with_restarts(cfg, &compressed, &start, &step_opts)?;
            (run.argmin.rep().clone(), run.iters_per_restart)
        };
        let vector = rest.embed(coords.entries());
        let vector = vector.scale_real(1.0 / vector.norm());
        values.push(a.matrix().quadratic_form(&vector));
        found.push(vector);
        iters_per_restart.push(iters);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    Ok(DeflatedSpectrum {
        eigenvalues: order.iter().map(|&i| values[i]).collect(),
        eigenrays: order
            .iter()
            .map(|&i| Ray::new(&found[i]))
            .collect::<Result<_>>()?,
        iters_per_restart,
    })
}
