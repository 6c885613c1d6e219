//! Closed-form geodesics, exponential and logarithm maps, totally geodesic
//! submanifolds and the geometric form of the superposition principle.
//!
//! The geodesic leaving `phi` along a unit chart direction `xi` with speed
//! `rho` is the ray of `phi cos(rho t / s) + xi sin(rho t / s)` where
//! `s = sqrt(2 hbar)`. With this parametrization `rho` is the metric speed, so
//! the exponential map of a tangent vector `v` travels for unit time at speed
//! `|v|_g`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{CVector, Rng};
use crate::projective::{chart_to, Config, Ray, TangentVector, CHART_EPS, ZERO_NORM};
use crate::projector::{Projector, PIVOT_TOL};

/// Constant-speed geodesic through a base ray.
#[derive(Clone, Debug, PartialEq)]
pub struct Geodesic {
    direction: TangentVector,
    speed: f64,
}

impl Geodesic {
    /// Geodesic leaving along `v`; only the direction of `v` matters.
    pub fn new(v: &TangentVector, speed: f64) -> Result<Self> {
        let norm = v.rep().norm();
        if !(norm > ZERO_NORM) {
            return Err(Error::ZeroVector(norm));
        }
        if !(speed >= 0.0) {
            return Err(Error::Malformed(format!("negative geodesic speed {speed}")));
        }
        Ok(Self {
            direction: v.scale(1.0 / norm),
            speed,
        })
    }

    pub fn unit(v: &TangentVector) -> Result<Self> {
        Self::new(v, 1.0)
    }

    pub fn base(&self) -> &Ray {
        self.direction.base()
    }

    /// Unit chart direction `xi`.
    pub fn direction(&self) -> &TangentVector {
        &self.direction
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    /// Unit ambient representative of the curve at time `t`.
    pub(crate) fn lift(&self, cfg: &Config, t: f64) -> CVector {
        let angle = self.speed * t / cfg.scale();
        let (s, c) = angle.sin_cos();
        self.base()
            .rep()
            .scale_real(c)
            .axpy(Complex64::new(s, 0.0), self.direction.rep())
    }

    pub fn eval(&self, cfg: &Config, t: f64) -> Ray {
        Ray::new(&self.lift(cfg, t)).expect("geodesic lift has unit norm")
    }

    /// Time after which the curve returns to its base ray.
    pub fn period(&self, cfg: &Config) -> f64 {
        std::f64::consts::PI * cfg.scale() / self.speed
    }
}

/// Free-function form of [`Geodesic::eval`].
pub fn geodesic_eval(cfg: &Config, c: &Geodesic, t: f64) -> Ray {
    c.eval(cfg, t)
}

/// Riemannian exponential map at the base of `v`.
pub fn exp_map(cfg: &Config, v: &TangentVector) -> Ray {
    if v.rep().norm() <= ZERO_NORM {
        return v.base().clone();
    }
    let c = Geodesic::new(v, cfg.norm_g(v)).expect("nonzero direction");
    c.eval(cfg, 1.0)
}

/// Inverse of [`exp_map`] on the complement of the cut locus.
///
/// The returned vector has metric norm equal to the Fubini-Study distance.
pub fn log_map(base: &Ray, y: &Ray) -> Result<TangentVector> {
    let w = match chart_to(base, y) {
        Ok(w) => w,
        Err(Error::OutsideChart) => return Err(Error::CutLocus),
        Err(e) => return Err(e),
    };
    let norm = w.rep().norm();
    if norm == 0.0 {
        return Ok(w);
    }
    // phi + w projects to phi cos(a) + xi sin(a) with tan(a) = |w|
    let angle = norm.atan();
    Ok(w.scale(angle / norm))
}

/// The cut locus of `x` is its antipodal submanifold.
pub fn in_cut_locus(x: &Ray, y: &Ray, tol: f64) -> Result<bool> {
    x.is_antipodal(y, tol)
}

/// Closed totally geodesic submanifold: the projectivization of a complex subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicSubmanifold {
    projector: Projector,
}

impl GeodesicSubmanifold {
    pub fn new(projector: Projector) -> Self {
        Self { projector }
    }

    pub fn projector(&self) -> &Projector {
        &self.projector
    }

    pub fn rank(&self) -> usize {
        self.projector.rank()
    }

    pub fn dim(&self) -> usize {
        self.projector.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.rank() == 0
    }

    /// `||Q phi - phi|| <= tol`.
    pub fn contains(&self, x: &Ray, tol: f64) -> Result<bool> {
        Ok(self.projector.residual(x.rep())? <= tol)
    }

    /// Random ray inside the submanifold.
    pub fn sample(&self, rng: &mut Rng) -> Result<Ray> {
        if self.is_empty() {
            return Err(Error::EmptySubmanifold);
        }
        let coords: Vec<Complex64> = (0..self.rank()).map(|_| rng.complex_gaussian()).collect();
        Ray::new(&self.projector.embed(&coords))
    }
}

/// Smallest totally geodesic submanifold containing every given ray.
pub fn span_submanifold(points: &[Ray]) -> Result<GeodesicSubmanifold> {
    let first = points.first().ok_or(Error::EmptyInput)?;
    let reps: Vec<CVector> = points.iter().map(|p| p.rep().clone()).collect();
    Ok(GeodesicSubmanifold::new(Projector::span(
        first.dim(),
        &reps,
        PIVOT_TOL,
    )?))
}

/// Samples geodesics between random pairs of points of `m` and checks that
/// they never leave it.
pub fn is_totally_geodesic_closed(
    cfg: &Config,
    m: &GeodesicSubmanifold,
    trials: usize,
    rng: &mut Rng,
) -> Result<bool> {
    if m.rank() < 2 {
        return Ok(true);
    }
    const TIMES: usize = 8;
    for _ in 0..trials {
        let x = m.sample(rng)?;
        let y = m.sample(rng)?;
        let v = TangentVector::horizontal(&x, y.rep())?;
        if v.rep().norm() <= ZERO_NORM {
            continue;
        }
        let c = Geodesic::unit(&v)?;
        let period = c.period(cfg);
        for k in 0..TIMES {
            let t = period * k as f64 / TIMES as f64;
            if !m.contains(&c.eval(cfg, t), 1e-9)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Nonzero complex weights of a two-term superposition `alpha phi + beta psi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuperpositionCoefficients {
    alpha: Complex64,
    beta: Complex64,
}

impl SuperpositionCoefficients {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        if alpha.norm() == 0.0 || beta.norm() == 0.0 {
            return Err(Error::ZeroCoefficient);
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// Relative phase `arg(beta / alpha)`.
    pub fn theta(&self) -> f64 {
        (self.beta / self.alpha).arg()
    }

    pub fn modulus_ratio(&self) -> f64 {
        self.beta.norm() / self.alpha.norm()
    }
}

/// Locates the superposition `alpha phi + beta psi` of two antipodal rays on
/// the geodesic leaving `x` in direction `e^{i theta} psi`.
pub fn superposition_point(
    cfg: &Config,
    x: &Ray,
    y: &Ray,
    c: &SuperpositionCoefficients,
) -> Result<Ray> {
    let overlap = x.overlap(y)?.norm();
    if overlap > cfg.tol {
        return Err(Error::NotAntipodal(overlap));
    }
    let phase = Complex64::from_polar(1.0, c.theta());
    let v = TangentVector::horizontal(x, &y.rep().scale(phase))?;
    let t = cfg.scale() * c.modulus_ratio().atan();
    Ok(Geodesic::unit(&v)?.eval(cfg, t))
}

/// Tests whether `chi` lies on the geodesic from `x` through its antipode `xi`.
pub fn on_geodesic_test(x: &Ray, xi: &Ray, chi: &Ray, tol: f64) -> Result<bool> {
    let overlap = x.overlap(xi)?.norm();
    if overlap > tol.max(CHART_EPS) {
        return Err(Error::NotAntipodal(overlap));
    }
    let xi_perp = xi.rep().reject_from(x.rep());
    let xi_perp = xi_perp.scale_real(1.0 / xi_perp.norm());
    let plane = Projector::from_orthonormal(x.dim(), vec![x.rep().clone(), xi_perp])?;
    if plane.residual(chi.rep())? > tol {
        return Ok(false);
    }
    let along_x = x.overlap(chi)?;
    if along_x.norm() <= tol {
        return Ok(true);
    }
    let ratio = xi.overlap(chi)? / along_x;
    Ok(ratio.im.abs() <= tol * ratio.norm())
}

/// Least-squares fit of `f` along a geodesic to `a0 + a1 sin cos + a2 sin^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    /// Largest absolute deviation of the samples from the fit.
    pub residual: f64,
}

/// Fits `f` restricted to the unit-speed geodesic along `v`.
///
/// Samples are taken at angles `k (pi/2) / samples`, `k = 0..samples`.
pub fn geolinear_fit(
    cfg: &Config,
    f: impl Fn(&Ray) -> f64,
    v: &TangentVector,
    samples: usize,
) -> Result<FitResult> {
    if samples < 5 {
        return Err(Error::TooFewSamples {
            needed: 5,
            got: samples,
        });
    }
    let c = Geodesic::unit(v)?;
    let mut rows = Vec::with_capacity(samples);
    for k in 0..samples {
        let angle = FRAC_PI_2 * k as f64 / samples as f64;
        let (s, co) = angle.sin_cos();
        let value = f(&c.eval(cfg, cfg.scale() * angle));
        rows.push(([1.0, s * co, s * s], value));
    }
    let coeffs = least_squares3(&rows);
    let residual = rows
        .iter()
        .map(|(b, y)| (b[0] * coeffs[0] + b[1] * coeffs[1] + b[2] * coeffs[2] - y).abs())
        .fold(0.0, f64::max);
    Ok(FitResult {
        a0: coeffs[0],
        a1: coeffs[1],
        a2: coeffs[2],
        residual,
    })
}

/// Solves the 3x3 normal equations by Gaussian elimination with partial pivoting.
fn least_squares3(rows: &[([f64; 3], f64)]) -> [f64; 3] {
    let mut m = [[0.0; 4]; 3];
    for (b, y) in rows {
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += b[i] * b[j];
            }
            m[i][3] += b[i] * y;
        }
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        for r in col + 1..3 {
            let factor = m[r][col] / m[col][col];
            let pivot_row = m[col];
            for (entry, p) in m[r].iter_mut().zip(pivot_row).skip(col) {
                *entry -= factor * p;
            }
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let mut acc = m[r][3];
        for k in r + 1..3 {
            acc -= m[r][k] * x[k];
        }
        x[r] = acc / m[r][r];
    }
    x
}

/// One row of a sampled geodesic.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicSample {
    pub t: f64,
    pub point: Ray,
    pub distance: f64,
}

/// Samples `c` at `samples` evenly spaced times in `[0, t_end]`.
pub fn sample_geodesic(
    cfg: &Config,
    c: &Geodesic,
    t_end: f64,
    samples: usize,
) -> Vec<GeodesicSample> {
    let steps = samples.max(2) - 1;
    (0..=steps)
        .map(|k| {
            let t = t_end * k as f64 / steps as f64;
            let point = c.eval(cfg, t);
            let distance = cfg.fs_distance(c.base(), &point).expect("same dimension");
            GeodesicSample { t, point, distance }
        })
        .collect()
}

/// CSV with columns `t`, interleaved real and imaginary parts of the canonical
/// representative, and the distance from the base.
pub fn geodesic_csv(samples: &[GeodesicSample]) -> String {
    let dim = samples.first().map(|s| s.point.dim()).unwrap_or(0);
    let mut out = String::from("t");
    for k in 0..dim {
        out.push_str(&format!(",re{k},im{k}"));
    }
    out.push_str(",distance\n");
    for s in samples {
        out.push_str(&format!("{:e}", s.t));
        for z in s.point.rep().entries() {
            out.push_str(&format!(",{:e},{:e}", z.re, z.im));
        }
        out.push_str(&format!(",{:e}\n", s.distance));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ray(values: &[f64]) -> Ray {
        Ray::from_real(values).unwrap()
    }

    fn e1_up() -> TangentVector {
        TangentVector::new(ray(&[1.0, 0.0]), CVector::from_real(&[0.0, 1.0])).unwrap()
    }

    #[test]
    fn geodesic_eval_examples() {
        for hbar in [0.5, 1.0, 3.0] {
            let cfg = Config::new(hbar).unwrap();
            let g = Geodesic::unit(&e1_up()).unwrap();
            assert!(g.eval(&cfg, 0.0).approx_eq(&ray(&[1.0, 0.0]), 1e-15));
            let t = PI * (hbar / 2.0).sqrt();
            assert!(g.eval(&cfg, t).approx_eq(&ray(&[0.0, 1.0]), 1e-15));
        }
        let cfg = Config::default();
        let g = Geodesic::unit(&e1_up()).unwrap();
        assert!(g
            .eval(&cfg, PI / 4.0 * SQRT_2)
            .approx_eq(&ray(&[1.0, 1.0]), 1e-15));
    }

    #[test]
    fn exp_map_examples() {
        let cfg = Config::default();
        let x = ray(&[1.0, 0.0]);
        assert_eq!(exp_map(&cfg, &x.zero_tangent()), x);
        // metric length (pi/2) sqrt(2 hbar) reaches the antipode
        let v = e1_up().scale(PI / 2.0);
        assert!((cfg.norm_g(&v) - PI / 2.0 * SQRT_2).abs() < 1e-15);
        assert!(exp_map(&cfg, &v).approx_eq(&ray(&[0.0, 1.0]), 1e-15));
    }

    #[test]
    fn log_map_examples() {
        let cfg = Config::default();
        let x = ray(&[1.0, 0.0]);
        assert!(log_map(&x, &x).unwrap().is_zero());
        let y = ray(&[1.0, 1.0]);
        let v = log_map(&x, &y).unwrap();
        assert!((cfg.norm_g(&v) - SQRT_2 * PI / 4.0).abs() < 1e-15);
        assert!((v.rep()[1] - c(PI / 4.0, 0.0)).norm() < 1e-15);
        assert!(exp_map(&cfg, &v).approx_eq(&y, 1e-15));
        assert_eq!(log_map(&x, &ray(&[0.0, 1.0])).unwrap_err(), Error::CutLocus);
    }

    #[test]
    fn cut_locus_matches_antipodality() {
        let x = ray(&[1.0, 0.0]);
        assert!(in_cut_locus(&x, &ray(&[0.0, 1.0]), 1e-12).unwrap());
        assert!(!in_cut_locus(&x, &x, 1e-12).unwrap());
        assert!(!in_cut_locus(&x, &ray(&[1.0, 1.0]), 1e-12).unwrap());
    }

    #[test]
    fn span_examples() {
        let one = span_submanifold(&[ray(&[1.0, 1.0, 0.0])]).unwrap();
        assert_eq!(one.rank(), 1);
        let expect =
            CMatrix::from_real_rows(&[&[0.5, 0.5, 0.0], &[0.5, 0.5, 0.0], &[0.0, 0.0, 0.0]])
                .unwrap();
        assert!(one.projector().matrix().max_abs_diff(&expect) < 1e-15);

        let diag = CMatrix::diag_real(&[1.0, 1.0, 0.0]);
        let m = span_submanifold(&[ray(&[1.0, 0.0, 0.0]), ray(&[0.0, 1.0, 0.0])]).unwrap();
        assert!(m.projector().matrix().max_abs_diff(&diag) < 1e-15);
        let m = span_submanifold(&[ray(&[1.0, 0.0, 0.0]), ray(&[1.0, 1.0, 0.0])]).unwrap();
        assert_eq!(m.rank(), 2);
        assert!(m.projector().matrix().max_abs_diff(&diag) < 1e-15);
        assert_eq!(span_submanifold(&[]).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn contains_examples() {
        let x = ray(&[1.0, 2.0, 0.5]);
        assert!(span_submanifold(std::slice::from_ref(&x))
            .unwrap()
            .contains(&x, 1e-12)
            .unwrap());
        let m = span_submanifold(&[ray(&[1.0, 0.0, 0.0]), ray(&[0.0, 1.0, 0.0])]).unwrap();
        assert!(!m.contains(&ray(&[0.0, 0.0, 1.0]), 1e-9).unwrap());
        let diagonal = ray(&[1.0, 1.0, 1.0]);
        assert!(!m.contains(&diagonal, 1e-9).unwrap());
        let residual = m.projector().residual(diagonal.rep()).unwrap();
        assert!((residual - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn totally_geodesic_examples() {
        let cfg = Config::default();
        let mut rng = Rng::new(4);
        let m = GeodesicSubmanifold::new(Projector::identity(3));
        assert!(is_totally_geodesic_closed(&cfg, &m, 50, &mut rng).unwrap());
        let line = span_submanifold(&[ray(&[1.0, 0.0, 0.0])]).unwrap();
        assert!(is_totally_geodesic_closed(&cfg, &line, 5, &mut rng).unwrap());
        let plane =
            span_submanifold(&[ray(&[1.0, 0.0, 2.0, 0.0]), ray(&[0.0, 1.0, 0.0, 1.0])]).unwrap();
        assert!(is_totally_geodesic_closed(&cfg, &plane, 200, &mut rng).unwrap());
    }

    #[test]
    fn superposition_examples() {
        let cfg = Config::default();
        let x = ray(&[1.0, 0.0]);
        let y = ray(&[0.0, 1.0]);
        let one = SuperpositionCoefficients::new(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let p = superposition_point(&cfg, &x, &y, &one).unwrap();
        assert!(p.approx_eq(&ray(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]), 1e-15));
        assert!(cfg.equator_of(&x, &p, 1e-12).unwrap());

        let phased = SuperpositionCoefficients::new(c(1.0, 0.0), c(0.0, 1.0)).unwrap();
        let p = superposition_point(&cfg, &x, &y, &phased).unwrap();
        let expect = Ray::from_entries(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert!(p.approx_eq(&expect, 1e-15));

        let tiny = SuperpositionCoefficients::new(c(1.0, 0.0), c(1e-9, 0.0)).unwrap();
        let p = superposition_point(&cfg, &x, &y, &tiny).unwrap();
        assert!(cfg.fs_distance(&x, &p).unwrap() < 1e-8);

        assert_eq!(
            SuperpositionCoefficients::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap_err(),
            Error::ZeroCoefficient
        );
        assert!(matches!(
            superposition_point(&cfg, &x, &ray(&[1.0, 1.0]), &one),
            Err(Error::NotAntipodal(_))
        ));
    }

    #[test]
    fn on_geodesic_examples() {
        let x = ray(&[1.0, 0.0, 0.0]);
        let xi = ray(&[0.0, 1.0, 0.0]);
        assert!(on_geodesic_test(&x, &xi, &ray(&[1.0, 1.0, 0.0]), 1e-10).unwrap());
        let off = Ray::from_entries(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        assert!(!on_geodesic_test(&x, &xi, &off, 1e-10).unwrap());
        assert!(on_geodesic_test(&x, &xi, &x, 1e-10).unwrap());
        assert!(on_geodesic_test(&x, &xi, &xi, 1e-10).unwrap());
        assert!(!on_geodesic_test(&x, &xi, &ray(&[1.0, 1.0, 1.0]), 1e-10).unwrap());
    }

    #[test]
    fn geolinear_fit_examples() {
        let cfg = Config::default();
        let v = TangentVector::new(
            ray(&[1.0, 0.0]),
            CVector::new(vec![c(0.0, 0.0), c(0.6, 0.8)]),
        )
        .unwrap();
        let fit = geolinear_fit(&cfg, |_| 1.0, &v, 16).unwrap();
        assert!(fit.a1.abs() < 1e-14 && fit.a2.abs() < 1e-14);
        assert!(fit.residual < 1e-14);
        assert!(matches!(
            geolinear_fit(&cfg, |_| 1.0, &v, 4),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn geodesic_csv_layout() {
        let cfg = Config::default();
        let g = Geodesic::unit(&e1_up()).unwrap();
        let rows = sample_geodesic(&cfg, &g, cfg.diameter(), 5);
        let csv = geodesic_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,re0,im0,re1,im1,distance");
        assert_eq!(lines.count(), 5);
        assert!(rows.windows(2).all(|w| w[0].distance < w[1].distance));
        assert!((rows[4].distance - cfg.diameter()).abs() < 1e-12);
    }
}
