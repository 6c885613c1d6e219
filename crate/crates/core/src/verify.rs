//! Seeded verification suites.
//!
//! Every suite draws `trials` independent random instances, one stream per
//! trial index, and checks the defining identities of one part of the library
//! against direct linear-algebra computations. Each check carries its own
//! tolerance; a trial reports its worst error as a multiple of that tolerance,
//! and the suite converts the worst multiple back into units of the suite
//! tolerance. A suite passes when `max_violation <= tolerance`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geodesics::{
    exp_map, geolinear_fit, log_map, on_geodesic_test, span_submanifold, superposition_point,
    Geodesic, SuperpositionCoefficients,
};
use crate::linalg::{CMatrix, Rng};
use crate::observables::{
    commutator_expectation, dispersion, expectation, field_dispersion, flexible_dispersion,
    flexible_field, flexible_flow, hamiltonian_field, heisenberg_check, killing_generator, poisson,
    strong_hup_partner, FlexibleObservable, KillingFlow, Observable,
};
use crate::probability::{
    born, distance_to_submanifold, geometric_born, logic_join, logic_meet, logic_not, measure_eval,
    transition_prob, DensityOperator,
};
use crate::projective::{symmetry_at, Config, Ray, TangentVector};
use crate::projector::{Projector, PIVOT_TOL};
use crate::spectral::{
    extremal_eigen, quotient_apply, spectral_submanifold, variance_minimize, Interval, Sense,
    SolverOptions,
};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "QGEO_THREADS";

/// Rays per generator in the distance-preservation check.
const KILLING_RAYS: usize = 50;
/// Geodesics tried per pair before declaring `<A><B>` geolinear.
const FLEXIBLE_GEODESICS: usize = 200;
const FIT_SAMPLES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Metric,
    Geodesic,
    Superposition,
    Geolinear,
    Killing,
    Heisenberg,
    StrongHup,
    Poisson,
    Spectral,
    Born,
    Logic,
    All,
}

impl Suite {
    /// Every concrete suite, in the order `all` runs them.
    pub const COMPONENTS: [Suite; 11] = [
        Suite::Metric,
        Suite::Geodesic,
        Suite::Superposition,
        Suite::Geolinear,
        Suite::Killing,
        Suite::Heisenberg,
        Suite::StrongHup,
        Suite::Poisson,
        Suite::Spectral,
        Suite::Born,
        Suite::Logic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Metric => "metric",
            Suite::Geodesic => "geodesic",
            Suite::Superposition => "superposition",
            Suite::Geolinear => "geolinear",
            Suite::Killing => "killing",
            Suite::Heisenberg => "heisenberg",
            Suite::StrongHup => "strong-hup",
            Suite::Poisson => "poisson",
            Suite::Spectral => "spectral",
            Suite::Born => "born",
            Suite::Logic => "logic",
            Suite::All => "all",
        }
    }

    /// Default pass threshold. For `all` it is a ratio to each component's own tolerance.
    pub fn tolerance(self) -> f64 {
        match self {
            Suite::Metric => 1e-12,
            Suite::Geodesic => 1e-10,
            Suite::Superposition => 1e-12,
            Suite::Geolinear => 1e-10,
            Suite::Killing => 1e-10,
            Suite::Heisenberg => 1e-12,
            Suite::StrongHup => 1e-10,
            Suite::Poisson => 1e-12,
            Suite::Spectral => 1e-8,
            Suite::Born => 1e-10,
            Suite::Logic => 1e-10,
            Suite::All => 1.0,
        }
    }

    fn trial(self, cfg: &Config, dim: usize, rng: &mut Rng) -> Result<f64> {
        let mut w = Worst::default();
        match self {
            Suite::Metric => metric_trial(cfg, dim, rng, &mut w)?,
            Suite::Geodesic => geodesic_trial(cfg, dim, rng, &mut w)?,
            Suite::Superposition => superposition_trial(cfg, dim, rng, &mut w)?,
            Suite::Geolinear => geolinear_trial(cfg, dim, rng, &mut w)?,
            Suite::Killing => killing_trial(cfg, dim, rng, &mut w)?,
            Suite::Heisenberg => heisenberg_trial(cfg, dim, rng, &mut w)?,
            Suite::StrongHup => strong_hup_trial(cfg, dim, rng, &mut w)?,
            Suite::Poisson => poisson_trial(cfg, dim, rng, &mut w)?,
            Suite::Spectral => spectral_trial(cfg, dim, rng, &mut w)?,
            Suite::Born => born_trial(cfg, dim, rng, &mut w)?,
            Suite::Logic => logic_trial(dim, rng, &mut w)?,
            Suite::All => unreachable!("`all` has no trials of its own"),
        }
        Ok(w.0)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::COMPONENTS
            .iter()
            .chain(&[Suite::All])
            .copied()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown suite {s:?}")))
    }
}

/// Parameters of one verification run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyParams {
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub hbar: f64,
    /// Overrides the suite's default tolerance.
    pub tol: Option<f64>,
}

impl Default for VerifyParams {
    fn default() -> Self {
        Self {
            dim: 4,
            trials: 100,
            seed: 0,
            hbar: 1.0,
            tol: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    pub hbar: f64,
    pub tolerance: f64,
    pub max_violation: f64,
    pub pass: bool,
    pub wall_time_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<SuiteReport>>,
}

/// Runs `suite`, honouring the thread cap in [`THREADS_ENV`].
pub fn run_suite(suite: Suite, params: &VerifyParams) -> Result<SuiteReport> {
    if params.dim < 2 {
        return Err(Error::DimensionTooSmall(params.dim));
    }
    let cfg = Config::new(params.hbar)?;
    thread_pool()?.install(|| run_in_pool(suite, &cfg, params))
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let n: usize = value.trim().parse().map_err(|_| {
            Error::Malformed(format!("{THREADS_ENV}={value:?} is not a thread count"))
        })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Malformed(format!("cannot start thread pool: {e}")))
}

fn run_in_pool(suite: Suite, cfg: &Config, params: &VerifyParams) -> Result<SuiteReport> {
    let start = Instant::now();
    let tolerance = params.tol.unwrap_or_else(|| suite.tolerance());
    if suite == Suite::All {
        let components = Suite::COMPONENTS
            .iter()
            .map(|&s| {
                run_in_pool(
                    s,
                    cfg,
                    &VerifyParams {
                        tol: None,
                        ..*params
                    },
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let max_violation = components
            .iter()
            .map(|c| c.max_violation / c.tolerance)
            .fold(0.0, f64::max);
        return Ok(SuiteReport {
            suite: suite.name().into(),
            dim: params.dim,
            trials: params.trials,
            seed: params.seed,
            hbar: params.hbar,
            tolerance,
            max_violation,
            pass: max_violation <= tolerance && components.iter().all(|c| c.pass),
            wall_time_ms: elapsed_ms(start),
            components: Some(components),
        });
    }

    let root = Rng::new(params.seed);
    let ratios = (0..params.trials)
        .into_par_iter()
        .map(|i| suite.trial(cfg, params.dim, &mut root.split(i as u64)))
        .collect::<Result<Vec<f64>>>()?;
    let worst = ratios.into_iter().fold(0.0, f64::max);
    let max_violation = (worst * suite.tolerance()).min(f64::MAX);
    Ok(SuiteReport {
        suite: suite.name().into(),
        dim: params.dim,
        trials: params.trials,
        seed: params.seed,
        hbar: params.hbar,
        tolerance,
        max_violation,
        pass: max_violation <= tolerance,
        wall_time_ms: elapsed_ms(start),
        components: None,
    })
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis().try_into().unwrap_or(u64::MAX)
}

/// Largest error seen so far, as a multiple of the tolerance of its check.
#[derive(Default)]
struct Worst(f64);

impl Worst {
    fn within(&mut self, err: f64, tol: f64) {
        let ratio = if err.is_nan() {
            f64::MAX
        } else {
            err.abs() / tol
        };
        self.0 = self.0.max(ratio);
    }

    fn holds(&mut self, ok: bool) {
        if !ok {
            self.0 = self.0.max(2.0);
        }
    }

    /// Requires `observed > threshold`; a shortfall counts as at least one tolerance.
    fn exceeds(&mut self, observed: f64, threshold: f64) {
        if !(observed > threshold) {
            let shortfall = (threshold - observed.max(0.0)) / threshold;
            self.0 = self.0.max(1.0 + shortfall.max(0.0));
        }
    }
}

fn random_ray(rng: &mut Rng, dim: usize) -> Result<Ray> {
    Ray::new(&rng.random_ray(dim)?)
}

/// Random Hermitian matrix scaled so its spectrum stays of order one.
fn random_observable(rng: &mut Rng, dim: usize) -> Result<Observable> {
    Observable::new(
        rng.random_hermitian(dim)?
            .scale_real(1.0 / (dim as f64).sqrt()),
    )
}

/// Random Hermitian matrix of unit Frobenius norm.
fn unit_observable(rng: &mut Rng, dim: usize) -> Result<Observable> {
    let h = rng.random_hermitian(dim)?;
    let norm = h.frobenius();
    Observable::new(h.scale_real(1.0 / norm))
}

/// Random tangent vector of unit metric length.
fn random_tangent(cfg: &Config, rng: &mut Rng, x: &Ray) -> Result<TangentVector> {
    let v = TangentVector::horizontal(x, &rng.gaussian_vector(x.dim()))?;
    Ok(v.scale(1.0 / cfg.norm_g(&v)))
}

fn nonzero_scalar(rng: &mut Rng) -> Complex64 {
    loop {
        let c = rng.complex_gaussian();
        if c.norm() > 1e-3 {
            return c;
        }
    }
}

/// `(M + M^dagger) / 2`, removing rounding asymmetry from conjugated matrices.
fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + &m.adjoint()).scale_real(0.5)
}

fn conjugate(u: &CMatrix, m: &CMatrix) -> CMatrix {
    symmetrize(&u.mul_mat(m).mul_mat(&u.adjoint()))
}

fn apply_ray(u: &CMatrix, x: &Ray) -> Result<Ray> {
    Ray::new(&u.apply(x.rep())?)
}

fn metric_trial(cfg: &Config, dim: usize, rng: &mut Rng, w: &mut Worst) -> Result<()> {
    let x = random_ray(rng, dim)?;
    let y = random_ray(rng, dim)?;
    let z = random_ray(rng, dim)?;
    let v = random_tangent(cfg, rng, &x)?;
    let u = random_tangent(cfg, rng, &x)?;

    w.within(cfg.omega(&v, &u)? - cfg.metric_g(&v.j(), &u)?, 1e-12);
    w.within(cfg.metric_g(&v.j(), &u.j())? - cfg.metric_g(&v, &u)?, 1e-12);

    let dxy = cfg.fs_distance(&x, &y)?;
    let overlap = x.rep().dot(y.rep()).norm();
    if overlap < 0.9 {
        w.within(dxy - cfg.scale() * overlap.acos(), 1e-12);
    }

    let scaled = Ray::new(&x.rep().scale(nonzero_scalar(rng)))?;
    w.within(scaled.gap(&x), 1e-12);
    w.within(cfg.fs_distance(&scaled, &y)? - dxy, 1e-12);

    let unitary = rng.random_unitary(dim)?;
    let (ux, uy) = (apply_ray(&unitary, &x)?, apply_ray(&unitary, &y)?);
    w.within(cfg.fs_distance(&ux, &uy)? - dxy, 1e-12);

    let slack = dxy + cfg.fs_distance(&y, &z)? - cfg.fs_distance(&x, &z)?;
    w.within((-slack).max(0.0), 1e-10);

    let (sy, sz) = (symmetry_at(&x, &y)?, symmetry_at(&x, &z)?);
    w.within(cfg.fs_distance(&sy, &sz)? - cfg.fs_distance(&y, &z)?, 1e-12);
    w.within(symmetry_at(&x, &x)?.gap(&x), 1e-12);
    let hi = 0.5 * cfg.diameter() - 0.1;
    if hi > 0.0 {
        let r = rng.uniform_in((0.05f64).min(0.5 * hi), hi);
        let p = exp_map(cfg, &v.scale(r));
        w.exceeds(symmetry_at(&x, &p)?.gap(&p), 1e-6);
    }
    Ok(())
}

fn geodesic_trial(cfg: &Config, dim: usize, rng: &mut Rng, w: &mut Worst) -> Result<()> {
    let x = random_ray(rng, dim)?;
    let v = random_tangent(cfg, rng, &x)?;
    let c = Geodesic::unit(&v)?;

    let t = rng.uniform_in(0.0, cfg.diameter());
    w.within(cfg.fs_distance(&x, &c.eval(cfg, t))? - t, 1e-10);

    // horizontal part of the ambient acceleration of the horizontal lift
    let h = 1e-4;
    let t = rng.uniform_in(0.0, c.period(cfg));
    let centre = c.eval(cfg, t).rep().clone();
    let aligned = |s: f64| {
        let p = c.eval(cfg, s).rep().clone();
        let o = centre.dot(&p);
        p.scale(o.conj() / o.norm())
    };
    let accel =
        (&(&aligned(t + h) + &aligned(t - h)) - &centre.scale_real(2.0)).scale_real(1.0 / (h * h));
    w.within(accel.reject_from(&centre).norm(), 1e-6);

    let y = random_ray(rng, dim)?;
    if !x.is_antipodal(&y, 1e-8)? {
        let l = log_map(&x, &y)?;
        w.within(exp_map(cfg, &l).gap(&y), 1e-10);
        w.within(cfg.norm_g(&l) - cfg.fs_distance(&x, &y)?, 1e-10);
        w.holds(cfg.norm_g(&l) < cfg.injectivity_radius());
    }

    let antipode = Ray::new(v.rep())?;
    w.holds(matches!(log_map(&x, &antipode), Err(Error::CutLocus)));

    let r = rng.uniform_in(0.0, cfg.diameter());
    w.within(cfg.fs_distance(&x, &exp_map(cfg, &v.scale(r)))? - r, 1e-10);
    Ok(())
}

fn superposition_trial(cfg: &Config, dim: usize, rng: &mut Rng, w: &mut Worst) -> Result<()> {
    let x = random_ray(rng, dim)?;
    let y = Ray::new(&rng.gaussian_vector(dim).reject_from(x.rep()))?;
    let (alpha, beta) = (nonzero_scalar(rng), nonzero_scalar(rng));
    let coeffs = SuperpositionCoefficients::new(alpha, beta)?;

    let geometric = superposition_point(cfg, &x, &y, &coeffs)?;
    let algebraic = Ray::new(&x.rep().scale(alpha).axpy(beta, y.rep()))?;
    w.within(geometric.gap(&algebraic), 1e-12);

    let plane = span_submanifold(&[x.clone(), y.clone()])?;
    w.holds(plane.rank() == 2);
    let direction = TangentVector::horizontal(
        &x,
        &y.rep().scale(Complex64::from_polar(1.0, coeffs.theta())),
    )?;
    let c = Geodesic::unit(&direction)?;
    for _ in 0..4 {
        let t = rng.uniform_in(0.0, c.period(cfg));
        w.within(plane.projector().residual(c.eval(cfg, t).rep())?, 1e-9);
    }

    // conversely, a random point of the plane is reached from its own coefficients
    let chi = plane.sample(rng)?;
    let (a, b) = (x.overlap(&chi)?, y.overlap(&chi)?);
    if a.norm() > 1e-6 && b.norm() > 1e-6 {
        let hit = superposition_point(cfg, &x, &y, &SuperpositionCoefficients::new(a, b)?)?;
        w.within(hit.gap(&chi), 1e-12);
    }

    let r = rng.gaussian();
    let on = Ray::new(&x.rep().axpy(Complex64::new(r, 0.0), y.rep()))?;
    w.holds(on_geodesic_test(&x, &y, &on, 1e-9)?);
    let off = Ray::new(&x.rep().axpy(Complex64::new(0.0, 1.0 + r.abs()), y.rep()))?;
    w.holds(!on_geodesic_test(&x, &y, &off, 1e-9)?);
    Ok(())
}

fn geolinear_trial(cfg: &Config, dim: usize, rng: &mut Rng, w: &mut Worst) -> Result<()> {
    let a = random_observable(rng, dim)?;
    let x = random_ray(rng, dim)?;
    let v = random_tangent(cfg, rng, &x)?;
    let fit = geolinear_fit(
        cfg,
        |r| expectation(&a, r).expect("dimensions match"),
        &v,
        FIT_SAMPLES,
    )?;
    w.within(fit.residual, 1e-10);

    // coefficients read off directly from the matrix
    let phi = x.rep();
    let xi = v.rep().scale_real(1.0 / v.rep().norm());
    let a_xi = a.matrix().mul_vec(&xi);
    let a0 = expectation(&a, &x)?;
    let a1 = 2.0 * phi.dot(&a_xi).re;
    let a2 = xi.dot(&a_xi).re - a0;
    w.within(fit.a0 - a0, 1e-9);
    w.within(fit.a1 - a1, 1e-9);
    w.within(fit.a2 - a2, 1e-9);

    let b = loop {
        let b = random_observable(rng, dim)?;
        if a.matrix().commutator(b.matrix())?.frobenius() > 0.1 {
            break b;
        }
    };
    let product = FlexibleObservable::new(a, b)?;
    let mut worst_fit: f64 = 0.0;
    for _ in 0..FLEXIBLE_GEODESICS {
        let x = random_ray(rng, dim)?;
        let v = random_tangent(cfg, rng, &x)?;
        let fit = geolinear_fit(
            cfg,
            |r| product.value(r).expect("dimensions match"),
            &v,
            FIT_SAMPLES,
        )?;
        worst_fit = worst_fit.max(fit.residual);
        if worst_fit > 1e-4 {
            break;
        }
    }
    w.exceeds(worst_fit, 1e-4);
    Ok(())
}

/// Central difference of `f` along the geodesic through the base of `v`.
fn directional_derivative(
    cfg: &Config,
    f: impl Fn(&Ray) -> Result<f64>,
    v: &TangentVector,
    h: f64,
) -> Result<f64> {
    let forward = f(&exp_map(cfg, &v.scale(h)))?;
    let backward = f(&exp_map(cfg, &v.scale(-h)))?;
    Ok((forward - backward) / (2.0 * h))
}

fn max_distance_change(cfg: &Config, before: &[Ray], after: &[Ray]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..before.len() {
        for j in i + 1..before.len() {
            let d0 = cfg.fs_distance(&before[i], &before[j])?;
            let d1 = cfg.fs_distance(&after[i], &after[j])?;
            worst = worst.max((d1 - d0).abs());
        }
    }
    Ok(worst)
}

fn killing_trial(cfg: &Config, dim: usize, rng: &mut Rng, w: &mut Worst) -> Result<()> {
    let a = random_observable(rng, dim)?;
    let flow = KillingFlow::new(cfg, &a);
    let rays = (0..KILLING_RAYS)
        .map(|_| random_ray(rng, dim))
        .collect::<Result<Vec<_>>>()?;
    for t in [0.1, 1.0, 10.0] {
        let moved = rays
            .iter()
            .map(|x| flow.apply(x, t))
            .collect::<Result<Vec<_>>>()?;
        w.within(max_distance_change(cfg, &rays, &moved)?, 1e-10);
    }

    // the exact flow agrees with RK4 integration of the same field
    let unit = unit_observable(rng, dim)?;
    let linear = FlexibleObservable::new(unit.clone(), Observable::identity(dim))?;
    let x = &rays[0];
    let integrated = flexible_flow(cfg, &linear, x, cfg.hbar, 1e-2 * cfg.hbar)?;
    let exact = KillingFlow::new(cfg, &unit).apply(x, cfg.hbar)?;
    w.within(integrated.final_state().gap(&exact), 1e-8);

    // Hamiltonian identity df(u) = omega(v_f, u) for linear and product observables
    let b = random_observable(rng, dim)?;
    let product = FlexibleObservable::new(a.clone(), b)?;
    let u = random_tangent(cfg, rng, x)?;
    let h = 1e-5;
    let checks = [
        (
            directional_derivative(cfg, |r| expectation(&a, r), &u, h)?,
            hamiltonian_field(cfg, &a, x)?,
        ),
        (
            directional_derivative(cfg, |r| product.value(r), &u, h)?,
            flexible_field(cfg, &product, x)?,
        ),
    ];
    for (fd, field) in checks {
        let exact = cfg.omega(&field, &u)?;
        let scale = exact.abs().max(1e-3 * cfg.norm_g(&field) * cfg.norm_g(&u));
        w.within((fd - exact) / scale, 1e-6);
    }

    // every tangent vector is the Killing field of some observable
    let v = random_tangent(cfg, rng, x)?;
    let generated = hamiltonian_field(cfg, &killing_generator(cfg, &v), x)?;
    w.within(
        (generated.rep() - v.rep()).norm() / v.rep().norm().max(1.0),
        1e-12,
    );

    // the product observable generates a flow that is not an isometry
    let probes = &rays[..4];
    let moved = probes
        .iter()
        .map(|p| {
            Ok(flexible_flow(cfg, &product, p, cfg.hbar, 1e-2 * cfg.hbar)?
                .final_state()
                .clone())
        })
        .collect::<Result<Vec<_>>>()?;
    w.exceeds(max_distance_change(cfg, probes, &moved)?, 1e-3);
    Ok(())
}

fn heisenberg_trial(cfg: &Config, dim: usize, rng: &mut Rng, w: &mut Worst) -> Result<()> {
    let a = unit_observable(rng, dim)?;
    let b = unit_observable(rng, dim)?;
    let x = random_ray(rng, dim)?;
    let check = heisenberg_check(&a, &b, &x)?;
    w.within((-check.slack).max(0.0), 1e-12);

    let va = hamiltonian_field(cfg, &a, &x)?;
    let vb = hamiltonian_field(cfg, &b, &x)?;
    let half_hbar = 0.5 * cfg.hbar;
    w.within(
        check.lhs - half_hbar * cfg.norm_g(&va) * cfg.norm_g(&vb),
        1e-12,
    );
    w.within(check.rhs - half_hbar * cfg.omega(&va, &vb)?.abs(), 1e-12);
    w.within(field_dispersion(cfg, &va) - dispersion(&a, &x)?, 1e-12);

    // dispersion of <A><B> against its covariance-corrected expansion
    let (ea, eb) = (expectation(&a, &x)?, expectation(&b, &x)?);
    let (da, db) = (dispersion(&a, &x)?, dispersion(&b, &x)?);
    let jordan = Observable::new(a.matrix().jordan(b.matrix())?)?;
    let covariance = expectation(&jordan, &x)? - ea * eb;
    let expansion = eb * eb * da * da + ea * ea * db * db + 2.0 * ea * eb * covariance;
    let f = FlexibleObservable::new(a, b)?;
    w.within(
        flexible_dispersion(cfg, &f, &x)? - expansion.max(0.0).sqrt(),
        1e-10,
    );
    Ok(())
}

fn strong_hup_trial(cfg: &Config, dim: usize, rng: &mut Rng, w: &mut Worst) -> Result<()> {
    let a = unit_observable(rng, dim)?;
    let x = random_ray(rng, dim)?;
    let k = strong_hup_partner(&a, &x)?;
    let va = hamiltonian_field(cfg, &a, &x)?;
    let vk = hamiltonian_field(cfg, &k, &x)?;
    w.within(
        cfg.norm_g(&va) * cfg.norm_g(&vk) - cfg.omega(&va, &vk)?.abs(),
        1e-10,
    );
    w.within(heisenberg_check(&a, &k, &x)?.slack, 1e-10);
    w.within((vk.rep() - va.j().rep()).norm(), 1e-10);

    let eig = a.eigen();
    let index = rng.index_in(0, dim);
    let eigenray = Ray::new(&eig.eigenvectors[index])?;
    w.holds(matches!(
        strong_hup_partner(&a, &eigenray),
        Err(Error::ZeroDispersion)
    ));
    Ok(())
}

fn poisson_trial(cfg: &Config, dim: usize, rng: &mut Rng, w: &mut Worst) -> Result<()> {
    let a = unit_observable(rng, dim)?;
    let b = unit_observable(rng, dim)?;
    let x = random_ray(rng, dim)?;
    let bracket = poisson(cfg, &a, &b, &x)?;
    w.within(bracket - commutator_expectation(cfg, &a, &b, &x)?, 1e-12);

    let doubled = Config::new(2.0 * cfg.hbar)?;
    w.within(poisson(&doubled, &a, &b, &x)? - 0.5 * bracket, 1e-12);
    let d1 = field_dispersion(cfg, &hamiltonian_field(cfg, &a, &x)?);
    let d2 = field_dispersion(&doubled, &hamiltonian_field(&doubled, &a, &x)?);
    w.within(d1 - d2, 1e-12);
    Ok(())
}

fn spectral_trial(cfg: &Config, dim: usize, rng: &mut Rng, w: &mut Worst) -> Result<()> {
    let a = random_observable(rng, dim)?;
    let mu = a.eigen().eigenvalues.clone();
    let (lowest, highest) = (mu[0], mu[dim - 1]);
    let opts = SolverOptions {
        seed: rng.index_in(0, u32::MAX as usize) as u64,
        ..SolverOptions::default()
    };
    let x0 = random_ray(rng, dim)?;

    let min = extremal_eigen(cfg, &a, &x0, &opts, Sense::Min)?;
    let max = extremal_eigen(cfg, &a, &x0, &opts, Sense::Max)?;
    w.within(min.lambda - lowest, 1e-8);
    w.within(max.lambda - highest, 1e-8);
    for eigenray in [&min.eigenray, &max.eigenray] {
        w.within(cfg.norm_g(&hamiltonian_field(cfg, &a, eigenray)?), 1e-8);
    }

    let lambda = rng.uniform_in(lowest - 0.5, highest + 0.5);
    let margin = mu
        .iter()
        .map(|m| (m - lambda).powi(2))
        .fold(f64::INFINITY, f64::min);
    let near = variance_minimize(cfg, &a, lambda, &x0, &opts)?;
    w.within(near.value - margin, 1e-8);

    // <(A - lambda)^2> = dispersion^2 + (<A> - lambda)^2, so states whose mean
    // approaches a regular value keep dispersion^2 >= margin
    if dim <= 8 {
        let c = Geodesic::unit(&random_tangent(cfg, rng, &near.argmin)?)?;
        let grid = (0..16).map(|k| c.eval(cfg, c.period(cfg) * k as f64 / 16.0));
        let probes: Vec<Ray> = grid
            .chain(
                (0..16)
                    .map(|_| random_ray(rng, dim))
                    .collect::<Result<Vec<_>>>()?,
            )
            .collect();
        for p in &probes {
            let spread = dispersion(&a, p)?.powi(2) + (expectation(&a, p)? - lambda).powi(2);
            w.holds(spread >= margin - 1e-12);
        }
    }

    let eigenvalue = mu[rng.index_in(0, dim)];
    let hit = variance_minimize(cfg, &a, eigenvalue, &x0, &opts)?;
    w.within(hit.value, 1e-8);
    w.within(dispersion(&a, &hit.argmin)?, 1e-4);
    w.within(expectation(&a, &hit.argmin)? - eigenvalue, 1e-4);

    let scaled = Ray::new(&x0.rep().scale(nonzero_scalar(rng)))?;
    w.within(
        quotient_apply(a.matrix(), &scaled)?.gap(&quotient_apply(a.matrix(), &x0)?),
        1e-12,
    );

    let (p, q) = (
        rng.uniform_in(lowest, highest),
        rng.uniform_in(lowest, highest),
    );
    let interval = Interval::new(p.min(q), p.max(q))?;
    let m = spectral_submanifold(&a, interval)?;
    let proj = m.projector().matrix();
    w.within(proj.commutator(a.matrix())?.max_abs(), 1e-10);
    let eig = a.eigen();
    for (value, vector) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        if (value - interval.lo).abs() < 1e-8 || (value - interval.hi).abs() < 1e-8 {
            continue;
        }
        let image = proj.mul_vec(vector);
        if interval.contains(*value) {
            w.within((&image - vector).norm(), 1e-10);
        } else {
            w.within(image.norm(), 1e-10);
        }
    }
    Ok(())
}

fn random_density(rng: &mut Rng, dim: usize) -> Result<DensityOperator> {
    let count = rng.index_in(1, dim + 1);
    let rays = (0..count)
        .map(|_| random_ray(rng, dim))
        .collect::<Result<Vec<_>>>()?;
    let raw: Vec<f64> = (0..count).map(|_| rng.uniform_in(0.1, 1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|r| r / total).collect();
    DensityOperator::mixture(&weights, &rays)
}

fn born_trial(cfg: &Config, dim: usize, rng: &mut Rng, w: &mut Worst) -> Result<()> {
    let x = random_ray(rng, dim)?;
    let y = random_ray(rng, dim)?;
    let angle = cfg.fs_distance(&x, &y)? / cfg.scale();
    w.within(transition_prob(&x, &y)? - angle.cos().powi(2), 1e-12);

    // a random partition of the spectrum into closed intervals
    let a = random_observable(rng, dim)?;
    let state = random_density(rng, dim)?;
    let mu = a.eigen().eigenvalues.clone();
    let mut edges = vec![mu[0] - 1.0];
    for k in 0..dim - 1 {
        if mu[k + 1] - mu[k] > 1e-6 && rng.uniform() < 0.5 {
            edges.push(0.5 * (mu[k] + mu[k + 1]));
        }
    }
    edges.push(mu[dim - 1] + 1.0);
    let mut total = 0.0;
    for pair in edges.windows(2) {
        total += born(&a, &state, &[Interval::new(pair[0], pair[1])?])?;
    }
    w.within(total - 1.0, 1e-10);

    let (p, q) = (
        rng.uniform_in(mu[0], mu[dim - 1]),
        rng.uniform_in(mu[0], mu[dim - 1]),
    );
    let set = [Interval::new(p.min(q), p.max(q))?];
    let u = rng.random_unitary(dim)?;
    let moved_a = Observable::new(conjugate(&u, a.matrix()))?;
    let moved_w = DensityOperator::new(conjugate(&u, state.matrix()))?;
    w.within(
        born(&moved_a, &moved_w, &set)? - born(&a, &state, &set)?,
        1e-10,
    );

    let m = spectral_submanifold(&a, set[0])?;
    if !m.is_empty() {
        let trace = measure_eval(&DensityOperator::pure(&x), m.projector())?;
        w.within(geometric_born(cfg, &x, &m)? - trace, 1e-10);
        let d = distance_to_submanifold(cfg, &x, &m)?;
        for _ in 0..8 {
            let inside = m.sample(rng)?;
            w.within((d - cfg.fs_distance(&x, &inside)?).max(0.0), 1e-10);
        }
    }

    let other = random_density(rng, dim)?;
    let t = rng.uniform();
    let mixed =
        DensityOperator::new(&state.matrix().scale_real(t) + &other.matrix().scale_real(1.0 - t))?;
    let q = m.projector();
    let expected = t * measure_eval(&state, q)? + (1.0 - t) * measure_eval(&other, q)?;
    w.within(measure_eval(&mixed, q)? - expected, 1e-12);
    Ok(())
}

/// Span of a random number of Gaussian vectors.
fn random_projector(rng: &mut Rng, dim: usize) -> Result<Projector> {
    let rank = rng.index_in(1, dim + 1);
    let vectors: Vec<_> = (0..rank).map(|_| rng.gaussian_vector(dim)).collect();
    Projector::span(dim, &vectors, PIVOT_TOL)
}

fn logic_trial(dim: usize, rng: &mut Rng, w: &mut Worst) -> Result<()> {
    // orthomodular law for P <= Q arranged by drawing P inside the range of Q
    let q = random_projector(rng, dim)?;
    let sub_rank = rng.index_in(1, q.rank() + 1);
    let inside: Vec<_> = (0..sub_rank)
        .map(|_| {
            let coords: Vec<Complex64> = (0..q.rank()).map(|_| rng.complex_gaussian()).collect();
            q.embed(&coords)
        })
        .collect();
    let p = Projector::span(dim, &inside, PIVOT_TOL)?;
    w.holds(p.is_below(&q, 1e-10));
    let rebuilt = logic_join(&p, &logic_meet(&q, &logic_not(&p))?)?;
    w.within(rebuilt.matrix().max_abs_diff(q.matrix()), 1e-10);

    // a generic pair: intersection dimension, bounds and De Morgan
    let r = random_projector(rng, dim)?;
    let s = random_projector(rng, dim)?;
    let meet = logic_meet(&r, &s)?;
    let join = logic_join(&r, &s)?;
    w.holds(meet.rank() == (r.rank() + s.rank()).saturating_sub(dim));
    w.holds(join.rank() == (r.rank() + s.rank()).min(dim));
    w.holds(meet.is_below(&r, 1e-10) && meet.is_below(&s, 1e-10));
    w.holds(r.is_below(&join, 1e-10) && s.is_below(&join, 1e-10));
    let de_morgan = logic_join(&logic_not(&r), &logic_not(&s))?;
    w.within(
        logic_not(&meet).matrix().max_abs_diff(de_morgan.matrix()),
        1e-10,
    );
    Ok(())
}
