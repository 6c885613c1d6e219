//! Observables as functions on projective space.
//!
//! A Hermitian operator `A` induces the expectation function `<A>` and its
//! Hamiltonian vector field, whose chart representative at `phi` is
//! `-(i/hbar) (1 - P_phi) A phi`. With this sign the field generates the
//! projectivized Schrödinger group `exp(-i t A / hbar)`, and
//! `omega(v_A, v_B) = <-(i/hbar) [A, B]>`.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, CMatrix, CVector, EigenDecomposition};
use crate::projective::{Config, Ray, TangentVector};

const HERMITIAN_TOL: f64 = 1e-10;

/// Bounded self-adjoint operator.
#[derive(Clone, Debug, Serialize)]
pub struct Observable {
    matrix: CMatrix,
    /// Computed on first use.
    #[serde(skip)]
    eigen: OnceLock<EigenDecomposition>,
}

impl PartialEq for Observable {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl Observable {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let defect = matrix.hermitian_defect();
        if defect > HERMITIAN_TOL * matrix.max_abs() {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self::wrap(matrix))
    }

    fn wrap(matrix: CMatrix) -> Self {
        Self {
            matrix,
            eigen: OnceLock::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::wrap(CMatrix::identity(dim))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self::wrap(CMatrix::diag_real(values))
    }

    pub fn pauli_x() -> Self {
        Self::wrap(CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap())
    }

    pub fn pauli_y() -> Self {
        let i = Complex64::i();
        Self::wrap(CMatrix::from_fn(2, |r, c| match (r, c) {
            (0, 1) => -i,
            (1, 0) => i,
            _ => Complex64::new(0.0, 0.0),
        }))
    }

    pub fn pauli_z() -> Self {
        Self::diagonal(&[1.0, -1.0])
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        self.eigen
            .get_or_init(|| eig_hermitian(&self.matrix).expect("observable is Hermitian"))
    }

    fn check(&self, x: &Ray) -> Result<()> {
        if self.dim() != x.dim() {
            return Err(Error::DimensionMismatch(self.dim(), x.dim()));
        }
        Ok(())
    }

    /// `A phi` together with `<A>` and the horizontal part `(1 - P) A phi`.
    fn split(&self, phi: &CVector) -> (f64, CVector) {
        let a_phi = self.matrix.mul_vec(phi);
        let mean = phi.dot(&a_phi).re;
        let eta = a_phi.axpy(Complex64::new(-mean, 0.0), phi);
        let eta = eta.reject_from(phi);
        (mean, eta)
    }
}

/// Expectation `<A>_x = (A phi | phi)`.
pub fn expectation(a: &Observable, x: &Ray) -> Result<f64> {
    a.check(x)?;
    Ok(a.matrix.quadratic_form(x.rep()))
}

/// Hamiltonian (Killing) vector field of `<A>` at `x`.
pub fn hamiltonian_field(cfg: &Config, a: &Observable, x: &Ray) -> Result<TangentVector> {
    a.check(x)?;
    let (_, eta) = a.split(x.rep());
    Ok(TangentVector::from_parts_unchecked(
        x.clone(),
        eta.scale(Complex64::new(0.0, -1.0 / cfg.hbar)),
    ))
}

/// Poisson bracket `{<A>, <B>}(x) = omega(v_A, v_B)`.
pub fn poisson(cfg: &Config, a: &Observable, b: &Observable, x: &Ray) -> Result<f64> {
    let va = hamiltonian_field(cfg, a, x)?;
    let vb = hamiltonian_field(cfg, b, x)?;
    cfg.omega(&va, &vb)
}

/// `<-(i/hbar) [A, B]>_x`, computed from the operator product.
pub fn commutator_expectation(
    cfg: &Config,
    a: &Observable,
    b: &Observable,
    x: &Ray,
) -> Result<f64> {
    a.check(x)?;
    b.check(x)?;
    let comm = a.matrix.commutator(&b.matrix)?;
    let value = x.rep().dot(&comm.mul_vec(x.rep())) * Complex64::new(0.0, -1.0 / cfg.hbar);
    Ok(value.re)
}

/// Dispersion `||A phi - <A> phi||`.
pub fn dispersion(a: &Observable, x: &Ray) -> Result<f64> {
    a.check(x)?;
    Ok(a.split(x.rep()).1.norm())
}

/// Dispersion of a vector field at a point, `sqrt(hbar/2) |v|_g`.
pub fn field_dispersion(cfg: &Config, v: &TangentVector) -> f64 {
    (cfg.hbar / 2.0).sqrt() * cfg.norm_g(v)
}

/// Both sides of the Robertson-Heisenberg inequality at one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeisenbergCheck {
    /// `Delta A * Delta B`.
    pub lhs: f64,
    /// `|(phi | [A, B] phi)| / 2`.
    pub rhs: f64,
    pub slack: f64,
}

pub fn heisenberg_check(a: &Observable, b: &Observable, x: &Ray) -> Result<HeisenbergCheck> {
    a.check(x)?;
    b.check(x)?;
    let phi = x.rep();
    let lhs = dispersion(a, x)? * dispersion(b, x)?;
    let a_phi = a.matrix.mul_vec(phi);
    let b_phi = b.matrix.mul_vec(phi);
    // (phi|[A,B]phi) = (A phi|B phi) - (B phi|A phi)
    let comm = a_phi.dot(&b_phi) - b_phi.dot(&a_phi);
    let rhs = 0.5 * comm.norm();
    Ok(HeisenbergCheck {
        lhs,
        rhs,
        slack: lhs - rhs,
    })
}

/// Observable whose Killing field at `x` is `J v_A(x)`, saturating the
/// uncertainty bound against `A` at that point.
pub fn strong_hup_partner(a: &Observable, x: &Ray) -> Result<Observable> {
    a.check(x)?;
    let phi = x.rep();
    let (_, eta) = a.split(phi);
    if eta.norm() <= 1e-12 {
        return Err(Error::ZeroDispersion);
    }
    let i = Complex64::i();
    let m = &CMatrix::outer(&eta, phi).scale(i) - &CMatrix::outer(phi, &eta).scale(i);
    Ok(Observable::wrap(m))
}

/// Observable whose Killing field at the base of `v` equals `v`.
pub fn killing_generator(cfg: &Config, v: &TangentVector) -> Observable {
    let phi = v.base().rep();
    let eta = v.rep().scale(Complex64::new(0.0, cfg.hbar));
    let m = &CMatrix::outer(&eta, phi) + &CMatrix::outer(phi, &eta);
    Observable::wrap(m)
}

/// Exact flow `exp(-i t A / hbar)` of the Killing field of `<A>`.
#[derive(Clone, Debug)]
pub struct KillingFlow {
    hbar: f64,
    eigen: EigenDecomposition,
}

impl KillingFlow {
    pub fn new(cfg: &Config, a: &Observable) -> Self {
        Self {
            hbar: cfg.hbar,
            eigen: a.eigen().clone(),
        }
    }

    pub fn apply(&self, x: &Ray, t: f64) -> Result<Ray> {
        if x.dim() != self.eigen.dim() {
            return Err(Error::DimensionMismatch(self.eigen.dim(), x.dim()));
        }
        let mut out = CVector::zeros(x.dim());
        for (&lambda, v) in self.eigen.eigenvalues.iter().zip(&self.eigen.eigenvectors) {
            let phase = Complex64::from_polar(1.0, -t * lambda / self.hbar);
            out = out.axpy(phase * v.dot(x.rep()), v);
        }
        Ray::new(&out)
    }
}

pub fn killing_flow(cfg: &Config, a: &Observable, x: &Ray, t: f64) -> Result<Ray> {
    KillingFlow::new(cfg, a).apply(x, t)
}

/// Nonlinear observable `F = <A><B>`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlexibleObservable {
    pub a: Observable,
    pub b: Observable,
}

impl FlexibleObservable {
    pub fn new(a: Observable, b: Observable) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch(a.dim(), b.dim()));
        }
        Ok(Self { a, b })
    }

    pub fn value(&self, x: &Ray) -> Result<f64> {
        Ok(expectation(&self.a, x)? * expectation(&self.b, x)?)
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Horizontal velocity of the flow at an arbitrary unit representative.
    fn velocity(&self, hbar: f64, psi: &CVector) -> CVector {
        let (mean_a, eta_a) = self.a.split(psi);
        let (mean_b, eta_b) = self.b.split(psi);
        let eta = eta_b
            .scale_real(mean_a)
            .axpy(Complex64::new(mean_b, 0.0), &eta_a);
        eta.scale(Complex64::new(0.0, -1.0 / hbar))
    }
}

/// `v_F = <A> v_B + <B> v_A`.
pub fn flexible_field(cfg: &Config, f: &FlexibleObservable, x: &Ray) -> Result<TangentVector> {
    let va = hamiltonian_field(cfg, &f.a, x)?;
    let vb = hamiltonian_field(cfg, &f.b, x)?;
    vb.combine(expectation(&f.a, x)?, &va, expectation(&f.b, x)?)
}

/// Dispersion of the Hamiltonian field of `F`.
pub fn flexible_dispersion(cfg: &Config, f: &FlexibleObservable, x: &Ray) -> Result<f64> {
    Ok(field_dispersion(cfg, &flexible_field(cfg, f, x)?))
}

/// Sampled trajectory of a Hamiltonian flow.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowResult {
    pub trajectory: Vec<(f64, Ray)>,
    /// `max |F(x_t) - F(x_0)|` over the recorded states.
    pub conserved_drift: f64,
}

impl FlowResult {
    pub fn final_state(&self) -> &Ray {
        &self.trajectory.last().expect("trajectory is never empty").1
    }
}

/// Integrates the Hamiltonian flow of `F` with classical RK4 on the unit
/// sphere, renormalizing after every step.
pub fn flexible_flow(
    cfg: &Config,
    f: &FlexibleObservable,
    x0: &Ray,
    t_end: f64,
    step: f64,
) -> Result<FlowResult> {
    if !(step > 0.0) {
        return Err(Error::NonPositiveStep(step));
    }
    if x0.dim() != f.dim() {
        return Err(Error::DimensionMismatch(f.dim(), x0.dim()));
    }
    let steps = (t_end.abs() / step).ceil() as usize;
    let h = if steps == 0 {
        0.0
    } else {
        t_end / steps as f64
    };
    let f0 = f.value(x0)?;
    let hbar = cfg.hbar;
    let field = |psi: &CVector| -> CVector {
        let unit = psi.scale_real(1.0 / psi.norm());
        f.velocity(hbar, &unit)
    };

    let mut psi = x0.rep().clone();
    let mut trajectory = Vec::with_capacity(steps + 1);
    trajectory.push((0.0, x0.clone()));
    let mut drift: f64 = 0.0;
    for k in 1..=steps {
        let k1 = field(&psi);
        let k2 = field(&psi.axpy(Complex64::new(h / 2.0, 0.0), &k1));
        let k3 = field(&psi.axpy(Complex64::new(h / 2.0, 0.0), &k2));
        let k4 = field(&psi.axpy(Complex64::new(h, 0.0), &k3));
        let incr = k1
            .axpy(Complex64::new(2.0, 0.0), &k2)
            .axpy(Complex64::new(2.0, 0.0), &k3)
            .axpy(Complex64::new(1.0, 0.0), &k4);
        psi = psi.axpy(Complex64::new(h / 6.0, 0.0), &incr);
        psi = psi.scale_real(1.0 / psi.norm());
        let ray = Ray::new(&psi)?;
        drift = drift.max((f.value(&ray)? - f0).abs());
        trajectory.push((h * k as f64, ray));
    }
    Ok(FlowResult {
        trajectory,
        conserved_drift: drift,
    })
}
