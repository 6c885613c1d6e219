//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies a real Givens rotation that annihilates it. Sweeps
//! visit pivots in row-major order, so the output is a deterministic function of
//! the input bits. Iteration stops once the off-diagonal Frobenius mass falls
//! below `1e-14 * ||A||_F` or a full sweep performs no rotation.

use num_complex::Complex64;

use super::matrix::CMatrix;
use super::vector::CVector;
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;
const OFF_DIAGONAL_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<CVector>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Unitary whose columns are the eigenvectors.
    pub fn unitary(&self) -> CMatrix {
        CMatrix::from_columns(&self.eigenvectors)
    }

    /// `sum_i f(lambda_i) v_i v_i^†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n);
        for (&lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(lambda);
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        out
    }

    /// `sum_i lambda_i v_i v_i^†`.
    pub fn reconstruct(&self) -> CMatrix {
        self.map_spectrum(|l| Complex64::new(l, 0.0))
    }

    /// Projector onto the span of eigenvectors whose eigenvalue satisfies `keep`.
    pub fn spectral_projector(&self, keep: impl Fn(f64) -> bool) -> CMatrix {
        self.map_spectrum(|l| Complex64::new(if keep(l) { 1.0 } else { 0.0 }, 0.0))
    }
}

/// Diagonalizes a Hermitian matrix.
pub fn eig_hermitian(a: &CMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    let scale = a.max_abs();
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(defect));
    }

    // Work on the exactly Hermitian part so rounding in the input cannot bias the sweep.
    let mut m = CMatrix::from_fn(n, |i, j| {
        if i == j {
            Complex64::new(a[(i, i)].re, 0.0)
        } else {
            (a[(i, j)] + a[(j, i)].conj()) * 0.5
        }
    });
    let mut vecs = CMatrix::identity(n);
    let frob = m.frobenius();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) <= OFF_DIAGONAL_TOL * frob {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                rotated |= rotate(&mut m, &mut vecs, p, q);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = order
        .iter()
        .map(|&j| canonical_phase(vecs.column(j)))
        .collect();
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(m: &CMatrix) -> f64 {
    let n = m.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += m[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Annihilates `m[p][q]`; returns false when the pivot is already negligible.
fn rotate(m: &mut CMatrix, vecs: &mut CMatrix, p: usize, q: usize) -> bool {
    let apq = m[(p, q)];
    let r = apq.norm();
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    if r == 0.0 {
        return false;
    }
    if r <= f64::EPSILON * 0.5 * (app.abs().sqrt() * aqq.abs().sqrt()) {
        m[(p, q)] = Complex64::new(0.0, 0.0);
        m[(q, p)] = Complex64::new(0.0, 0.0);
        return false;
    }

    let phase = apq / r;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // U = diag(1, conj(phase)) * [[c, s], [-s, c]]
    let upp = Complex64::new(c, 0.0);
    let upq = Complex64::new(s, 0.0);
    let uqp = phase.conj() * -s;
    let uqq = phase.conj() * c;

    let n = m.dim();
    // columns: M <- M U
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * upp + mkq * uqp;
        m[(k, q)] = mkp * upq + mkq * uqq;
        let vkp = vecs[(k, p)];
        let vkq = vecs[(k, q)];
        vecs[(k, p)] = vkp * upp + vkq * uqp;
        vecs[(k, q)] = vkp * upq + vkq * uqq;
    }
    // rows: M <- U^† M
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = upp.conj() * mpk + uqp.conj() * mqk;
        m[(q, k)] = upq.conj() * mpk + uqq.conj() * mqk;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
    true
}

/// Rotates the global phase so the first non-negligible entry is real positive.
pub(crate) fn canonical_phase(v: CVector) -> CVector {
    match v.entries().iter().find(|z| z.norm() > 1e-12) {
        Some(lead) => {
            let unit = lead.conj() / lead.norm();
            v.scale(unit)
        }
        None => v,
    }
}
