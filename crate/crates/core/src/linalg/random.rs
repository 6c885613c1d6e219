use num_complex::Complex64;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::eigen::eig_hermitian;
use super::matrix::CMatrix;
use super::vector::CVector;
use crate::error::{Error, Result};

/// Seeded random stream.
///
/// A root stream is identified by its seed; [`Rng::split`] derives an
/// independent stream per trial index, so parallel trials reproduce the same
/// draws regardless of scheduling.
#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream for `index`; does not advance `self`.
    pub fn split(&self, index: u64) -> Rng {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(index.wrapping_add(1));
        Rng {
            seed: self.seed,
            inner,
        }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `lo..hi`.
    pub fn index_in(&mut self, lo: usize, hi: usize) -> usize {
        self.inner.random_range(lo..hi)
    }

    pub fn gaussian(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Standard complex Gaussian with independent N(0, 1) real and imaginary parts.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let re = self.gaussian();
        let im = self.gaussian();
        Complex64::new(re, im)
    }

    pub fn gaussian_vector(&mut self, dim: usize) -> CVector {
        CVector::new((0..dim).map(|_| self.complex_gaussian()).collect())
    }

    /// Unitarily invariant random unit vector.
    pub fn random_ray(&mut self, dim: usize) -> Result<CVector> {
        check_dim(dim)?;
        loop {
            let v = self.gaussian_vector(dim);
            let norm = v.norm();
            if norm > 1e-300 {
                return Ok(v.scale_real(1.0 / norm));
            }
        }
    }

    /// `(G + G^†) / 2` for a matrix `G` of i.i.d. standard complex Gaussians.
    pub fn random_hermitian(&mut self, dim: usize) -> Result<CMatrix> {
        check_dim(dim)?;
        let g = CMatrix::from_fn(dim, |_, _| self.complex_gaussian());
        let mut h = CMatrix::zeros(dim);
        for i in 0..dim {
            h[(i, i)] = Complex64::new(g[(i, i)].re, 0.0);
            for j in i + 1..dim {
                let z = (g[(i, j)] + g[(j, i)].conj()) * 0.5;
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        Ok(h)
    }

    /// Unitary built from the eigenvectors of a random Hermitian matrix.
    pub fn random_unitary(&mut self, dim: usize) -> Result<CMatrix> {
        let h = self.random_hermitian(dim)?;
        Ok(eig_hermitian(&h)?.unitary())
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall(dim));
    }
    Ok(())
}
