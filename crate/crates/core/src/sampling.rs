//! Ginibre and Haar-unitary sampling, and reproducible batch spectra.
//!
//! Haar measure is realized as the Q factor of a complex Ginibre matrix
//! with the diagonal of R rotated to positive reals, which makes the factor
//! unique and Haar-distributed. Batches draw one substream per sample
//! index, so results do not depend on the number of worker threads.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::Complex64;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::rng::sample_stream;

/// Eigenvalues of a contraction may exceed modulus one only by solver
/// roundoff; anything above this is treated as a numerical failure.
pub const CONTRACTION_TOL: f64 = 1e-8;

/// Draws a matrix with i.i.d. standard complex Gaussian entries
/// `(x + iy) / sqrt(2)`.
pub fn sample_ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(
        rows >= 1 && cols >= 1,
        "ginibre dimensions must be positive"
    );
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    // Row-major fill order is part of the determinism contract.
    let mut entries = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        entries.push(Complex64::new(re * inv_sqrt2, im * inv_sqrt2));
    }
    ComplexMatrix::from_dmatrix_unchecked(DMatrix::from_row_slice(rows, cols, &entries))
}

fn haar_from_ginibre(g: &ComplexMatrix) -> Option<ComplexMatrix> {
    let m = g.rows();
    let qr = g.as_dmatrix().clone().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..m {
        let d = r[(j, j)];
        let norm = d.norm();
        if norm < 1e-150 {
            return None;
        }
        let phase = d / norm;
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    Some(ComplexMatrix::from_dmatrix_unchecked(q))
}

/// Draws an `m x m` Haar-distributed unitary matrix.
///
/// A numerically singular Ginibre draw (probability zero) is regenerated
/// once from the same stream before giving up.
pub fn haar_unitary(m: usize, rng: &mut impl Rng) -> Result<ComplexMatrix> {
    assert!(m >= 1, "unitary dimension must be positive");
    for _ in 0..2 {
        let g = sample_ginibre(m, m, rng);
        if let Some(u) = haar_from_ginibre(&g) {
            return Ok(u);
        }
    }
    Err(Error::SingularDraw)
}

/// Parameters of one truncated-unitary batch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnsembleConfig {
    m: usize,
    n: usize,
    sample_count: usize,
    master_seed: u64,
}

impl EnsembleConfig {
    /// Validates `m > n >= 1` (so the aspect ratio `m/n` exceeds one) and a
    /// positive sample count.
    pub fn new(m: usize, n: usize, sample_count: usize, master_seed: u64) -> Result<Self> {
        if n < 1 || m <= n {
            return Err(Error::InvalidInput(format!(
                "ensemble requires m > n >= 1, got m = {m}, n = {n}"
            )));
        }
        if sample_count < 1 {
            return Err(Error::InvalidInput("sample count must be positive".into()));
        }
        Ok(Self {
            m,
            n,
            sample_count,
            master_seed,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.m
    }

    pub fn truncation_dim(&self) -> usize {
        self.n
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// The finite-size aspect ratio `m / n`.
    pub fn aspect_ratio(&self) -> f64 {
        self.m as f64 / self.n as f64
    }
}

/// Spectrum of one truncated draw.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSample {
    pub m: usize,
    pub n: usize,
    pub sample_index: u64,
    pub eigenvalues: Vec<Complex64>,
}

impl SpectralSample {
    fn validated(self) -> Result<Self> {
        if self.eigenvalues.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "expected {} eigenvalues, got {}",
                self.n,
                self.eigenvalues.len()
            )));
        }
        if let Some(z) = self
            .eigenvalues
            .iter()
            .find(|z| z.norm() > 1.0 + CONTRACTION_TOL)
        {
            return Err(Error::NumericalFailure(format!(
                "truncation eigenvalue {z} has modulus {} above the contraction bound",
                z.norm()
            )));
        }
        Ok(self)
    }
}

/// Draws the spectrum of one indexed sample of the batch.
pub fn draw_sample(config: &EnsembleConfig, sample_index: u64) -> Result<SpectralSample> {
    let mut rng = sample_stream(config.master_seed, sample_index);
    let u = haar_unitary(config.m, &mut rng)?;
    let t = u.truncate(config.n)?;
    let eigenvalues = t.eigenvalues()?;
    SpectralSample {
        m: config.m,
        n: config.n,
        sample_index,
        eigenvalues,
    }
    .validated()
}

/// Draws the whole batch, distributing sample indices over the current
/// rayon pool. Output order and content depend only on the config.
pub fn sample_spectra(config: &EnsembleConfig) -> Result<Vec<SpectralSample>> {
    (0..config.sample_count as u64)
        .into_par_iter()
        .map(|idx| draw_sample(config, idx))
        .collect()
}
