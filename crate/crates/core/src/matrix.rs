//! Dense complex matrices and the spectral operations the toolkit needs.
//!
//! The eigensolver contract is defined by cross-checks rather than by the
//! algorithm: the returned multiset must reproduce the trace and the
//! determinant of the input, and compressions must only append zeros to the
//! spectrum. Internally the Schur decomposition of [`nalgebra`] does the
//! work; a non-converged decomposition is reported as an error carrying the
//! offending matrix.

use nalgebra::DMatrix;

use crate::Complex64;
use crate::error::{Error, Result};

/// Convergence threshold handed to the Schur iteration.
const SCHUR_EPS: f64 = 1e-14;
/// Iteration cap for the Schur decomposition; generous, the ensembles used
/// here converge in a small multiple of the dimension.
const SCHUR_MAX_ITER: usize = 100_000;

/// Dense complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from a row-major list of entries.
    pub fn from_rows(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(
                "matrix dimensions must be positive".into(),
            ));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Self::try_from_dmatrix(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Wraps a [`DMatrix`], validating that every entry is finite.
    pub fn try_from_dmatrix(data: DMatrix<Complex64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidInput(
                "matrix dimensions must be positive".into(),
            ));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self { data })
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    pub(crate) fn from_dmatrix_unchecked(data: DMatrix<Complex64>) -> Self {
        Self { data }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        self.data.diagonal().sum()
    }

    pub fn determinant(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::InvalidInput(
                "determinant requires a square matrix".into(),
            ));
        }
        Ok(self.data.clone().lu().determinant())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(Self {
            data: &self.data * &rhs.data,
        })
    }

    /// Largest absolute entry of `A - I`; cheap unitarity diagnostic.
    pub fn max_deviation_from_identity(&self) -> f64 {
        let n = self.rows().min(self.cols());
        let mut max = 0.0f64;
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let target = if i == j && i < n && j < n {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                max = max.max((self.data[(i, j)] - target).norm());
            }
        }
        max
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.data
            .clone()
            .singular_values()
            .iter()
            .fold(0.0f64, |acc, s| acc.max(*s))
    }

    /// Top-left `n x n` block of a square matrix, `n < m`.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        let m = self.rows();
        if !self.is_square() {
            return Err(Error::InvalidInput(
                "truncation requires a square matrix".into(),
            ));
        }
        if n == 0 || n >= m {
            return Err(Error::InvalidTruncation { m, n });
        }
        Ok(Self {
            data: self.data.view((0, 0), (n, n)).into_owned(),
        })
    }

    /// Compression `Q A Q` with `Q = diag(1 x n, 0 x (m-n))`: the top-left
    /// `n x n` block of `A` embedded in an otherwise zero `m x m` matrix.
    /// Its spectrum is the truncation spectrum plus `m - n` zeros.
    pub fn projection_product(&self, n: usize) -> Result<Self> {
        let m = self.rows();
        if !self.is_square() {
            return Err(Error::InvalidInput(
                "compression requires a square matrix".into(),
            ));
        }
        if n == 0 || n >= m {
            return Err(Error::InvalidTruncation { m, n });
        }
        let mut out = DMatrix::zeros(m, m);
        out.view_mut((0, 0), (n, n))
            .copy_from(&self.data.view((0, 0), (n, n)));
        Ok(Self { data: out })
    }

    /// All eigenvalues with multiplicity, in no particular order.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        if !self.is_square() {
            return Err(Error::InvalidInput(
                "eigenvalues require a square matrix".into(),
            ));
        }
        let schur = nalgebra::linalg::Schur::try_new(self.data.clone(), SCHUR_EPS, SCHUR_MAX_ITER);
        let eigs = schur.and_then(|s| s.eigenvalues());
        match eigs {
            Some(v) => Ok(v.iter().copied().collect()),
            None => Err(Error::EigensolverFailure {
                rows: self.rows(),
                cols: self.cols(),
                matrix: Box::new(self.data.clone()),
            }),
        }
    }
}

/// Greedy nearest-pair matching between two eigenvalue multisets.
///
/// Both lists are sorted by modulus, then argument; each element of `a` is
/// paired with the nearest unused element of `b`. Returns the largest
/// pairing distance. Adequate for the small dimensions where spectra are
/// compared as multisets.
pub fn multiset_match_distance(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "multisets have different sizes: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let sort_key = |z: &Complex64| (z.norm(), z.arg());
    let mut xs: Vec<Complex64> = a.to_vec();
    let mut ys: Vec<Complex64> = b.to_vec();
    xs.sort_by(|p, q| sort_key(p).partial_cmp(&sort_key(q)).unwrap());
    ys.sort_by(|p, q| sort_key(p).partial_cmp(&sort_key(q)).unwrap());

    let mut used = vec![false; ys.len()];
    let mut worst = 0.0f64;
    for x in &xs {
        let mut best: Option<(usize, f64)> = None;
        for (j, y) in ys.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (x - y).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        let (j, d) = best.expect("equal lengths leave a candidate");
        used[j] = true;
        worst = worst.max(d);
    }
    Ok(worst)
}
