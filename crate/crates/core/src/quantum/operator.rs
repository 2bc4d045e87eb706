use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::state::StateVector;
use crate::error::{Error, Result};

/// Tolerance on `|H_ij - conj(H_ji)|`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense Hermitian matrix (units of the observable; `ħ = 1` for Hamiltonians).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    entries: DMatrix<Complex64>,
}

impl HermitianOperator {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        if entries.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        let deviation = hermitian_deviation(&entries);
        if !(deviation <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { entries })
    }

    /// Row-major square matrix.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Self::new(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// Pauli `σ_x` scaled by `strength`.
    pub fn sigma_x(strength: f64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        let s = Complex64::new(strength, 0.0);
        Self {
            entries: DMatrix::from_row_slice(2, 2, &[z, s, s, z]),
        }
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(dim, dim))
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// `exp(-i·H·t)` through the eigendecomposition `H = V Λ V†`.
    pub fn propagator(&self, duration: f64) -> Result<DMatrix<Complex64>> {
        if !duration.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "duration {duration} is not finite"
            )));
        }
        let eig = SymmetricEigen::new(self.entries.clone());
        let phases = DVector::from_iterator(
            eig.eigenvalues.len(),
            eig.eigenvalues
                .iter()
                .map(|&lambda| Complex64::from_polar(1.0, -lambda * duration)),
        );
        let v = &eig.eigenvectors;
        let mut scaled = v.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        Ok(scaled * v.adjoint())
    }
}

fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            // NaN poisons the max so the caller rejects it
            if d.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(d);
        }
    }
    worst
}

/// Unitary evolution `exp(-i H t)|ψ⟩` with `ħ = 1`.
pub fn evolve(
    state: &StateVector,
    hamiltonian: &HermitianOperator,
    duration: f64,
) -> Result<StateVector> {
    if hamiltonian.dimension() != state.dimension() {
        return Err(Error::DimensionMismatch {
            expected: state.dimension(),
            found: hamiltonian.dimension(),
        });
    }
    let u = hamiltonian.propagator(duration)?;
    let psi = DVector::from_column_slice(state.amplitudes());
    let out = u * psi;
    Ok(state.with_amplitudes(out.iter().copied().collect()))
}
