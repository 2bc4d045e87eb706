//! The frequency operator `F_N = (1/N) Σ_i f_i`, with `f` the projector on
//! outcome `u`, both through its closed-form spectrum and by explicit
//! application in the `|alphabet|^N` tensor basis.

use nalgebra::{DMatrix, DVector};

use super::{count_distribution, RepeatedExperiment};
use crate::error::{Error, Result};

/// Largest `N` for which [`explicit_frequency_spectrum`] builds `Ψ_N`.
pub const EXPLICIT_SPECTRUM_LIMIT: u64 = 12;
/// Largest `N` for which the dense `2^N × 2^N` matrix of `F_N` is formed.
pub const DENSE_OPERATOR_LIMIT: u64 = 10;

/// Eigenvalues `m/N` of `F_N` paired with the presence `ρ(m:N|u)` of the
/// product state in each eigenspace.
pub fn frequency_operator_density(exp: &RepeatedExperiment) -> Vec<(f64, f64)> {
    let n = exp.repetitions() as f64;
    count_distribution(exp)
        .values()
        .iter()
        .enumerate()
        .map(|(m, &p)| (m as f64 / n, p))
        .collect()
}

/// Builds `Ψ_N = ⊗ Σ_b c_b|b⟩` over the full outcome alphabet (real
/// amplitudes `c_b = √ρ_b`), applies `F_N` site by site, and reads the
/// spectral measure off `F_N Ψ_N = Σ_s λ_s Ψ_N(s) |s⟩`.
pub fn explicit_frequency_spectrum(exp: &RepeatedExperiment) -> Result<Vec<(f64, f64)>> {
    let n = exp.repetitions();
    if n > EXPLICIT_SPECTRUM_LIMIT {
        return Err(Error::SizeGuard {
            what: "explicit frequency operator N",
            bound: EXPLICIT_SPECTRUM_LIMIT,
        });
    }
    let d = exp.presences().len();
    let dim = (0..n).try_fold(1usize, |acc, _| {
        acc.checked_mul(d)
            .filter(|&t| t <= super::ENUMERATION_LIMIT as usize)
    });
    let dim = dim.ok_or(Error::SizeGuard {
        what: "tensor dimension |alphabet|^N",
        bound: super::ENUMERATION_LIMIT,
    })?;
    let n = n as usize;
    let u = exp.focus_position();

    let site: Vec<f64> = exp.presences().values().iter().map(|p| p.sqrt()).collect();
    let psi: Vec<f64> = (0..dim)
        .map(|s| digits(s, d, n).map(|b| site[b]).product())
        .collect();

    let mut f_psi = vec![0.0; dim];
    for i in 0..n {
        let stride = d.pow((n - 1 - i) as u32);
        for (s, out) in f_psi.iter_mut().enumerate() {
            if (s / stride) % d == u {
                *out += psi[s] / n as f64;
            }
        }
    }

    let mut density = vec![0.0; n + 1];
    for (s, (&a, &fa)) in psi.iter().zip(&f_psi).enumerate() {
        if a == 0.0 {
            continue;
        }
        let scaled = fa / a * n as f64;
        let m = scaled.round();
        debug_assert!((scaled - m).abs() < 1e-9, "state {s} is not an eigenvector");
        density[m as usize] += a * a;
    }
    Ok(density
        .into_iter()
        .enumerate()
        .map(|(m, p)| (m as f64 / n as f64, p))
        .collect())
}

fn digits(mut s: usize, d: usize, n: usize) -> impl Iterator<Item = usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = s % d;
        s /= d;
    }
    out.into_iter()
}

/// Dense `F_N` on `N` two-level sites (`u` = basis state 0), assembled from
/// Kronecker products `I ⊗ … ⊗ f ⊗ … ⊗ I`.
pub fn dense_frequency_operator(repetitions: u64) -> Result<DMatrix<f64>> {
    if repetitions == 0 || repetitions > DENSE_OPERATOR_LIMIT {
        return Err(Error::SizeGuard {
            what: "dense frequency operator N",
            bound: DENSE_OPERATOR_LIMIT,
        });
    }
    let n = repetitions as usize;
    let f = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let id = DMatrix::<f64>::identity(2, 2);
    let dim = 1 << n;
    let mut total = DMatrix::zeros(dim, dim);
    for i in 0..n {
        let mut term = DMatrix::<f64>::identity(1, 1);
        for j in 0..n {
            term = term.kronecker(if i == j { &f } else { &id });
        }
        total += term;
    }
    Ok(total / n as f64)
}

/// `‖(F_N - ρ_u)Ψ_N‖²` by dense matrix-vector product on the reduced
/// two-outcome product state `(√ρ_u, √ρ_¬u)^⊗N`.
pub fn explicit_finkelstein_norm(exp: &RepeatedExperiment) -> Result<f64> {
    let f = dense_frequency_operator(exp.repetitions())?;
    let single = DVector::from_column_slice(&[exp.rho_u().sqrt(), exp.rho_not_u().sqrt()]);
    let mut psi = DVector::from_element(1, 1.0);
    for _ in 0..exp.repetitions() {
        psi = psi.kronecker(&single);
    }
    let shifted = &f * &psi - &psi * exp.rho_u();
    Ok(shifted.norm_squared())
}
