//! Reference computations that share no code with the library.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use presence_core::Complex64;

/// `ln k!` for `k = 0..=n`, by compensated running sums of `ln k`.
pub fn ln_factorials(n: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let (mut acc, mut carry) = (0.0f64, 0.0f64);
    out.push(0.0);
    for k in 1..=n {
        let x = (k as f64).ln();
        let t = acc + x;
        carry += if acc.abs() >= x.abs() {
            (acc - t) + x
        } else {
            (x - t) + acc
        };
        acc = t;
        out.push(acc + carry);
    }
    out
}

/// Binomial masses through `ln C(n,m) + m ln p + (n-m) ln q`.
pub fn binomial_oracle(n: u64, p: f64) -> Vec<f64> {
    let lf = ln_factorials(n);
    let q = 1.0 - p;
    (0..=n)
        .map(|m| {
            let mu = m as usize;
            let nu = n as usize;
            let ln = lf[nu] - lf[mu] - lf[nu - mu] + xlny(m as f64, p) + xlny((n - m) as f64, q);
            ln.exp()
        })
        .collect()
}

fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// Exact tail `Σ_{|m/n - p| > half} P(m)` from [`binomial_oracle`].
pub fn tail_oracle(n: u64, p: f64, half: f64) -> f64 {
    binomial_oracle(n, p)
        .iter()
        .enumerate()
        .filter(|(m, _)| (*m as f64 / n as f64 - p).abs() > half)
        .map(|(_, v)| v)
        .sum()
}

/// Φ⁻¹(0.975).
pub const Z_975: f64 = 1.959_963_984_540_054;

/// Reduced system state of `c0|0⟩|0…0⟩ + c1|1⟩|χ…χ⟩` with `χ = (g, √(1-|g|²))`,
/// built as explicit Kronecker products.
pub fn decohered_system(
    c0: Complex64,
    c1: Complex64,
    g: Complex64,
    n: usize,
) -> DMatrix<Complex64> {
    let zero = DVector::from_column_slice(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let chi = DVector::from_column_slice(&[g, Complex64::new((1.0 - g.norm_sqr()).sqrt(), 0.0)]);
    let mut env0 = DVector::from_element(1, Complex64::new(1.0, 0.0));
    let mut env1 = env0.clone();
    for _ in 0..n {
        env0 = env0.kronecker(&zero);
        env1 = env1.kronecker(&chi);
    }
    let psi = zero.kronecker(&env0) * c0
        + DVector::from_column_slice(&[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
            .kronecker(&env1)
            * c1;
    let env_dim = 1 << n;
    let full = &psi * psi.adjoint();
    DMatrix::from_fn(2, 2, |i, j| {
        (0..env_dim)
            .map(|e| full[(i * env_dim + e, j * env_dim + e)])
            .sum()
    })
}
