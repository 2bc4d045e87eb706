//! One or two particles on a regular 1-D grid.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Grid objects carry coarser quadrature error than labeled states.
pub const GRID_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Particles {
    One,
    /// Two particles of different kinds; each gets its own marginal.
    TwoDistinguishable,
    /// Two particles of the same kind; the marginal carries the factor N = 2.
    TwoIdentical,
}

impl Particles {
    pub fn count(self) -> usize {
        match self {
            Particles::One => 1,
            _ => 2,
        }
    }
}

/// `ψ(x)` or `ψ(x₁, x₂)` sampled on `points` sites per axis, row-major in `x₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    particles: Particles,
    points: usize,
    spacing: f64,
    values: Vec<Complex64>,
}

impl GridWavefunction {
    pub fn new(
        particles: Particles,
        points: usize,
        spacing: f64,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid spacing {spacing} must be positive"
            )));
        }
        if points == 0 {
            return Err(Error::InvalidParameter("empty grid".into()));
        }
        let expected = points.pow(particles.count() as u32);
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: values.len(),
            });
        }
        let psi = Self {
            particles,
            points,
            spacing,
            values,
        };
        let norm_sq = psi.norm_sq();
        if (norm_sq - 1.0).abs() > GRID_NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(psi)
    }

    /// `f(x₁)·g(x₂)`.
    pub fn product(f: &[Complex64], g: &[Complex64], spacing: f64) -> Result<Self> {
        if f.len() != g.len() {
            return Err(Error::DimensionMismatch {
                expected: f.len(),
                found: g.len(),
            });
        }
        let values = f
            .iter()
            .flat_map(|a| g.iter().map(move |b| a * b))
            .collect();
        Self::new(Particles::TwoDistinguishable, f.len(), spacing, values)
    }

    /// `(f(x₁)g(x₂) ± g(x₁)f(x₂))`, renormalized. `f` and `g` must not be parallel.
    pub fn two_identical(
        f: &[Complex64],
        g: &[Complex64],
        spacing: f64,
        antisymmetric: bool,
    ) -> Result<Self> {
        if f.len() != g.len() {
            return Err(Error::DimensionMismatch {
                expected: f.len(),
                found: g.len(),
            });
        }
        let n = f.len();
        let sign = if antisymmetric { -1.0 } else { 1.0 };
        let mut values: Vec<Complex64> = (0..n * n)
            .map(|k| f[k / n] * g[k % n] + sign * g[k / n] * f[k % n])
            .collect();
        let norm = (values.iter().map(|v| v.norm_sqr()).sum::<f64>() * spacing * spacing).sqrt();
        if !(norm > 0.0) {
            return Err(Error::NotNormalized { norm_sq: 0.0 });
        }
        for v in &mut values {
            *v /= norm;
        }
        Self::new(Particles::TwoIdentical, n, spacing, values)
    }

    pub fn particles(&self) -> Particles {
        self.particles
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Discretized `∫|ψ|²`.
    pub fn norm_sq(&self) -> f64 {
        let cell = self.spacing.powi(self.particles.count() as i32);
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell
    }

    fn density_at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.points + j].norm_sqr()
    }
}

/// Density of one particle: `|ψ(x)|²` for a single particle; for two
/// particles `which` picks the coordinate integrated against.
pub fn particle_marginal(psi: &GridWavefunction, which: usize) -> Result<Vec<f64>> {
    let n = psi.points;
    match (psi.particles, which) {
        (Particles::One, 0) => Ok(psi.values.iter().map(|v| v.norm_sqr()).collect()),
        (Particles::One, _) => Err(Error::InvalidParameter(format!("no particle {which}"))),
        (_, 0) => Ok((0..n)
            .map(|i| (0..n).map(|j| psi.density_at(i, j)).sum::<f64>() * psi.spacing)
            .collect()),
        (_, 1) => Ok((0..n)
            .map(|j| (0..n).map(|i| psi.density_at(i, j)).sum::<f64>() * psi.spacing)
            .collect()),
        _ => Err(Error::InvalidParameter(format!("no particle {which}"))),
    }
}

/// Single-particle density of the whole system; integrates to the particle
/// number. Identical particles use `N·∫|ψ(x, x₂)|² dx₂`; distinguishable ones
/// add their separate marginals.
pub fn marginal_density(psi: &GridWavefunction) -> Vec<f64> {
    match psi.particles {
        Particles::One => psi.values.iter().map(|v| v.norm_sqr()).collect(),
        Particles::TwoIdentical => {
            let first = particle_marginal(psi, 0).expect("two-particle grid");
            first.into_iter().map(|r| 2.0 * r).collect()
        }
        Particles::TwoDistinguishable => {
            let a = particle_marginal(psi, 0).expect("two-particle grid");
            let b = particle_marginal(psi, 1).expect("two-particle grid");
            a.into_iter().zip(b).map(|(x, y)| x + y).collect()
        }
    }
}

/// `N_a N_b |ψ(x_a, x_b)|²`, with `N_b = N_a - 1` for identical particles.
pub fn pair_density(psi: &GridWavefunction) -> Result<Vec<f64>> {
    let factor = match psi.particles {
        Particles::One => {
            return Err(Error::InvalidParameter(
                "pair density needs two particles".into(),
            ))
        }
        Particles::TwoDistinguishable => 1.0,
        Particles::TwoIdentical => 2.0,
    };
    Ok(psi.values.iter().map(|v| factor * v.norm_sqr()).collect())
}

/// `ΔE = Σ V(x) ρ(x) Δx` with the single-particle density.
pub fn energy_shift(psi: &GridWavefunction, potential: &[f64]) -> Result<f64> {
    if potential.len() != psi.points {
        return Err(Error::DimensionMismatch {
            expected: psi.points,
            found: potential.len(),
        });
    }
    let rho = marginal_density(psi);
    Ok(rho.iter().zip(potential).map(|(r, v)| r * v).sum::<f64>() * psi.spacing)
}
