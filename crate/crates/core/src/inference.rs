//! Bayesian estimation of the single-event parameter `P_u` from an observed
//! relative frequency, on a grid over `[0, 1]`.
//!
//! The likelihood is the Gaussian form of the frequency distribution; the
//! exact binomial likelihood is kept alongside it as a cross-check. Products
//! of likelihood and prior are accumulated as logarithms and only
//! exponentiated after subtracting the maximum, so `N = 10⁶` does not
//! underflow.

use std::f64::consts::PI;

use serde::Serialize;

use crate::binomial;
use crate::error::{invalid, Error, Result};

pub const PRIOR_TOL: f64 = 1e-9;
pub const DEFAULT_GRID_STEP: f64 = 1e-3;

/// Trapezoid quadrature weights of an ascending grid.
fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let n = grid.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { grid[i] - grid[i - 1] } else { 0.0 };
            let right = if i + 1 < n {
                grid[i + 1] - grid[i]
            } else {
                0.0
            };
            (left + right) / 2.0
        })
        .collect()
}

fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    trapezoid_weights(grid)
        .iter()
        .zip(values)
        .map(|(w, v)| w * v)
        .sum()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(invalid("grid needs at least two points"));
    }
    if grid.iter().any(|g| !(0.0..=1.0).contains(g)) {
        return Err(invalid("grid points must lie in [0, 1]"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("grid must be strictly ascending"));
    }
    Ok(())
}

/// Uniform grid `0, h, 2h, …, 1`.
pub fn unit_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(invalid(format!("grid step {step} outside (0, 0.5]")));
    }
    let intervals = (1.0 / step).round() as usize;
    if ((intervals as f64) * step - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("grid step {step} does not divide [0, 1]")));
    }
    Ok((0..=intervals)
        .map(|i| i as f64 / intervals as f64)
        .collect())
}

/// Belief over `P_u` before the observation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prior {
    grid: Vec<f64>,
    weights: Vec<f64>,
}

impl Prior {
    pub fn new(grid: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        check_grid(&grid)?;
        if weights.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: weights.len(),
            });
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(invalid("prior weights must be finite and nonnegative"));
        }
        let total = trapezoid(&grid, &weights);
        if (total - 1.0).abs() > PRIOR_TOL {
            return Err(Error::NotNormalized { norm_sq: total });
        }
        Ok(Self { grid, weights })
    }

    pub fn uniform(step: f64) -> Result<Self> {
        let grid = unit_grid(step)?;
        let weights = vec![1.0; grid.len()];
        Self::new(grid, weights)
    }

    /// All prior mass on the grid point nearest `p`.
    pub fn point_mass(step: f64, p: f64) -> Result<Self> {
        let grid = unit_grid(step)?;
        let at = grid
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - p).abs().total_cmp(&(b.1 - p).abs()))
            .map(|(i, _)| i)
            .expect("grid is nonempty");
        let tw = trapezoid_weights(&grid);
        let mut weights = vec![0.0; grid.len()];
        weights[at] = 1.0 / tw[at];
        Self::new(grid, weights)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Observed relative frequency `z` after `N` repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observation {
    pub z: f64,
    pub repetitions: u64,
}

impl Observation {
    pub fn new(z: f64, repetitions: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&z) {
            return Err(invalid(format!("relative frequency {z} outside [0, 1]")));
        }
        if repetitions == 0 {
            return Err(invalid("at least one repetition is required"));
        }
        Ok(Self { z, repetitions })
    }

    /// `m` occurrences in `N` repetitions.
    pub fn from_counts(m: u64, repetitions: u64) -> Result<Self> {
        if m > repetitions {
            return Err(invalid(format!("count {m} exceeds N = {repetitions}")));
        }
        Self::new(m as f64 / repetitions as f64, repetitions)
    }
}

fn check_open_unit(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Degenerate { rho_u: p })
    }
}

/// `ln P(z | P_u = p)` for the Gaussian likelihood.
pub fn log_likelihood(p: f64, obs: &Observation) -> Result<f64> {
    check_open_unit(p)?;
    let n = obs.repetitions as f64;
    let var = p * (1.0 - p);
    let d = obs.z - p;
    Ok(0.5 * (n / (2.0 * PI * var)).ln() - n * d * d / (2.0 * var))
}

/// `(N / 2πp(1-p))^{1/2} exp(-N(z - p)² / 2p(1-p))`.
pub fn likelihood(p: f64, obs: &Observation) -> Result<f64> {
    check_open_unit(p)?;
    let n = obs.repetitions as f64;
    let var = p * (1.0 - p);
    let d = obs.z - p;
    Ok((n / (2.0 * PI * var)).sqrt() * (-n * d * d / (2.0 * var)).exp())
}

/// Exact binomial counterpart of [`likelihood`], as a density in `z`:
/// `N · C(N, zN) p^{zN} (1-p)^{N - zN}`.
pub fn binomial_likelihood(p: f64, obs: &Observation) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p = {p} outside [0, 1]")));
    }
    let m = (obs.z * obs.repetitions as f64).round() as u64;
    Ok(obs.repetitions as f64 * binomial::pmf(obs.repetitions, m, p, 1.0 - p))
}

/// Gridded posterior density over `P_u`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Posterior {
    grid: Vec<f64>,
    densities: Vec<f64>,
    /// Evidence `∫ P(z|p) P(p) dp`; may underflow to 0 where `log_normalizer` does not.
    pub normalizer: f64,
    pub log_normalizer: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CredibleInterval {
    pub lo: f64,
    pub hi: f64,
    /// Posterior mass inside `[lo, hi]`.
    pub mass: f64,
    /// False when the requested mass could not be reached and the whole grid was returned.
    pub reached: bool,
}

impl CredibleInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl Posterior {
    /// Normalizes arbitrary nonnegative values on a grid.
    pub fn from_densities(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_grid(&grid)?;
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(invalid("densities must be finite and nonnegative"));
        }
        let total = trapezoid(&grid, &values);
        if !(total > 0.0) {
            return Err(Error::ZeroEvidence);
        }
        let densities = values.iter().map(|v| v / total).collect();
        Ok(Self {
            grid,
            densities,
            normalizer: total,
            log_normalizer: total.ln(),
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    pub fn integral(&self) -> f64 {
        trapezoid(&self.grid, &self.densities)
    }

    /// Grid point of highest density (leftmost on ties).
    pub fn mode(&self) -> f64 {
        let mut best = 0;
        for (i, d) in self.densities.iter().enumerate() {
            if *d > self.densities[best] {
                best = i;
            }
        }
        self.grid[best]
    }

    pub fn mean(&self) -> f64 {
        let first: Vec<f64> = self
            .grid
            .iter()
            .zip(&self.densities)
            .map(|(p, d)| p * d)
            .collect();
        trapezoid(&self.grid, &first)
    }

    pub fn std_dev(&self) -> f64 {
        let mean = self.mean();
        let second: Vec<f64> = self
            .grid
            .iter()
            .zip(&self.densities)
            .map(|(p, d)| (p - mean).powi(2) * d)
            .collect();
        trapezoid(&self.grid, &second).sqrt()
    }

    /// Shortest `[g_i, g_j]` whose grid points carry at least `mass` of the
    /// posterior, each point weighted by its trapezoid cell. Ties go to the
    /// leftmost interval.
    pub fn credible_interval(&self, mass: f64) -> Result<CredibleInterval> {
        if !(mass > 0.0 && mass < 1.0) {
            return Err(invalid(format!("credible mass {mass} outside (0, 1)")));
        }
        let point: Vec<f64> = trapezoid_weights(&self.grid)
            .iter()
            .zip(&self.densities)
            .map(|(w, d)| w * d)
            .collect();
        let mut prefix = Vec::with_capacity(point.len() + 1);
        prefix.push(0.0);
        for q in &point {
            prefix.push(prefix.last().unwrap() + q);
        }
        let total = *prefix.last().unwrap();
        let target = mass * (1.0 - 1e-12);
        let n = point.len();
        if total < target {
            return Ok(CredibleInterval {
                lo: self.grid[0],
                hi: self.grid[n - 1],
                mass: total,
                reached: false,
            });
        }
        let mut best: Option<(usize, usize)> = None;
        let mut j = 0;
        for i in 0..n {
            j = j.max(i);
            while j < n && prefix[j + 1] - prefix[i] < target {
                j += 1;
            }
            if j == n {
                break;
            }
            let width = self.grid[j] - self.grid[i];
            let better = match best {
                None => true,
                Some((bi, bj)) => width < self.grid[bj] - self.grid[bi] - 1e-12,
            };
            if better {
                best = Some((i, j));
            }
        }
        let (i, j) = best.expect("total mass reaches the target");
        Ok(CredibleInterval {
            lo: self.grid[i],
            hi: self.grid[j],
            mass: prefix[j + 1] - prefix[i],
            reached: true,
        })
    }
}

/// `P(p | z) ∝ P(z | p) P(p)`, normalized by trapezoid quadrature. Grid
/// points at `p ∈ {0, 1}` carry no likelihood (zero variance).
pub fn posterior(prior: &Prior, obs: &Observation) -> Result<Posterior> {
    let logs: Vec<f64> = prior
        .grid
        .iter()
        .zip(&prior.weights)
        .map(|(&p, &w)| {
            if w > 0.0 && p > 0.0 && p < 1.0 {
                log_likelihood(p, obs)
                    .map(|l| l + w.ln())
                    .unwrap_or(f64::NEG_INFINITY)
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return Err(Error::ZeroEvidence);
    }
    let scaled: Vec<f64> = logs.iter().map(|l| (l - peak).exp()).collect();
    let total = trapezoid(&prior.grid, &scaled);
    if !(total > 0.0) {
        return Err(Error::ZeroEvidence);
    }
    let log_normalizer = peak + total.ln();
    Ok(Posterior {
        grid: prior.grid.clone(),
        densities: scaled.iter().map(|s| s / total).collect(),
        normalizer: log_normalizer.exp(),
        log_normalizer,
    })
}

/// `P(A|B) = P(A ∩ B) / P(B)`.
pub fn bayes_update(joint_ab: f64, total_b: f64) -> Result<f64> {
    if !(total_b > 0.0) {
        return Err(Error::NullCondition);
    }
    if !(joint_ab >= 0.0) || joint_ab > total_b * (1.0 + 1e-12) {
        return Err(invalid(format!(
            "joint {joint_ab} must lie in [0, {total_b}]"
        )));
    }
    Ok((joint_ab / total_b).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn likelihood_peak() {
        let obs = Observation::new(0.3, 1000).unwrap();
        let peak = likelihood(0.3, &obs).unwrap();
        assert!((peak - (1000.0 / (2.0 * PI * 0.21)).sqrt()).abs() < 1e-12);
        let off = likelihood(0.3, &Observation::new(0.35, 1000).unwrap()).unwrap();
        assert!((off / peak - (-1000.0 * 0.0025 / 0.42f64).exp()).abs() < 1e-12);
        assert!(((off / peak).ln() + 5.952_38).abs() < 1e-5);
    }

    #[test]
    fn likelihood_refuses_endpoints() {
        let obs = Observation::new(0.3, 10).unwrap();
        assert!(likelihood(0.0, &obs).is_err());
        assert!(likelihood(1.0, &obs).is_err());
    }

    #[test]
    fn log_likelihood_agrees() {
        let obs = Observation::new(0.31, 500).unwrap();
        for p in [0.1, 0.3, 0.5] {
            let a = likelihood(p, &obs).unwrap().ln();
            assert!((a - log_likelihood(p, &obs).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn point_mass_prior_dominates() {
        let prior = Prior::point_mass(1e-3, 0.62).unwrap();
        let post = posterior(&prior, &Observation::new(0.3, 50).unwrap()).unwrap();
        assert!((post.mode() - 0.62).abs() < 1e-12);
        let ci = post.credible_interval(0.95).unwrap();
        assert_eq!(ci.width(), 0.0);
        assert!((ci.lo - 0.62).abs() < 1e-12);
    }

    #[test]
    fn flat_interval_width() {
        let grid = unit_grid(1e-3).unwrap();
        let post = Posterior::from_densities(grid.clone(), vec![1.0; grid.len()]).unwrap();
        let ci = post.credible_interval(0.5).unwrap();
        assert!((ci.width() - 0.5).abs() <= 1e-3 + 1e-12, "{ci:?}");
        // the half-weight endpoint makes [0.001, ..] strictly better than [0, ..]
        assert!(ci.lo <= 1e-3);
        assert!(ci.mass >= 0.5 - 1e-12);
    }

    #[test]
    fn two_point_grid_interval() {
        let post = Posterior::from_densities(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        let ci = post.credible_interval(0.99).unwrap();
        assert!(ci.reached);
        assert_eq!((ci.lo, ci.hi), (0.0, 1.0));
        assert!(post.credible_interval(1.0).is_err());
    }

    #[test]
    fn zero_evidence() {
        let grid = vec![0.0, 1.0];
        let prior = Prior::new(grid, vec![1.0, 1.0]).unwrap();
        assert_eq!(
            posterior(&prior, &Observation::new(0.5, 10).unwrap()),
            Err(Error::ZeroEvidence)
        );
    }

    #[test]
    fn bayes_update_cases() {
        assert!((bayes_update(0.21, 0.7).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(bayes_update(0.7, 0.7).unwrap(), 1.0);
        assert!((bayes_update(0.3 * 0.7, 0.7).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(bayes_update(0.1, 0.0), Err(Error::NullCondition));
        assert!(bayes_update(0.8, 0.7).is_err());
    }

    #[test]
    fn grid_and_prior_validation() {
        assert!(unit_grid(0.3).is_err());
        assert!(Prior::new(vec![0.0, 0.5, 0.4], vec![1.0; 3]).is_err());
        assert!(Prior::new(vec![0.0, 1.0], vec![2.0, 2.0]).is_err());
        assert!(Observation::from_counts(11, 10).is_err());
    }
}
