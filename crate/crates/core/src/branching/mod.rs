//! Statistics of `N` independent repetitions of one measurement.
//!
//! Every sequence of readings is a branch whose presence is the product of
//! the single-measurement presences. Grouping branches by how often the focus
//! outcome `u` occurred gives the binomial count distribution; everything
//! else here (Gaussian limit, histograms, Chebyshev tails, frequency
//! operators) is derived from it.

mod frequency;
mod operator;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::binomial;
use crate::error::{invalid, Error, Result};
use crate::quantum::PresenceDistribution;

pub use frequency::{
    coarse_frequency_operator_density, frequency_density, histogram_density, scaled_bin_width,
    FrequencyDensity, HistogramDensity, IntervalPartition,
};
pub use operator::{
    dense_frequency_operator, explicit_finkelstein_norm, explicit_frequency_spectrum,
    frequency_operator_density, DENSE_OPERATOR_LIMIT, EXPLICIT_SPECTRUM_LIMIT,
};

/// Upper bound on `|alphabet|^N` for branch enumeration.
pub const ENUMERATION_LIMIT: u64 = 1 << 24;

/// One measurement with presences `|c_b|²`, repeated `N` times, watched for outcome `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatedExperiment {
    presences: PresenceDistribution,
    repetitions: u64,
    focus: usize,
}

impl RepeatedExperiment {
    pub fn new(
        presences: PresenceDistribution,
        repetitions: u64,
        focus_label: usize,
    ) -> Result<Self> {
        if repetitions == 0 {
            return Err(invalid("at least one repetition is required"));
        }
        let focus = presences
            .position(focus_label)
            .ok_or_else(|| invalid(format!("focus label {focus_label} is not an outcome")))?;
        Ok(Self {
            presences,
            repetitions,
            focus,
        })
    }

    /// Two outcomes, `u` = label 0 with presence `rho_u`.
    pub fn binary(rho_u: f64, repetitions: u64) -> Result<Self> {
        Self::new(PresenceDistribution::binary(rho_u)?, repetitions, 0)
    }

    pub fn presences(&self) -> &PresenceDistribution {
        &self.presences
    }

    pub fn repetitions(&self) -> u64 {
        self.repetitions
    }

    /// Position of `u` within the outcome list.
    pub fn focus_position(&self) -> usize {
        self.focus
    }

    pub fn rho_u(&self) -> f64 {
        self.presences.values()[self.focus]
    }

    /// Summed presence of every outcome other than `u`.
    pub fn rho_not_u(&self) -> f64 {
        self.presences
            .values()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.focus)
            .map(|(_, v)| v)
            .sum()
    }

    /// Same outcomes, different `N`.
    pub fn with_repetitions(&self, repetitions: u64) -> Result<Self> {
        Self::new(
            self.presences.clone(),
            repetitions,
            self.presences.labels()[self.focus].index,
        )
    }

    pub(crate) fn require_nondegenerate(&self) -> Result<()> {
        let rho_u = self.rho_u();
        if rho_u <= 0.0 || self.rho_not_u() <= 0.0 {
            return Err(Error::Degenerate { rho_u });
        }
        Ok(())
    }

    /// `ρ_u ρ_¬u / N`, the variance of the relative frequency.
    pub fn frequency_variance(&self) -> f64 {
        self.rho_u() * self.rho_not_u() / self.repetitions as f64
    }
}

/// A reading sequence (outcome label indices, first measurement first) and its presence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchRecord {
    pub sequence: Vec<usize>,
    pub presence: f64,
}

impl BranchRecord {
    /// Occurrences of `label` in the sequence.
    pub fn count(&self, label: usize) -> usize {
        self.sequence.iter().filter(|&&b| b == label).count()
    }
}

/// `ρ(m:N|u)` for `m = 0..=N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountDistribution {
    values: Vec<f64>,
}

impl CountDistribution {
    pub(crate) fn from_values(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn repetitions(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    pub fn get(&self, m: usize) -> f64 {
        self.values.get(m).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Mass over `m` with `pred(m)`.
    pub fn mass_where(&self, mut pred: impl FnMut(usize) -> bool) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(m, _)| pred(*m))
            .map(|(_, v)| v)
            .sum()
    }

    /// Index of the largest mass (first one on ties).
    pub fn mode(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (m, &v)| {
                if v > best.1 {
                    (m, v)
                } else {
                    best
                }
            })
            .0
    }
}

/// Lazily walks every reading sequence in lexicographic order of outcome
/// positions. Outcomes with zero presence produce no branches.
pub fn branches(exp: &RepeatedExperiment) -> Result<impl Iterator<Item = BranchRecord> + '_> {
    let live: Vec<usize> = (0..exp.presences.len())
        .filter(|&b| exp.presences.values()[b] > 0.0)
        .collect();
    let d = live.len() as u64;
    let n = exp.repetitions;
    let total = (0..n).try_fold(1u64, |acc, _| {
        acc.checked_mul(d).filter(|&t| t <= ENUMERATION_LIMIT)
    });
    let total = total.ok_or(Error::SizeGuard {
        what: "branch count |alphabet|^N",
        bound: ENUMERATION_LIMIT,
    })?;
    let labels = exp.presences.labels();
    let values = exp.presences.values();
    let d = d as usize;
    let n = n as usize;
    Ok((0..total as usize).map(move |mut code| {
        let mut positions = vec![0usize; n];
        for slot in positions.iter_mut().rev() {
            *slot = live[code % d];
            code /= d;
        }
        let presence = positions.iter().fold(1.0, |acc, &b| acc * values[b]);
        BranchRecord {
            sequence: positions.iter().map(|&b| labels[b].index).collect(),
            presence,
        }
    }))
}

/// Every branch with its presence `|c_{b1}|²⋯|c_{bN}|²`.
pub fn enumerate_branches(exp: &RepeatedExperiment) -> Result<Vec<BranchRecord>> {
    Ok(branches(exp)?.collect())
}

/// `C(N,m) ρ_u^m ρ_¬u^{N-m}`; exact products up to `N = 30`, log-space beyond.
pub fn count_distribution(exp: &RepeatedExperiment) -> CountDistribution {
    CountDistribution::from_values(binomial::pmf_table(
        exp.repetitions,
        exp.rho_u(),
        exp.rho_not_u(),
    ))
}

/// Gaussian approximation to `ρ(m:N|u)`; `m` may be fractional.
pub fn gaussian_approx(exp: &RepeatedExperiment, m: f64) -> Result<f64> {
    exp.require_nondegenerate()?;
    let n = exp.repetitions as f64;
    let var = n * exp.rho_u() * exp.rho_not_u();
    let d = m - n * exp.rho_u();
    Ok((2.0 * PI * var).powf(-0.5) * (-d * d / (2.0 * var)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChebyshevTail {
    /// Presence of branches with `|m/N - ρ_u| > Δz/2`.
    pub exact_tail: f64,
    /// `4 ρ_u ρ_¬u / (Δz² N)`.
    pub bound: f64,
}

pub fn chebyshev_tail(exp: &RepeatedExperiment, delta_z: f64) -> Result<ChebyshevTail> {
    exp.require_nondegenerate()?;
    if !(delta_z > 0.0) || !delta_z.is_finite() {
        return Err(invalid(format!("delta_z = {delta_z} must be positive")));
    }
    let n = exp.repetitions as f64;
    let rho_u = exp.rho_u();
    let counts = count_distribution(exp);
    let exact_tail = counts.mass_where(|m| (m as f64 / n - rho_u).abs() > delta_z / 2.0);
    let bound = 4.0 * rho_u * exp.rho_not_u() / (delta_z * delta_z * n);
    Ok(ChebyshevTail { exact_tail, bound })
}

/// `‖(F_N - ρ_u)Ψ_N‖²`, summed over the spectrum of `F_N`:
/// `Σ_m (m/N - ρ_u)² ρ(m:N|u)`.
pub fn finkelstein_norm(exp: &RepeatedExperiment) -> f64 {
    let n = exp.repetitions as f64;
    let rho_u = exp.rho_u();
    count_distribution(exp)
        .values()
        .iter()
        .enumerate()
        .map(|(m, p)| {
            let d = m as f64 / n - rho_u;
            d * d * p
        })
        .sum()
}

/// Draws one branch under the presence measure with a ChaCha8 stream seeded by `seed`.
pub fn sample_branch(exp: &RepeatedExperiment, seed: u64) -> BranchRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = exp.presences.labels();
    let values = exp.presences.values();
    let mut presence = 1.0;
    let sequence = (0..exp.repetitions)
        .map(|_| {
            let b = draw(&mut rng, values);
            presence *= values[b];
            labels[b].index
        })
        .collect();
    BranchRecord { sequence, presence }
}

fn draw(rng: &mut impl Rng, values: &[f64]) -> usize {
    let r: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (b, &v) in values.iter().enumerate() {
        if v <= 0.0 {
            continue;
        }
        acc += v;
        last = b;
        if r < acc {
            return b;
        }
    }
    // r landed in the rounding gap above Σv
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::BasisLabel;

    #[test]
    fn single_measurement_branches() {
        let exp = RepeatedExperiment::binary(0.3, 1).unwrap();
        let b = enumerate_branches(&exp).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(
            b[0],
            BranchRecord {
                sequence: vec![0],
                presence: 0.3
            }
        );
        assert_eq!(b[1].sequence, vec![1]);
        assert!((b[1].presence - 0.7).abs() < 1e-15);
    }

    #[test]
    fn deterministic_outcome_has_one_live_branch() {
        let exp = RepeatedExperiment::binary(1.0, 6).unwrap();
        let all = enumerate_branches(&exp).unwrap();
        assert_eq!(
            all,
            vec![BranchRecord {
                sequence: vec![0; 6],
                presence: 1.0
            }]
        );
    }

    #[test]
    fn enumeration_guard() {
        let exp = RepeatedExperiment::binary(0.3, 25).unwrap();
        assert_eq!(
            enumerate_branches(&exp).unwrap_err(),
            Error::SizeGuard {
                what: "branch count |alphabet|^N",
                bound: 1 << 24
            }
        );
        let three = PresenceDistribution::new(BasisLabel::range(3), vec![0.2, 0.3, 0.5]).unwrap();
        assert!(branches(&RepeatedExperiment::new(three.clone(), 15, 0).unwrap()).is_ok());
        assert!(branches(&RepeatedExperiment::new(three, 16, 0).unwrap()).is_err());
    }

    #[test]
    fn fair_pair() {
        let c = count_distribution(&RepeatedExperiment::binary(0.5, 2).unwrap());
        assert_eq!(c.values(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn multi_outcome_reduces_to_focus() {
        let p = PresenceDistribution::new(BasisLabel::range(3), vec![0.3, 0.5, 0.2]).unwrap();
        let exp = RepeatedExperiment::new(p, 10, 0).unwrap();
        assert!((exp.rho_not_u() - 0.7).abs() < 1e-15);
        let bin = count_distribution(&RepeatedExperiment::binary(0.3, 10).unwrap());
        for (a, b) in count_distribution(&exp).values().iter().zip(bin.values()) {
            assert!(((a - b) / b).abs() < 1e-14);
        }
    }

    #[test]
    fn gaussian_peak_and_symmetry() {
        let exp = RepeatedExperiment::binary(0.3, 1000).unwrap();
        let peak = gaussian_approx(&exp, 300.0).unwrap();
        assert!((peak - (2.0 * PI * 210.0f64).powf(-0.5)).abs() < 1e-15);
        assert!((peak - 0.027_53).abs() < 5e-5);
        for d in [1.0, 7.5, 40.0] {
            let hi = gaussian_approx(&exp, 300.0 + d).unwrap();
            let lo = gaussian_approx(&exp, 300.0 - d).unwrap();
            assert!((hi - lo).abs() <= 1e-15 * hi.max(1e-300));
        }
        let exact = count_distribution(&exp).get(300);
        assert!(((peak - exact) / exact).abs() < 0.01);
    }

    #[test]
    fn gaussian_refuses_degenerate() {
        for rho in [0.0, 1.0] {
            let exp = RepeatedExperiment::binary(rho, 10).unwrap();
            assert_eq!(
                gaussian_approx(&exp, 3.0),
                Err(Error::Degenerate { rho_u: rho })
            );
        }
    }

    #[test]
    fn chebyshev_instance() {
        let exp = RepeatedExperiment::binary(0.3, 1000).unwrap();
        let t = chebyshev_tail(&exp, 0.1).unwrap();
        assert!((t.bound - 0.084).abs() < 1e-15);
        assert!(t.exact_tail <= t.bound);
        let doubled = chebyshev_tail(&exp.with_repetitions(2000).unwrap(), 0.1).unwrap();
        assert!((doubled.bound - t.bound / 2.0).abs() < 1e-15);
    }

    #[test]
    fn chebyshev_tail_shrinks_with_n() {
        let tails: Vec<f64> = [100, 1000, 10_000]
            .iter()
            .map(|&n| {
                chebyshev_tail(&RepeatedExperiment::binary(0.3, n).unwrap(), 0.1)
                    .unwrap()
                    .exact_tail
            })
            .collect();
        assert!(tails[0] > tails[1] && tails[1] > tails[2], "{tails:?}");
    }

    #[test]
    fn finkelstein_values() {
        assert!(
            (finkelstein_norm(&RepeatedExperiment::binary(0.3, 1).unwrap()) - 0.21).abs() < 1e-15
        );
        for n in [1, 5, 100] {
            assert_eq!(
                finkelstein_norm(&RepeatedExperiment::binary(0.0, n).unwrap()),
                0.0
            );
            assert_eq!(
                finkelstein_norm(&RepeatedExperiment::binary(1.0, n).unwrap()),
                0.0
            );
        }
        let mut prev = f64::INFINITY;
        for k in 1..=6 {
            let n = 10u64.pow(k);
            let v = finkelstein_norm(&RepeatedExperiment::binary(0.3, n).unwrap());
            assert!((v * n as f64 - 0.21).abs() < 1e-12, "N={n}: {v}");
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        let exp = RepeatedExperiment::binary(0.3, 200).unwrap();
        assert_eq!(sample_branch(&exp, 42), sample_branch(&exp, 42));
        assert_ne!(
            sample_branch(&exp, 42).sequence,
            sample_branch(&exp, 43).sequence
        );
        let sure = RepeatedExperiment::binary(1.0, 50).unwrap();
        for seed in 0..20 {
            assert_eq!(sample_branch(&sure, seed).sequence, vec![0; 50]);
        }
    }
}
