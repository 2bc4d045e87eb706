use std::collections::HashSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on Σ|c|² when a state is constructed.
pub const NORM_TOL: f64 = 1e-9;
/// Tolerance accepted by [`presence`] for states built unchecked.
pub const PRESENCE_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisLabel {
    pub index: usize,
    pub tag: Option<String>,
}

impl BasisLabel {
    pub fn new(index: usize) -> Self {
        Self { index, tag: None }
    }

    pub fn tagged(index: usize, tag: impl Into<String>) -> Self {
        Self {
            index,
            tag: Some(tag.into()),
        }
    }

    /// Labels `0..n` without tags.
    pub fn range(n: usize) -> Vec<Self> {
        (0..n).map(Self::new).collect()
    }
}

impl std::fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.tag {
            Some(t) => write!(f, "{t}"),
            None => write!(f, "{}", self.index),
        }
    }
}

fn check_labels(labels: &[BasisLabel]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.index) {
            return Err(Error::DuplicateLabel(l.index));
        }
    }
    Ok(())
}

/// Complex amplitudes over a labeled finite basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    labels: Vec<BasisLabel>,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state and rejects it unless Σ|c|² = 1 within [`NORM_TOL`].
    pub fn new(labels: Vec<BasisLabel>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let state = Self::new_unchecked(labels, amplitudes)?;
        let norm_sq = state.norm_sq();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(state)
    }

    /// Same as [`StateVector::new`] with labels `0..n`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::new(BasisLabel::range(amplitudes.len()), amplitudes)
    }

    /// Real amplitudes with labels `0..n`.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(labels: Vec<BasisLabel>, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized {
                norm_sq: norm * norm,
            });
        }
        for c in &mut amplitudes {
            *c /= norm;
        }
        Self::new(labels, amplitudes)
    }

    /// Checks labels and dimensions only. Operations that need a normalized
    /// state re-check the norm themselves.
    pub fn new_unchecked(labels: Vec<BasisLabel>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if labels.len() != amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                found: amplitudes.len(),
            });
        }
        check_labels(&labels)?;
        Ok(Self { labels, amplitudes })
    }

    /// Basis state `|k⟩` in a space of dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: k + 1,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Self::from_amplitudes(amps)
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, label_index: usize) -> Option<Complex64> {
        self.labels
            .iter()
            .position(|l| l.index == label_index)
            .map(|i| self.amplitudes[i])
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), self.amplitudes.len());
        Self {
            labels: self.labels.clone(),
            amplitudes,
        }
    }
}

/// Nonnegative presence values over outcome labels, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresenceDistribution {
    labels: Vec<BasisLabel>,
    values: Vec<f64>,
}

impl PresenceDistribution {
    pub fn new(labels: Vec<BasisLabel>, values: Vec<f64>) -> Result<Self> {
        if labels.is_empty() || labels.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len().max(1),
                found: values.len(),
            });
        }
        check_labels(&labels)?;
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "presence value {v} is not a nonnegative number"
            )));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm_sq: total });
        }
        Ok(Self { labels, values })
    }

    /// Two outcomes `u` (index 0) and `¬u` (index 1).
    pub fn binary(rho_u: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho_u) {
            return Err(Error::InvalidParameter(format!(
                "rho_u = {rho_u} outside [0, 1]"
            )));
        }
        Self::new(
            vec![BasisLabel::tagged(0, "u"), BasisLabel::tagged(1, "not-u")],
            vec![rho_u, 1.0 - rho_u],
        )
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Position of the label with this index.
    pub fn position(&self, label_index: usize) -> Option<usize> {
        self.labels.iter().position(|l| l.index == label_index)
    }

    pub fn get(&self, label_index: usize) -> Option<f64> {
        self.position(label_index).map(|i| self.values[i])
    }
}

/// `ρ_b = |c_b|²` for every basis label.
pub fn presence(state: &StateVector) -> Result<PresenceDistribution> {
    let norm_sq = state.norm_sq();
    if (norm_sq - 1.0).abs() > PRESENCE_NORM_TOL {
        return Err(Error::NotNormalized { norm_sq });
    }
    let values = state.amplitudes.iter().map(|c| c.norm_sqr()).collect();
    let labels = state.labels.clone();
    Ok(PresenceDistribution { labels, values })
}
