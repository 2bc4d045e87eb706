//! Expected utility under branch weights.
//!
//! An agent assigns a weight `w(b)` to each outcome and picks the act with
//! the largest `Σ_b w(b) U_b`. Over `N` independent repetitions weights
//! multiply, so the weight of "u occurred m times" is binomial in `w_u`:
//! the same function of `w_u` as the presence distribution is of `ρ_u`.
//! [`mismatch_report`] measures what an agent loses when `w_u ≠ ρ_u`.

use std::fmt;

use serde::Serialize;

use crate::binomial;
use crate::branching::CountDistribution;
use crate::error::{invalid, Error, Result};

pub const WEIGHT_TOL: f64 = 1e-12;
pub const DEFAULT_WINDOW_SIGMAS: f64 = 3.0;

/// Quasi-credences over named outcomes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightAssignment {
    labels: Vec<String>,
    weights: Vec<f64>,
}

fn check_unique(labels: &[String]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(invalid(format!("duplicate outcome label {l:?}")));
        }
    }
    Ok(())
}

impl WeightAssignment {
    pub fn new<S: Into<String>>(pairs: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        let (labels, weights): (Vec<String>, Vec<f64>) =
            pairs.into_iter().map(|(l, w)| (l.into(), w)).unzip();
        if labels.is_empty() {
            return Err(invalid("no outcomes"));
        }
        check_unique(&labels)?;
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(invalid("weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::NotNormalized { norm_sq: total });
        }
        Ok(Self { labels, weights })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.weights[i])
    }

    /// Weights after learning that the outcome lies in `given`:
    /// `w(c | given) = w(c ∧ given) / w(given)`.
    pub fn conditioned(&self, given: &[&str]) -> Result<Self> {
        let condition: f64 = self
            .labels
            .iter()
            .zip(&self.weights)
            .filter(|(l, _)| given.contains(&l.as_str()))
            .map(|(_, w)| w)
            .sum();
        let mut pairs = Vec::with_capacity(self.labels.len());
        for (l, &w) in self.labels.iter().zip(&self.weights) {
            let joint = if given.contains(&l.as_str()) { w } else { 0.0 };
            pairs.push((l.clone(), weight_update(joint, condition)?));
        }
        // absorb the last ulp so the sum stays inside WEIGHT_TOL
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        for p in &mut pairs {
            p.1 /= total;
        }
        Self::new(pairs)
    }

    /// Joint weights of two independent branchings, labels joined with `,`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let mut pairs = Vec::with_capacity(self.labels.len() * other.labels.len());
        for (a, wa) in self.labels.iter().zip(&self.weights) {
            for (b, wb) in other.labels.iter().zip(&other.weights) {
                pairs.push((format!("{a},{b}"), wa * wb));
            }
        }
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        for p in &mut pairs {
            p.1 /= total;
        }
        Self::new(pairs)
    }
}

/// Utilities per outcome, defined up to a positive affine map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtilityAssignment {
    labels: Vec<String>,
    utilities: Vec<f64>,
}

impl UtilityAssignment {
    pub fn new<S: Into<String>>(pairs: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        let (labels, utilities): (Vec<String>, Vec<f64>) =
            pairs.into_iter().map(|(l, u)| (l.into(), u)).unzip();
        if labels.is_empty() {
            return Err(invalid("no outcomes"));
        }
        check_unique(&labels)?;
        if utilities.iter().any(|u| !u.is_finite()) {
            return Err(invalid("utilities must be finite"));
        }
        Ok(Self { labels, utilities })
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.utilities[i])
    }

    /// `scale·U + shift`.
    pub fn affine(&self, scale: f64, shift: f64) -> Self {
        Self {
            labels: self.labels.clone(),
            utilities: self.utilities.iter().map(|u| scale * u + shift).collect(),
        }
    }
}

/// `Σ_b w(b) U_b`; both assignments must cover the same outcomes.
pub fn expected_utility(w: &WeightAssignment, u: &UtilityAssignment) -> Result<f64> {
    if w.labels.len() != u.labels.len() {
        return Err(Error::LabelMismatch);
    }
    w.labels
        .iter()
        .zip(&w.weights)
        .try_fold(0.0, |acc, (l, wb)| {
            let ub = u.get(l).ok_or(Error::LabelMismatch)?;
            Ok(acc + wb * ub)
        })
}

/// `w(c|b) = w(c ∧ b) / w(b)`; exactly 1 when conditioning on the outcome itself.
pub fn weight_update(joint: f64, condition: f64) -> Result<f64> {
    if !(condition > 0.0) {
        return Err(Error::NullCondition);
    }
    if joint == condition {
        return Ok(1.0);
    }
    crate::inference::bayes_update(joint, condition)
}

/// Weight of the branches with `m` occurrences of `u`:
/// `C(N,m) w_u^m (1 - w_u)^{N-m}`. Shares its kernel with the presence
/// count distribution.
pub fn repeated_weight_distribution(w_u: f64, repetitions: u64) -> Result<CountDistribution> {
    if !(0.0..=1.0).contains(&w_u) {
        return Err(invalid(format!("w_u = {w_u} outside [0, 1]")));
    }
    if repetitions == 0 {
        return Err(invalid("at least one repetition is required"));
    }
    Ok(CountDistribution::from_values(binomial::pmf_table(
        repetitions,
        w_u,
        1.0 - w_u,
    )))
}

/// Utility of a branch in which `u` occurred `m` times out of `N`.
pub struct CountUtility {
    evaluator: Box<dyn Fn(u64, u64) -> f64 + Send + Sync>,
}

impl CountUtility {
    pub fn new(f: impl Fn(u64, u64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            evaluator: Box::new(f),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_, _| c)
    }

    /// `m / N`.
    pub fn frequency() -> Self {
        Self::new(|m, n| m as f64 / n as f64)
    }

    /// 1 when `|m/N - center| ≤ half_width`, else 0.
    pub fn window(center: f64, half_width: f64) -> Self {
        Self::new(move |m, n| {
            if (m as f64 / n as f64 - center).abs() <= half_width {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn evaluate(&self, m: u64, repetitions: u64) -> f64 {
        (self.evaluator)(m, repetitions)
    }
}

impl fmt::Debug for CountUtility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CountUtility(..)")
    }
}

/// `Σ_m w(m:N|u) U(m, N)`.
pub fn repeated_expected_utility(w_u: f64, repetitions: u64, cu: &CountUtility) -> Result<f64> {
    let weights = repeated_weight_distribution(w_u, repetitions)?;
    let total = weights
        .values()
        .iter()
        .enumerate()
        .map(|(m, w)| w * cu.evaluate(m as u64, repetitions))
        .sum::<f64>();
    if !total.is_finite() {
        return Err(invalid("count utility produced a non-finite value"));
    }
    Ok(total)
}

/// Inclusive range of counts within `sigmas` standard deviations of `N·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountWindow {
    pub lo: u64,
    pub hi: u64,
}

impl CountWindow {
    pub fn around(x: f64, repetitions: u64, sigmas: f64) -> Self {
        let n = repetitions as f64;
        let half = sigmas * (n * x * (1.0 - x)).sqrt();
        let lo = (n * x - half).ceil().max(0.0) as u64;
        let hi = (n * x + half).floor().min(n) as u64;
        Self { lo, hi }
    }

    pub fn contains(&self, m: usize) -> bool {
        (self.lo..=self.hi).contains(&(m as u64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MismatchReport {
    pub rho_u: f64,
    pub w_u: f64,
    pub repetitions: u64,
    pub window_sigmas: f64,
    pub presence_window: CountWindow,
    pub weight_window: CountWindow,
    /// Presence of the branches the agent expects to be in.
    pub presence_mass_in_weight_window: f64,
    /// Weight the agent gives to where the presence actually is.
    pub weight_mass_in_presence_window: f64,
    /// `Σ_m min(ρ(m:N|u), w(m:N|u))`.
    pub overlap: f64,
}

pub fn mismatch_report(rho_u: f64, w_u: f64, repetitions: u64) -> Result<MismatchReport> {
    mismatch_report_with(rho_u, w_u, repetitions, DEFAULT_WINDOW_SIGMAS)
}

pub fn mismatch_report_with(
    rho_u: f64,
    w_u: f64,
    repetitions: u64,
    window_sigmas: f64,
) -> Result<MismatchReport> {
    for (name, x) in [("rho_u", rho_u), ("w_u", w_u)] {
        if !(x > 0.0 && x < 1.0) {
            return Err(invalid(format!("{name} = {x} outside (0, 1)")));
        }
    }
    if !(window_sigmas > 0.0) {
        return Err(invalid(format!(
            "window of {window_sigmas} standard deviations"
        )));
    }
    let presence =
        CountDistribution::from_values(binomial::pmf_table(repetitions, rho_u, 1.0 - rho_u));
    let weight = repeated_weight_distribution(w_u, repetitions)?;
    let presence_window = CountWindow::around(rho_u, repetitions, window_sigmas);
    let weight_window = CountWindow::around(w_u, repetitions, window_sigmas);
    let overlap = presence
        .values()
        .iter()
        .zip(weight.values())
        .map(|(a, b)| a.min(*b))
        .sum();
    Ok(MismatchReport {
        rho_u,
        w_u,
        repetitions,
        window_sigmas,
        presence_window,
        weight_window,
        presence_mass_in_weight_window: presence.mass_where(|m| weight_window.contains(m)),
        weight_mass_in_presence_window: weight.mass_where(|m| presence_window.contains(m)),
        overlap,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bet {
    pub label: String,
    pub payoff: UtilityAssignment,
}

impl Bet {
    pub fn new(label: impl Into<String>, payoff: UtilityAssignment) -> Self {
        Self {
            label: label.into(),
            payoff,
        }
    }
}

/// Label of the bet with the largest expected utility; the first listed wins ties.
pub fn choose<'a>(w: &WeightAssignment, bets: &'a [Bet]) -> Result<&'a str> {
    let mut best: Option<(&Bet, f64)> = None;
    for bet in bets {
        let eu = expected_utility(w, &bet.payoff)?;
        if best.is_none_or(|(_, b)| eu > b) {
            best = Some((bet, eu));
        }
    }
    best.map(|(b, _)| b.label.as_str()).ok_or(Error::EmptyBets)
}

/// Two outcomes `A`/`B` with weights `(w_a, 1 - w_a)`; bet `A` pays twice
/// the stake on `A`, bet `B` pays 1.5 times the stake on `B`.
pub fn stake_scenario(w_a: f64) -> Result<(WeightAssignment, Vec<Bet>)> {
    let w = WeightAssignment::new([("A", w_a), ("B", 1.0 - w_a)])?;
    let bets = vec![
        Bet::new("A", UtilityAssignment::new([("A", 2.0), ("B", 0.0)])?),
        Bet::new("B", UtilityAssignment::new([("A", 0.0), ("B", 1.5)])?),
    ];
    Ok((w, bets))
}
