use std::f64::consts::PI;

use serde::Serialize;

use super::{count_distribution, RepeatedExperiment};
use crate::error::{invalid, Result};

/// Continuous presence density over the relative frequency `z = m/N`:
/// `(N / 2πρ_uρ_¬u)^{1/2} exp(-N(z - ρ_u)² / 2ρ_uρ_¬u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyDensity {
    pub rho_u: f64,
    pub rho_not_u: f64,
    pub repetitions: u64,
}

impl FrequencyDensity {
    pub fn evaluate(&self, z: f64) -> f64 {
        let var = self.variance();
        let d = z - self.rho_u;
        (2.0 * PI * var).powf(-0.5) * (-d * d / (2.0 * var)).exp()
    }

    pub fn variance(&self) -> f64 {
        self.rho_u * self.rho_not_u / self.repetitions as f64
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn peak_location(&self) -> f64 {
        self.rho_u
    }

    pub fn peak_height(&self) -> f64 {
        self.evaluate(self.rho_u)
    }

    /// Composite Simpson integral over `[0, 1]`, restricted to ±12σ where that
    /// is narrower.
    pub fn integral(&self) -> f64 {
        let s = self.std_dev();
        let lo = (self.rho_u - 12.0 * s).max(0.0);
        let hi = (self.rho_u + 12.0 * s).min(1.0);
        const INTERVALS: usize = 20_000;
        let h = (hi - lo) / INTERVALS as f64;
        let mut acc = self.evaluate(lo) + self.evaluate(hi);
        for i in 1..INTERVALS {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * self.evaluate(lo + i as f64 * h);
        }
        acc * h / 3.0
    }

    /// Mass lost outside `[0, 1]`; negligible once `N` is in the hundreds.
    pub fn normalization_deficit(&self) -> f64 {
        1.0 - self.integral()
    }
}

pub fn frequency_density(exp: &RepeatedExperiment) -> Result<FrequencyDensity> {
    exp.require_nondegenerate()?;
    Ok(FrequencyDensity {
        rho_u: exp.rho_u(),
        rho_not_u: exp.rho_not_u(),
        repetitions: exp.repetitions(),
    })
}

/// Bin width `Δz₁ / √N`.
pub fn scaled_bin_width(delta_z1: f64, repetitions: u64) -> f64 {
    delta_z1 / (repetitions as f64).sqrt()
}

/// Bins `I_k = [0,1] ∩ [z_k - Δz/2, z_k + Δz/2)` with `z_k = ρ_u + kΔz`,
/// for the smallest range of `k` covering `[0, 1]`. The last bin is closed at
/// `z = 1` so that point never forms a bin of its own.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalPartition {
    rho_u: f64,
    delta_z: f64,
    k_min: i64,
    k_max: i64,
}

const EDGE_TOL: f64 = 1e-12;

impl IntervalPartition {
    pub fn new(rho_u: f64, delta_z: f64) -> Result<Self> {
        if !(delta_z > 0.0 && delta_z <= 1.0) {
            return Err(invalid(format!("delta_z = {delta_z} outside (0, 1]")));
        }
        if !(0.0..=1.0).contains(&rho_u) {
            return Err(invalid(format!("rho_u = {rho_u} outside [0, 1]")));
        }
        let center = |k: i64| rho_u + k as f64 * delta_z;
        let mut k_min = ((-rho_u - delta_z / 2.0) / delta_z).floor() as i64 + 1;
        while center(k_min) + delta_z / 2.0 <= EDGE_TOL {
            k_min += 1;
        }
        while center(k_min - 1) + delta_z / 2.0 > EDGE_TOL {
            k_min -= 1;
        }
        let mut k_max = ((1.0 - rho_u - delta_z / 2.0) / delta_z).ceil() as i64;
        while center(k_max) + delta_z / 2.0 < 1.0 - EDGE_TOL {
            k_max += 1;
        }
        while k_max > k_min && center(k_max) - delta_z / 2.0 >= 1.0 - EDGE_TOL {
            k_max -= 1;
        }
        Ok(Self {
            rho_u,
            delta_z,
            k_min,
            k_max,
        })
    }

    pub fn delta_z(&self) -> f64 {
        self.delta_z
    }

    pub fn k_range(&self) -> std::ops::RangeInclusive<i64> {
        self.k_min..=self.k_max
    }

    pub fn len(&self) -> usize {
        (self.k_max - self.k_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `z_k`, the midpoint of the unclipped bin.
    pub fn center(&self, k: i64) -> f64 {
        self.rho_u + k as f64 * self.delta_z
    }

    /// Clipped bounds of `I_k`.
    pub fn interval(&self, k: i64) -> (f64, f64) {
        let c = self.center(k);
        let lo = if k <= self.k_min {
            0.0
        } else {
            (c - self.delta_z / 2.0).max(0.0)
        };
        let hi = if k >= self.k_max {
            1.0
        } else {
            (c + self.delta_z / 2.0).min(1.0)
        };
        (lo, hi)
    }

    /// Bin holding `z ∈ [0, 1]`.
    pub fn bin_of(&self, z: f64) -> i64 {
        let k = ((z - self.rho_u) / self.delta_z + 0.5).floor() as i64;
        k.clamp(self.k_min, self.k_max)
    }

    fn slot(&self, k: i64) -> usize {
        (k - self.k_min) as usize
    }
}

/// Piecewise-constant density `ρ̃(k)/Δz` on an [`IntervalPartition`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramDensity {
    pub partition: IntervalPartition,
    /// `ρ̃(k)` in order of `k`.
    pub masses: Vec<f64>,
}

impl HistogramDensity {
    pub fn mass(&self, k: i64) -> f64 {
        if self.partition.k_range().contains(&k) {
            self.masses[self.partition.slot(k)]
        } else {
            0.0
        }
    }

    /// Uses the nominal `Δz` as divisor, clipped bins included.
    pub fn evaluate(&self, z: f64) -> f64 {
        if !(0.0..=1.0).contains(&z) {
            return 0.0;
        }
        self.mass(self.partition.bin_of(z)) / self.partition.delta_z
    }

    /// `(z_k, ρ̃(k))` pairs.
    pub fn bars(&self) -> Vec<(f64, f64)> {
        self.partition
            .k_range()
            .map(|k| (self.partition.center(k), self.mass(k)))
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }
}

pub fn histogram_density(exp: &RepeatedExperiment, delta_z: f64) -> Result<HistogramDensity> {
    let partition = IntervalPartition::new(exp.rho_u(), delta_z)?;
    let n = exp.repetitions() as f64;
    let mut masses = vec![0.0; partition.len()];
    for (m, p) in count_distribution(exp).values().iter().enumerate() {
        masses[partition.slot(partition.bin_of(m as f64 / n))] += p;
    }
    Ok(HistogramDensity { partition, masses })
}

/// Spectrum of the coarse-grained frequency operator: eigenvalue `z_k` with
/// presence `ρ̃(k)`, as discrete bars.
pub fn coarse_frequency_operator_density(
    exp: &RepeatedExperiment,
    delta_z: f64,
) -> Result<Vec<(f64, f64)>> {
    Ok(histogram_density(exp, delta_z)?.bars())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branching::Error;

    #[test]
    fn peak_height_and_width() {
        let f = frequency_density(&RepeatedExperiment::binary(0.3, 1000).unwrap()).unwrap();
        assert_eq!(f.peak_location(), 0.3);
        let want = (1000.0 / (2.0 * PI * 0.21)).sqrt();
        assert!((f.peak_height() - want).abs() < 1e-12);
        assert!((f.peak_height() - 27.53).abs() < 0.005);
        assert!((f.std_dev() - 0.014_49).abs() < 5e-6);
    }

    #[test]
    fn quadrupling_n_halves_width() {
        let a = frequency_density(&RepeatedExperiment::binary(0.3, 250).unwrap()).unwrap();
        let b = frequency_density(&RepeatedExperiment::binary(0.3, 1000).unwrap()).unwrap();
        assert!((a.std_dev() / b.std_dev() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn integrates_to_one_for_large_n() {
        for n in [100, 1000, 100_000, 1_000_000] {
            let f = frequency_density(&RepeatedExperiment::binary(0.3, n).unwrap()).unwrap();
            assert!(
                f.normalization_deficit().abs() < 1e-6,
                "N={n}: {}",
                f.normalization_deficit()
            );
        }
        // N = 2 loses visible mass past the ends of [0, 1]
        let small = frequency_density(&RepeatedExperiment::binary(0.3, 2).unwrap()).unwrap();
        assert!(small.normalization_deficit() > 1e-3);
    }

    #[test]
    fn degenerate_density_refused() {
        assert_eq!(
            frequency_density(&RepeatedExperiment::binary(0.0, 10).unwrap()),
            Err(Error::Degenerate { rho_u: 0.0 })
        );
    }

    #[test]
    fn partition_covers_unit_interval() {
        for &(rho, dz) in &[
            (0.3, 0.1),
            (0.5, 1.0),
            (0.3, 1.0),
            (0.0, 0.25),
            (1.0, 0.3),
            (0.3, 0.015_811),
        ] {
            let p = IntervalPartition::new(rho, dz).unwrap();
            let ks: Vec<i64> = p.k_range().collect();
            assert_eq!(p.interval(ks[0]).0, 0.0, "rho={rho} dz={dz}");
            assert_eq!(p.interval(*ks.last().unwrap()).1, 1.0);
            for w in ks.windows(2) {
                assert!((p.interval(w[0]).1 - p.interval(w[1]).0).abs() < 1e-12);
            }
            assert!(ks.contains(&0));
            for k in ks {
                let (lo, hi) = p.interval(k);
                assert!(hi > lo, "empty bin {k} for rho={rho} dz={dz}");
            }
        }
    }

    #[test]
    fn full_width_bin_at_half() {
        let h = histogram_density(&RepeatedExperiment::binary(0.5, 7).unwrap(), 1.0).unwrap();
        assert_eq!(h.masses.len(), 1);
        assert!((h.masses[0] - 1.0).abs() < 1e-15);
        assert!((h.evaluate(0.9) - 1.0).abs() < 1e-15);
        let bars =
            coarse_frequency_operator_density(&RepeatedExperiment::binary(0.5, 7).unwrap(), 1.0)
                .unwrap();
        assert_eq!(bars.len(), 1);
        assert_eq!(bars[0].0, 0.5);
    }

    #[test]
    fn clipped_bins_keep_all_mass() {
        for &(rho, n, dz) in &[
            (0.3, 1000, 0.05),
            (0.02, 50, 0.1),
            (0.97, 31, 0.3),
            (0.3, 10, 1.0),
        ] {
            let h = histogram_density(&RepeatedExperiment::binary(rho, n).unwrap(), dz).unwrap();
            assert!((h.total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn coarse_operator_concentrates() {
        let bars = coarse_frequency_operator_density(
            &RepeatedExperiment::binary(0.3, 1000).unwrap(),
            0.05,
        )
        .unwrap();
        let central = bars
            .iter()
            .find(|(z, _)| (z - 0.3).abs() < 1e-12)
            .unwrap()
            .1;
        assert!(central > 0.9, "{central}");
        assert!((bars.iter().map(|b| b.1).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_width() {
        assert!(IntervalPartition::new(0.3, 0.0).is_err());
        assert!(IntervalPartition::new(0.3, 1.5).is_err());
    }
}
