use presence_core::branching::{
    chebyshev_tail, count_distribution, frequency_density, gaussian_approx, histogram_density,
    sample_branch, scaled_bin_width,
};
use presence_core::decision::{
    choose, expected_utility, mismatch_report_with, repeated_weight_distribution, stake_scenario,
};
use presence_core::inference::{posterior, Observation, Prior, DEFAULT_GRID_STEP};
use presence_core::quantum::{
    coherence, entangle_environment, evolve, partial_trace, HermitianOperator,
};
use presence_core::{Complex64, RepeatedExperiment, StateVector};
use serde_json::json;

use crate::{invalid, CliError, FrequencyTable, RunConfig, Table};

/// Largest N for commands that emit one row per count.
pub const MAX_ROWS: u64 = 10_000_000;
pub const MAX_ENV_QUBITS: usize = 20;

fn require<T: Copy>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| invalid(format!("--{flag} is required")))
}

fn open_unit(value: Option<f64>, flag: &str) -> Result<f64, CliError> {
    let v = require(value, flag)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(invalid(format!(
            "--{flag} {v} must lie strictly between 0 and 1"
        )))
    }
}

fn closed_unit(value: Option<f64>, flag: &str) -> Result<f64, CliError> {
    let v = require(value, flag)?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(invalid(format!("--{flag} {v} must lie in [0, 1]")))
    }
}

fn repetitions(config: &RunConfig) -> Result<u64, CliError> {
    match require(config.n, "n")? {
        0 => Err(invalid("--n must be positive")),
        n if n > MAX_ROWS => Err(invalid(format!("--n {n} exceeds {MAX_ROWS}"))),
        n => Ok(n),
    }
}

fn bin_width(value: f64) -> Result<f64, CliError> {
    if value > 0.0 && value <= 1.0 {
        Ok(value)
    } else {
        Err(invalid(format!("--delta-z {value} must lie in (0, 1]")))
    }
}

pub fn run_frequency(config: &RunConfig) -> Result<Table, CliError> {
    let rho = open_unit(config.rho_u, "rho-u")?;
    let n = repetitions(config)?;
    let dz = bin_width(config.delta_z.unwrap_or_else(|| scaled_bin_width(0.5, n)))?;

    let exp = RepeatedExperiment::binary(rho, n)?;
    let counts = count_distribution(&exp);
    let density = frequency_density(&exp)?;
    let hist = histogram_density(&exp, dz)?;
    let nf = n as f64;

    let mut table = match config.table {
        FrequencyTable::Density => {
            let mut t = Table::new(vec![
                "z",
                "presence_density",
                "gaussian_density",
                "histogram_density",
            ]);
            for (m, p) in counts.values().iter().enumerate() {
                let z = m as f64 / nf;
                t.push(vec![
                    z.into(),
                    (nf * p).into(),
                    density.evaluate(z).into(),
                    hist.evaluate(z).into(),
                ]);
            }
            t
        }
        FrequencyTable::Counts => {
            let mut t = Table::new(vec!["m", "exact", "gaussian"]);
            for (m, p) in counts.values().iter().enumerate() {
                t.push(vec![
                    (m as u64).into(),
                    (*p).into(),
                    gaussian_approx(&exp, m as f64)?.into(),
                ]);
            }
            t
        }
        FrequencyTable::Bars => {
            let mut t = Table::new(vec![
                "z_k",
                "rho_tilde",
                "histogram_density",
                "gaussian_density",
            ]);
            for (z, mass) in hist.bars() {
                t.push(vec![
                    z.into(),
                    mass.into(),
                    (mass / dz).into(),
                    density.evaluate(z).into(),
                ]);
            }
            t
        }
    };
    table.note("peak_location", density.peak_location());
    table.note("peak_height", density.peak_height());
    table.note("std_dev", density.std_dev());
    table.note("delta_z", dz);
    table.note("bins", hist.masses.len());
    table.note("histogram_masses_total", hist.total());
    table.note(
        "density_normalization_deficit",
        density.normalization_deficit(),
    );
    Ok(table)
}

pub fn run_chebyshev(config: &RunConfig) -> Result<Table, CliError> {
    let rho = open_unit(config.rho_u, "rho-u")?;
    let n = repetitions(config)?;
    let dz = config.delta_z.unwrap_or(0.1);
    if !(dz > 0.0 && dz.is_finite()) {
        return Err(invalid(format!("--delta-z {dz} must be positive")));
    }

    let mut sweep: Vec<u64> = (0..8)
        .flat_map(|k| [1, 2, 5].map(|c| c * 10u64.pow(k)))
        .filter(|&v| v < n)
        .collect();
    sweep.push(n);

    let mut table = Table::new(vec!["n", "exact_tail", "bound"]);
    let mut holds = true;
    for &size in &sweep {
        let t = chebyshev_tail(&RepeatedExperiment::binary(rho, size)?, dz)?;
        holds &= t.exact_tail <= t.bound;
        table.push(vec![size.into(), t.exact_tail.into(), t.bound.into()]);
    }
    let last = chebyshev_tail(&RepeatedExperiment::binary(rho, n)?, dz)?;
    table.note("exact_tail", last.exact_tail);
    table.note("bound", last.bound);
    table.note("bound_holds_everywhere", holds);
    Ok(table)
}

pub fn run_posterior(config: &RunConfig) -> Result<Table, CliError> {
    let n = repetitions(config)?;
    let step = config.grid_step.unwrap_or(DEFAULT_GRID_STEP);
    if !(1e-6..=0.5).contains(&step) {
        return Err(invalid(format!(
            "--grid-step {step} must lie in [1e-6, 0.5]"
        )));
    }
    let mass = config.credible_mass;
    if !(mass > 0.0 && mass < 1.0) {
        return Err(invalid(format!(
            "--credible-mass {mass} must lie strictly between 0 and 1"
        )));
    }
    let (obs, sampled) = match (config.z, config.seed) {
        (Some(z), _) => (Observation::new(closed_unit(Some(z), "z")?, n)?, None),
        (None, Some(seed)) => {
            let rho = closed_unit(config.rho_u, "rho-u")?;
            let branch = sample_branch(&RepeatedExperiment::binary(rho, n)?, seed);
            let m = branch.count(0) as u64;
            (Observation::from_counts(m, n)?, Some(m))
        }
        (None, None) => {
            return Err(invalid(
                "posterior needs --z, or --seed with --rho-u to sample a branch",
            ))
        }
    };

    let post = posterior(&Prior::uniform(step)?, &obs)?;
    let mut table = Table::new(vec!["p", "posterior_density"]);
    for (p, d) in post.grid().iter().zip(post.densities()) {
        table.push(vec![(*p).into(), (*d).into()]);
    }
    let ci = post.credible_interval(mass)?;
    table.note("z", obs.z);
    if let Some(m) = sampled {
        table.note("sampled_count", m);
    }
    table.note("mode", post.mode());
    table.note("mean", post.mean());
    table.note("std_dev", post.std_dev());
    table.note(
        "credible_interval",
        json!({ "mass": mass, "lo": ci.lo, "hi": ci.hi, "captured": ci.mass }),
    );
    table.note("log_normalizer", post.log_normalizer);
    Ok(table)
}

fn bets_under(weight: f64) -> Result<serde_json::Value, CliError> {
    let (w, bets) = stake_scenario(weight)?;
    Ok(json!({
        "weight_a": weight,
        "expected_a": expected_utility(&w, &bets[0].payoff)?,
        "expected_b": expected_utility(&w, &bets[1].payoff)?,
        "choice": choose(&w, &bets)?,
    }))
}

pub fn run_decision(config: &RunConfig) -> Result<Table, CliError> {
    let rho = open_unit(config.rho_u, "rho-u")?;
    let w = open_unit(config.w_u, "w-u")?;
    let n = repetitions(config)?;
    let report = mismatch_report_with(rho, w, n, config.window_sigmas)?;

    let presence = count_distribution(&RepeatedExperiment::binary(rho, n)?);
    let weight = repeated_weight_distribution(w, n)?;
    let mut table = Table::new(vec!["m", "z", "presence", "weight"]);
    for (m, (p, q)) in presence.values().iter().zip(weight.values()).enumerate() {
        table.push(vec![
            (m as u64).into(),
            (m as f64 / n as f64).into(),
            (*p).into(),
            (*q).into(),
        ]);
    }
    table.note("mismatch", report);
    // two-outcome stake: bet A pays 2 on A, bet B pays 1.5 on B
    table.note("bets_at_presence", bets_under(rho)?);
    table.note("bets_at_weight", bets_under(w)?);
    Ok(table)
}

pub fn run_evolve(config: &RunConfig) -> Result<Table, CliError> {
    let rho = closed_unit(config.rho_u, "rho-u")?;
    if config.steps == 0 || config.steps > MAX_ROWS as usize {
        return Err(invalid(format!(
            "--steps {} must lie in [1, {MAX_ROWS}]",
            config.steps
        )));
    }
    if !(config.t_max >= 0.0 && config.t_max.is_finite()) {
        return Err(invalid(format!(
            "--t-max {} must be finite and nonnegative",
            config.t_max
        )));
    }
    if !(config.omega.is_finite() && config.detuning.is_finite()) {
        return Err(invalid("--omega and --detuning must be finite"));
    }
    let c = |v: f64| Complex64::new(v, 0.0);
    let h = HermitianOperator::from_rows(&[
        vec![c(0.0), c(config.omega)],
        vec![c(config.omega), c(config.detuning)],
    ])?;
    let psi = StateVector::from_real(&[rho.sqrt(), (1.0 - rho).sqrt()])?;

    let mut table = Table::new(vec!["t", "presence_u", "presence_not_u", "norm_sq"]);
    let mut drift = 0.0f64;
    for i in 0..=config.steps {
        let t = config.t_max * i as f64 / config.steps as f64;
        let out = evolve(&psi, &h, t)?;
        let a = out.amplitudes();
        let norm = out.norm_sq();
        drift = drift.max((norm - 1.0).abs());
        table.push(vec![
            t.into(),
            a[0].norm_sqr().into(),
            a[1].norm_sqr().into(),
            norm.into(),
        ]);
    }
    table.note("max_norm_drift", drift);
    Ok(table)
}

pub fn run_decohere(config: &RunConfig) -> Result<Table, CliError> {
    let rho = closed_unit(config.rho_u, "rho-u")?;
    if !(0.0..=1.0).contains(&config.g) {
        return Err(invalid(format!("--g {} must lie in [0, 1]", config.g)));
    }
    if !config.g_phase.is_finite() {
        return Err(invalid("--g-phase must be finite"));
    }
    if config.env_qubits > MAX_ENV_QUBITS {
        return Err(invalid(format!(
            "--env-qubits {} exceeds {MAX_ENV_QUBITS}",
            config.env_qubits
        )));
    }
    let g = Complex64::from_polar(config.g, config.g_phase);
    let psi = StateVector::from_real(&[rho.sqrt(), (1.0 - rho).sqrt()])?;
    let initial = 2.0 * (rho * (1.0 - rho)).sqrt();

    let mut table = Table::new(vec!["env_qubits", "coherence", "closed_form", "purity"]);
    for q in 0..=config.env_qubits {
        let reduced = partial_trace(&entangle_environment(&psi, g, q)?, 0)?;
        let closed = initial * config.g.powi(q as i32);
        table.push(vec![
            (q as u64).into(),
            coherence(&reduced).into(),
            closed.into(),
            reduced.purity().into(),
        ]);
    }
    table.note("initial_coherence", initial);
    Ok(table)
}

#[cfg(test)]
mod tests {
    use clap::Parser;

    use super::*;
    use crate::{run, Cell};

    fn config(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("presence").chain(args.iter().copied())).unwrap()
    }

    fn floats(t: &Table, col: &str) -> Vec<f64> {
        t.column(col)
            .unwrap()
            .into_iter()
            .map(|c| match c {
                Cell::Float(v) => v,
                Cell::Int(v) => v as f64,
            })
            .collect()
    }

    #[test]
    fn counts_table_sums_to_one() {
        let t = run(&config(&[
            "frequency",
            "--rho-u",
            "0.3",
            "--n",
            "50",
            "--table",
            "counts",
        ]))
        .unwrap();
        assert_eq!(t.rows.len(), 51);
        assert!((floats(&t, "exact").iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rabi_flop() {
        let t = run(&config(&[
            "evolve",
            "--rho-u",
            "1",
            "--steps",
            "2",
            "--t-max",
            "3.141592653589793",
        ]))
        .unwrap();
        let u = floats(&t, "presence_u");
        assert!(u[1] < 1e-15 && (u[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_flags_are_reported() {
        for args in [
            &["frequency", "--n", "10"][..],
            &["chebyshev", "--rho-u", "0.3"],
            &["decohere"],
        ] {
            let err = run(&config(args)).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{args:?}");
        }
    }

    #[test]
    fn default_bin_width_scales_with_n() {
        let t = run(&config(&["frequency", "--rho-u", "0.3", "--n", "400"])).unwrap();
        assert_eq!(t.summary["delta_z"], serde_json::json!(0.025));
    }
}
