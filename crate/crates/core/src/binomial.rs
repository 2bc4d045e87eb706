//! Binomial probability masses that stay accurate for very large trial counts.
//!
//! Small `n` uses exact integer coefficients and direct powers. Larger `n`
//! switches to Loader's saddle-point form, which works with logarithms of the
//! deviance `bd0` and the Stirling remainder instead of raw factorials, so
//! `C(1000, 300)` and friends never materialize.

use std::f64::consts::PI;

/// Largest `n` handled with exact integer coefficients.
pub const DIRECT_LIMIT: u64 = 30;

// lnΓ(n+1) - (n+½)ln n + n - ln√(2π) for n = 0..=15.
const STIRLERR_TABLE: [f64; 16] = [
    0.0,
    0.081_061_466_795_327_26,
    0.041_340_695_955_409_3,
    0.027_677_925_684_998_34,
    0.020_790_672_103_765_093,
    0.016_644_691_189_821_192,
    0.013_876_128_823_070_748,
    0.011_896_709_945_891_77,
    0.010_411_265_261_972_096,
    0.009_255_462_182_712_733,
    0.008_330_563_433_362_87,
    0.007_573_675_487_951_841,
    0.006_942_840_107_209_53,
    0.006_408_994_188_004_207,
    0.005_951_370_112_758_848,
    0.005_554_733_551_962_801,
];

fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n < STIRLERR_TABLE.len() as u64 {
        return STIRLERR_TABLE[n as usize];
    }
    let x = n as f64;
    let xx = x * x;
    if n > 500 {
        (S0 - S1 / xx) / x
    } else if n > 80 {
        (S0 - (S1 - S2 / xx) / xx) / x
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / xx) / xx) / xx) / x
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / xx) / xx) / xx) / xx) / x
    }
}

/// `x ln(x/np) + np - x`, evaluated without cancellation when `x ≈ np`.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

fn exact_choose(n: u64, m: u64) -> f64 {
    let k = m.min(n - m);
    let mut c: u64 = 1;
    for i in 1..=k {
        // exact at every step: c·(n-k+i) is divisible by i
        c = c * (n - k + i) / i;
    }
    c as f64
}

/// Probability of `m` successes in `n` trials with success mass `p` and
/// failure mass `q`. `p + q` is expected to be 1; both are passed so a
/// complement formed by summation is used as given.
pub fn pmf(n: u64, m: u64, p: f64, q: f64) -> f64 {
    if m > n {
        return 0.0;
    }
    if p == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if q == 0.0 {
        return if m == n { 1.0 } else { 0.0 };
    }
    if n <= DIRECT_LIMIT {
        return exact_choose(n, m) * p.powi(m as i32) * q.powi((n - m) as i32);
    }
    let nf = n as f64;
    if m == 0 {
        let lc = if p < 0.1 {
            -bd0(nf, nf * q) - nf * p
        } else {
            nf * q.ln()
        };
        return lc.exp();
    }
    if m == n {
        let lc = if q < 0.1 {
            -bd0(nf, nf * p) - nf * q
        } else {
            nf * p.ln()
        };
        return lc.exp();
    }
    let mf = m as f64;
    let lc = stirlerr(n) - stirlerr(m) - stirlerr(n - m) - bd0(mf, nf * p) - bd0(nf - mf, nf * q);
    let lf = (2.0 * PI).ln() + mf.ln() + (-mf / nf).ln_1p();
    (lc - 0.5 * lf).exp()
}

/// All `n + 1` masses.
pub fn pmf_table(n: u64, p: f64, q: f64) -> Vec<f64> {
    (0..=n).map(|m| pmf(n, m, p, q)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn matches_high_precision_values() {
        // 40-digit reference values of C(1000, m)·0.3^m·0.7^(1000-m)
        let reference = [
            (0, 1.253_256_639_965_718_3e-155),
            (150, 1.070_665_520_494_826_2e-28),
            (250, 6.125_571_029_589_016e-5),
            (300, 2.752_100_382_126_838_6e-2),
            (301, 2.742_957_191_488_543_4e-2),
            (350, 8.146_373_068_964_269e-5),
            (450, 5.853_136_323_778_175_5e-24),
        ];
        for (m, want) in reference {
            let got = pmf(1000, m, 0.3, 0.7);
            assert!(rel(got, want) < 1e-13, "m={m}: {got} vs {want}");
        }
        let got = pmf(1_000_000, 300_000, 0.3, 0.7);
        assert!(rel(got, 8.705_631_546_366_808e-4) < 1e-12, "{got}");
        let got = pmf(1_000_000, 301_000, 0.3, 0.7);
        assert!(rel(got, 8.053_945_752_684_004e-5) < 1e-12, "{got}");
    }

    #[test]
    fn direct_and_saddle_point_agree_at_the_switch() {
        // n = 31 is the first saddle-point case; compare against exact products
        for m in 0..=31u64 {
            let direct = exact_choose(31, m) * 0.3f64.powi(m as i32) * 0.7f64.powi(31 - m as i32);
            assert!(rel(pmf(31, m, 0.3, 0.7), direct) < 1e-13);
        }
    }

    #[test]
    fn stirlerr_series_is_continuous_with_table() {
        // lnΓ(17) - 16.5 ln 16 + 16 - ln√(2π)
        assert!((stirlerr(16) - 0.005_207_655_919_609_64).abs() < 1e-15);
    }

    #[test]
    fn degenerate_masses() {
        assert_eq!(pmf(50, 0, 0.0, 1.0), 1.0);
        assert_eq!(pmf(50, 3, 0.0, 1.0), 0.0);
        assert_eq!(pmf(50, 50, 1.0, 0.0), 1.0);
        assert_eq!(pmf(5, 6, 0.5, 0.5), 0.0);
    }
}
