//! One-tailed paired t-test and the Student's t distribution behind it.
//!
//! The t CDF is evaluated through the regularized incomplete beta function,
//! `P(T <= t) = 1 - I_x(df/2, 1/2) / 2` for `t >= 0` with `x = df / (df + t^2)`,
//! using a Lentz continued fraction with the usual symmetry switch at
//! `x = (a + 1) / (a + b + 2)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{GapSample, Verdict};
use crate::stats::pairwise_mean;

const CF_MAX_ITER: usize = 20_000;
const CF_EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

#[derive(Debug, Error, PartialEq)]
pub enum TTestError {
    #[error("gap lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 rounds, got {0}")]
    TooFewRounds(usize),
    #[error("round {0} of the suspect is paired with round {1} of the shadow")]
    Unpaired(usize, usize),
    #[error("gap values must be finite")]
    NonFinite,
}

/// Outcome of the one-tailed test of H1: mean(suspect) > mean(shadow).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    /// `+inf` / `-inf` when the differences have zero variance but a nonzero mean.
    pub t: f64,
    pub df: usize,
    pub p: f64,
    /// Every paired difference was exactly zero; `p` is 1.
    pub zero_difference: bool,
}

/// Flattens gap samples round-major, unary before binary.
pub fn flatten_gaps(gaps: &[GapSample]) -> Vec<f64> {
    gaps.iter()
        .flat_map(|g| [g.unary_gap, g.binary_gap])
        .collect()
}

/// Paired one-tailed t-test over `2K` scalars per arm.
pub fn paired_t_one_tailed(
    d_sus: &[GapSample],
    d_sdw: &[GapSample],
) -> Result<TTestResult, TTestError> {
    if d_sus.len() != d_sdw.len() {
        return Err(TTestError::LengthMismatch(d_sus.len(), d_sdw.len()));
    }
    if d_sus.len() < 2 {
        return Err(TTestError::TooFewRounds(d_sus.len()));
    }
    if let Some((s, h)) = d_sus.iter().zip(d_sdw).find(|(s, h)| s.round != h.round) {
        return Err(TTestError::Unpaired(s.round, h.round));
    }
    let diffs: Vec<f64> = flatten_gaps(d_sus)
        .iter()
        .zip(flatten_gaps(d_sdw))
        .map(|(s, h)| s - h)
        .collect();
    one_sample_upper(&diffs)
}

/// One-sample upper-tailed t-test of H1: mean(diffs) > 0.
pub fn one_sample_upper(diffs: &[f64]) -> Result<TTestResult, TTestError> {
    let n = diffs.len();
    if n < 2 {
        return Err(TTestError::TooFewRounds(n));
    }
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(TTestError::NonFinite);
    }
    let df = n - 1;
    let first = diffs[0];
    if diffs.iter().all(|&d| d == first) {
        let (t, p, zero) = if first == 0.0 {
            (0.0, 1.0, true)
        } else if first > 0.0 {
            (f64::INFINITY, 0.0, false)
        } else {
            (f64::NEG_INFINITY, 1.0, false)
        };
        return Ok(TTestResult {
            t,
            df,
            p,
            zero_difference: zero,
        });
    }

    let mean = pairwise_mean(diffs);
    let squares: Vec<f64> = diffs.iter().map(|d| (d - mean) * (d - mean)).collect();
    let sd = (squares.iter().sum::<f64>() / df as f64).sqrt();
    let t = mean * (n as f64).sqrt() / sd;
    Ok(TTestResult {
        t,
        df,
        p: t_sf(t, df as f64),
        zero_difference: false,
    })
}

/// `Stolen` iff `p < alpha` (strict).
pub fn verdict(p: f64, alpha: f64) -> Verdict {
    if p < alpha {
        Verdict::Stolen
    } else {
        Verdict::Innocent
    }
}

/// Student's t CDF `P(T <= t)` with `df` degrees of freedom.
pub fn t_cdf(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t > 0.0 {
        1.0 - half_tail(t, df)
    } else {
        half_tail(t, df)
    }
}

/// Upper tail `P(T > t)`, accurate for large `t` where `1 - t_cdf` would
/// round to zero.
pub fn t_sf(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t > 0.0 {
        half_tail(t, df)
    } else {
        1.0 - half_tail(t, df)
    }
}

/// `P(T > |t|) = I_x(df/2, 1/2) / 2`.
fn half_tail(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let t2 = t * t;
    let x = df / (df + t2);
    let y = t2 / (df + t2);
    0.5 * inc_beta_xy(df / 2.0, 0.5, x, y)
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    inc_beta_xy(a, b, x, 1.0 - x)
}

/// `I_x(a, b)` with `y = 1 - x` supplied separately so neither loses
/// precision near 0 or 1.
fn inc_beta_xy(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_x = if y < 0.5 { (-y).ln_1p() } else { x.ln() };
    let ln_y = if x < 0.5 { (-x).ln_1p() } else { y.ln() };
    let front = (a * ln_x + b * ln_y - ln_beta(a, b)).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, y) / b
    }
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// `ln B(a, b)`. For large arguments the `ln Gamma` terms are combined
/// through their Stirling series so the large parts cancel analytically.
fn ln_beta(a: f64, b: f64) -> f64 {
    let (small, large) = if a < b { (a, b) } else { (b, a) };
    if large >= 20.0 {
        ln_gamma(small) + ln_gamma_ratio(large, small)
    } else {
        ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
    }
}

/// `ln Gamma(z) - ln Gamma(z + s)` for `z >= 20`.
fn ln_gamma_ratio(z: f64, s: f64) -> f64 {
    -(z - 0.5) * (s / z).ln_1p() - s * (z + s).ln() + s + stirling_tail(z) - stirling_tail(z + s)
}

/// `ln Gamma(z) - [(z - 1/2) ln z - z + ln(2 pi)/2]`.
fn stirling_tail(z: f64) -> f64 {
    let z2 = z * z;
    (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * z2)) / z2) / z2) / z
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x).
        return (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    if x >= 20.0 {
        return (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + stirling_tail(x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(0.5) - PI.sqrt().ln()).abs() < 1e-14);
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-12);
        // ln 19! on both sides of the Stirling switch.
        let ln_fact19: f64 = (1..=19).map(|k| (k as f64).ln()).sum();
        assert!((ln_gamma(20.0) - ln_fact19).abs() < 1e-12);
        let ln_fact20 = ln_fact19 + 20f64.ln();
        assert!((ln_gamma(21.0) - ln_fact20).abs() < 1e-12);
    }

    #[test]
    fn cdf_trivial_values() {
        for df in [1.0, 4.0, 30.0, 1e6] {
            assert_eq!(t_cdf(0.0, df), 0.5);
        }
        assert!((t_cdf(1.0, 1.0) - 0.75).abs() < 1e-15);
        assert!((t_cdf(2.776, 4.0) - 0.975).abs() < 1e-3);
    }

    #[test]
    fn cdf_closed_forms() {
        // df=1 (Cauchy), df=2 and df=3 have elementary CDFs; lower tails are
        // written without cancellation.
        for t in [0.01f64, 0.3, 1.0, 2.5, 10.0, 100.0] {
            let cauchy = (1.0 / t).atan() / PI;
            assert!(rel(t_cdf(-t, 1.0), cauchy) < 1e-12, "df=1 t={t}");
            let s = (2.0 + t * t).sqrt();
            let two = 1.0 / (s * (s + t));
            assert!(rel(t_cdf(-t, 2.0), two) < 1e-12, "df=2 t={t}");
            let r3 = t / 3f64.sqrt();
            let three = 0.5 - (r3 / (1.0 + r3 * r3) + r3.atan()) / PI;
            if t <= 10.0 {
                assert!(rel(t_cdf(-t, 3.0), three) < 1e-10, "df=3 t={t}");
            }
        }
    }

    /// Reference values from 40-digit arbitrary-precision evaluation.
    #[test]
    fn cdf_matches_high_precision_reference() {
        let cases = [
            (0.5, 1.0, 0.647_583_617_650_433_274_2),
            (-3.0, 4.0, 0.019_970_984_035_859_413_64),
            (4.242_640_687_119_285, 4.0, 0.993_382_200_218_158_653_3),
            (2.776, 4.0, 0.974_988_610_840_011_793_9),
            (1.5, 10.0, 0.917_746_336_777_279_909_6),
            (-2.5, 30.0, 0.009_057_824_534_033_347_051),
            (-8.0, 100.0, 1.136_432_403_864_040_324e-12),
            (-5.0, 1000.0, 3.383_628_182_324_315_191e-7),
            (-3.0, 1e6, 0.001_349_931_270_710_898_529),
            (0.001, 1e6, 0.500_398_942_114_175_455_1),
            (-100.0, 1.0, 0.003_182_992_764_908_255_149),
            (-100.0, 3.0, 1.102_260_961_592_455_559e-6),
            (-40.0, 20.0, 7.287_348_277_155_381_938e-21),
            (-6.0, 1e5, 9.899_647_278_008_812_792e-10),
            (-30.0, 1e6, 6.010_047_116_831_718_941e-198),
            (-10.0, 200.0, 1.188_741_572_210_379_567e-19),
            (0.3, 5000.0, 0.617_905_186_665_278_431_4),
        ];
        for (t, df, expected) in cases {
            let got = t_cdf(t, df);
            assert!(rel(got, expected) < 1e-10, "t={t} df={df}: {got} vs {expected}");
        }
    }

    #[test]
    fn symmetry_and_monotonicity() {
        for df in [1.0, 2.0, 7.0, 59.0, 1e4] {
            let (mut prev, mut prev_sf) = (0.0, 1.0);
            for i in -200..=200 {
                let t = i as f64 * 0.25;
                let (c, sf) = (t_cdf(t, df), t_sf(t, df));
                assert!((t_cdf(-t, df) - (1.0 - c)).abs() < 1e-12);
                if i > -200 {
                    assert!(c >= prev, "cdf decreasing at t={t} df={df}");
                    assert!(t <= 0.0 || sf < prev_sf || sf == 0.0, "sf not decreasing at t={t} df={df}");
                }
                (prev, prev_sf) = (c, sf);
            }
        }
    }

    #[test]
    fn incomplete_beta_edges() {
        assert_eq!(regularized_incomplete_beta(2.0, 3.0, 0.0), 0.0);
        assert_eq!(regularized_incomplete_beta(2.0, 3.0, 1.0), 1.0);
        // I_x(1, 1) = x; I_x(a, 1) = x^a.
        assert!((regularized_incomplete_beta(1.0, 1.0, 0.37) - 0.37).abs() < 1e-14);
        assert!((regularized_incomplete_beta(3.0, 1.0, 0.5) - 0.125).abs() < 1e-14);
    }

    fn gaps(values: &[(f64, f64)]) -> Vec<GapSample> {
        values
            .iter()
            .enumerate()
            .map(|(i, &(u, b))| GapSample {
                round: i + 1,
                unary_gap: u,
                binary_gap: b,
            })
            .collect()
    }

    #[test]
    fn identical_arms_give_zero_difference() {
        let g = gaps(&[(0.1, 0.2), (0.3, -0.1), (0.0, 0.5)]);
        let r = paired_t_one_tailed(&g, &g).unwrap();
        assert!(r.zero_difference);
        assert_eq!(r.p, 1.0);
        assert_eq!(r.df, 5);
    }

    #[test]
    fn worked_differences_one_to_five() {
        let r = one_sample_upper(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert!((r.t - 4.242_640_687).abs() < 1e-8);
        assert_eq!(r.df, 4);
        assert!((r.p - 0.0066).abs() < 0.0005, "{}", r.p);
        assert!(rel(r.p, 0.006_617_799_781_841_347) < 1e-10);
    }

    #[test]
    fn constant_differences_use_sentinels() {
        let r = one_sample_upper(&[-1.0; 6]).unwrap();
        assert_eq!((r.t, r.p), (f64::NEG_INFINITY, 1.0));
        let r = one_sample_upper(&[0.1; 6]).unwrap();
        assert_eq!((r.t, r.p), (f64::INFINITY, 0.0));
        assert!(!r.zero_difference);
    }

    #[test]
    fn verdict_is_strict() {
        assert_eq!(verdict(1e-3, 0.05), Verdict::Stolen);
        assert_eq!(verdict(0.05, 0.05), Verdict::Innocent);
        assert_eq!(verdict(0.29, 0.05), Verdict::Innocent);
    }

    #[test]
    fn flatten_order_is_round_major() {
        let g = gaps(&[(1.0, 2.0), (3.0, 4.0)]);
        assert_eq!(flatten_gaps(&g), [1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn pairing_errors() {
        let a = gaps(&[(0.0, 0.0), (1.0, 1.0)]);
        let b = gaps(&[(0.0, 0.0)]);
        assert_eq!(
            paired_t_one_tailed(&a, &b),
            Err(TTestError::LengthMismatch(2, 1))
        );
        assert_eq!(
            paired_t_one_tailed(&b, &b),
            Err(TTestError::TooFewRounds(1))
        );
        let mut c = a.clone();
        c[1].round = 7;
        assert_eq!(paired_t_one_tailed(&a, &c), Err(TTestError::Unpaired(2, 7)));
        let mut d = a.clone();
        d[0].unary_gap = f64::NAN;
        assert_eq!(paired_t_one_tailed(&d, &a), Err(TTestError::NonFinite));
    }

    #[test]
    fn tiny_p_values_do_not_round_to_zero() {
        let mut diffs: Vec<f64> = (0..60).map(|i| 1.0 + 0.001 * i as f64).collect();
        diffs[0] = 0.9;
        let r = one_sample_upper(&diffs).unwrap();
        assert!(r.p > 0.0 && r.p < 1e-50, "{}", r.p);
    }
}
