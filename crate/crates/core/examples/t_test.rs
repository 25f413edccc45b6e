//! The paired one-tailed t-test on hand-made gap samples, and the t
//! distribution it rests on.
//!
//!     cargo run --example t_test

use crg::ttest::{paired_t_one_tailed, t_sf, verdict};
use crg::GapSample;

fn gaps(values: &[(f64, f64)]) -> Vec<GapSample> {
    values
        .iter()
        .enumerate()
        .map(|(i, &(unary_gap, binary_gap))| GapSample {
            round: i + 1,
            unary_gap,
            binary_gap,
        })
        .collect()
}

fn main() -> Result<(), crg::ttest::TTestError> {
    let suspect = gaps(&[(0.031, 0.004), (0.027, 0.006), (0.035, 0.003), (0.029, 0.005)]);
    let shadow = gaps(&[(0.002, -0.001), (-0.003, 0.001), (0.001, 0.000), (0.004, -0.002)]);
    let r = paired_t_one_tailed(&suspect, &shadow)?;
    println!("t = {:.4}, df = {}, p = {:.3e} -> {}", r.t, r.df, r.p, verdict(r.p, 0.05));

    let same = paired_t_one_tailed(&shadow, &shadow)?;
    println!("identical arms: p = {}, zero_difference = {}", same.p, same.zero_difference);

    println!("\nupper-tail probabilities P(T > t):");
    for df in [1.0, 4.0, 10.0, 30.0, 100.0] {
        let row: Vec<String> = [1.0, 2.0, 3.0, 4.0]
            .iter()
            .map(|&t| format!("{:.5}", t_sf(t, df)))
            .collect();
        println!("df {df:>5}: t=1..4 -> {}", row.join("  "));
    }
    Ok(())
}
