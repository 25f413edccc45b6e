//! False-positive rate of the test when the shadow encoder has its own
//! content vectors, so an innocent suspect and the shadow differ in every
//! embedding and not just in what they memorized.
//!
//!     cargo run --release --example null_calibration

use crg::{simulate, Scenario, SimulatorParams, Verdict, VerificationConfig};

fn main() -> crg::Result<()> {
    let params = SimulatorParams {
        shadow_seed: Some(99),
        pub_size: 256,
        pvt_size: 256,
        ..SimulatorParams::default()
    };
    let seeds = 40;
    for scenario in [Scenario::Unrelated, Scenario::PubOnly] {
        let mut stolen = 0;
        let mut ps = Vec::new();
        for seed in 0..seeds {
            let mut cfg = VerificationConfig::with_defaults(20, 32, 32, 16);
            cfg.seed = seed;
            let report = simulate(scenario, &cfg, &params)?;
            stolen += usize::from(report.verdict == Verdict::Stolen);
            ps.push(report.p_value);
        }
        ps.sort_by(f64::total_cmp);
        println!(
            "{:<10} Stolen in {stolen}/{seeds} runs, median p {:.3e}",
            scenario.name(),
            ps[ps.len() / 2]
        );
    }
    Ok(())
}
