//! The four suspect scenarios over several seeds, scored with sensitivity,
//! specificity and AUROC.
//!
//!     cargo run --release --example scenarios

use crg::metrics::{metrics, suspicion_score};
use crg::{simulate, Scenario, SimulatorParams, Verdict, VerificationConfig};

fn main() -> crg::Result<()> {
    let params = SimulatorParams::default();
    let mut decisions = Vec::new();
    let mut scores = Vec::new();

    println!("{:<14} {:>5} {:>12} {:>9}", "scenario", "seed", "p", "verdict");
    for scenario in Scenario::ALL {
        for seed in 0..5 {
            let mut cfg = VerificationConfig::with_defaults(30, 64, 64, 16);
            cfg.seed = seed;
            let report = simulate(scenario, &cfg, &params)?;
            println!(
                "{:<14} {:>5} {:>12.3e} {:>9}",
                scenario.name(),
                seed,
                report.p_value,
                report.verdict
            );
            let illegal = scenario.ground_truth_illegal();
            decisions.push((report.verdict == Verdict::Stolen, illegal));
            scores.push((suspicion_score(report.p_value), illegal));
        }
    }

    let m = metrics(&decisions, &scores)?;
    println!(
        "\nsensitivity {:.3}  specificity {:.3}  AUROC {:.3}",
        m.sensitivity, m.specificity, m.auroc
    );
    Ok(())
}
