//! Writes a report and its per-round gap table, then reads the report back.
//!
//!     cargo run --release --example export_gaps -- out_dir

use std::path::PathBuf;

use crg::report::export_gaps;
use crg::{simulate, Scenario, SimulatorParams, VerificationReport, VerificationConfig};

fn main() -> crg::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let mut cfg = VerificationConfig::with_defaults(10, 32, 32, 16);
    cfg.seed = 3;
    let params = SimulatorParams {
        pub_size: 128,
        pvt_size: 128,
        ..SimulatorParams::default()
    };
    let report = simulate(Scenario::PubPlusAlt, &cfg, &params)?;

    let report_path = dir.join("report.json");
    let gaps_path = dir.join("gaps.csv");
    report.write_json(&report_path)?;
    export_gaps(&report, &gaps_path)?;

    let back = VerificationReport::read_json(&report_path)?;
    assert_eq!(back, report);
    println!("wrote {} and {}", report_path.display(), gaps_path.display());
    print!("{}", std::fs::read_to_string(&gaps_path).unwrap());
    Ok(())
}
