//! Full verification against in-process synthetic encoders: a suspect that
//! memorized the public set and a shadow that memorized nothing.
//!
//!     cargo run --release --example verify_synthetic

use std::sync::Arc;

use crg::simulate::synthetic_dataset;
use crg::{run_verification, EncoderHandle, Resources, RunOptions, SyntheticSpec, VerificationConfig};

fn main() -> crg::Result<()> {
    let public = synthetic_dataset("pub", 256, 32, 7)?;
    let private = synthetic_dataset("pvt", 256, 32, 7)?;

    let memorized = public.manifest().entries().to_vec();
    let suspect = SyntheticSpec::new(256, memorized, 0.02, 0.3, 7)?;
    let shadow = SyntheticSpec::new(256, Vec::<String>::new(), 0.02, 0.3, 7)?;

    let resources = Resources {
        public,
        private,
        suspect: Arc::new(EncoderHandle::synthetic(suspect)),
        shadow: Arc::new(EncoderHandle::synthetic(shadow)),
    };

    let mut cfg = VerificationConfig::with_defaults(20, 48, 48, 16);
    cfg.seed = 2024;
    let report = run_verification(&cfg, &resources, RunOptions::default())?;

    println!("verdict  {}", report.verdict);
    println!("p-value  {:.3e}", report.p_value);
    println!("t        {:.3} (df {})", report.t_statistic, report.df);
    println!("queries  {} per encoder", report.queries.suspect);
    println!("round  suspect(unary, binary)   shadow(unary, binary)");
    for (s, h) in report.gaps_suspect.iter().zip(&report.gaps_shadow).take(5) {
        println!(
            "{:>5}  ({:+.4}, {:+.4})        ({:+.4}, {:+.4})",
            s.round, s.unary_gap, s.binary_gap, h.unary_gap, h.binary_gap
        );
    }
    Ok(())
}
