//! The six relationship statistics of a memorized and an unseen subset under
//! the synthetic encoder, and the gap between them.
//!
//!     cargo run --release --example similarity_sets

use crg::gap::gap;
use crg::pipeline::{plan_rounds, run_round};
use crg::simulate::synthetic_dataset;
use crg::{EncoderHandle, SyntheticSpec, VerificationConfig};

fn main() -> crg::Result<()> {
    let public = synthetic_dataset("pub", 64, 32, 1)?;
    let private = synthetic_dataset("pvt", 64, 32, 1)?;
    let spec = SyntheticSpec::new(128, public.manifest().entries().to_vec(), 0.05, 0.3, 1)?;
    let encoder = EncoderHandle::synthetic(spec);

    let cfg = VerificationConfig::with_defaults(2, 16, 16, 16);
    let plans = plan_rounds(&cfg, public.manifest(), private.manifest())?;
    let (s_pub, s_pvt) = run_round(&plans[0], &encoder, &public, &private, &cfg)?;

    println!("{:<8} {:>10} {:>10}", "", "public", "private");
    let names = ["S_U^gg", "S_U^ll", "S_U^gl", "S_B^gg", "S_B^ll", "S_B^gl"];
    let pub_all = s_pub.unary().into_iter().chain(s_pub.binary());
    let pvt_all = s_pvt.unary().into_iter().chain(s_pvt.binary());
    for ((name, p), q) in names.iter().zip(pub_all).zip(pvt_all) {
        println!("{name:<8} {p:>10.5} {q:>10.5}");
    }
    let g = gap(&s_pub, &s_pvt, cfg.a, 1)?;
    println!("\ngap: unary {:.5}, binary {:.5}", g.unary_gap, g.binary_gap);
    Ok(())
}
