//! Serves two pixel-projection encoders over loopback HTTP and verifies one
//! against the other through the wire protocol, using PNG datasets on disk.
//!
//!     cargo run --release --example remote_roundtrip

use std::sync::Arc;

use crg::dataset::save_png;
use crg::encoder::projection::PixelProjectionEncoder;
use crg::server::{EmbeddingServer, ServeOptions};
use crg::simulate::ProceduralSource;
use crg::{run_verification, Resources, RunOptions, VerificationConfig};

fn main() -> crg::Result<()> {
    let tmp = tempfile::tempdir().expect("create temp dir");
    let dir = tmp.path();
    let source = ProceduralSource { size: 24, seed: 11 };
    for (name, count) in [("pub", 40), ("pvt", 40)] {
        let root = dir.join(name);
        std::fs::create_dir_all(&root).expect("create dataset dir");
        for i in 0..count {
            save_png(&source.render(&format!("{name}{i}")), root.join(format!("{i:03}.png")))?;
        }
    }

    let suspect = EmbeddingServer::start(
        "127.0.0.1:0",
        Arc::new(PixelProjectionEncoder::new(64, 4, 1)),
        ServeOptions::default(),
    )?;
    let shadow = EmbeddingServer::start(
        "127.0.0.1:0",
        Arc::new(PixelProjectionEncoder::new(64, 4, 1)),
        ServeOptions::default(),
    )?;

    let mut cfg = VerificationConfig::with_defaults(4, 8, 8, 16);
    cfg.suspect_endpoint = suspect.endpoint();
    cfg.shadow_endpoint = shadow.endpoint();
    cfg.pub_manifest = dir.join("pub").display().to_string();
    cfg.pvt_manifest = dir.join("pvt").display().to_string();
    cfg.batch_size = 32;

    let resources = Resources::resolve(&cfg)?;
    let report = run_verification(&cfg, &resources, RunOptions::default())?;
    println!("suspect {} / shadow {}", cfg.suspect_endpoint, cfg.shadow_endpoint);
    println!(
        "verdict {} p = {} zero_difference = {} queries = {}",
        report.verdict, report.p_value, report.zero_difference, report.queries.suspect
    );

    suspect.shutdown();
    shadow.shutdown();
    Ok(())
}
