//! Grid over the number of global and local views on the pub-only
//! simulator with a weak memorization effect, written as CSV.
//!
//!     cargo run --release --example sweep_views -- sweep.csv

use crg::simulate::simulate;
use crg::sweep::{rows_csv, sweep, Grid, SweepParam};
use crg::{Scenario, SimulatorParams, VerificationConfig};

fn main() -> crg::Result<()> {
    let out = std::env::args().nth(1);
    let params = SimulatorParams {
        sigma_seen: 0.28,
        sigma_unseen: 0.3,
        pub_size: 128,
        pvt_size: 128,
        ..SimulatorParams::default()
    };
    let grid = Grid::new()
        .axis(SweepParam::M, [2.0, 4.0])?
        .axis(SweepParam::N, [2.0, 6.0])?;
    let mut cfg = VerificationConfig::with_defaults(10, 16, 16, 16);
    cfg.seed = 5;

    let rows = sweep(&cfg, &grid, |c| simulate(Scenario::PubOnly, c, &params));
    let csv = rows_csv(&grid.params(), &rows);
    match out {
        Some(path) => std::fs::write(&path, csv).map_err(|e| crg::Error::Io {
            path,
            source: e,
        })?,
        None => print!("{csv}"),
    }
    Ok(())
}
