//! Generates the global and local views of one image, prints the logged crop
//! windows and saves the views as PNGs.
//!
//!     cargo run --release --example augmentation -- views_dir

use std::path::PathBuf;

use crg::dataset::save_png;
use crg::seed::round_seed;
use crg::simulate::ProceduralSource;
use crg::{make_views, ImageSample, VerificationConfig};

fn main() -> crg::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    let source = ProceduralSource { size: 96, seed: 4 };
    let image = ImageSample::new("demo", source.render("demo"));

    let cfg = VerificationConfig::with_defaults(2, 2, 2, 48);
    let views = make_views(&image, &cfg, &cfg.augmentation, round_seed(cfg.seed, 1));

    println!("{:<7} {:>3} {:>7} {:>7} {:>7} {:>7} {:>9}", "scale", "idx", "x0", "y0", "w", "h", "fraction");
    for view in views.views() {
        let c = view.crop.expect("crop logging is on by default");
        println!(
            "{:<7} {:>3} {:>7.2} {:>7.2} {:>7.2} {:>7.2} {:>9.4}",
            format!("{:?}", view.scale),
            view.index,
            c.x0,
            c.y0,
            c.width,
            c.height,
            c.area_fraction
        );
        if let Some(dir) = &out {
            std::fs::create_dir_all(dir).map_err(|e| crg::Error::Io {
                path: dir.display().to_string(),
                source: e,
            })?;
            let name = format!("{:?}-{}.png", view.scale, view.index).to_lowercase();
            save_png(&view.pixels, dir.join(name))?;
        }
    }
    Ok(())
}
