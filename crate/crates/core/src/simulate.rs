//! The four suspect scenarios, played out against synthetic memorization
//! encoders on procedurally generated datasets.
//!
//! | scenario       | suspect memorized set | illegal |
//! |----------------|-----------------------|---------|
//! | `pub-only`     | public                | yes     |
//! | `pub-plus-alt` | public + alternative  | yes     |
//! | `unrelated`    | unrelated             | no      |
//! | `alt-only`     | alternative           | no      |
//!
//! The shadow encoder memorizes nothing. Private images are never memorized.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::VerificationConfig;
use crate::dataset::{Dataset, DatasetError, ImageSource};
use crate::domain::{DatasetManifest, Image, ImageSample};
use crate::encoder::{EncoderHandle, SyntheticSpec};
use crate::error::{Error, Result};
use crate::pipeline::{run_verification, Resources, RunOptions};
use crate::report::VerificationReport;
use crate::seed::{rng_for, SeedPart};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    PubOnly,
    PubPlusAlt,
    Unrelated,
    AltOnly,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::PubOnly,
        Scenario::PubPlusAlt,
        Scenario::Unrelated,
        Scenario::AltOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::PubOnly => "pub-only",
            Scenario::PubPlusAlt => "pub-plus-alt",
            Scenario::Unrelated => "unrelated",
            Scenario::AltOnly => "alt-only",
        }
    }

    /// Whether the suspect was trained on the public data.
    pub fn ground_truth_illegal(self) -> bool {
        matches!(self, Scenario::PubOnly | Scenario::PubPlusAlt)
    }

    pub fn label(self) -> ScenarioLabel {
        ScenarioLabel {
            label: self,
            ground_truth_illegal: self.ground_truth_illegal(),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                format!("unknown scenario {s:?}; expected pub-only, pub-plus-alt, unrelated or alt-only")
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioLabel {
    pub label: Scenario,
    pub ground_truth_illegal: bool,
}

/// Synthetic world parameters. Deserializes from the `[simulation]` table of
/// a config file; missing keys take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulatorParams {
    pub dim: usize,
    pub sigma_seen: f64,
    pub sigma_unseen: f64,
    pub pub_size: usize,
    pub pvt_size: usize,
    pub alt_size: usize,
    pub unrelated_size: usize,
    /// Side length of the generated square images.
    pub image_size: usize,
    pub encoder_seed: u64,
    /// Seed of the shadow encoder's content vectors. `None` reuses
    /// `encoder_seed`, so suspect and shadow differ only in what they
    /// memorized.
    pub shadow_seed: Option<u64>,
}

impl Default for SimulatorParams {
    fn default() -> Self {
        SimulatorParams {
            dim: 256,
            sigma_seen: 0.02,
            sigma_unseen: 0.3,
            pub_size: 512,
            pvt_size: 512,
            alt_size: 512,
            unrelated_size: 512,
            image_size: 32,
            encoder_seed: 0,
            shadow_seed: None,
        }
    }
}

#[derive(Deserialize)]
struct SimFile {
    #[serde(flatten)]
    verification: VerificationConfig,
    #[serde(default)]
    simulation: SimulatorParams,
}

/// Reads a verification config whose optional `[simulation]` table holds
/// [`SimulatorParams`]. TOML, or JSON when the path ends in `.json`.
pub fn load_sim_config(path: impl AsRef<Path>) -> Result<(VerificationConfig, SimulatorParams)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parsed: std::result::Result<SimFile, String> =
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
    let file = parsed.map_err(|message| Error::Parse {
        what: "simulation config",
        message,
    })?;
    Ok((file.verification, file.simulation))
}

/// Smooth two-colour stripe patterns with per-pixel noise, fully determined
/// by the image id and seed.
#[derive(Debug, Clone)]
pub struct ProceduralSource {
    pub size: usize,
    pub seed: u64,
}

impl ProceduralSource {
    pub fn render(&self, id: &str) -> Image {
        let mut rng = rng_for(&[
            SeedPart::Tag("procedural"),
            SeedPart::U64(self.seed),
            SeedPart::Str(id),
        ]);
        let c0: [f32; 3] = [rng.random(), rng.random(), rng.random()];
        let c1: [f32; 3] = [rng.random(), rng.random(), rng.random()];
        let fx = rng.random_range(0.5..3.0);
        let fy = rng.random_range(0.5..3.0);
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        let n = self.size as f64;
        Image::from_fn(self.size, self.size, |y, x| {
            let arg = std::f64::consts::TAU * (fx * x as f64 + fy * y as f64) / n + phase;
            let w = (0.5 + 0.5 * arg.sin()) as f32;
            let mut px = [0.0f32; 3];
            for c in 0..3 {
                let noise = rng.random_range(-0.05f32..0.05);
                px[c] = c0[c] * (1.0 - w) + c1[c] * w + noise;
            }
            px
        })
        .expect("procedural size is positive")
    }
}

impl ImageSource for ProceduralSource {
    fn load(&self, id: &str) -> std::result::Result<ImageSample, DatasetError> {
        Ok(ImageSample::new(id, self.render(id)))
    }
}

/// Ids `"{name}/00000"`, `"{name}/00001"`, ...
pub fn synthetic_ids(name: &str, size: usize) -> Vec<String> {
    (0..size).map(|i| format!("{name}/{i:05}")).collect()
}

/// A procedurally rendered dataset of `size` images.
pub fn synthetic_dataset(name: &str, size: usize, image_size: usize, seed: u64) -> Result<Dataset> {
    let manifest = DatasetManifest::new(name, synthetic_ids(name, size), format!("sim://{name}"))?;
    Ok(Dataset::new(
        manifest,
        Arc::new(ProceduralSource {
            size: image_size,
            seed,
        }),
    ))
}

/// Datasets and synthetic encoders for `scenario`.
pub fn scenario_resources(scenario: Scenario, params: &SimulatorParams) -> Result<Resources> {
    let public = synthetic_dataset("pub", params.pub_size, params.image_size, params.encoder_seed)?;
    let private = synthetic_dataset("pvt", params.pvt_size, params.image_size, params.encoder_seed)?;
    let alt = synthetic_ids("alt", params.alt_size);
    let unrelated = synthetic_ids("unre", params.unrelated_size);
    let memorized: Vec<String> = match scenario {
        Scenario::PubOnly => public.manifest().entries().to_vec(),
        Scenario::PubPlusAlt => public.manifest().entries().iter().cloned().chain(alt).collect(),
        Scenario::Unrelated => unrelated,
        Scenario::AltOnly => alt,
    };
    let spec = |memorized: Vec<String>, seed: u64| {
        SyntheticSpec::new(params.dim, memorized, params.sigma_seen, params.sigma_unseen, seed)
    };
    let suspect = spec(memorized, params.encoder_seed)?;
    let shadow = spec(Vec::new(), params.shadow_seed.unwrap_or(params.encoder_seed))?;
    Ok(Resources {
        public,
        private,
        suspect: Arc::new(EncoderHandle::synthetic(suspect)),
        shadow: Arc::new(EncoderHandle::synthetic(shadow)),
    })
}

/// Config with locators describing the simulated resources, for the report.
fn with_sim_locators(scenario: Scenario, cfg: &VerificationConfig) -> VerificationConfig {
    let mut cfg = cfg.clone();
    cfg.suspect_endpoint = format!("sim://suspect/{scenario}");
    cfg.shadow_endpoint = "sim://shadow".into();
    cfg.pub_manifest = "sim://pub".into();
    cfg.pvt_manifest = "sim://pvt".into();
    cfg
}

/// Runs a verification of the synthetic suspect for `scenario`.
pub fn simulate(
    scenario: Scenario,
    cfg: &VerificationConfig,
    params: &SimulatorParams,
) -> Result<VerificationReport> {
    simulate_with(scenario, cfg, params, RunOptions::default())
}

pub fn simulate_with(
    scenario: Scenario,
    cfg: &VerificationConfig,
    params: &SimulatorParams,
    options: RunOptions,
) -> Result<VerificationReport> {
    let resources = scenario_resources(scenario, params)?;
    run_verification(&with_sim_locators(scenario, cfg), &resources, options)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        for sc in Scenario::ALL {
            assert_eq!(sc.name().parse::<Scenario>(), Ok(sc));
            assert_eq!(
                sc.label().ground_truth_illegal,
                matches!(sc, Scenario::PubOnly | Scenario::PubPlusAlt)
            );
        }
        assert!("pub".parse::<Scenario>().is_err());
    }

    #[test]
    fn procedural_images_are_deterministic_and_distinct() {
        let src = ProceduralSource { size: 16, seed: 3 };
        assert_eq!(src.render("pub/00001"), src.render("pub/00001"));
        assert_ne!(src.render("pub/00001"), src.render("pub/00002"));
        assert!(src.render("x").data().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn sim_config_reads_simulation_table() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sim.toml");
        std::fs::write(
            &path,
            "K = 4\nk_pub = 8\nk_pvt = 8\nM = 2\nN = 2\nseed = 9\nview_size = 8\n\n[simulation]\ndim = 32\nsigma_seen = 0.05\n",
        )
        .unwrap();
        let (cfg, params) = load_sim_config(&path).unwrap();
        assert_eq!((cfg.rounds, cfg.seed, cfg.local_views), (4, 9, 2));
        assert_eq!(params.dim, 32);
        assert_eq!(params.sigma_seen, 0.05);
        assert_eq!(params.sigma_unseen, 0.3);
    }

    fn small() -> (VerificationConfig, SimulatorParams) {
        let mut cfg = VerificationConfig::with_defaults(6, 12, 12, 8);
        cfg.local_views = 2;
        let params = SimulatorParams {
            dim: 64,
            pub_size: 40,
            pvt_size: 40,
            alt_size: 40,
            unrelated_size: 40,
            image_size: 16,
            ..SimulatorParams::default()
        };
        (cfg, params)
    }

    #[test]
    fn scenarios_reach_expected_verdicts() {
        let (cfg, params) = small();
        for sc in Scenario::ALL {
            let report = simulate(sc, &cfg, &params).unwrap();
            let stolen = report.verdict == crate::domain::Verdict::Stolen;
            assert_eq!(stolen, sc.ground_truth_illegal(), "{sc}: p = {}", report.p_value);
            assert_eq!(report.config_echo.suspect_endpoint, format!("sim://suspect/{sc}"));
        }
    }
}
