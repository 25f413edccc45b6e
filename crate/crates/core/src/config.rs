//! Run configuration and its validation.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::augment::AugmentationParams;
use crate::error::{Error, Result};

/// Full configuration for one verification run.
///
/// Serialized field names are the wire names used in config files, including
/// the upper-case `K`, `M` and `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationConfig {
    /// Locator of the suspect encoder, e.g. `http://10.0.0.5:8080`.
    #[serde(default)]
    pub suspect_endpoint: String,
    /// Locator of the shadow encoder.
    #[serde(default)]
    pub shadow_endpoint: String,
    /// Locator (directory) of the public dataset.
    #[serde(default)]
    pub pub_manifest: String,
    /// Locator (directory) of the private dataset.
    #[serde(default)]
    pub pvt_manifest: String,
    /// Number of sampling rounds.
    #[serde(rename = "K")]
    pub rounds: usize,
    pub k_pub: usize,
    pub k_pvt: usize,
    /// Global views per image.
    #[serde(rename = "M")]
    pub global_views: usize,
    /// Local views per image.
    #[serde(rename = "N")]
    pub local_views: usize,
    /// Weight applied to positive component differences in the gap.
    #[serde(default = "default_a")]
    pub a: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub seed: u64,
    pub view_size: usize,
    #[serde(default = "default_crop_global")]
    pub crop_global: (f64, f64),
    #[serde(default = "default_crop_local")]
    pub crop_local: (f64, f64),
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default)]
    pub augmentation: AugmentationParams,
}

fn default_a() -> f64 {
    1.0
}

fn default_alpha() -> f64 {
    0.05
}

fn default_crop_global() -> (f64, f64) {
    (0.4, 1.0)
}

fn default_crop_local() -> (f64, f64) {
    (0.05, 0.4)
}

fn default_batch_size() -> usize {
    64
}

impl VerificationConfig {
    /// A configuration with the multi-scale defaults (`M = 2`, `N = 6`, crop
    /// ranges `(0.4, 1.0)` / `(0.05, 0.4)`, `a = 1`, `alpha = 0.05`) and empty
    /// locators.
    pub fn with_defaults(rounds: usize, k_pub: usize, k_pvt: usize, view_size: usize) -> Self {
        VerificationConfig {
            suspect_endpoint: String::new(),
            shadow_endpoint: String::new(),
            pub_manifest: String::new(),
            pvt_manifest: String::new(),
            rounds,
            k_pub,
            k_pvt,
            global_views: 2,
            local_views: 6,
            a: default_a(),
            alpha: default_alpha(),
            seed: 0,
            view_size,
            crop_global: default_crop_global(),
            crop_local: default_crop_local(),
            batch_size: default_batch_size(),
            augmentation: AugmentationParams::default(),
        }
    }

    /// Parses a TOML document, or JSON when the path ends in `.json`.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::Parse {
                what: "config",
                message: e.to_string(),
            })
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            what: "config",
            message: e.to_string(),
        })
    }

    /// Number of views generated per image per round.
    pub fn views_per_image(&self) -> usize {
        self.global_views + self.local_views
    }

    /// Encoder queries a full run issues to each encoder.
    pub fn expected_queries(&self) -> u64 {
        (self.rounds * (self.k_pub + self.k_pvt) * self.views_per_image()) as u64
    }
}

/// One violated configuration invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Every violated invariant of a configuration.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ConfigViolations(pub Vec<Violation>);

impl ConfigViolations {
    pub fn contains(&self, needle: &str) -> bool {
        self.0.iter().any(|v| v.to_string().contains(needle))
    }
}

impl fmt::Display for ConfigViolations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: ")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Sizes of the public and private datasets, when known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetSizes {
    pub public: usize,
    pub private: usize,
}

/// Checks every invariant of `cfg` and returns all violations, not just the
/// first. Sampling sizes are checked against `sizes` when given.
pub fn validate_config(
    cfg: &VerificationConfig,
    sizes: Option<DatasetSizes>,
) -> Result<(), ConfigViolations> {
    let mut out = Vec::new();
    let mut push = |field: &'static str, message: String| out.push(Violation { field, message });

    if cfg.rounds < 2 {
        push("K", "at least 2 rounds are needed for the paired test".into());
    }
    if cfg.k_pub < 2 {
        push("k_pub", "must be at least 2 (binary relations need pairs)".into());
    }
    if cfg.k_pvt < 2 {
        push("k_pvt", "must be at least 2 (binary relations need pairs)".into());
    }
    if cfg.global_views < 2 {
        push("M", "must be at least 2 (global view pairs)".into());
    }
    if cfg.local_views < 2 {
        push("N", "must be at least 2 (local view pairs)".into());
    }
    if !(cfg.a.is_finite() && cfg.a > 0.0) {
        push("a", "a must be a positive real".into());
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        push("alpha", "alpha must lie in (0,1)".into());
    }
    if cfg.view_size == 0 {
        push("view_size", "must be positive".into());
    }
    if cfg.batch_size == 0 {
        push("batch_size", "must be positive".into());
    }
    for (field, (lo, hi)) in [("crop_global", cfg.crop_global), ("crop_local", cfg.crop_local)] {
        if !(lo < hi) {
            push(field, format!("lo<hi required, got ({lo}, {hi})"));
        }
        if !(lo > 0.0 && hi <= 1.0) {
            push(field, format!("range must satisfy 0<lo<hi<=1, got ({lo}, {hi})"));
        }
    }
    for message in cfg.augmentation.violations() {
        push("augmentation", message);
    }
    if let Some(sizes) = sizes {
        if cfg.k_pub > sizes.public {
            push(
                "k_pub",
                format!("k_pub={} exceeds public dataset size {}", cfg.k_pub, sizes.public),
            );
        }
        if cfg.k_pvt > sizes.private {
            push(
                "k_pvt",
                format!("k_pvt={} exceeds private dataset size {}", cfg.k_pvt, sizes.private),
            );
        }
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(ConfigViolations(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cifar_like() -> VerificationConfig {
        let mut cfg = VerificationConfig::with_defaults(30, 256, 128, 32);
        cfg.a = 10000.0;
        cfg
    }

    #[test]
    fn cifar_sizes_are_valid() {
        let sizes = DatasetSizes {
            public: 25000,
            private: 10000,
        };
        assert_eq!(validate_config(&cifar_like(), Some(sizes)), Ok(()));
    }

    #[test]
    fn alpha_zero_rejected() {
        let mut cfg = cifar_like();
        cfg.alpha = 0.0;
        let v = validate_config(&cfg, None).unwrap_err();
        assert!(v.contains("alpha must lie in (0,1)"), "{v}");
    }

    #[test]
    fn reversed_crop_rejected() {
        let mut cfg = cifar_like();
        cfg.crop_global = (1.0, 0.4);
        let v = validate_config(&cfg, None).unwrap_err();
        assert!(v.contains("lo<hi required"), "{v}");
    }

    #[test]
    fn touching_crop_ranges_allowed() {
        let mut cfg = cifar_like();
        cfg.crop_local = (0.05, 0.4);
        cfg.crop_global = (0.4, 1.0);
        assert!(validate_config(&cfg, None).is_ok());
    }

    #[test]
    fn reports_every_violation() {
        let mut cfg = cifar_like();
        cfg.alpha = 1.0;
        cfg.crop_local = (0.5, 0.1);
        cfg.batch_size = 0;
        let sizes = DatasetSizes {
            public: 100,
            private: 100,
        };
        let v = validate_config(&cfg, Some(sizes)).unwrap_err();
        for needle in ["alpha", "crop_local", "batch_size", "k_pub", "k_pvt"] {
            assert!(v.contains(needle), "missing {needle}: {v}");
        }
    }

    #[test]
    fn toml_uses_wire_names() {
        let text = r#"
            suspect_endpoint = "http://127.0.0.1:9000"
            shadow_endpoint = "http://127.0.0.1:9001"
            pub_manifest = "data/pub"
            pvt_manifest = "data/pvt"
            K = 30
            k_pub = 256
            k_pvt = 128
            M = 2
            N = 6
            a = 10000.0
            seed = 7
            view_size = 32
            crop_global = [0.4, 1.0]
            crop_local = [0.05, 0.4]
            batch_size = 128
        "#;
        let cfg = VerificationConfig::from_toml(text).unwrap();
        assert_eq!(cfg.rounds, 30);
        assert_eq!((cfg.global_views, cfg.local_views), (2, 6));
        assert_eq!(cfg.alpha, 0.05);
        assert_eq!(cfg.augmentation, AugmentationParams::default());
        assert_eq!(cfg.expected_queries(), 30 * 384 * 8);
    }
}
