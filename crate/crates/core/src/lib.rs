//! Dataset ownership verification for black-box contrastive encoders.
//!
//! A defender holding a public dataset and a private dataset asks: was this
//! encoder pre-trained on my public data? Encoders that saw an image during
//! contrastive pre-training map its augmentations closer together
//! (unary relationship) and keep its relations to other images more stable
//! across augmentations (binary relationship). This crate measures the gap in
//! both statistics between public and private samples, once for the suspect
//! encoder and once for a shadow encoder known not to have seen the data, and
//! runs a one-tailed paired t-test over `K` sampling rounds.
//!
//! The main entry points are:
//!
//! - [`pipeline::run_verification`] for a full verification run,
//! - [`simulate::simulate`] to drive the four suspect scenarios against the
//!   synthetic memorization encoder,
//! - [`sweep::sweep`] for parameter grids,
//! - [`report::export_gaps`] for per-round gap export.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod augment;
pub mod config;
pub mod dataset;
pub mod domain;
pub mod encoder;
pub mod error;
pub mod gap;
pub mod metrics;
pub mod pipeline;
pub mod report;
pub mod seed;
#[cfg(feature = "server")]
pub mod server;
pub mod simulate;
pub mod stats;
pub mod sweep;
pub mod ttest;

pub use augment::{make_views, AugmentationParams, View, ViewSet};
pub use config::{validate_config, VerificationConfig};
pub use dataset::{load_manifest, Dataset};
pub use domain::{
    DatasetManifest, EmbeddingVector, GapSample, Image, ImageSample, SimilaritySets, Verdict,
};
pub use encoder::{EncoderHandle, SyntheticSpec};
pub use error::{Error, Result};
pub use pipeline::{run_verification, Resources, RunOptions};
pub use report::VerificationReport;
pub use simulate::{simulate, Scenario, SimulatorParams};
