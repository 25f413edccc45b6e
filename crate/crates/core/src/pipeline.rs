//! End-to-end verification: sample, augment, embed, measure, test.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rayon::prelude::*;

use crate::augment::{make_views, ViewSet};
use crate::config::{validate_config, DatasetSizes, VerificationConfig};
use crate::dataset::Dataset;
use crate::domain::{DatasetManifest, GapSample, SimilaritySets};
use crate::encoder::{EncoderHandle, EncoderInput};
use crate::error::{Error, Result};
use crate::gap::gap;
use crate::report::{QueryCounts, VerificationReport};
use crate::seed::{round_seed, rng_for, SeedPart};
use crate::stats::{similarity_sets, SubsetEmbeddings};
use crate::ttest::{paired_t_one_tailed, verdict};

/// The images sampled for one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundPlan {
    /// 1-based.
    pub round: usize,
    pub pub_ids: Vec<String>,
    pub pvt_ids: Vec<String>,
    pub round_seed: u64,
}

/// Samples `k_pub` public and `k_pvt` private ids without replacement for
/// each of the `K` rounds. Each round's draw depends only on the run seed and
/// the round number.
pub fn plan_rounds(
    cfg: &VerificationConfig,
    public: &DatasetManifest,
    private: &DatasetManifest,
) -> Result<Vec<RoundPlan>> {
    validate_config(
        cfg,
        Some(DatasetSizes {
            public: public.len(),
            private: private.len(),
        }),
    )?;
    let draw = |tag: &str, seed: u64, manifest: &DatasetManifest, k: usize| -> Vec<String> {
        let mut rng = rng_for(&[SeedPart::Tag(tag), SeedPart::U64(seed)]);
        sample(&mut rng, manifest.len(), k)
            .into_iter()
            .map(|i| manifest.entries()[i].clone())
            .collect()
    };
    Ok((1..=cfg.rounds)
        .map(|round| {
            let seed = round_seed(cfg.seed, round);
            RoundPlan {
                round,
                pub_ids: draw("sample-pub", seed, public, cfg.k_pub),
                pvt_ids: draw("sample-pvt", seed, private, cfg.k_pvt),
                round_seed: seed,
            }
        })
        .collect())
}

/// Datasets and encoders a run reads from.
#[derive(Debug, Clone)]
pub struct Resources {
    pub public: Dataset,
    pub private: Dataset,
    pub suspect: Arc<EncoderHandle>,
    pub shadow: Arc<EncoderHandle>,
}

impl Resources {
    /// Opens the dataset directories and connects to the `http://` encoder
    /// endpoints named in `cfg`.
    pub fn resolve(cfg: &VerificationConfig) -> Result<Self> {
        let dataset = |what: &'static str, locator: &str| -> Result<Dataset> {
            Dataset::open(locator).map_err(|e| Error::Unresolvable {
                what,
                locator: locator.to_string(),
                reason: e.to_string(),
            })
        };
        let encoder = |what: &'static str, locator: &str| -> Result<Arc<EncoderHandle>> {
            if locator.starts_with("http://") || locator.starts_with("https://") {
                Ok(Arc::new(EncoderHandle::remote(locator)))
            } else {
                Err(Error::Unresolvable {
                    what,
                    locator: locator.to_string(),
                    reason: "expected an http:// endpoint".into(),
                })
            }
        };
        Ok(Resources {
            public: dataset("pub_manifest", &cfg.pub_manifest)?,
            private: dataset("pvt_manifest", &cfg.pvt_manifest)?,
            suspect: encoder("suspect_endpoint", &cfg.suspect_endpoint)?,
            shadow: encoder("shadow_endpoint", &cfg.shadow_endpoint)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Process rounds concurrently. Results are identical either way.
    pub parallel: bool,
    /// Fill [`VerificationReport::timings`]. Off by default so that reports
    /// of identical runs are byte-identical.
    pub record_timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            parallel: true,
            record_timings: false,
        }
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct PhaseTimes {
    augment: Duration,
    embed: Duration,
    stats: Duration,
}

impl PhaseTimes {
    fn add(&mut self, other: PhaseTimes) {
        self.augment += other.augment;
        self.embed += other.embed;
        self.stats += other.stats;
    }
}

/// One subset's embeddings under each of several encoders, from one shared
/// set of views.
fn embed_subset(
    ids: &[String],
    dataset: &Dataset,
    cfg: &VerificationConfig,
    round_seed: u64,
    encoders: &[&EncoderHandle],
    times: &mut PhaseTimes,
) -> Result<Vec<SubsetEmbeddings>> {
    let m = cfg.global_views;
    let mut global: Vec<Vec<Vec<_>>> = vec![Vec::with_capacity(ids.len()); encoders.len()];
    let mut local: Vec<Vec<Vec<_>>> = vec![Vec::with_capacity(ids.len()); encoders.len()];
    // Views are generated a few images at a time so memory stays bounded by
    // the batch size rather than the subset size.
    let images_per_chunk = (cfg.batch_size / cfg.views_per_image()).max(1);
    for chunk in ids.chunks(images_per_chunk) {
        let started = Instant::now();
        let view_sets: Vec<ViewSet> = chunk
            .iter()
            .map(|id| {
                let image = dataset.load(id)?;
                Ok(make_views(&image, cfg, &cfg.augmentation, round_seed))
            })
            .collect::<Result<_>>()?;
        let inputs: Vec<EncoderInput<'_>> = view_sets
            .iter()
            .flat_map(|vs| vs.views().map(EncoderInput::from))
            .collect();
        times.augment += started.elapsed();

        let started = Instant::now();
        for (e, encoder) in encoders.iter().enumerate() {
            let mut embeddings = encoder.embed_chunked(&inputs, cfg.batch_size)?.into_iter();
            for _ in chunk {
                let views: Vec<_> = embeddings.by_ref().take(cfg.views_per_image()).collect();
                let mut views = views.into_iter();
                global[e].push(views.by_ref().take(m).collect());
                local[e].push(views.collect());
            }
        }
        times.embed += started.elapsed();
    }
    global
        .into_iter()
        .zip(local)
        .map(|(g, l)| Ok(SubsetEmbeddings::new(ids.to_vec(), g, l)?))
        .collect()
}

/// Similarity sets of the public and private subsets of `plan` under one
/// encoder.
pub fn run_round(
    plan: &RoundPlan,
    encoder: &EncoderHandle,
    public: &Dataset,
    private: &Dataset,
    cfg: &VerificationConfig,
) -> Result<(SimilaritySets, SimilaritySets)> {
    let mut times = PhaseTimes::default();
    let p = embed_subset(&plan.pub_ids, public, cfg, plan.round_seed, &[encoder], &mut times)?;
    let q = embed_subset(&plan.pvt_ids, private, cfg, plan.round_seed, &[encoder], &mut times)?;
    Ok((similarity_sets(&p[0])?, similarity_sets(&q[0])?))
}

/// Everything measured in one round, for both encoders.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub round: usize,
    /// `(public, private)` similarity sets.
    pub suspect: (SimilaritySets, SimilaritySets),
    pub shadow: (SimilaritySets, SimilaritySets),
    pub gap_suspect: GapSample,
    pub gap_shadow: GapSample,
    /// Images embedded by each encoder.
    pub queries: u64,
}

/// Runs one round against both encoders. Both see exactly the same views.
pub fn run_round_pair(
    plan: &RoundPlan,
    resources: &Resources,
    cfg: &VerificationConfig,
) -> Result<RoundOutcome> {
    run_round_timed(plan, resources, cfg).map(|(o, _)| o)
}

fn run_round_timed(
    plan: &RoundPlan,
    resources: &Resources,
    cfg: &VerificationConfig,
) -> Result<(RoundOutcome, PhaseTimes)> {
    let mut times = PhaseTimes::default();
    let encoders = [&*resources.suspect, &*resources.shadow];
    let p = embed_subset(&plan.pub_ids, &resources.public, cfg, plan.round_seed, &encoders, &mut times)?;
    let q = embed_subset(&plan.pvt_ids, &resources.private, cfg, plan.round_seed, &encoders, &mut times)?;

    let started = Instant::now();
    let suspect = (similarity_sets(&p[0])?, similarity_sets(&q[0])?);
    let shadow = (similarity_sets(&p[1])?, similarity_sets(&q[1])?);
    let gap_suspect = gap(&suspect.0, &suspect.1, cfg.a, plan.round)?;
    let gap_shadow = gap(&shadow.0, &shadow.1, cfg.a, plan.round)?;
    times.stats += started.elapsed();

    let queries = ((plan.pub_ids.len() + plan.pvt_ids.len()) * cfg.views_per_image()) as u64;
    Ok((
        RoundOutcome {
            round: plan.round,
            suspect,
            shadow,
            gap_suspect,
            gap_shadow,
            queries,
        },
        times,
    ))
}

/// Runs every round and returns the per-round outcomes in round order. The
/// first failing round (by round number) is reported as
/// [`Error::RoundFailed`].
pub fn run_rounds(
    cfg: &VerificationConfig,
    resources: &Resources,
    parallel: bool,
) -> Result<Vec<RoundOutcome>> {
    let plans = plan_rounds(cfg, resources.public.manifest(), resources.private.manifest())?;
    Ok(collect_rounds(&plans, resources, cfg, parallel)?
        .into_iter()
        .map(|(o, _)| o)
        .collect())
}

fn collect_rounds(
    plans: &[RoundPlan],
    resources: &Resources,
    cfg: &VerificationConfig,
    parallel: bool,
) -> Result<Vec<(RoundOutcome, PhaseTimes)>> {
    let run = |plan: &RoundPlan| {
        run_round_timed(plan, resources, cfg).map_err(|e| Error::RoundFailed {
            round: plan.round,
            source: Box::new(e),
        })
    };
    let results: Vec<Result<_>> = if parallel {
        plans.par_iter().map(run).collect()
    } else {
        plans.iter().map(run).collect()
    };
    results.into_iter().collect()
}

/// Full verification: `K` rounds of gaps for both encoders, then the paired
/// one-tailed t-test of `mean(suspect) > mean(shadow)`.
pub fn run_verification(
    cfg: &VerificationConfig,
    resources: &Resources,
    options: RunOptions,
) -> Result<VerificationReport> {
    let started = Instant::now();
    validate_config(
        cfg,
        Some(DatasetSizes {
            public: resources.public.len(),
            private: resources.private.len(),
        }),
    )?;
    resources.suspect.health_check()?;
    resources.shadow.health_check()?;

    let plans = plan_rounds(cfg, resources.public.manifest(), resources.private.manifest())?;
    let outcomes = collect_rounds(&plans, resources, cfg, options.parallel)?;

    let test_started = Instant::now();
    let gaps_suspect: Vec<GapSample> = outcomes.iter().map(|(o, _)| o.gap_suspect).collect();
    let gaps_shadow: Vec<GapSample> = outcomes.iter().map(|(o, _)| o.gap_shadow).collect();
    let test = paired_t_one_tailed(&gaps_suspect, &gaps_shadow)?;
    let test_time = test_started.elapsed();

    let queries: u64 = outcomes.iter().map(|(o, _)| o.queries).sum();
    let mut timings = BTreeMap::new();
    if options.record_timings {
        let mut phases = PhaseTimes::default();
        for (_, t) in &outcomes {
            phases.add(*t);
        }
        let ms = |d: Duration| d.as_millis() as u64;
        timings.insert("augment".to_string(), ms(phases.augment));
        timings.insert("embed".to_string(), ms(phases.embed));
        timings.insert("stats".to_string(), ms(phases.stats));
        timings.insert("test".to_string(), ms(test_time));
        timings.insert("total".to_string(), ms(started.elapsed()));
    }

    Ok(VerificationReport {
        p_value: test.p,
        t_statistic: test.t,
        df: test.df,
        zero_difference: test.zero_difference,
        gaps_suspect,
        gaps_shadow,
        verdict: verdict(test.p, cfg.alpha),
        config_echo: cfg.clone(),
        timings,
        queries: QueryCounts {
            suspect: queries,
            shadow: queries,
        },
    })
}
