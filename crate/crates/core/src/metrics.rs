//! Sensitivity, specificity and AUROC over verification outcomes.
//!
//! A positive case is an encoder that was trained on the protected data.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("sensitivity is undefined without actual positives")]
    SensitivityUndefined,
    #[error("specificity is undefined without actual negatives")]
    SpecificityUndefined,
    #[error("score {0} is NaN")]
    NanScore(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsResult {
    pub sensitivity: f64,
    pub specificity: f64,
    pub auroc: f64,
}

/// Suspicion score of a p-value: `-log10(p)`, so smaller p is more suspicious.
/// `p = 0` maps to `+inf`.
pub fn suspicion_score(p: f64) -> f64 {
    -p.log10()
}

/// `TP / (TP + FN)` over `(predicted, actual)` pairs.
pub fn sensitivity(decisions: &[(bool, bool)]) -> Result<f64, MetricsError> {
    let positives: Vec<bool> = decisions.iter().filter(|d| d.1).map(|d| d.0).collect();
    if positives.is_empty() {
        return Err(MetricsError::SensitivityUndefined);
    }
    Ok(positives.iter().filter(|p| **p).count() as f64 / positives.len() as f64)
}

/// `TN / (TN + FP)` over `(predicted, actual)` pairs.
pub fn specificity(decisions: &[(bool, bool)]) -> Result<f64, MetricsError> {
    let negatives: Vec<bool> = decisions.iter().filter(|d| !d.1).map(|d| d.0).collect();
    if negatives.is_empty() {
        return Err(MetricsError::SpecificityUndefined);
    }
    Ok(negatives.iter().filter(|p| !**p).count() as f64 / negatives.len() as f64)
}

/// Probability that a random positive scores above a random negative, ties
/// counting one half. Computed from mid-ranks in `O(n log n)`.
pub fn auroc(scores: &[(f64, bool)]) -> Result<f64, MetricsError> {
    if let Some(i) = scores.iter().position(|s| s.0.is_nan()) {
        return Err(MetricsError::NanScore(i));
    }
    let positives = scores.iter().filter(|s| s.1).count();
    let negatives = scores.len() - positives;
    if positives == 0 {
        return Err(MetricsError::SensitivityUndefined);
    }
    if negatives == 0 {
        return Err(MetricsError::SpecificityUndefined);
    }

    let mut sorted: Vec<(f64, bool)> = scores.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    // Sum of (1-based, mid-) ranks of the positives.
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j].0 == sorted[i].0 {
            j += 1;
        }
        let mid_rank = (i + 1 + j) as f64 / 2.0;
        rank_sum += mid_rank * sorted[i..j].iter().filter(|s| s.1).count() as f64;
        i = j;
    }
    let p = positives as f64;
    let u = rank_sum - p * (p + 1.0) / 2.0;
    Ok(u / (p * negatives as f64))
}

/// Sensitivity and specificity from hard decisions, AUROC from scores.
pub fn metrics(
    decisions: &[(bool, bool)],
    scores: &[(f64, bool)],
) -> Result<MetricsResult, MetricsError> {
    Ok(MetricsResult {
        sensitivity: sensitivity(decisions)?,
        specificity: specificity(decisions)?,
        auroc: auroc(scores)?,
    })
}
