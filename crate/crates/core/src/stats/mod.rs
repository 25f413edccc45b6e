//! Unary and binary relationship statistics over one image subset.

use thiserror::Error;

mod relationship;
mod summation;

pub use relationship::{
    binary_relation_set, binary_similarity, cosine_sim, similarity_sets, unary_similarity,
    BinaryRelationSet, BinarySimilarity, ScaleIndex, SubsetEmbeddings, UnarySimilarity,
};
pub use summation::{pairwise_mean, pairwise_sum};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("embedding dimensions differ ({0} vs {1})")]
    DimMismatch(usize, usize),
    #[error("cosine similarity undefined for an all-zero embedding")]
    ZeroVector,
    #[error("{scale} statistics need at least 2 views per image, got {got}")]
    InsufficientViews { scale: &'static str, got: usize },
    #[error("binary relations need at least 2 images, got {0}")]
    InsufficientImages(usize),
    #[error("augmentation index {index} out of range ({count} views)")]
    NoSuchView { index: usize, count: usize },
    #[error("relation sets differ in length ({0} vs {1})")]
    ShapeMismatch(usize, usize),
    #[error("subset is malformed: {0}")]
    Malformed(String),
    #[error(transparent)]
    Range(#[from] crate::domain::DomainError),
}
