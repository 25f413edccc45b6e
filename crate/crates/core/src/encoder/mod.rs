//! Encoder abstraction: remote embedding services and in-process encoders
//! behind one handle.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::augment::View;
use crate::domain::{EmbeddingVector, Image};

pub mod projection;
pub mod protocol;
pub mod remote;
pub mod synthetic;

pub use projection::{ConstantEncoder, PixelProjectionEncoder};
pub use remote::{RemoteEncoder, RetryPolicy};
pub use synthetic::{synthetic_embed, SyntheticEncoder, SyntheticSpec};

#[derive(Debug, Error)]
pub enum EncoderError {
    #[error("transport error talking to {endpoint}: {message}")]
    Transport { endpoint: String, message: String },
    #[error("protocol violation from {endpoint}: {message}")]
    ProtocolViolation { endpoint: String, message: String },
    #[error("{endpoint} answered HTTP {status} ({code}): {message}")]
    Remote {
        endpoint: String,
        status: u16,
        code: String,
        message: String,
    },
    #[error("embedding {index} is invalid: {reason}")]
    BadEmbedding { index: usize, reason: String },
    #[error("embedding dimension changed from {expected} to {actual}")]
    DimMismatch { expected: usize, actual: usize },
    #[error("batch is empty")]
    EmptyBatch,
    #[error("view {index} is {actual:?}, batch expects {expected:?}")]
    ShapeMismatch {
        index: usize,
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("synthetic encoder needs the source image id of every view")]
    MissingImageId,
    #[error("invalid encoder specification: {0}")]
    InvalidSpec(String),
}

/// What an encoder answers to a health request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Health {
    pub dim: usize,
    pub protocol_version: String,
}

/// One image submitted for embedding. Remote encoders only see the pixels;
/// the id is available to in-process simulators.
#[derive(Debug, Clone, Copy)]
pub struct EncoderInput<'a> {
    pub image_id: Option<&'a str>,
    pub pixels: &'a Image,
}

impl<'a> EncoderInput<'a> {
    pub fn anonymous(pixels: &'a Image) -> Self {
        EncoderInput {
            image_id: None,
            pixels,
        }
    }
}

impl<'a> From<&'a View> for EncoderInput<'a> {
    fn from(view: &'a View) -> Self {
        EncoderInput {
            image_id: Some(&view.image_id),
            pixels: &view.pixels,
        }
    }
}

/// A black-box image encoder.
pub trait Encoder: Send + Sync {
    fn health(&self) -> Result<Health, EncoderError>;

    /// Embeds every input, returning one vector per input in input order.
    fn embed(&self, batch: &[EncoderInput<'_>]) -> Result<Vec<EmbeddingVector>, EncoderError>;
}

pub enum EncoderKind {
    Remote(RemoteEncoder),
    Synthetic(SyntheticEncoder),
    InProcess(Arc<dyn Encoder>),
}

impl EncoderKind {
    fn inner(&self) -> &dyn Encoder {
        match self {
            EncoderKind::Remote(e) => e,
            EncoderKind::Synthetic(e) => e,
            EncoderKind::InProcess(e) => e.as_ref(),
        }
    }
}

impl fmt::Debug for EncoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncoderKind::Remote(e) => write!(f, "Remote({})", e.endpoint()),
            EncoderKind::Synthetic(e) => write!(f, "Synthetic(dim={})", e.spec().dim),
            EncoderKind::InProcess(_) => f.write_str("InProcess"),
        }
    }
}

/// Shared handle to an encoder. Enforces a constant embedding dimension over
/// its lifetime and counts the images it has embedded.
#[derive(Debug)]
pub struct EncoderHandle {
    kind: EncoderKind,
    dim: OnceLock<usize>,
    queries: AtomicU64,
}

impl EncoderHandle {
    pub fn new(kind: EncoderKind) -> Self {
        let dim = OnceLock::new();
        if let EncoderKind::Synthetic(e) = &kind {
            let _ = dim.set(e.spec().dim);
        }
        EncoderHandle {
            kind,
            dim,
            queries: AtomicU64::new(0),
        }
    }

    pub fn remote(endpoint: impl Into<String>) -> Self {
        Self::new(EncoderKind::Remote(RemoteEncoder::new(endpoint)))
    }

    pub fn synthetic(spec: SyntheticSpec) -> Self {
        Self::new(EncoderKind::Synthetic(SyntheticEncoder::new(spec)))
    }

    pub fn in_process(encoder: Arc<dyn Encoder>) -> Self {
        Self::new(EncoderKind::InProcess(encoder))
    }

    pub fn kind(&self) -> &EncoderKind {
        &self.kind
    }

    /// Embedding dimension, once known.
    pub fn dim(&self) -> Option<usize> {
        self.dim.get().copied()
    }

    /// Images embedded through this handle so far.
    pub fn queries(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn health_check(&self) -> Result<Health, EncoderError> {
        let health = self.kind.inner().health()?;
        self.record_dim(health.dim)?;
        Ok(health)
    }

    /// Embeds one batch. All views must share one shape.
    pub fn embed_batch(
        &self,
        views: &[EncoderInput<'_>],
    ) -> Result<Vec<EmbeddingVector>, EncoderError> {
        let first = views.first().ok_or(EncoderError::EmptyBatch)?;
        let expected = (first.pixels.height(), first.pixels.width());
        for (index, v) in views.iter().enumerate() {
            let actual = (v.pixels.height(), v.pixels.width());
            if actual != expected {
                return Err(EncoderError::ShapeMismatch {
                    index,
                    expected,
                    actual,
                });
            }
        }

        let out = self.kind.inner().embed(views)?;
        if out.len() != views.len() {
            return Err(EncoderError::ProtocolViolation {
                endpoint: format!("{:?}", self.kind),
                message: format!("sent {} images, got {} embeddings", views.len(), out.len()),
            });
        }
        for e in &out {
            self.record_dim(e.dim())?;
        }
        self.queries.fetch_add(views.len() as u64, Ordering::Relaxed);
        Ok(out)
    }

    /// Embeds `views` in chunks of at most `batch_size`.
    pub fn embed_chunked(
        &self,
        views: &[EncoderInput<'_>],
        batch_size: usize,
    ) -> Result<Vec<EmbeddingVector>, EncoderError> {
        let mut out = Vec::with_capacity(views.len());
        for chunk in views.chunks(batch_size.max(1)) {
            out.extend(self.embed_batch(chunk)?);
        }
        Ok(out)
    }

    fn record_dim(&self, dim: usize) -> Result<(), EncoderError> {
        let expected = *self.dim.get_or_init(|| dim);
        if expected != dim {
            return Err(EncoderError::DimMismatch {
                expected,
                actual: dim,
            });
        }
        Ok(())
    }
}
