//! Shared domain types. Every constructor enforces the type's invariants, so
//! downstream code can rely on them without re-checking.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DomainError {
    #[error("image must be at least 1x1, got {height}x{width}")]
    EmptyImage { height: usize, width: usize },
    #[error("pixel buffer has {actual} values, expected {expected}")]
    PixelCount { expected: usize, actual: usize },
    #[error("pixel value {value} at offset {offset} outside [0,1]")]
    PixelRange { offset: usize, value: f32 },
    #[error("manifest {0:?} has no entries")]
    EmptyManifest(String),
    #[error("manifest {name:?} lists {id:?} more than once")]
    DuplicateId { name: String, id: String },
    #[error("embedding must have at least one dimension")]
    EmptyEmbedding,
    #[error("embedding entry {index} is not finite ({value})")]
    NonFiniteEmbedding { index: usize, value: f64 },
    #[error("similarity component {component} = {value} outside its range")]
    SimilarityRange { component: &'static str, value: f64 },
}

/// An RGB image with channel-last, row-major `f32` pixels in `[0, 1]`.
#[derive(Clone, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl Image {
    pub fn new(height: usize, width: usize, data: Vec<f32>) -> Result<Self, DomainError> {
        if height == 0 || width == 0 {
            return Err(DomainError::EmptyImage { height, width });
        }
        let expected = height * width * 3;
        if data.len() != expected {
            return Err(DomainError::PixelCount {
                expected,
                actual: data.len(),
            });
        }
        if let Some((offset, &value)) = data
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(DomainError::PixelRange { offset, value });
        }
        Ok(Image {
            height,
            width,
            data,
        })
    }

    /// Builds an image from a per-pixel function; values are clamped into `[0, 1]`.
    pub fn from_fn(
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize) -> [f32; 3],
    ) -> Result<Self, DomainError> {
        if height == 0 || width == 0 {
            return Err(DomainError::EmptyImage { height, width });
        }
        let mut data = Vec::with_capacity(height * width * 3);
        for y in 0..height {
            for x in 0..width {
                let px = f(y, x);
                data.extend(px.iter().map(|v| v.clamp(0.0, 1.0)));
            }
        }
        Ok(Image {
            height,
            width,
            data,
        })
    }

    pub fn constant(height: usize, width: usize, rgb: [f32; 3]) -> Result<Self, DomainError> {
        Self::from_fn(height, width, |_, _| rgb)
    }

    /// Wraps a buffer whose values are already known to be in range.
    pub(crate) fn from_raw_unchecked(height: usize, width: usize, data: Vec<f32>) -> Self {
        debug_assert_eq!(data.len(), height * width * 3);
        Image {
            height,
            width,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn pixel(&self, y: usize, x: usize) -> [f32; 3] {
        let o = (y * self.width + x) * 3;
        [self.data[o], self.data[o + 1], self.data[o + 2]]
    }
}

impl fmt::Debug for Image {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Image({}x{})", self.height, self.width)
    }
}

/// A decoded dataset image together with its manifest identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageSample {
    pub id: String,
    pub pixels: Image,
}

impl ImageSample {
    pub fn new(id: impl Into<String>, pixels: Image) -> Self {
        ImageSample {
            id: id.into(),
            pixels,
        }
    }

    /// `(height, width)` of the source image in pixels.
    pub fn source_dims(&self) -> (usize, usize) {
        (self.pixels.height(), self.pixels.width())
    }
}

/// Ordered list of image ids. The order is the canonical sampling order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    name: String,
    entries: Vec<String>,
    root: String,
}

impl DatasetManifest {
    pub fn new(
        name: impl Into<String>,
        entries: Vec<String>,
        root: impl Into<String>,
    ) -> Result<Self, DomainError> {
        let name = name.into();
        if entries.is_empty() {
            return Err(DomainError::EmptyManifest(name));
        }
        let mut seen = HashSet::with_capacity(entries.len());
        for id in &entries {
            if !seen.insert(id.as_str()) {
                return Err(DomainError::DuplicateId {
                    name,
                    id: id.clone(),
                });
            }
        }
        Ok(DatasetManifest {
            name,
            entries,
            root: root.into(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Feature vector returned by an encoder. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<Self, DomainError> {
        if values.is_empty() {
            return Err(DomainError::EmptyEmbedding);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(DomainError::NonFiniteEmbedding { index, value });
        }
        Ok(EmbeddingVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// The six per-subset statistics: unary similarities (means of cosine
/// similarities, in `[-1, 1]`) and binary similarities (negated mean absolute
/// errors, `<= 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilaritySets {
    pub s_u_gg: f64,
    pub s_u_ll: f64,
    pub s_u_gl: f64,
    pub s_b_gg: f64,
    pub s_b_ll: f64,
    pub s_b_gl: f64,
}

impl SimilaritySets {
    pub fn new(unary: [f64; 3], binary: [f64; 3]) -> Result<Self, DomainError> {
        const UNARY: [&str; 3] = ["s_u_gg", "s_u_ll", "s_u_gl"];
        const BINARY: [&str; 3] = ["s_b_gg", "s_b_ll", "s_b_gl"];
        for (component, &value) in UNARY.iter().zip(&unary) {
            if !(-1.0..=1.0).contains(&value) {
                return Err(DomainError::SimilarityRange { component, value });
            }
        }
        for (component, &value) in BINARY.iter().zip(&binary) {
            if !(value <= 0.0) {
                return Err(DomainError::SimilarityRange { component, value });
            }
        }
        Ok(SimilaritySets {
            s_u_gg: unary[0],
            s_u_ll: unary[1],
            s_u_gl: unary[2],
            s_b_gg: binary[0],
            s_b_ll: binary[1],
            s_b_gl: binary[2],
        })
    }

    pub fn unary(&self) -> [f64; 3] {
        [self.s_u_gg, self.s_u_ll, self.s_u_gl]
    }

    pub fn binary(&self) -> [f64; 3] {
        [self.s_b_gg, self.s_b_ll, self.s_b_gl]
    }
}

/// One round's contrastive relationship gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSample {
    pub round: usize,
    pub unary_gap: f64,
    pub binary_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Stolen,
    Innocent,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Stolen => "Stolen",
            Verdict::Innocent => "Innocent",
        })
    }
}
