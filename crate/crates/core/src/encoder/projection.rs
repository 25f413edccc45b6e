//! Pixel-only encoders with no notion of training data.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{Encoder, EncoderError, EncoderInput, Health};
use crate::domain::{EmbeddingVector, Image};
use crate::encoder::protocol::PROTOCOL_VERSION;
use crate::seed::{rng_for, SeedPart};

/// Returns the same vector for every input.
#[derive(Debug, Clone)]
pub struct ConstantEncoder {
    value: Vec<f64>,
}

impl ConstantEncoder {
    pub fn new(value: Vec<f64>) -> Self {
        assert!(!value.is_empty(), "constant embedding needs a dimension");
        ConstantEncoder { value }
    }
}

impl Encoder for ConstantEncoder {
    fn health(&self) -> Result<Health, EncoderError> {
        Ok(Health {
            dim: self.value.len(),
            protocol_version: PROTOCOL_VERSION.to_string(),
        })
    }

    fn embed(&self, batch: &[EncoderInput<'_>]) -> Result<Vec<EmbeddingVector>, EncoderError> {
        let e = EmbeddingVector::new(self.value.clone()).map_err(|e| EncoderError::BadEmbedding {
            index: 0,
            reason: e.to_string(),
        })?;
        Ok(vec![e; batch.len()])
    }
}

/// Average-pools the image to a `grid x grid` RGB thumbnail and applies a
/// fixed seeded Gaussian projection (plus a bias column, so black images do
/// not embed to zero). A cheap stand-in for a real backbone when exercising
/// the wire protocol.
#[derive(Debug, Clone)]
pub struct PixelProjectionEncoder {
    grid: usize,
    dim: usize,
    weights: Vec<f64>,
}

impl PixelProjectionEncoder {
    pub fn new(dim: usize, grid: usize, seed: u64) -> Self {
        assert!(dim > 0 && grid > 0);
        let features = grid * grid * 3 + 1;
        let mut rng = rng_for(&[SeedPart::Tag("pixel-projection"), SeedPart::U64(seed)]);
        let weights = (0..dim * features)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        PixelProjectionEncoder { grid, dim, weights }
    }

    fn features(&self, img: &Image) -> Vec<f64> {
        let g = self.grid;
        let mut sums = vec![0.0f64; g * g * 3];
        let mut counts = vec![0usize; g * g];
        for y in 0..img.height() {
            let cy = y * g / img.height();
            for x in 0..img.width() {
                let cx = x * g / img.width();
                let cell = cy * g + cx;
                counts[cell] += 1;
                for (c, v) in img.pixel(y, x).iter().enumerate() {
                    sums[cell * 3 + c] += f64::from(*v);
                }
            }
        }
        let mut out: Vec<f64> = sums
            .iter()
            .enumerate()
            .map(|(i, s)| match counts[i / 3] {
                0 => 0.0,
                n => s / n as f64,
            })
            .collect();
        out.push(1.0);
        out
    }
}

impl Encoder for PixelProjectionEncoder {
    fn health(&self) -> Result<Health, EncoderError> {
        Ok(Health {
            dim: self.dim,
            protocol_version: PROTOCOL_VERSION.to_string(),
        })
    }

    fn embed(&self, batch: &[EncoderInput<'_>]) -> Result<Vec<EmbeddingVector>, EncoderError> {
        batch
            .iter()
            .enumerate()
            .map(|(index, input)| {
                let f = self.features(input.pixels);
                let values = self
                    .weights
                    .chunks(f.len())
                    .map(|row| row.iter().zip(&f).map(|(w, x)| w * x).sum())
                    .collect();
                EmbeddingVector::new(values).map_err(|e| EncoderError::BadEmbedding {
                    index,
                    reason: e.to_string(),
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_distinguishes_colors_and_is_deterministic() {
        let enc = PixelProjectionEncoder::new(16, 2, 3);
        let red = Image::constant(8, 8, [1.0, 0.0, 0.0]).unwrap();
        let blue = Image::constant(8, 8, [0.0, 0.0, 1.0]).unwrap();
        let black = Image::constant(8, 8, [0.0; 3]).unwrap();
        let out = enc
            .embed(&[
                EncoderInput::anonymous(&red),
                EncoderInput::anonymous(&blue),
                EncoderInput::anonymous(&black),
            ])
            .unwrap();
        assert_ne!(out[0], out[1]);
        assert!(out[2].values().iter().any(|v| *v != 0.0));
        let again = enc.embed(&[EncoderInput::anonymous(&red)]).unwrap();
        assert_eq!(again[0], out[0]);
        assert_eq!(out[0].dim(), 16);
    }

    #[test]
    fn projection_handles_images_smaller_than_grid() {
        let enc = PixelProjectionEncoder::new(4, 4, 0);
        let tiny = Image::constant(1, 2, [0.5; 3]).unwrap();
        assert_eq!(enc.embed(&[EncoderInput::anonymous(&tiny)]).unwrap()[0].dim(), 4);
    }
}
