//! Embedding service wire protocol, version 1.
//!
//! - `GET /v1/health` returns `{"dim": <int>, "protocol_version": "1"}`.
//! - `POST /v1/embed` takes `{"images": [{"height", "width", "format", "data"}]}`
//!   where `data` is base64 of `height*width*3` little-endian `f32` values,
//!   row-major, channel-last, and `format` is `"rgb_f32_le_base64"`. It returns
//!   `{"dim": E, "embeddings": [[...], ...]}` in request order.
//! - Errors carry `{"error": {"code", "message"}}` with HTTP status >= 400.

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::Image;

pub const PROTOCOL_VERSION: &str = "1";
pub const FORMAT_RGB_F32_LE_BASE64: &str = "rgb_f32_le_base64";
pub const HEALTH_PATH: &str = "/v1/health";
pub const EMBED_PATH: &str = "/v1/embed";

#[derive(Debug, Error, PartialEq)]
pub enum ProtocolError {
    #[error("unsupported image format {0:?}")]
    UnsupportedFormat(String),
    #[error("image data is not valid base64: {0}")]
    Base64(String),
    #[error("image payload has {actual} bytes, expected {expected} for {height}x{width}x3 f32")]
    PayloadSize {
        height: usize,
        width: usize,
        expected: usize,
        actual: usize,
    },
    #[error("invalid image: {0}")]
    InvalidImage(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub dim: usize,
    pub protocol_version: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireImage {
    pub height: usize,
    pub width: usize,
    pub format: String,
    pub data: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedRequest {
    pub images: Vec<WireImage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedResponse {
    pub dim: usize,
    pub embeddings: Vec<Vec<f64>>,
}

/// Client-side view of an embed response. Entries that are not numbers
/// (e.g. `null` where a server wrote NaN) decode as `None`.
#[derive(Debug, Clone, Deserialize)]
pub(crate) struct LenientEmbedResponse {
    pub dim: usize,
    pub embeddings: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorDetail {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}

impl ErrorBody {
    pub fn new(code: impl Into<String>, message: impl Into<String>) -> Self {
        ErrorBody {
            error: ErrorDetail {
                code: code.into(),
                message: message.into(),
            },
        }
    }
}

pub fn encode_image(image: &Image) -> WireImage {
    let mut bytes = Vec::with_capacity(image.data().len() * 4);
    for v in image.data() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    WireImage {
        height: image.height(),
        width: image.width(),
        format: FORMAT_RGB_F32_LE_BASE64.to_string(),
        data: STANDARD.encode(bytes),
    }
}

pub fn decode_image(wire: &WireImage) -> Result<Image, ProtocolError> {
    if wire.format != FORMAT_RGB_F32_LE_BASE64 {
        return Err(ProtocolError::UnsupportedFormat(wire.format.clone()));
    }
    let bytes = STANDARD
        .decode(wire.data.as_bytes())
        .map_err(|e| ProtocolError::Base64(e.to_string()))?;
    let expected = wire
        .height
        .checked_mul(wire.width)
        .and_then(|n| n.checked_mul(12))
        .ok_or_else(|| ProtocolError::InvalidImage("dimensions overflow".into()))?;
    if bytes.len() != expected {
        return Err(ProtocolError::PayloadSize {
            height: wire.height,
            width: wire.width,
            expected,
            actual: bytes.len(),
        });
    }
    let data = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Image::new(wire.height, wire.width, data).map_err(|e| ProtocolError::InvalidImage(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_encoding() {
        // 1x1 pixel (0, 0.5, 1): bytes 00000000 0000003f 0000803f.
        let img = Image::new(1, 1, vec![0.0, 0.5, 1.0]).unwrap();
        let wire = encode_image(&img);
        assert_eq!(wire.data, "AAAAAAAAAD8AAIA/");
        let json = serde_json::to_string(&EmbedRequest { images: vec![wire] }).unwrap();
        assert_eq!(
            json,
            r#"{"images":[{"height":1,"width":1,"format":"rgb_f32_le_base64","data":"AAAAAAAAAD8AAIA/"}]}"#
        );
    }

    #[test]
    fn rejects_bad_payloads() {
        let mut wire = encode_image(&Image::constant(2, 2, [0.1, 0.2, 0.3]).unwrap());
        wire.height = 3;
        assert!(matches!(
            decode_image(&wire),
            Err(ProtocolError::PayloadSize { .. })
        ));
        wire.height = 2;
        wire.format = "rgb_u8".into();
        assert!(matches!(
            decode_image(&wire),
            Err(ProtocolError::UnsupportedFormat(_))
        ));
        wire.format = FORMAT_RGB_F32_LE_BASE64.into();
        wire.data = "***".into();
        assert!(matches!(decode_image(&wire), Err(ProtocolError::Base64(_))));
        let out_of_range = WireImage {
            height: 1,
            width: 1,
            format: FORMAT_RGB_F32_LE_BASE64.into(),
            data: STANDARD.encode([2.0f32, 0.0, 0.0].iter().flat_map(|v| v.to_le_bytes()).collect::<Vec<_>>()),
        };
        assert!(matches!(
            decode_image(&out_of_range),
            Err(ProtocolError::InvalidImage(_))
        ));
    }

    #[test]
    fn error_body_shape() {
        let json = serde_json::to_string(&ErrorBody::new("bad_request", "no images")).unwrap();
        assert_eq!(json, r#"{"error":{"code":"bad_request","message":"no images"}}"#);
    }

    proptest! {
        #[test]
        fn image_round_trip(h in 1usize..6, w in 1usize..6, seed in any::<u32>()) {
            let img = Image::from_fn(h, w, |y, x| {
                let v = ((seed as usize + y * 31 + x * 17) % 1000) as f32 / 999.0;
                [v, 1.0 - v, v * v]
            }).unwrap();
            let back = decode_image(&encode_image(&img)).unwrap();
            prop_assert_eq!(back, img);
        }
    }
}
