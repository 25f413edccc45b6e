//! Multi-scale augmentation: `M` global and `N` local views per image.
//!
//! Each view is produced by random-resized-crop, horizontal flip, color jitter
//! and random grayscale, in that order. Global and local views differ only in
//! the crop area range; both are resized to the same `view_size`.
//!
//! Crop windows are continuous rectangles in source pixel coordinates, so the
//! sampled area fraction is exact rather than rounded to whole pixels.
//! Resizing is bilinear with half-pixel centers.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::VerificationConfig;
use crate::domain::{Image, ImageSample};
use crate::seed::{rng_for, SeedPart};

/// Crop sampling attempts before falling back to the image's own aspect ratio.
const CROP_ATTEMPTS: usize = 10;

#[derive(Debug, Error, PartialEq)]
pub enum AugmentError {
    #[error("crop logging was disabled for this view")]
    Unavailable,
    #[error("view was cropped from a {expected:?} image, not {actual:?}")]
    SourceMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Interpolation {
    #[default]
    Bilinear,
}

/// Strengths of the per-view augmentations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentationParams {
    pub flip_prob: f64,
    pub grayscale_prob: f64,
    /// Brightness, contrast, saturation and hue jitter strengths.
    pub jitter_strength: [f64; 4],
    /// Probability that color jitter is applied to a view at all.
    pub jitter_prob: f64,
    /// Aspect ratio (width / height) range for crops.
    pub crop_aspect: (f64, f64),
    pub interpolation: Interpolation,
    /// Record each view's crop window so [`crop_area_fraction`] can recover it.
    pub log_crops: bool,
}

impl Default for AugmentationParams {
    fn default() -> Self {
        AugmentationParams {
            flip_prob: 0.5,
            grayscale_prob: 0.2,
            jitter_strength: [0.4, 0.4, 0.4, 0.1],
            jitter_prob: 0.8,
            crop_aspect: (3.0 / 4.0, 4.0 / 3.0),
            interpolation: Interpolation::Bilinear,
            log_crops: true,
        }
    }
}

impl AugmentationParams {
    /// Geometry only: crops and resizes, with no flips or color changes.
    pub fn crop_only() -> Self {
        AugmentationParams {
            flip_prob: 0.0,
            grayscale_prob: 0.0,
            jitter_prob: 0.0,
            ..Default::default()
        }
    }

    pub(crate) fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, p) in [
            ("flip_prob", self.flip_prob),
            ("grayscale_prob", self.grayscale_prob),
            ("jitter_prob", self.jitter_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                out.push(format!("{name} must lie in [0,1], got {p}"));
            }
        }
        if self.jitter_strength.iter().any(|s| !(*s >= 0.0)) {
            out.push("jitter strengths must be non-negative".to_string());
        }
        if self.jitter_strength[3] > 0.5 {
            out.push("hue jitter must not exceed 0.5".to_string());
        }
        let (lo, hi) = self.crop_aspect;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            out.push(format!("crop_aspect requires 0<lo<=hi, got ({lo}, {hi})"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scale {
    Global,
    Local,
}

impl Scale {
    fn tag(self) -> &'static str {
        match self {
            Scale::Global => "global",
            Scale::Local => "local",
        }
    }
}

/// Crop rectangle in source pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CropWindow {
    pub x0: f64,
    pub y0: f64,
    pub width: f64,
    pub height: f64,
    /// `area / source area`. Equals the sampled fraction unless `clamped`.
    pub area_fraction: f64,
    /// The sampled window was narrower or shorter than one pixel and was
    /// widened to 1 px.
    pub clamped: bool,
    pub source_dims: (usize, usize),
}

/// One augmented view of a dataset image.
#[derive(Debug, Clone, PartialEq)]
pub struct View {
    pub image_id: Arc<str>,
    pub scale: Scale,
    pub index: usize,
    pub pixels: Image,
    pub crop: Option<CropWindow>,
}

/// All views of one image for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewSet {
    pub image_id: Arc<str>,
    pub global_views: Vec<View>,
    pub local_views: Vec<View>,
}

impl ViewSet {
    pub fn views(&self) -> impl Iterator<Item = &View> {
        self.global_views.iter().chain(&self.local_views)
    }
}

/// Generates `M` global and `N` local views of `image`.
///
/// The result depends only on the pixels, the image id, `round_seed`, the
/// view indices and `params`; generating views for images in any order gives
/// identical output.
pub fn make_views(
    image: &ImageSample,
    cfg: &VerificationConfig,
    params: &AugmentationParams,
    round_seed: u64,
) -> ViewSet {
    let image_id: Arc<str> = Arc::from(image.id.as_str());
    let make = |scale: Scale, count: usize, range: (f64, f64)| -> Vec<View> {
        (0..count)
            .map(|index| {
                make_view(
                    image,
                    image_id.clone(),
                    scale,
                    index,
                    range,
                    cfg.view_size,
                    params,
                    round_seed,
                )
            })
            .collect()
    };
    ViewSet {
        global_views: make(Scale::Global, cfg.global_views, cfg.crop_global),
        local_views: make(Scale::Local, cfg.local_views, cfg.crop_local),
        image_id: image_id.clone(),
    }
}

#[allow(clippy::too_many_arguments)]
fn make_view(
    image: &ImageSample,
    image_id: Arc<str>,
    scale: Scale,
    index: usize,
    area_range: (f64, f64),
    view_size: usize,
    params: &AugmentationParams,
    round_seed: u64,
) -> View {
    let mut rng = rng_for(&[
        SeedPart::Tag("view"),
        SeedPart::U64(round_seed),
        SeedPart::Str(&image.id),
        SeedPart::Tag(scale.tag()),
        SeedPart::U64(index as u64),
    ]);
    let src = &image.pixels;
    let window = sample_crop(&mut rng, src.height(), src.width(), area_range, params.crop_aspect);
    let mut data = resize_bilinear(src, &window, view_size);

    if rng.random::<f64>() < params.flip_prob {
        flip_horizontal(&mut data, view_size);
    }
    let apply_jitter = rng.random::<f64>() < params.jitter_prob;
    let factors = JitterFactors::sample(&mut rng, params.jitter_strength);
    if apply_jitter {
        factors.apply(&mut data);
    }
    if rng.random::<f64>() < params.grayscale_prob {
        to_grayscale(&mut data);
    }

    View {
        image_id,
        scale,
        index,
        pixels: Image::from_raw_unchecked(view_size, view_size, data),
        crop: params.log_crops.then_some(window),
    }
}

fn sample_crop(
    rng: &mut ChaCha8Rng,
    height: usize,
    width: usize,
    (lo, hi): (f64, f64),
    (aspect_lo, aspect_hi): (f64, f64),
) -> CropWindow {
    let (h_px, w_px) = (height as f64, width as f64);
    let area = h_px * w_px;
    let (log_lo, log_hi) = (aspect_lo.ln(), aspect_hi.ln());

    let mut fraction = lo;
    let mut size = None;
    for _ in 0..CROP_ATTEMPTS {
        fraction = rng.random_range(lo..hi);
        let ratio = if log_lo < log_hi {
            rng.random_range(log_lo..log_hi).exp()
        } else {
            log_lo.exp()
        };
        let w = (fraction * area * ratio).sqrt();
        let h = (fraction * area / ratio).sqrt();
        if w <= w_px && h <= h_px {
            size = Some((w, h));
            break;
        }
    }
    // Keeping the source aspect ratio always fits and keeps the area fraction.
    let (mut w, mut h) = size.unwrap_or_else(|| (fraction.sqrt() * w_px, fraction.sqrt() * h_px));

    let mut clamped = false;
    if w < 1.0 {
        w = 1.0;
        clamped = true;
    }
    if h < 1.0 {
        h = 1.0;
        clamped = true;
    }
    let area_fraction = if clamped { w * h / area } else { fraction };
    let x0 = rng.random::<f64>() * (w_px - w);
    let y0 = rng.random::<f64>() * (h_px - h);
    CropWindow {
        x0,
        y0,
        width: w,
        height: h,
        area_fraction,
        clamped,
        source_dims: (height, width),
    }
}

/// Source sample positions and weights along one axis.
fn axis_taps(start: f64, extent: f64, len: usize, out_len: usize) -> Vec<(usize, usize, f32)> {
    let max = (len - 1) as f64;
    (0..out_len)
        .map(|o| {
            let s = (start + (o as f64 + 0.5) * extent / out_len as f64 - 0.5).clamp(0.0, max);
            let i0 = s.floor() as usize;
            let i1 = (i0 + 1).min(len - 1);
            (i0, i1, (s - i0 as f64) as f32)
        })
        .collect()
}

fn resize_bilinear(src: &Image, window: &CropWindow, out: usize) -> Vec<f32> {
    let xs = axis_taps(window.x0, window.width, src.width(), out);
    let ys = axis_taps(window.y0, window.height, src.height(), out);
    let data = src.data();
    let stride = src.width() * 3;
    let mut dst = Vec::with_capacity(out * out * 3);
    for &(y0, y1, fy) in &ys {
        let (r0, r1) = (&data[y0 * stride..], &data[y1 * stride..]);
        for &(x0, x1, fx) in &xs {
            for c in 0..3 {
                let top = r0[x0 * 3 + c] + (r0[x1 * 3 + c] - r0[x0 * 3 + c]) * fx;
                let bottom = r1[x0 * 3 + c] + (r1[x1 * 3 + c] - r1[x0 * 3 + c]) * fx;
                dst.push((top + (bottom - top) * fy).clamp(0.0, 1.0));
            }
        }
    }
    dst
}

fn flip_horizontal(data: &mut [f32], size: usize) {
    for row in data.chunks_mut(size * 3) {
        for x in 0..size / 2 {
            let (a, b) = (x * 3, (size - 1 - x) * 3);
            for c in 0..3 {
                row.swap(a + c, b + c);
            }
        }
    }
}

fn gray(px: &[f32]) -> f32 {
    0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]
}

fn to_grayscale(data: &mut [f32]) {
    for px in data.chunks_mut(3) {
        let g = gray(px);
        px.fill(g);
    }
}

struct JitterFactors {
    brightness: f32,
    contrast: f32,
    saturation: f32,
    hue: f32,
}

impl JitterFactors {
    fn sample(rng: &mut ChaCha8Rng, [b, c, s, h]: [f64; 4]) -> Self {
        let mut factor = |strength: f64| -> f32 {
            if strength > 0.0 {
                rng.random_range((1.0 - strength).max(0.0)..=1.0 + strength) as f32
            } else {
                1.0
            }
        };
        let brightness = factor(b);
        let contrast = factor(c);
        let saturation = factor(s);
        let hue = if h > 0.0 {
            rng.random_range(-h..=h) as f32
        } else {
            0.0
        };
        JitterFactors {
            brightness,
            contrast,
            saturation,
            hue,
        }
    }

    fn apply(&self, data: &mut [f32]) {
        for v in data.iter_mut() {
            *v = (*v * self.brightness).clamp(0.0, 1.0);
        }

        let n = (data.len() / 3) as f32;
        let mean = data.chunks(3).map(gray).sum::<f32>() / n;
        for v in data.iter_mut() {
            *v = ((*v - mean) * self.contrast + mean).clamp(0.0, 1.0);
        }

        for px in data.chunks_mut(3) {
            let g = gray(px);
            for v in px.iter_mut() {
                *v = ((*v - g) * self.saturation + g).clamp(0.0, 1.0);
            }
        }

        if self.hue != 0.0 {
            for px in data.chunks_mut(3) {
                let (h, s, v) = rgb_to_hsv(px[0], px[1], px[2]);
                let h = (h + self.hue).rem_euclid(1.0);
                let rgb = hsv_to_rgb(h, s, v);
                for (dst, src) in px.iter_mut().zip(rgb) {
                    *dst = src.clamp(0.0, 1.0);
                }
            }
        }
    }
}

/// RGB to HSV, all components in `[0, 1]`.
fn rgb_to_hsv(r: f32, g: f32, b: f32) -> (f32, f32, f32) {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta == 0.0 {
        0.0
    } else if max == r {
        ((g - b) / delta).rem_euclid(6.0) / 6.0
    } else if max == g {
        ((b - r) / delta + 2.0) / 6.0
    } else {
        ((r - g) / delta + 4.0) / 6.0
    };
    (h, s, max)
}

fn hsv_to_rgb(h: f32, s: f32, v: f32) -> [f32; 3] {
    let h6 = h * 6.0;
    let sector = (h6.floor() as i32).rem_euclid(6);
    let f = h6 - h6.floor();
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    match sector {
        0 => [v, t, p],
        1 => [q, v, p],
        2 => [p, v, t],
        3 => [p, q, v],
        4 => [t, p, v],
        _ => [v, p, q],
    }
}

/// Area of the crop that produced `view`, as a fraction of `original`'s area.
pub fn crop_area_fraction(view: &View, original: &ImageSample) -> Result<f64, AugmentError> {
    let window = view.crop.as_ref().ok_or(AugmentError::Unavailable)?;
    if window.source_dims != original.source_dims() {
        return Err(AugmentError::SourceMismatch {
            expected: window.source_dims,
            actual: original.source_dims(),
        });
    }
    Ok(window.area_fraction)
}
