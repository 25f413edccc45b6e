//! Dataset manifests and image loading.
//!
//! A dataset is a directory of PNG/JPEG files. An optional `manifest.txt`
//! index (one relative path per line, UTF-8, LF-terminated) fixes the entry
//! order; without it entries are sorted lexicographically by id.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use crate::domain::{DatasetManifest, DomainError, Image, ImageSample};

pub const INDEX_FILE: &str = "manifest.txt";

const IMAGE_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg"];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("dataset at {0} contains no images")]
    EmptyDataset(String),
    #[error("image {id:?} cannot be decoded: {reason}")]
    CorruptImage { id: String, reason: String },
    #[error("image {0:?} is not part of this dataset")]
    UnknownImage(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Invalid(#[from] DomainError),
}

fn io_err(path: &Path, source: std::io::Error) -> DatasetError {
    DatasetError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Provides decoded pixels for the ids of one dataset.
pub trait ImageSource: Send + Sync {
    fn load(&self, id: &str) -> Result<ImageSample, DatasetError>;
}

/// Decodes images from files under a root directory.
#[derive(Debug, Clone)]
pub struct DirectorySource {
    root: PathBuf,
}

impl DirectorySource {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DirectorySource { root: root.into() }
    }
}

impl ImageSource for DirectorySource {
    fn load(&self, id: &str) -> Result<ImageSample, DatasetError> {
        let pixels = decode_file(&self.root.join(id), id)?;
        Ok(ImageSample::new(id, pixels))
    }
}

/// Decodes a PNG/JPEG file into an RGB image with values in `[0, 1]`.
pub fn decode_file(path: &Path, id: &str) -> Result<Image, DatasetError> {
    let corrupt = |reason: String| DatasetError::CorruptImage {
        id: id.to_string(),
        reason,
    };
    let decoded = image::ImageReader::open(path)
        .map_err(|e| io_err(path, e))?
        .with_guessed_format()
        .map_err(|e| io_err(path, e))?
        .decode()
        .map_err(|e| corrupt(e.to_string()))?;
    let rgb = decoded.into_rgb32f();
    let (width, height) = rgb.dimensions();
    let data = rgb.into_raw().into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
    Image::new(height as usize, width as usize, data).map_err(|e| corrupt(e.to_string()))
}

/// A manifest paired with the source that decodes its entries.
#[derive(Clone)]
pub struct Dataset {
    manifest: DatasetManifest,
    source: Arc<dyn ImageSource>,
}

impl Dataset {
    pub fn new(manifest: DatasetManifest, source: Arc<dyn ImageSource>) -> Self {
        Dataset { manifest, source }
    }

    /// Loads a dataset directory via [`load_manifest`].
    pub fn open(root: impl AsRef<Path>) -> Result<Self, DatasetError> {
        let root = root.as_ref();
        let manifest = load_manifest(root)?;
        Ok(Dataset::new(
            manifest,
            Arc::new(DirectorySource::new(root.to_path_buf())),
        ))
    }

    pub fn manifest(&self) -> &DatasetManifest {
        &self.manifest
    }

    pub fn len(&self) -> usize {
        self.manifest.len()
    }

    pub fn is_empty(&self) -> bool {
        self.manifest.is_empty()
    }

    pub fn load(&self, id: &str) -> Result<ImageSample, DatasetError> {
        self.source.load(id)
    }
}

impl fmt::Debug for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dataset")
            .field("name", &self.manifest.name())
            .field("len", &self.manifest.len())
            .finish()
    }
}

/// Builds the manifest for a dataset directory.
///
/// With a `manifest.txt` index, its order is preserved and every listed file
/// must decode. Without one, image files are collected recursively and sorted
/// by their `/`-separated relative path.
pub fn load_manifest(root: impl AsRef<Path>) -> Result<DatasetManifest, DatasetError> {
    let root = root.as_ref();
    let name = root
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| root.display().to_string());
    let locator = root.display().to_string();

    let index = root.join(INDEX_FILE);
    let entries = if index.is_file() {
        let text = fs::read_to_string(&index).map_err(|e| io_err(&index, e))?;
        let entries: Vec<String> = text
            .split('\n')
            .map(|l| l.strip_suffix('\r').unwrap_or(l))
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        for id in &entries {
            decode_file(&root.join(id), id).map_err(|e| match e {
                DatasetError::Io { source, .. } => DatasetError::CorruptImage {
                    id: id.clone(),
                    reason: source.to_string(),
                },
                other => other,
            })?;
        }
        entries
    } else {
        let mut entries = Vec::new();
        collect_images(root, root, &mut entries)?;
        entries.sort();
        entries
    };

    if entries.is_empty() {
        return Err(DatasetError::EmptyDataset(locator));
    }
    Ok(DatasetManifest::new(name, entries, locator)?)
}

fn collect_images(root: &Path, dir: &Path, out: &mut Vec<String>) -> Result<(), DatasetError> {
    for entry in fs::read_dir(dir).map_err(|e| io_err(dir, e))? {
        let entry = entry.map_err(|e| io_err(dir, e))?;
        let path = entry.path();
        let kind = entry.file_type().map_err(|e| io_err(&path, e))?;
        if kind.is_dir() {
            collect_images(root, &path, out)?;
        } else if is_image(&path) {
            let rel = path.strip_prefix(root).expect("walk stays under root");
            let id = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            out.push(id);
        }
    }
    Ok(())
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

/// Writes `image` as an 8-bit PNG.
pub fn save_png(image: &Image, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let bytes: Vec<u8> = image
        .data()
        .iter()
        .map(|v| (v * 255.0).round() as u8)
        .collect();
    image::save_buffer(
        path,
        &bytes,
        image.width() as u32,
        image.height() as u32,
        image::ExtendedColorType::Rgb8,
    )
    .map_err(|e| DatasetError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e),
    })
}
