use super::summation::pairwise_mean;
use super::StatsError;
use crate::domain::{EmbeddingVector, SimilaritySets};

/// Embeddings of every view of every image in one sampled subset.
///
/// `global[i][m]` is the embedding of the `m`-th global view of image `i`;
/// `local[i][n]` likewise for local views. Image order is the sampled order
/// and fixes the pair order of every [`BinaryRelationSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetEmbeddings {
    image_ids: Vec<String>,
    global: Vec<Vec<EmbeddingVector>>,
    local: Vec<Vec<EmbeddingVector>>,
}

impl SubsetEmbeddings {
    pub fn new(
        image_ids: Vec<String>,
        global: Vec<Vec<EmbeddingVector>>,
        local: Vec<Vec<EmbeddingVector>>,
    ) -> Result<Self, StatsError> {
        let n = image_ids.len();
        if global.len() != n || local.len() != n {
            return Err(StatsError::Malformed(format!(
                "{n} ids but {} global and {} local rows",
                global.len(),
                local.len()
            )));
        }
        let m = global.first().map_or(0, Vec::len);
        let k = local.first().map_or(0, Vec::len);
        if global.iter().any(|r| r.len() != m) || local.iter().any(|r| r.len() != k) {
            return Err(StatsError::Malformed(
                "every image needs the same number of views".into(),
            ));
        }
        let mut dims = global.iter().chain(&local).flatten().map(EmbeddingVector::dim);
        if let Some(d) = dims.next() {
            if let Some(other) = dims.find(|&x| x != d) {
                return Err(StatsError::DimMismatch(d, other));
            }
        }
        Ok(SubsetEmbeddings {
            image_ids,
            global,
            local,
        })
    }

    pub fn image_ids(&self) -> &[String] {
        &self.image_ids
    }

    pub fn len(&self) -> usize {
        self.image_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image_ids.is_empty()
    }

    pub fn global_views(&self) -> usize {
        self.global.first().map_or(0, Vec::len)
    }

    pub fn local_views(&self) -> usize {
        self.local.first().map_or(0, Vec::len)
    }

    pub fn global(&self, image: usize, view: usize) -> &EmbeddingVector {
        &self.global[image][view]
    }

    pub fn local(&self, image: usize, view: usize) -> &EmbeddingVector {
        &self.local[image][view]
    }
}

/// Pairwise cosine similarities between images under one augmentation,
/// ordered `(0,1), (0,2), ..., (0,n-1), (1,2), ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryRelationSet(Vec<f64>);

impl BinaryRelationSet {
    /// Wraps precomputed relations; every value must lie in `[-1, 1]`.
    pub fn new(values: Vec<f64>) -> Result<Self, StatsError> {
        if let Some(v) = values.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
            return Err(StatsError::Malformed(format!("relation {v} outside [-1,1]")));
        }
        Ok(BinaryRelationSet(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Which single augmentation a binary relation set is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleIndex {
    Global(usize),
    Local(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnarySimilarity {
    pub gg: f64,
    pub ll: f64,
    pub gl: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinarySimilarity {
    pub gg: f64,
    pub ll: f64,
    pub gl: f64,
}

/// An embedding with its norm precomputed.
struct Unit<'a> {
    values: &'a [f64],
    norm: f64,
}

impl<'a> Unit<'a> {
    fn new(e: &'a EmbeddingVector) -> Result<Self, StatsError> {
        let norm = e.values().iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(StatsError::ZeroVector);
        }
        Ok(Unit {
            values: e.values(),
            norm,
        })
    }

    fn cos(&self, other: &Unit<'_>) -> f64 {
        let dot: f64 = self.values.iter().zip(other.values).map(|(a, b)| a * b).sum();
        (dot / (self.norm * other.norm)).clamp(-1.0, 1.0)
    }
}

/// `u.v / (|u| |v|)`, clamped to `[-1, 1]`.
pub fn cosine_sim(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64, StatsError> {
    if u.dim() != v.dim() {
        return Err(StatsError::DimMismatch(u.dim(), v.dim()));
    }
    Ok(Unit::new(u)?.cos(&Unit::new(v)?))
}

fn units(rows: &[Vec<EmbeddingVector>]) -> Result<Vec<Vec<Unit<'_>>>, StatsError> {
    rows.iter()
        .map(|r| r.iter().map(Unit::new).collect())
        .collect()
}

/// Mean over images of the mean similarity between views `a` and `b` of the
/// same image. With `same` set, `a` and `b` are the same view list and only
/// unordered pairs `m < n` are taken.
fn unary_mean(a: &[Vec<Unit<'_>>], b: &[Vec<Unit<'_>>], same: bool) -> f64 {
    let per_image: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(va, vb)| {
            let mut sims = Vec::new();
            for (m, x) in va.iter().enumerate() {
                let start = if same { m + 1 } else { 0 };
                for y in &vb[start..] {
                    sims.push(x.cos(y));
                }
            }
            pairwise_mean(&sims)
        })
        .collect();
    pairwise_mean(&per_image)
}

fn need_pairs(scale: &'static str, got: usize) -> Result<(), StatsError> {
    if got < 2 {
        Err(StatsError::InsufficientViews { scale, got })
    } else {
        Ok(())
    }
}

fn unary_from_units(
    global: &[Vec<Unit<'_>>],
    local: &[Vec<Unit<'_>>],
) -> UnarySimilarity {
    UnarySimilarity {
        gg: unary_mean(global, global, true),
        ll: unary_mean(local, local, true),
        gl: unary_mean(global, local, false),
    }
}

/// Unary similarities: how close the views of each image embed to one
/// another, within the global scale, within the local scale, and across.
pub fn unary_similarity(se: &SubsetEmbeddings) -> Result<UnarySimilarity, StatsError> {
    need_pairs("global", se.global_views())?;
    need_pairs("local", se.local_views())?;
    if se.is_empty() {
        return Err(StatsError::InsufficientImages(0));
    }
    Ok(unary_from_units(&units(&se.global)?, &units(&se.local)?))
}

fn relations(views: &[&Unit<'_>]) -> BinaryRelationSet {
    let n = views.len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(views[i].cos(views[j]));
        }
    }
    BinaryRelationSet(out)
}

/// Cosine similarity between every pair of images, using the single
/// augmentation `scale` of each.
pub fn binary_relation_set(
    se: &SubsetEmbeddings,
    scale: ScaleIndex,
) -> Result<BinaryRelationSet, StatsError> {
    if se.len() < 2 {
        return Err(StatsError::InsufficientImages(se.len()));
    }
    let (rows, index, count) = match scale {
        ScaleIndex::Global(m) => (&se.global, m, se.global_views()),
        ScaleIndex::Local(n) => (&se.local, n, se.local_views()),
    };
    if index >= count {
        return Err(StatsError::NoSuchView { index, count });
    }
    let picked = rows
        .iter()
        .map(|r| Unit::new(&r[index]))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(relations(&picked.iter().collect::<Vec<_>>()))
}

fn mean_abs_error(a: &BinaryRelationSet, b: &BinaryRelationSet) -> f64 {
    let diffs: Vec<f64> = a.0.iter().zip(&b.0).map(|(x, y)| (x - y).abs()).collect();
    pairwise_mean(&diffs)
}

/// Negated mean absolute error between relation sets, averaged over the
/// unordered global pairs, unordered local pairs, and all global-local pairs.
pub fn binary_similarity(
    g_global: &[BinaryRelationSet],
    g_local: &[BinaryRelationSet],
) -> Result<BinarySimilarity, StatsError> {
    need_pairs("global", g_global.len())?;
    need_pairs("local", g_local.len())?;
    let len = g_global[0].len();
    if let Some(other) = g_global.iter().chain(g_local).find(|s| s.len() != len) {
        return Err(StatsError::ShapeMismatch(len, other.len()));
    }

    let within = |sets: &[BinaryRelationSet]| -> f64 {
        let mut maes = Vec::new();
        for (m, a) in sets.iter().enumerate() {
            for b in &sets[m + 1..] {
                maes.push(mean_abs_error(a, b));
            }
        }
        0.0 - pairwise_mean(&maes)
    };
    let mut cross = Vec::with_capacity(g_global.len() * g_local.len());
    for a in g_global {
        for b in g_local {
            cross.push(mean_abs_error(a, b));
        }
    }
    Ok(BinarySimilarity {
        gg: within(g_global),
        ll: within(g_local),
        gl: 0.0 - pairwise_mean(&cross),
    })
}

/// All six statistics for one subset under one encoder.
pub fn similarity_sets(se: &SubsetEmbeddings) -> Result<SimilaritySets, StatsError> {
    if se.len() < 2 {
        return Err(StatsError::InsufficientImages(se.len()));
    }
    need_pairs("global", se.global_views())?;
    need_pairs("local", se.local_views())?;

    let global = units(&se.global)?;
    let local = units(&se.local)?;
    let unary = unary_from_units(&global, &local);

    let column = |rows: &[Vec<Unit<'_>>], index: usize| -> BinaryRelationSet {
        relations(&rows.iter().map(|r| &r[index]).collect::<Vec<_>>())
    };
    let g_global: Vec<_> = (0..se.global_views()).map(|m| column(&global, m)).collect();
    let g_local: Vec<_> = (0..se.local_views()).map(|n| column(&local, n)).collect();
    let binary = binary_similarity(&g_global, &g_local)?;

    Ok(SimilaritySets::new(
        [unary.gg, unary.ll, unary.gl],
        [binary.gg, binary.ll, binary.gl],
    )?)
}
