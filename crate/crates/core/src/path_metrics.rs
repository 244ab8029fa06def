//! Degeneracy Score, DWPR, mode entropy and DWPR*.

use serde::Serialize;

use crate::error::MetricError;
use crate::kernels::{
    jaccard_dissimilarity, jsd, shannon_entropy, vector_distance, DistanceKind, Distribution,
};
use crate::model::{FunctionId, Inventory, ModeId, NodeId};
use crate::paths::{Path, ValidPathSet};
use crate::scalar::{LogBase, Scalar};

/// Number of unordered pairs of elements that can both perform `function`
/// and whose embeddings are more than `delta` apart under `kind`.
pub fn degeneracy_score<T: Scalar>(
    inventory: &Inventory<T>,
    function: &FunctionId,
    kind: DistanceKind,
    delta: T,
) -> Result<usize, MetricError> {
    if !inventory.has_function(function) {
        return Err(MetricError::UnknownFunction(function.clone()));
    }
    let capable: Vec<_> = inventory
        .elements()
        .iter()
        .filter(|e| e.can_perform(function))
        .collect();
    let mut score = 0;
    for (i, a) in capable.iter().enumerate() {
        for b in &capable[i + 1..] {
            if vector_distance(&a.embedding, &b.embedding, kind)? > delta {
                score += 1;
            }
        }
    }
    Ok(score)
}

/// Mean Jaccard dissimilarity between the mode set of `path` and those of
/// the other paths in `others`; 1 when `path` has no other path to compare
/// against.
pub fn path_mode_dissimilarity<T: Scalar>(path: &Path<T>, others: &ValidPathSet<T>) -> T {
    let (sum, count) = others.paths().iter().filter(|other| *other != path).fold(
        (T::zero(), 0usize),
        |(sum, n), other| {
            (
                sum + jaccard_dissimilarity::<_, T>(path.mode_set(), other.mode_set()),
                n + 1,
            )
        },
    );
    if count == 0 {
        T::one()
    } else {
        sum / T::count(count)
    }
}

/// `(1/|𝓜|) Σ 1[Q(P) ≥ θ] · D(P)` over the valid paths.
///
/// Returns 0 for an empty valid set; [`dwpr_report`] flags that case.
pub fn dwpr<T: Scalar>(vps: &ValidPathSet<T>, theta: T) -> T {
    if vps.is_empty() {
        return T::zero();
    }
    let total: T = vps
        .paths()
        .iter()
        .zip(vps.qualities())
        .filter(|(_, &q)| q >= theta)
        .map(|(p, _)| path_mode_dissimilarity(p, vps))
        .sum();
    total / T::count(vps.unique_mode_combos().len())
}

fn mode_vectors<T: Scalar>(
    vps: &ValidPathSet<T>,
) -> Result<(&Distribution<T>, Vec<Distribution<T>>), MetricError> {
    let probs = vps.distribution().ok_or(MetricError::EmptyValidSet)?;
    let universe: Vec<ModeId> = vps.mode_universe();
    let vectors = vps
        .paths()
        .iter()
        .map(|p| p.mode_vector(&universe))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((probs, vectors))
}

/// Entropy of the quality-weighted pooled mode distribution `Σ ℙ(P)·μ(P)`.
pub fn mode_entropy<T: Scalar>(vps: &ValidPathSet<T>, base: LogBase) -> Result<T, MetricError> {
    let (probs, vectors) = mode_vectors(vps)?;
    pooled_entropy(probs, &vectors, base)
}

fn pooled_entropy<T: Scalar>(
    probs: &Distribution<T>,
    vectors: &[Distribution<T>],
    base: LogBase,
) -> Result<T, MetricError> {
    let dim = vectors.first().map_or(0, Distribution::len);
    let mut pooled = vec![T::zero(); dim];
    for (&w, mu) in probs.probs().iter().zip(vectors) {
        for (acc, &x) in pooled.iter_mut().zip(mu.probs()) {
            *acc = *acc + w * x;
        }
    }
    let pooled = Distribution::normalize(&pooled)?;
    Ok(shannon_entropy(&pooled, base))
}

/// `H_mode + Σ_{i≠j} ℙ(P_i)ℙ(P_j)·JSD(μ(P_i), μ(P_j))`.
pub fn dwpr_star<T: Scalar>(vps: &ValidPathSet<T>, base: LogBase) -> Result<T, MetricError> {
    let (probs, vectors) = mode_vectors(vps)?;
    let h = pooled_entropy(probs, &vectors, base)?;
    let p = probs.probs();
    let mut pairs = T::zero();
    for i in 0..vectors.len() {
        for j in 0..vectors.len() {
            if i != j {
                pairs = pairs + p[i] * p[j] * jsd(&vectors[i], &vectors[j], base)?;
            }
        }
    }
    Ok(h + pairs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct PathDetail<T: Scalar = f64> {
    pub nodes: Vec<NodeId>,
    pub modes: Vec<ModeId>,
    pub quality: T,
    pub probability: T,
    pub passed_theta: bool,
    pub mean_dissimilarity: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct DwprReport<T: Scalar = f64> {
    pub dwpr: T,
    /// `None` when the valid set is empty.
    pub dwpr_star: Option<T>,
    pub mode_entropy: Option<T>,
    pub valid_path_count: usize,
    pub unique_combo_count: usize,
    pub per_path: Vec<PathDetail<T>>,
    pub warnings: Vec<String>,
}

pub fn dwpr_report<T: Scalar>(
    vps: &ValidPathSet<T>,
    theta: T,
    base: LogBase,
) -> Result<DwprReport<T>, MetricError> {
    let mut warnings = Vec::new();
    let (dwpr_star, mode_entropy) = if vps.is_empty() {
        warnings.push("no QoS-valid path: dwpr reported as 0, dwpr_star undefined".to_owned());
        (None, None)
    } else {
        (Some(dwpr_star(vps, base)?), Some(mode_entropy(vps, base)?))
    };
    let per_path = vps
        .paths()
        .iter()
        .enumerate()
        .map(|(i, p)| PathDetail {
            nodes: p.nodes().to_vec(),
            modes: p.modes().cloned().collect(),
            quality: vps.qualities()[i],
            probability: vps.distribution().map_or(T::zero(), |d| d.probs()[i]),
            passed_theta: vps.qualities()[i] >= theta,
            mean_dissimilarity: path_mode_dissimilarity(p, vps),
        })
        .collect();
    Ok(DwprReport {
        dwpr: dwpr(vps, theta),
        dwpr_star,
        mode_entropy,
        valid_path_count: vps.len(),
        unique_combo_count: vps.unique_mode_combos().len(),
        per_path,
        warnings,
    })
}
