//! Multi-Layer Degeneracy Index (MLDI) and its entropy-based form MLDI*.
//!
//! Layer entropy is taken over the *normalized* function coverage of a
//! layer: the raw coverage `(1/n) Σ_j f_jk` need not sum to one.
//!
//! The cross-layer term `H(ℓ_i | ℓ_{i+1})` uses a joint distribution over
//! function pairs `(k, l)` weighted by every cross-layer element pair:
//! `p(k, l) ∝ Σ_{j ∈ ℓ_i} Σ_{j' ∈ ℓ_{i+1}} f_jk · f_j'l`. That sum factors
//! into the product of the two layers' coverage counts, so the conditional
//! entropy always equals `H(ℓ_i)`; the term therefore acts as a
//! γ-weighted copy of each non-final layer's entropy. The last layer has no
//! successor and contributes no cross-layer term.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::MetricError;
use crate::kernels::{shannon_entropy, vector_distance, DistanceKind, Distribution};
use crate::model::{ElementId, Layer, LayerId, LayerStack};
use crate::scalar::{LogBase, Scalar};

/// Members of a layer that have a functionally identical, structurally
/// distinct partner in the same layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegenerateSubset {
    pub members: BTreeSet<ElementId>,
    /// True when the layer carries no embeddings and structural diversity
    /// fell back to distinct element identity.
    pub identity_fallback: bool,
}

/// Elements sharing a non-empty function vector with another element whose
/// embedding lies more than `delta` away (or, without embeddings, with any
/// other element).
pub fn degenerate_subset<T: Scalar>(
    layer: &Layer<T>,
    delta: T,
) -> Result<DegenerateSubset, MetricError> {
    let identity_fallback = !layer.has_embeddings();
    let mut members = BTreeSet::new();
    for (i, a) in layer.elements.iter().enumerate() {
        if !a.performs_any() {
            continue;
        }
        for b in &layer.elements[i + 1..] {
            if a.functions != b.functions {
                continue;
            }
            let diverse = match (&a.embedding, &b.embedding) {
                (Some(x), Some(y)) => vector_distance(x, y, DistanceKind::Euclidean)? > delta,
                _ => true,
            };
            if diverse {
                members.insert(a.id.clone());
                members.insert(b.id.clone());
            }
        }
    }
    Ok(DegenerateSubset {
        members,
        identity_fallback,
    })
}

/// Mean over layers of `|degenerate subset| / |layer|`.
pub fn mldi<T: Scalar>(stack: &LayerStack<T>, delta: T) -> Result<T, MetricError> {
    if stack.layers().is_empty() {
        return Err(MetricError::EmptyStack);
    }
    let mut total = T::zero();
    for layer in stack.layers() {
        let subset = degenerate_subset(layer, delta)?;
        total = total + T::count(subset.members.len()) / T::count(layer.elements.len());
    }
    Ok(total / T::count(stack.layers().len()))
}

fn coverage_counts<T: Scalar>(layer: &Layer<T>) -> Vec<T> {
    let m = layer.function_count();
    let mut counts = vec![T::zero(); m];
    for e in &layer.elements {
        for (c, &bit) in counts.iter_mut().zip(&e.functions) {
            if bit {
                *c = *c + T::one();
            }
        }
    }
    counts
}

/// Per-function coverage fractions and their normalization to a
/// distribution.
pub fn layer_function_distribution<T: Scalar>(
    layer: &Layer<T>,
) -> Result<(Vec<T>, Distribution<T>), MetricError> {
    let n = T::count(layer.elements.len());
    let coverage: Vec<T> = coverage_counts(layer).into_iter().map(|c| c / n).collect();
    let distribution = Distribution::normalize(&coverage)
        .map_err(|_| MetricError::ZeroCoverage(layer.id.clone()))?;
    Ok((coverage, distribution))
}

pub fn layer_entropy<T: Scalar>(layer: &Layer<T>, base: LogBase) -> Result<T, MetricError> {
    let (_, distribution) = layer_function_distribution(layer)?;
    Ok(shannon_entropy(&distribution, base))
}

/// `H(ℓ_i | ℓ_j) = H(joint) − H(ℓ_j)` under the all-pairs coupling.
pub fn conditional_layer_entropy<T: Scalar>(
    upper: &Layer<T>,
    given: &Layer<T>,
    base: LogBase,
) -> Result<T, MetricError> {
    let (ci, cj) = (coverage_counts(upper), coverage_counts(given));
    if ci.iter().all(|c| c.is_zero()) {
        return Err(MetricError::ZeroCoverage(upper.id.clone()));
    }
    if cj.iter().all(|c| c.is_zero()) {
        return Err(MetricError::ZeroCoverage(given.id.clone()));
    }
    let joint: Vec<T> = ci
        .iter()
        .flat_map(|&a| cj.iter().map(move |&b| a * b))
        .collect();
    let joint = Distribution::normalize(&joint)?;
    let mut marginal = vec![T::zero(); cj.len()];
    for row in joint.probs().chunks(cj.len()) {
        for (acc, &p) in marginal.iter_mut().zip(row) {
            *acc = *acc + p;
        }
    }
    let marginal = Distribution::normalize(&marginal)?;
    let h = shannon_entropy(&joint, base) - shannon_entropy(&marginal, base);
    Ok(h.max(T::zero()))
}

fn check_stack<T: Scalar>(stack: &LayerStack<T>, base: LogBase) -> Result<T, MetricError> {
    if stack.layers().is_empty() {
        return Err(MetricError::EmptyStack);
    }
    let m = stack.functions().len();
    if m < 2 {
        return Err(MetricError::TooFewFunctions { m });
    }
    Ok(base.log(T::count(m)))
}

/// `(1/k) Σ_i [H(ℓ_i)/log m + γ·H(ℓ_i | ℓ_{i+1})/log m]`, with no
/// cross-layer term for the last layer.
pub fn mldi_star<T: Scalar>(
    stack: &LayerStack<T>,
    gamma_weight: T,
    base: LogBase,
) -> Result<T, MetricError> {
    let log_m = check_stack(stack, base)?;
    let layers = stack.layers();
    let mut total = T::zero();
    for (i, layer) in layers.iter().enumerate() {
        total = total + layer_entropy(layer, base)? / log_m;
        if let Some(next) = layers.get(i + 1) {
            total = total + gamma_weight * conditional_layer_entropy(layer, next, base)? / log_m;
        }
    }
    Ok(total / T::count(layers.len()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct LayerDetail<T: Scalar = f64> {
    pub layer: LayerId,
    pub degenerate_count: usize,
    pub total: usize,
    pub normalized_entropy: T,
    /// Absent for the last layer.
    pub normalized_conditional_entropy: Option<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct MldiReport<T: Scalar = f64> {
    pub mldi: T,
    pub mldi_star: T,
    pub per_layer: Vec<LayerDetail<T>>,
    pub identity_fallback: bool,
    pub warnings: Vec<String>,
}

pub fn mldi_report<T: Scalar>(
    stack: &LayerStack<T>,
    delta: T,
    gamma_weight: T,
    base: LogBase,
) -> Result<MldiReport<T>, MetricError> {
    let log_m = check_stack(stack, base)?;
    let layers = stack.layers();
    let mut per_layer = Vec::with_capacity(layers.len());
    let mut identity_fallback = false;
    for (i, layer) in layers.iter().enumerate() {
        let subset = degenerate_subset(layer, delta)?;
        identity_fallback |= subset.identity_fallback;
        let conditional = layers
            .get(i + 1)
            .map(|next| conditional_layer_entropy(layer, next, base).map(|h| h / log_m))
            .transpose()?;
        per_layer.push(LayerDetail {
            layer: layer.id.clone(),
            degenerate_count: subset.members.len(),
            total: layer.elements.len(),
            normalized_entropy: layer_entropy(layer, base)? / log_m,
            normalized_conditional_entropy: conditional,
        });
    }
    let mut warnings = Vec::new();
    if identity_fallback {
        warnings.push(
            "layer elements carry no embeddings: structural diversity taken as distinct element identity"
                .to_owned(),
        );
    }
    Ok(MldiReport {
        mldi: mldi(stack, delta)?,
        mldi_star: mldi_star(stack, gamma_weight, base)?,
        per_layer,
        identity_fallback,
        warnings,
    })
}
