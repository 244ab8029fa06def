//! Functional Substitution Score (FSS), the weighted substitution matrix
//! and FSS*.
//!
//! Element dissimilarity is the L2 distance between embeddings unless a
//! different [`DistanceKind`] is passed to [`fss_with`]. Scores over fewer
//! than two capable elements are undefined and reported as
//! [`MetricError::TooFewMembers`].

use std::borrow::Borrow;

use serde::Serialize;

use crate::error::MetricError;
use crate::kernels::{vector_distance, DistanceKind};
use crate::model::{Element, ElementId, FunctionId, Inventory};
use crate::scalar::Scalar;

/// Elements able to perform `function`, in input order.
pub fn capable_set<'a, T: Scalar>(
    elements: &'a [Element<T>],
    function: &FunctionId,
) -> Vec<&'a Element<T>> {
    elements
        .iter()
        .filter(|e| e.can_perform(function))
        .collect()
}

fn l2<T: Scalar>(a: &Element<T>, b: &Element<T>) -> Result<T, MetricError> {
    Ok(vector_distance(
        &a.embedding,
        &b.embedding,
        DistanceKind::Euclidean,
    )?)
}

fn pair_normalizer<T: Scalar>(n: usize) -> Result<T, MetricError> {
    if n < 2 {
        return Err(MetricError::TooFewMembers { n });
    }
    Ok(T::count(n * (n - 1)))
}

/// Fraction of ordered pairs whose L2 embedding distance exceeds `delta`.
pub fn fss<T: Scalar, E: Borrow<Element<T>>>(capable: &[E], delta: T) -> Result<T, MetricError> {
    fss_with(capable, delta, DistanceKind::Euclidean)
}

/// [`fss`] with a chosen embedding distance.
pub fn fss_with<T: Scalar, E: Borrow<Element<T>>>(
    capable: &[E],
    delta: T,
    kind: DistanceKind,
) -> Result<T, MetricError> {
    let norm = pair_normalizer::<T>(capable.len())?;
    let mut passing = 0usize;
    for (i, a) in capable.iter().enumerate() {
        // D is symmetric: each unordered pair counts for both orders.
        for b in &capable[i + 1..] {
            let d = vector_distance(&a.borrow().embedding, &b.borrow().embedding, kind)?;
            if d > delta {
                passing += 2;
            }
        }
    }
    Ok(T::count(passing) / norm)
}

/// `W_ij = min(C_i, C_j) / (1 + |L_i − L_j|) · ‖s_i − s_j‖₂`.
pub fn substitution_weight<T: Scalar>(a: &Element<T>, b: &Element<T>) -> Result<T, MetricError> {
    let alignment = a.capacity.min(b.capacity) / (T::one() + (a.load - b.load).abs());
    Ok(alignment * l2(a, b)?)
}

/// Mean of `1[D > δ] · W_ij` over ordered pairs.
pub fn fss_star<T: Scalar, E: Borrow<Element<T>>>(
    capable: &[E],
    delta: T,
) -> Result<T, MetricError> {
    let norm = pair_normalizer::<T>(capable.len())?;
    let mut total = T::zero();
    for (i, a) in capable.iter().enumerate() {
        for b in &capable[i + 1..] {
            let (a, b) = (a.borrow(), b.borrow());
            if l2(a, b)? > delta {
                total = total + T::lit(2.0) * substitution_weight(a, b)?;
            }
        }
    }
    Ok(total / norm)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct SubstitutionPair<T: Scalar = f64> {
    pub i: ElementId,
    pub j: ElementId,
    /// Distance used by the FSS indicator.
    pub distance: T,
    pub weight: T,
    pub passed_delta: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct FssReport<T: Scalar = f64> {
    pub function: FunctionId,
    pub fss: T,
    pub fss_star: T,
    pub n: usize,
    /// Unordered pairs `i < j`; each stands for both orders in the scores.
    pub pair_details: Vec<SubstitutionPair<T>>,
}

/// FSS and FSS* for `function` over `inventory`.
///
/// `kind` selects the distance for the FSS indicator; FSS* always uses L2.
pub fn fss_report<T: Scalar>(
    inventory: &Inventory<T>,
    function: &FunctionId,
    delta: T,
    kind: DistanceKind,
) -> Result<FssReport<T>, MetricError> {
    if !inventory.has_function(function) {
        return Err(MetricError::UnknownFunction(function.clone()));
    }
    let capable = capable_set(inventory.elements(), function);
    let fss = fss_with(&capable, delta, kind)?;
    let fss_star = fss_star(&capable, delta)?;
    let mut pair_details = Vec::new();
    for (i, a) in capable.iter().enumerate() {
        for b in &capable[i + 1..] {
            let distance = vector_distance(&a.embedding, &b.embedding, kind)?;
            pair_details.push(SubstitutionPair {
                i: a.id.clone(),
                j: b.id.clone(),
                distance,
                weight: substitution_weight(a, b)?,
                passed_delta: distance > delta,
            });
        }
    }
    Ok(FssReport {
        function: function.clone(),
        fss,
        fss_star,
        n: capable.len(),
        pair_details,
    })
}
