//! Algorithmic Resilience Quotient (ARQ) and its kernel-weighted form ARQ*.

use serde::Serialize;

use crate::error::MetricError;
use crate::kernels::{
    cosine_structural_dissimilarity, gaussian_kernel, vector_distance, DistanceKind,
};
use crate::model::{AlgorithmId, AlgorithmProfile};
use crate::scalar::Scalar;

fn pair_normalizer<T: Scalar>(n: usize) -> Result<T, MetricError> {
    if n < 2 {
        return Err(MetricError::TooFewMembers { n });
    }
    Ok(T::count(n * (n - 1)))
}

fn performance_gap<T: Scalar>(
    a: &AlgorithmProfile<T>,
    b: &AlgorithmProfile<T>,
) -> Result<T, MetricError> {
    Ok(vector_distance(
        &a.performance,
        &b.performance,
        DistanceKind::Euclidean,
    )?)
}

/// Gaussian similarity of two performance vectors.
pub fn performance_kernel<T: Scalar>(
    a: &AlgorithmProfile<T>,
    b: &AlgorithmProfile<T>,
    sigma: T,
) -> Result<T, MetricError> {
    Ok(gaussian_kernel(&a.performance, &b.performance, sigma)?)
}

/// Fraction of ordered pairs that perform alike (`‖ΔP‖₂ ≤ ε`) yet differ
/// structurally (cosine dissimilarity `> δ`).
pub fn arq<T: Scalar>(
    portfolio: &[AlgorithmProfile<T>],
    epsilon: T,
    delta: T,
) -> Result<T, MetricError> {
    arq_with(portfolio, epsilon, delta, DistanceKind::Cosine)
}

/// [`arq`] with a chosen structural distance.
pub fn arq_with<T: Scalar>(
    portfolio: &[AlgorithmProfile<T>],
    epsilon: T,
    delta: T,
    kind: DistanceKind,
) -> Result<T, MetricError> {
    let norm = pair_normalizer::<T>(portfolio.len())?;
    let mut passing = 0usize;
    for (i, a) in portfolio.iter().enumerate() {
        for b in &portfolio[i + 1..] {
            let alike = performance_gap(a, b)? <= epsilon;
            let distinct = vector_distance(&a.structure, &b.structure, kind)? > delta;
            if alike && distinct {
                passing += 2;
            }
        }
    }
    Ok(T::count(passing) / norm)
}

/// Mean over ordered pairs of `K_P(i, j) · D_S(i, j)`.
pub fn arq_star<T: Scalar>(portfolio: &[AlgorithmProfile<T>], sigma: T) -> Result<T, MetricError> {
    let norm = pair_normalizer::<T>(portfolio.len())?;
    let mut total = T::zero();
    for (i, a) in portfolio.iter().enumerate() {
        for b in &portfolio[i + 1..] {
            let k = performance_kernel(a, b, sigma)?;
            let d = cosine_structural_dissimilarity(&a.structure, &b.structure)?;
            total = total + T::lit(2.0) * k * d;
        }
    }
    Ok(total / norm)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct AlgorithmPair<T: Scalar = f64> {
    pub i: AlgorithmId,
    pub j: AlgorithmId,
    pub perf_distance: T,
    pub kernel: T,
    pub structural_dissimilarity: T,
    pub passed_indicator: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ArqReport<T: Scalar = f64> {
    pub arq: T,
    pub arq_star: T,
    pub n: usize,
    /// Unordered pairs `i < j`.
    pub pair_details: Vec<AlgorithmPair<T>>,
}

pub fn arq_report<T: Scalar>(
    portfolio: &[AlgorithmProfile<T>],
    epsilon: T,
    delta: T,
    sigma: T,
    kind: DistanceKind,
) -> Result<ArqReport<T>, MetricError> {
    let arq = arq_with(portfolio, epsilon, delta, kind)?;
    let arq_star = arq_star(portfolio, sigma)?;
    let mut pair_details = Vec::new();
    for (i, a) in portfolio.iter().enumerate() {
        for b in &portfolio[i + 1..] {
            let perf_distance = performance_gap(a, b)?;
            let structural = vector_distance(&a.structure, &b.structure, kind)?;
            pair_details.push(AlgorithmPair {
                i: a.id.clone(),
                j: b.id.clone(),
                perf_distance,
                kernel: performance_kernel(a, b, sigma)?,
                structural_dissimilarity: cosine_structural_dissimilarity(
                    &a.structure,
                    &b.structure,
                )?,
                passed_indicator: perf_distance <= epsilon && structural > delta,
            });
        }
    }
    Ok(ArqReport {
        arq,
        arq_star,
        n: portfolio.len(),
        pair_details,
    })
}
