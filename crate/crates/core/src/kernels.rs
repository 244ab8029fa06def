//! Set dissimilarity, entropy, divergences, vector distances and the
//! Gaussian kernel.
//!
//! Conventions: `0 · log 0 = 0`; the Jaccard dissimilarity of two empty
//! sets is 0; distributions are never renormalized implicitly (use
//! [`Distribution::normalize`]).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{LogBase, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("probabilities must be finite and non-negative (index {index})")]
    NegativeProbability { index: usize },
    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: String },
    #[error("cannot normalize: weights are empty or sum to zero")]
    ZeroMass,
    #[error("support violation at index {index}: p > 0 where m = 0")]
    SupportViolation { index: usize },
    #[error("sigma must be finite and positive")]
    InvalidSigma,
    #[error("{kind} distance is undefined for a zero vector")]
    ZeroVector { kind: DistanceKind },
    #[error("bray-curtis distance needs non-negative entries with a positive total")]
    BrayCurtisDomain,
    #[error("hamming distance needs binary (0/1) entries")]
    NonBinary,
}

/// Discrete probability distribution with optional outcome labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Distribution<T: Scalar = f64> {
    probs: Vec<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl<T: Scalar> Distribution<T> {
    /// Validates non-negativity and that entries sum to 1 within tolerance.
    pub fn new(probs: Vec<T>) -> Result<Self, KernelError> {
        if let Some(index) = probs
            .iter()
            .position(|p| !(p.is_finite() && *p >= T::zero()))
        {
            return Err(KernelError::NegativeProbability { index });
        }
        let sum: T = probs.iter().copied().sum();
        if (sum - T::one()).abs() > T::sum_tolerance() {
            return Err(KernelError::NotNormalized {
                sum: sum.to_string(),
            });
        }
        Ok(Distribution {
            probs,
            labels: None,
        })
    }

    /// Scales non-negative weights to sum to 1.
    pub fn normalize(weights: &[T]) -> Result<Self, KernelError> {
        if let Some(index) = weights
            .iter()
            .position(|w| !(w.is_finite() && *w >= T::zero()))
        {
            return Err(KernelError::NegativeProbability { index });
        }
        let total: T = weights.iter().copied().sum();
        if total.is_nan() || total <= T::zero() {
            return Err(KernelError::ZeroMass);
        }
        Ok(Distribution {
            probs: weights.iter().map(|&w| w / total).collect(),
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, KernelError> {
        if labels.len() != self.probs.len() {
            return Err(KernelError::DimensionMismatch {
                left: self.probs.len(),
                right: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Vector distance selectable wherever a structural dissimilarity is needed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceKind {
    Euclidean,
    Manhattan,
    Chebyshev,
    Cosine,
    Braycurtis,
    Hamming,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 6] = [
        DistanceKind::Euclidean,
        DistanceKind::Manhattan,
        DistanceKind::Chebyshev,
        DistanceKind::Cosine,
        DistanceKind::Braycurtis,
        DistanceKind::Hamming,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DistanceKind::Euclidean => "euclidean",
            DistanceKind::Manhattan => "manhattan",
            DistanceKind::Chebyshev => "chebyshev",
            DistanceKind::Cosine => "cosine",
            DistanceKind::Braycurtis => "braycurtis",
            DistanceKind::Hamming => "hamming",
        }
    }
}

impl std::fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DistanceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DistanceKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown distance kind `{s}`"))
    }
}

fn same_len<T>(x: &[T], y: &[T]) -> Result<(), KernelError> {
    if x.len() == y.len() {
        Ok(())
    } else {
        Err(KernelError::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        })
    }
}

/// `(|a ∪ b| − |a ∩ b|) / |a ∪ b|`, or 0 when both sets are empty.
pub fn jaccard_dissimilarity<K: Ord, T: Scalar>(a: &BTreeSet<K>, b: &BTreeSet<K>) -> T {
    let intersection = a.intersection(b).count();
    let union = a.len() + b.len() - intersection;
    if union == 0 {
        return T::zero();
    }
    T::count(union - intersection) / T::count(union)
}

/// `−Σ p log p`.
pub fn shannon_entropy<T: Scalar>(p: &Distribution<T>, base: LogBase) -> T {
    let h = -p
        .probs
        .iter()
        .filter(|&&x| x > T::zero())
        .map(|&x| x * base.log(x))
        .sum::<T>();
    h.max(T::zero())
}

/// `Σ p log(p/m)`; errors if `p > 0` anywhere `m = 0`.
pub fn kl_divergence<T: Scalar>(
    p: &Distribution<T>,
    m: &Distribution<T>,
    base: LogBase,
) -> Result<T, KernelError> {
    same_len(&p.probs, &m.probs)?;
    let mut total = T::zero();
    for (index, (&pi, &mi)) in p.probs.iter().zip(&m.probs).enumerate() {
        if pi > T::zero() {
            if mi <= T::zero() {
                return Err(KernelError::SupportViolation { index });
            }
            total = total + pi * base.log(pi / mi);
        }
    }
    Ok(total.max(T::zero()))
}

/// Jensen-Shannon divergence `½KL(p‖M) + ½KL(q‖M)`, `M = ½(p+q)`.
///
/// In base 2 the result lies in `[0, 1]`.
pub fn jsd<T: Scalar>(
    p: &Distribution<T>,
    q: &Distribution<T>,
    base: LogBase,
) -> Result<T, KernelError> {
    same_len(&p.probs, &q.probs)?;
    let half = T::lit(0.5);
    // M_i = 0 forces p_i = q_i = 0, so neither half can violate support.
    let term = |x: T, mi: T| {
        if x > T::zero() {
            x * base.log(x / mi)
        } else {
            T::zero()
        }
    };
    let (mut kl_p, mut kl_q) = (T::zero(), T::zero());
    for (&pi, &qi) in p.probs.iter().zip(&q.probs) {
        let mi = (pi + qi) * half;
        kl_p = kl_p + term(pi, mi);
        kl_q = kl_q + term(qi, mi);
    }
    Ok((half * kl_p + half * kl_q).max(T::zero()))
}

fn squared_euclidean<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(&a, &b)| (a - b) * (a - b)).sum()
}

fn squared_norm<T: Scalar>(x: &[T]) -> T {
    x.iter().map(|&a| a * a).sum()
}

/// `exp(−‖x−y‖² / 2σ²)`, in `(0, 1]`.
///
/// Underflow is clamped to the smallest positive normal value so the
/// result never reaches 0.
pub fn gaussian_kernel<T: Scalar>(x: &[T], y: &[T], sigma: T) -> Result<T, KernelError> {
    same_len(x, y)?;
    if !(sigma.is_finite() && sigma > T::zero()) {
        return Err(KernelError::InvalidSigma);
    }
    let k = (-squared_euclidean(x, y) / (T::lit(2.0) * sigma * sigma)).exp();
    Ok(k.max(T::min_positive_value()))
}

/// Distance of the selected kind; preconditions are checked per kind.
pub fn vector_distance<T: Scalar>(x: &[T], y: &[T], kind: DistanceKind) -> Result<T, KernelError> {
    same_len(x, y)?;
    let pairs = || x.iter().zip(y).map(|(&a, &b)| (a, b));
    match kind {
        DistanceKind::Euclidean => Ok(squared_euclidean(x, y).sqrt()),
        DistanceKind::Manhattan => Ok(pairs().map(|(a, b)| (a - b).abs()).sum()),
        DistanceKind::Chebyshev => {
            Ok(pairs().fold(T::zero(), |acc, (a, b)| acc.max((a - b).abs())))
        }
        DistanceKind::Cosine => cosine_structural_dissimilarity(x, y),
        DistanceKind::Braycurtis => {
            if pairs().any(|(a, b)| a < T::zero() || b < T::zero()) {
                return Err(KernelError::BrayCurtisDomain);
            }
            let total: T = pairs().map(|(a, b)| a + b).sum();
            if total.is_nan() || total <= T::zero() {
                return Err(KernelError::BrayCurtisDomain);
            }
            Ok(pairs().map(|(a, b)| (a - b).abs()).sum::<T>() / total)
        }
        DistanceKind::Hamming => {
            let binary = |v: T| v == T::zero() || v == T::one();
            if pairs().any(|(a, b)| !binary(a) || !binary(b)) {
                return Err(KernelError::NonBinary);
            }
            Ok(T::count(pairs().filter(|(a, b)| a != b).count()))
        }
    }
}

/// `1 − ⟨x, y⟩ / (‖x‖‖y‖)`, in `[0, 2]`.
pub fn cosine_structural_dissimilarity<T: Scalar>(x: &[T], y: &[T]) -> Result<T, KernelError> {
    same_len(x, y)?;
    let (nx, ny) = (squared_norm(x), squared_norm(y));
    if nx.is_zero() || ny.is_zero() {
        return Err(KernelError::ZeroVector {
            kind: DistanceKind::Cosine,
        });
    }
    let dot: T = x.iter().zip(y).map(|(&a, &b)| a * b).sum();
    let cos = (dot / (nx * ny).sqrt()).max(-T::one()).min(T::one());
    Ok(T::one() - cos)
}
