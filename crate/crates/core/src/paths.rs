//! Simple-path enumeration, QoS filtering and path quality.
//!
//! Enumeration is a depth-first search bounded by a hop cap. Parallel
//! edges between the same pair of nodes yield distinct paths. Results come
//! back in a canonical order: lexicographic by node sequence, then by mode
//! sequence.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::kernels::{Distribution, KernelError};
use crate::model::{Edge, ModeId, Network, NodeId};
use crate::scalar::Scalar;

pub const DEFAULT_MAX_HOPS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("source and destination are both `{0}`")]
    SameEndpoints(NodeId),
    #[error("max_hops must be at least 1")]
    InvalidMaxHops,
    #[error("path enumeration exceeded the limit of {limit} paths")]
    PathLimitExceeded { limit: usize },
    #[error("cannot build a path distribution from zero paths")]
    EmptyPathSet,
    #[error("path qualities must be finite and positive")]
    NonPositiveQuality,
}

/// A simple s→d path with its derived QoS figures and mode usage.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct Path<T: Scalar = f64> {
    nodes: Vec<NodeId>,
    edges: Vec<Edge<T>>,
    total_latency: T,
    min_bandwidth: T,
    hop_count: usize,
    mode_set: BTreeSet<ModeId>,
    /// Share of hops using each mode, over the network's mode universe.
    mode_freq: Distribution<T>,
}

impl<T: Scalar> Path<T> {
    /// Builds a path from consecutive edges starting at `source`.
    ///
    /// `universe` is the ordered mode set `mode_freq` is expressed over; it
    /// must contain every mode on the path.
    pub fn from_edges(
        source: NodeId,
        edges: Vec<Edge<T>>,
        universe: &[ModeId],
    ) -> Result<Self, KernelError> {
        assert!(!edges.is_empty(), "a path needs at least one edge");
        let mut nodes = vec![source];
        for edge in &edges {
            let last = nodes.last().expect("non-empty");
            let next = edge
                .other(last)
                .expect("edge sequence must be contiguous")
                .clone();
            nodes.push(next);
        }
        let total_latency = edges.iter().map(|e| e.latency).sum();
        let min_bandwidth = edges
            .iter()
            .map(|e| e.bandwidth)
            .fold(T::infinity(), T::min);
        let mode_set = edges.iter().map(|e| e.mode.clone()).collect();
        let hop_count = edges.len();
        let mut path = Path {
            nodes,
            edges,
            total_latency,
            min_bandwidth,
            hop_count,
            mode_set,
            mode_freq: Distribution::normalize(&[T::one()])?,
        };
        path.mode_freq = path.mode_vector(universe)?;
        Ok(path)
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    /// Σλ over the path, in ms.
    pub fn total_latency(&self) -> T {
        self.total_latency
    }

    /// min β over the path, in Mbit/s.
    pub fn min_bandwidth(&self) -> T {
        self.min_bandwidth
    }

    pub fn hop_count(&self) -> usize {
        self.hop_count
    }

    pub fn mode_set(&self) -> &BTreeSet<ModeId> {
        &self.mode_set
    }

    pub fn mode_freq(&self) -> &Distribution<T> {
        &self.mode_freq
    }

    pub fn modes(&self) -> impl Iterator<Item = &ModeId> {
        self.edges.iter().map(|e| &e.mode)
    }

    /// Normalized per-mode hop counts over `universe`.
    pub fn mode_vector(&self, universe: &[ModeId]) -> Result<Distribution<T>, KernelError> {
        let mut counts: BTreeMap<&ModeId, usize> = BTreeMap::new();
        for mode in self.modes() {
            *counts.entry(mode).or_default() += 1;
        }
        let hops = T::count(self.hop_count);
        let probs = universe
            .iter()
            .map(|m| T::count(counts.get(m).copied().unwrap_or(0)) / hops)
            .collect();
        Distribution::new(probs)?.with_labels(universe.iter().map(|m| m.to_string()).collect())
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.nodes
            .cmp(&other.nodes)
            .then_with(|| self.modes().cmp(other.modes()))
    }
}

/// `min β / (Σλ + hop count)`.
///
/// Latency in ms is added to a dimensionless hop count, as the score is
/// defined; only the relative values matter downstream.
pub fn path_quality<T: Scalar>(path: &Path<T>) -> T {
    path.min_bandwidth / (path.total_latency + T::count(path.hop_count))
}

/// Quality-proportional distribution over paths.
pub fn path_distribution<T: Scalar>(qualities: &[T]) -> Result<Distribution<T>, PathError> {
    if qualities.is_empty() {
        return Err(PathError::EmptyPathSet);
    }
    if qualities.iter().any(|q| !(q.is_finite() && *q > T::zero())) {
        return Err(PathError::NonPositiveQuality);
    }
    Distribution::normalize(qualities).map_err(|_| PathError::NonPositiveQuality)
}

/// Bounds for one enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathSearch {
    pub max_hops: usize,
    /// Abort with [`PathError::PathLimitExceeded`] past this many paths.
    pub max_paths: Option<usize>,
}

impl Default for PathSearch {
    fn default() -> Self {
        PathSearch {
            max_hops: DEFAULT_MAX_HOPS,
            max_paths: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Enumeration<T: Scalar = f64> {
    pub paths: Vec<Path<T>>,
    /// True when some partial path was cut off by `max_hops` while it could
    /// still have been extended.
    pub hop_cap_reached: bool,
}

struct Dfs<'a, T: Scalar> {
    net: &'a Network<T>,
    adjacency: Vec<Vec<(usize, usize)>>,
    target: usize,
    search: PathSearch,
    on_path: Vec<bool>,
    edge_stack: Vec<usize>,
    found: Vec<Vec<usize>>,
    hop_cap_reached: bool,
}

impl<T: Scalar> Dfs<'_, T> {
    fn visit(&mut self, node: usize) -> Result<(), PathError> {
        if node == self.target {
            if let Some(limit) = self.search.max_paths {
                if self.found.len() >= limit {
                    return Err(PathError::PathLimitExceeded { limit });
                }
            }
            self.found.push(self.edge_stack.clone());
            return Ok(());
        }
        let at_cap = self.edge_stack.len() >= self.search.max_hops;
        for i in 0..self.adjacency[node].len() {
            let (next, edge) = self.adjacency[node][i];
            if self.on_path[next] {
                continue;
            }
            if at_cap {
                self.hop_cap_reached = true;
                return Ok(());
            }
            self.on_path[next] = true;
            self.edge_stack.push(edge);
            let result = self.visit(next);
            self.edge_stack.pop();
            self.on_path[next] = false;
            result?;
        }
        Ok(())
    }
}

/// Enumerates every simple `source → target` path within the search bounds.
pub fn search_paths<T: Scalar>(
    net: &Network<T>,
    source: &NodeId,
    target: &NodeId,
    search: PathSearch,
) -> Result<Enumeration<T>, PathError> {
    let index: BTreeMap<&NodeId, usize> = net
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| (n, i))
        .collect();
    let s = *index
        .get(source)
        .ok_or_else(|| PathError::UnknownNode(source.clone()))?;
    let d = *index
        .get(target)
        .ok_or_else(|| PathError::UnknownNode(target.clone()))?;
    if s == d {
        return Err(PathError::SameEndpoints(source.clone()));
    }
    if search.max_hops == 0 {
        return Err(PathError::InvalidMaxHops);
    }

    let mut adjacency = vec![Vec::new(); net.nodes().len()];
    for (i, edge) in net.edges().iter().enumerate() {
        let (u, v) = (index[&edge.u], index[&edge.v]);
        adjacency[u].push((v, i));
        adjacency[v].push((u, i));
    }

    let mut dfs = Dfs {
        net,
        adjacency,
        target: d,
        search,
        on_path: vec![false; net.nodes().len()],
        edge_stack: Vec::new(),
        found: Vec::new(),
        hop_cap_reached: false,
    };
    dfs.on_path[s] = true;
    dfs.visit(s)?;

    let universe: Vec<ModeId> = net.modes().into_iter().collect();
    let mut paths: Vec<Path<T>> = dfs
        .found
        .iter()
        .map(|edge_ids| {
            let edges = edge_ids
                .iter()
                .map(|&i| dfs.net.edges()[i].clone())
                .collect();
            Path::from_edges(source.clone(), edges, &universe)
                .expect("universe covers every network mode")
        })
        .collect();
    paths.sort_by(Path::canonical_cmp);
    Ok(Enumeration {
        paths,
        hop_cap_reached: dfs.hop_cap_reached,
    })
}

/// All simple paths with at most `max_hops` edges, in canonical order.
pub fn enumerate_simple_paths<T: Scalar>(
    net: &Network<T>,
    source: &NodeId,
    target: &NodeId,
    max_hops: usize,
) -> Result<Vec<Path<T>>, PathError> {
    let search = PathSearch {
        max_hops,
        max_paths: None,
    };
    search_paths(net, source, target, search).map(|e| e.paths)
}

/// Paths passing the latency budget and bandwidth floor, with their
/// qualities and quality-induced distribution.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ValidPathSet<T: Scalar = f64> {
    paths: Vec<Path<T>>,
    qualities: Vec<T>,
    /// `None` when no path is valid.
    distribution: Option<Distribution<T>>,
    unique_mode_combos: BTreeSet<BTreeSet<ModeId>>,
}

impl<T: Scalar> ValidPathSet<T> {
    /// Wraps already-validated paths, computing qualities and distribution.
    pub fn from_paths(paths: Vec<Path<T>>) -> Self {
        let qualities: Vec<T> = paths.iter().map(path_quality).collect();
        let distribution = path_distribution(&qualities).ok();
        let unique_mode_combos = paths.iter().map(|p| p.mode_set.clone()).collect();
        ValidPathSet {
            paths,
            qualities,
            distribution,
            unique_mode_combos,
        }
    }

    pub fn paths(&self) -> &[Path<T>] {
        &self.paths
    }

    pub fn qualities(&self) -> &[T] {
        &self.qualities
    }

    pub fn distribution(&self) -> Option<&Distribution<T>> {
        self.distribution.as_ref()
    }

    /// Distinct mode sets among the valid paths.
    pub fn unique_mode_combos(&self) -> &BTreeSet<BTreeSet<ModeId>> {
        &self.unique_mode_combos
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Sorted union of the modes used by the valid paths.
    pub fn mode_universe(&self) -> Vec<ModeId> {
        self.unique_mode_combos
            .iter()
            .flatten()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }
}

/// Keeps paths with `Σλ ≤ lambda_max` and `min β ≥ beta_min`.
pub fn filter_qos<T: Scalar>(paths: &[Path<T>], lambda_max: T, beta_min: T) -> ValidPathSet<T> {
    let kept = paths
        .iter()
        .filter(|p| p.total_latency <= lambda_max && p.min_bandwidth >= beta_min)
        .cloned()
        .collect();
    ValidPathSet::from_paths(kept)
}
