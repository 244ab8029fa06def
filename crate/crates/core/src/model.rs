//! Domain types, the JSON document formats, and their validation.
//!
//! Every type here is immutable once constructed. Constructors and the
//! `from_json` parsers validate all invariants and reject invalid input
//! instead of repairing it; every rejection carries a machine-readable
//! reason code (see [`ModelError::code`]).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::kernels::DistanceKind;
use crate::scalar::{LogBase, Scalar};

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(id: &str) -> Self {
                Self(id.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(id: String) -> Self {
                Self(id)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

id_type!(
    /// Identifier of a network node (device, relay, satellite, ...).
    NodeId
);
id_type!(
    /// Opaque communication-mode label such as `radio` or `optical`.
    ModeId
);
id_type!(ElementId);
id_type!(FunctionId);
id_type!(AlgorithmId);
id_type!(LayerId);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("duplicate node id `{0}`")]
    DuplicateNode(NodeId),
    #[error("edge {u}-{v} references unknown node `{missing}`")]
    DanglingEndpoint {
        u: NodeId,
        v: NodeId,
        missing: NodeId,
    },
    #[error("self-loop on node `{0}`")]
    SelfLoop(NodeId),
    #[error("parallel edge {0} repeats an existing mode")]
    DuplicateEdge(EdgeKey),
    #[error("edge {0}: latency must be finite and non-negative")]
    InvalidLatency(EdgeKey),
    #[error("edge {0}: bandwidth must be finite and positive")]
    InvalidBandwidth(EdgeKey),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(FunctionId),
    #[error("{what}: expected dimension {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("{0}")]
    InvalidValue(String),
    #[error("algorithm `{0}` has an all-zero structure vector")]
    ZeroStructure(AlgorithmId),
    #[error("layer `{0}` has no elements")]
    EmptyLayer(LayerId),
    #[error("element `{element}` in layer `{layer}`: function vector entries must be 0 or 1")]
    NonBinaryFunctionVector { layer: LayerId, element: ElementId },
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeKey),
}

impl ModelError {
    /// Stable, machine-readable reason code.
    pub fn code(&self) -> &'static str {
        match self {
            ModelError::Syntax { .. } => "syntax",
            ModelError::Schema(_) => "schema",
            ModelError::DuplicateNode(_) => "duplicate_node",
            ModelError::DanglingEndpoint { .. } => "dangling_endpoint",
            ModelError::SelfLoop(_) => "self_loop",
            ModelError::DuplicateEdge(_) => "duplicate_edge",
            ModelError::InvalidLatency(_) => "invalid_latency",
            ModelError::InvalidBandwidth(_) => "invalid_bandwidth",
            ModelError::DuplicateId(_) => "duplicate_id",
            ModelError::UnknownFunction(_) => "unknown_function",
            ModelError::DimensionMismatch { .. } => "dimension_mismatch",
            ModelError::InvalidValue(_) => "invalid_value",
            ModelError::ZeroStructure(_) => "zero_structure",
            ModelError::EmptyLayer(_) => "empty_layer",
            ModelError::NonBinaryFunctionVector { .. } => "non_binary_function_vector",
            ModelError::UnknownNode(_) => "unknown_node",
            ModelError::UnknownEdge(_) => "unknown_edge",
        }
    }
}

fn json_error(err: serde_json::Error) -> ModelError {
    use serde_json::error::Category;
    match err.classify() {
        Category::Syntax | Category::Eof | Category::Io => ModelError::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        },
        Category::Data => ModelError::Schema(err.to_string()),
    }
}

fn check_unique<'a, I>(ids: I) -> Result<(), ModelError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(ModelError::DuplicateId(id.to_owned()));
        }
    }
    Ok(())
}

fn check_finite<T: Scalar>(what: &str, values: &[T]) -> Result<(), ModelError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(ModelError::InvalidValue(format!(
            "{what}: entries must be finite"
        )))
    }
}

// ---------------------------------------------------------------------------
// Network
// ---------------------------------------------------------------------------

/// Canonical identity of an edge: endpoints in sorted order plus the mode.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "EdgeKeyDoc")]
pub struct EdgeKey {
    pub u: NodeId,
    pub v: NodeId,
    pub mode: ModeId,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeKeyDoc {
    u: NodeId,
    v: NodeId,
    mode: ModeId,
}

impl From<EdgeKeyDoc> for EdgeKey {
    fn from(doc: EdgeKeyDoc) -> Self {
        EdgeKey::new(doc.u, doc.v, doc.mode)
    }
}

impl EdgeKey {
    pub fn new(u: impl Into<NodeId>, v: impl Into<NodeId>, mode: impl Into<ModeId>) -> Self {
        let (u, v) = (u.into(), v.into());
        let (u, v) = if u <= v { (u, v) } else { (v, u) };
        EdgeKey {
            u,
            v,
            mode: mode.into(),
        }
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}({})", self.u, self.v, self.mode)
    }
}

/// Undirected link labelled with `(mode, latency, bandwidth)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct Edge<T: Scalar = f64> {
    pub u: NodeId,
    pub v: NodeId,
    pub mode: ModeId,
    /// Milliseconds.
    #[serde(rename = "latency_ms")]
    pub latency: T,
    /// Mbit/s.
    #[serde(rename = "bandwidth_mbps")]
    pub bandwidth: T,
}

impl<T: Scalar> Edge<T> {
    pub fn new(
        u: impl Into<NodeId>,
        v: impl Into<NodeId>,
        mode: impl Into<ModeId>,
        latency: T,
        bandwidth: T,
    ) -> Result<Self, ModelError> {
        let edge = Edge {
            u: u.into(),
            v: v.into(),
            mode: mode.into(),
            latency,
            bandwidth,
        };
        edge.validate()?;
        Ok(edge)
    }

    pub fn key(&self) -> EdgeKey {
        EdgeKey::new(self.u.clone(), self.v.clone(), self.mode.clone())
    }

    /// The endpoint opposite `node`, if `node` is an endpoint.
    pub fn other(&self, node: &NodeId) -> Option<&NodeId> {
        if &self.u == node {
            Some(&self.v)
        } else if &self.v == node {
            Some(&self.u)
        } else {
            None
        }
    }

    pub fn touches(&self, node: &NodeId) -> bool {
        &self.u == node || &self.v == node
    }

    fn validate(&self) -> Result<(), ModelError> {
        if self.u == self.v {
            return Err(ModelError::SelfLoop(self.u.clone()));
        }
        if !(self.latency.is_finite() && self.latency >= T::zero()) {
            return Err(ModelError::InvalidLatency(self.key()));
        }
        if !(self.bandwidth.is_finite() && self.bandwidth > T::zero()) {
            return Err(ModelError::InvalidBandwidth(self.key()));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: NodeId,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
struct NetworkDoc<T: Scalar> {
    nodes: Vec<NodeDoc>,
    edges: Vec<Edge<T>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
}

/// Labelled undirected multigraph `G = (V, E, μ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "NetworkDoc<T>",
    into = "NetworkDoc<T>",
    bound = "T: Scalar"
)]
pub struct Network<T: Scalar = f64> {
    nodes: Vec<NodeId>,
    edges: Vec<Edge<T>>,
    metadata: BTreeMap<String, String>,
}

impl<T: Scalar> TryFrom<NetworkDoc<T>> for Network<T> {
    type Error = ModelError;

    fn try_from(doc: NetworkDoc<T>) -> Result<Self, Self::Error> {
        Network::new(
            doc.nodes.into_iter().map(|n| n.id).collect(),
            doc.edges,
            doc.metadata,
        )
    }
}

impl<T: Scalar> From<Network<T>> for NetworkDoc<T> {
    fn from(net: Network<T>) -> Self {
        NetworkDoc {
            nodes: net.nodes.into_iter().map(|id| NodeDoc { id }).collect(),
            edges: net.edges,
            metadata: net.metadata,
        }
    }
}

impl<T: Scalar> Network<T> {
    pub fn new(
        nodes: Vec<NodeId>,
        edges: Vec<Edge<T>>,
        metadata: BTreeMap<String, String>,
    ) -> Result<Self, ModelError> {
        let mut node_set = BTreeSet::new();
        for node in &nodes {
            if !node_set.insert(node) {
                return Err(ModelError::DuplicateNode(node.clone()));
            }
        }
        let mut keys = BTreeSet::new();
        for edge in &edges {
            for endpoint in [&edge.u, &edge.v] {
                if !node_set.contains(endpoint) {
                    return Err(ModelError::DanglingEndpoint {
                        u: edge.u.clone(),
                        v: edge.v.clone(),
                        missing: endpoint.clone(),
                    });
                }
            }
            edge.validate()?;
            if !keys.insert(edge.key()) {
                return Err(ModelError::DuplicateEdge(edge.key()));
            }
        }
        Ok(Network {
            nodes,
            edges,
            metadata,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: NetworkDoc<T> = serde_json::from_str(text).map_err(json_error)?;
        doc.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn contains_node(&self, node: &NodeId) -> bool {
        self.nodes.contains(node)
    }

    pub fn contains_edge(&self, key: &EdgeKey) -> bool {
        self.edges.iter().any(|e| &e.key() == key)
    }

    /// Sorted set of every mode label used by some edge.
    pub fn modes(&self) -> BTreeSet<ModeId> {
        self.edges.iter().map(|e| e.mode.clone()).collect()
    }

    /// Copy of the network with the given nodes (and their incident edges)
    /// and edges removed.
    pub fn remove_failures(
        &self,
        failed_nodes: &BTreeSet<NodeId>,
        failed_edges: &BTreeSet<EdgeKey>,
    ) -> Result<Self, ModelError> {
        if let Some(node) = failed_nodes.iter().find(|n| !self.contains_node(n)) {
            return Err(ModelError::UnknownNode(node.clone()));
        }
        if let Some(key) = failed_edges.iter().find(|k| !self.contains_edge(k)) {
            return Err(ModelError::UnknownEdge(key.clone()));
        }
        let nodes = self
            .nodes
            .iter()
            .filter(|n| !failed_nodes.contains(*n))
            .cloned()
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| {
                !failed_nodes.contains(&e.u)
                    && !failed_nodes.contains(&e.v)
                    && !failed_edges.contains(&e.key())
            })
            .cloned()
            .collect();
        Ok(Network {
            nodes,
            edges,
            metadata: self.metadata.clone(),
        })
    }
}

/// Free-function form of [`Network::remove_failures`].
pub fn remove_failures<T: Scalar>(
    net: &Network<T>,
    failed_nodes: &BTreeSet<NodeId>,
    failed_edges: &BTreeSet<EdgeKey>,
) -> Result<Network<T>, ModelError> {
    net.remove_failures(failed_nodes, failed_edges)
}

// ---------------------------------------------------------------------------
// Element inventory
// ---------------------------------------------------------------------------

/// A functional component: capability row of φ, structural embedding,
/// capacity and current load.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct Element<T: Scalar = f64> {
    pub id: ElementId,
    pub capabilities: BTreeSet<FunctionId>,
    pub embedding: Vec<T>,
    pub capacity: T,
    pub load: T,
}

impl<T: Scalar> Element<T> {
    pub fn new(
        id: impl Into<ElementId>,
        capabilities: impl IntoIterator<Item = FunctionId>,
        embedding: Vec<T>,
        capacity: T,
        load: T,
    ) -> Result<Self, ModelError> {
        let element = Element {
            id: id.into(),
            capabilities: capabilities.into_iter().collect(),
            embedding,
            capacity,
            load,
        };
        element.validate()?;
        Ok(element)
    }

    pub fn can_perform(&self, function: &FunctionId) -> bool {
        self.capabilities.contains(function)
    }

    fn validate(&self) -> Result<(), ModelError> {
        check_finite(&format!("element `{}` embedding", self.id), &self.embedding)?;
        for (name, value) in [("capacity", self.capacity), ("load", self.load)] {
            if !(value.is_finite() && value >= T::zero()) {
                return Err(ModelError::InvalidValue(format!(
                    "element `{}`: {name} must be finite and non-negative",
                    self.id
                )));
            }
        }
        Ok(())
    }
}

/// φ(e, f): 1 when `element` can perform `function`, else 0.
pub fn capability<T: Scalar>(element: &Element<T>, function: &FunctionId) -> u8 {
    u8::from(element.can_perform(function))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
struct InventoryDoc<T: Scalar> {
    functions: Vec<FunctionId>,
    elements: Vec<Element<T>>,
}

/// Set of elements sharing one function universe and embedding dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "InventoryDoc<T>",
    into = "InventoryDoc<T>",
    bound = "T: Scalar"
)]
pub struct Inventory<T: Scalar = f64> {
    functions: Vec<FunctionId>,
    elements: Vec<Element<T>>,
}

impl<T: Scalar> TryFrom<InventoryDoc<T>> for Inventory<T> {
    type Error = ModelError;

    fn try_from(doc: InventoryDoc<T>) -> Result<Self, Self::Error> {
        Inventory::new(doc.functions, doc.elements)
    }
}

impl<T: Scalar> From<Inventory<T>> for InventoryDoc<T> {
    fn from(inv: Inventory<T>) -> Self {
        InventoryDoc {
            functions: inv.functions,
            elements: inv.elements,
        }
    }
}

impl<T: Scalar> Inventory<T> {
    pub fn new(functions: Vec<FunctionId>, elements: Vec<Element<T>>) -> Result<Self, ModelError> {
        check_unique(functions.iter().map(|f| f.as_str()))?;
        check_unique(elements.iter().map(|e| e.id.as_str()))?;
        let dim = elements.first().map(|e| e.embedding.len());
        for element in &elements {
            element.validate()?;
            if let Some(unknown) = element.capabilities.iter().find(|f| !functions.contains(f)) {
                return Err(ModelError::UnknownFunction(unknown.clone()));
            }
            if let Some(expected) = dim {
                if element.embedding.len() != expected {
                    return Err(ModelError::DimensionMismatch {
                        what: format!("element `{}` embedding", element.id),
                        expected,
                        found: element.embedding.len(),
                    });
                }
            }
        }
        Ok(Inventory {
            functions,
            elements,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: InventoryDoc<T> = serde_json::from_str(text).map_err(json_error)?;
        doc.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("inventory serializes")
    }

    pub fn functions(&self) -> &[FunctionId] {
        &self.functions
    }

    pub fn elements(&self) -> &[Element<T>] {
        &self.elements
    }

    pub fn has_function(&self, function: &FunctionId) -> bool {
        self.functions.contains(function)
    }

    pub fn contains_element(&self, id: &ElementId) -> bool {
        self.elements.iter().any(|e| &e.id == id)
    }

    /// Copy without the listed elements. Ids not present are ignored.
    pub fn without(&self, failed: &BTreeSet<ElementId>) -> Self {
        Inventory {
            functions: self.functions.clone(),
            elements: self
                .elements
                .iter()
                .filter(|e| !failed.contains(&e.id))
                .cloned()
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Algorithm portfolio
// ---------------------------------------------------------------------------

/// Performance vector P(A) and structural feature vector S(A) of one algorithm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct AlgorithmProfile<T: Scalar = f64> {
    pub id: AlgorithmId,
    pub performance: Vec<T>,
    pub structure: Vec<T>,
}

impl<T: Scalar> AlgorithmProfile<T> {
    pub fn new(
        id: impl Into<AlgorithmId>,
        performance: Vec<T>,
        structure: Vec<T>,
    ) -> Result<Self, ModelError> {
        let profile = AlgorithmProfile {
            id: id.into(),
            performance,
            structure,
        };
        profile.validate()?;
        Ok(profile)
    }

    fn validate(&self) -> Result<(), ModelError> {
        check_finite(
            &format!("algorithm `{}` performance", self.id),
            &self.performance,
        )?;
        check_finite(
            &format!("algorithm `{}` structure", self.id),
            &self.structure,
        )?;
        if self.structure.iter().all(|x| x.is_zero()) {
            return Err(ModelError::ZeroStructure(self.id.clone()));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
struct PortfolioDoc<T: Scalar> {
    algorithms: Vec<AlgorithmProfile<T>>,
}

/// Candidate algorithms for one task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "PortfolioDoc<T>",
    into = "PortfolioDoc<T>",
    bound = "T: Scalar"
)]
pub struct Portfolio<T: Scalar = f64> {
    algorithms: Vec<AlgorithmProfile<T>>,
}

impl<T: Scalar> TryFrom<PortfolioDoc<T>> for Portfolio<T> {
    type Error = ModelError;

    fn try_from(doc: PortfolioDoc<T>) -> Result<Self, Self::Error> {
        Portfolio::new(doc.algorithms)
    }
}

impl<T: Scalar> From<Portfolio<T>> for PortfolioDoc<T> {
    fn from(p: Portfolio<T>) -> Self {
        PortfolioDoc {
            algorithms: p.algorithms,
        }
    }
}

impl<T: Scalar> Portfolio<T> {
    pub fn new(algorithms: Vec<AlgorithmProfile<T>>) -> Result<Self, ModelError> {
        check_unique(algorithms.iter().map(|a| a.id.as_str()))?;
        if let Some(first) = algorithms.first() {
            let (pd, sd) = (first.performance.len(), first.structure.len());
            for a in &algorithms {
                a.validate()?;
                for (what, expected, found) in [
                    ("performance", pd, a.performance.len()),
                    ("structure", sd, a.structure.len()),
                ] {
                    if found != expected {
                        return Err(ModelError::DimensionMismatch {
                            what: format!("algorithm `{}` {what}", a.id),
                            expected,
                            found,
                        });
                    }
                }
            }
        }
        Ok(Portfolio { algorithms })
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: PortfolioDoc<T> = serde_json::from_str(text).map_err(json_error)?;
        doc.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("portfolio serializes")
    }

    pub fn algorithms(&self) -> &[AlgorithmProfile<T>] {
        &self.algorithms
    }

    pub fn contains(&self, id: &AlgorithmId) -> bool {
        self.algorithms.iter().any(|a| &a.id == id)
    }

    /// Copy without the listed algorithms. Ids not present are ignored.
    pub fn without(&self, failed: &BTreeSet<AlgorithmId>) -> Self {
        Portfolio {
            algorithms: self
                .algorithms
                .iter()
                .filter(|a| !failed.contains(&a.id))
                .cloned()
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Layer stack
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
struct LayerElementDoc<T: Scalar> {
    id: ElementId,
    f: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    embedding: Option<Vec<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
struct LayerDoc<T: Scalar> {
    id: LayerId,
    elements: Vec<LayerElementDoc<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
struct LayerStackDoc<T: Scalar> {
    functions: Vec<FunctionId>,
    layers: Vec<LayerDoc<T>>,
}

/// One entity of a protocol layer with its binary function vector.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerElement<T: Scalar = f64> {
    pub id: ElementId,
    pub functions: Vec<bool>,
    /// Optional structural embedding; present for all elements of a stack or none.
    pub embedding: Option<Vec<T>>,
}

impl<T: Scalar> LayerElement<T> {
    pub fn performs_any(&self) -> bool {
        self.functions.iter().any(|&b| b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layer<T: Scalar = f64> {
    pub id: LayerId,
    pub elements: Vec<LayerElement<T>>,
}

impl<T: Scalar> Layer<T> {
    /// Number of functions `m` the element vectors range over.
    pub fn function_count(&self) -> usize {
        self.elements.first().map_or(0, |e| e.functions.len())
    }

    pub fn has_embeddings(&self) -> bool {
        self.elements.iter().all(|e| e.embedding.is_some())
    }
}

/// Ordered protocol layers sharing one function universe of size `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "LayerStackDoc<T>",
    into = "LayerStackDoc<T>",
    bound = "T: Scalar"
)]
pub struct LayerStack<T: Scalar = f64> {
    functions: Vec<FunctionId>,
    layers: Vec<Layer<T>>,
}

impl<T: Scalar> TryFrom<LayerStackDoc<T>> for LayerStack<T> {
    type Error = ModelError;

    fn try_from(doc: LayerStackDoc<T>) -> Result<Self, Self::Error> {
        let mut layers = Vec::with_capacity(doc.layers.len());
        for layer in doc.layers {
            let mut elements = Vec::with_capacity(layer.elements.len());
            for e in layer.elements {
                if e.f.iter().any(|&b| b > 1) {
                    return Err(ModelError::NonBinaryFunctionVector {
                        layer: layer.id.clone(),
                        element: e.id,
                    });
                }
                elements.push(LayerElement {
                    id: e.id,
                    functions: e.f.iter().map(|&b| b == 1).collect(),
                    embedding: e.embedding,
                });
            }
            layers.push(Layer {
                id: layer.id,
                elements,
            });
        }
        LayerStack::new(doc.functions, layers)
    }
}

impl<T: Scalar> From<LayerStack<T>> for LayerStackDoc<T> {
    fn from(stack: LayerStack<T>) -> Self {
        LayerStackDoc {
            functions: stack.functions,
            layers: stack
                .layers
                .into_iter()
                .map(|l| LayerDoc {
                    id: l.id,
                    elements: l
                        .elements
                        .into_iter()
                        .map(|e| LayerElementDoc {
                            id: e.id,
                            f: e.functions.iter().map(|&b| u8::from(b)).collect(),
                            embedding: e.embedding,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl<T: Scalar> LayerStack<T> {
    pub fn new(functions: Vec<FunctionId>, layers: Vec<Layer<T>>) -> Result<Self, ModelError> {
        check_unique(functions.iter().map(|f| f.as_str()))?;
        check_unique(layers.iter().map(|l| l.id.as_str()))?;
        let m = functions.len();
        let mut embedding_dim: Option<Option<usize>> = None;
        for layer in &layers {
            if layer.elements.is_empty() {
                return Err(ModelError::EmptyLayer(layer.id.clone()));
            }
            check_unique(layer.elements.iter().map(|e| e.id.as_str()))?;
            for e in &layer.elements {
                if e.functions.len() != m {
                    return Err(ModelError::DimensionMismatch {
                        what: format!("element `{}` in layer `{}` function vector", e.id, layer.id),
                        expected: m,
                        found: e.functions.len(),
                    });
                }
                let dim = e.embedding.as_ref().map(Vec::len);
                if let Some(emb) = &e.embedding {
                    check_finite(&format!("element `{}` embedding", e.id), emb)?;
                }
                match embedding_dim {
                    None => embedding_dim = Some(dim),
                    Some(expected) if expected != dim => {
                        return Err(ModelError::DimensionMismatch {
                            what: format!(
                                "element `{}` in layer `{}` embedding (embeddings must be given for all elements or none)",
                                e.id, layer.id
                            ),
                            expected: expected.unwrap_or(0),
                            found: dim.unwrap_or(0),
                        });
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(LayerStack { functions, layers })
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: LayerStackDoc<T> = serde_json::from_str(text).map_err(json_error)?;
        doc.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layer stack serializes")
    }

    pub fn functions(&self) -> &[FunctionId] {
        &self.functions
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    pub fn contains_element(&self, id: &ElementId) -> bool {
        self.layers
            .iter()
            .any(|l| l.elements.iter().any(|e| &e.id == id))
    }

    /// Copy without the listed elements. Layers left empty are dropped.
    pub fn without(&self, failed: &BTreeSet<ElementId>) -> Self {
        let layers = self
            .layers
            .iter()
            .map(|l| Layer {
                id: l.id.clone(),
                elements: l
                    .elements
                    .iter()
                    .filter(|e| !failed.contains(&e.id))
                    .cloned()
                    .collect(),
            })
            .filter(|l| !l.elements.is_empty())
            .collect();
        LayerStack {
            functions: self.functions.clone(),
            layers,
        }
    }
}

// ---------------------------------------------------------------------------
// Documents
// ---------------------------------------------------------------------------

/// Any of the four supported input documents.
#[derive(Clone, Debug, PartialEq)]
pub enum Document<T: Scalar = f64> {
    Network(Network<T>),
    Inventory(Inventory<T>),
    Portfolio(Portfolio<T>),
    LayerStack(LayerStack<T>),
}

impl<T: Scalar> Document<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Network(_) => "network",
            Document::Inventory(_) => "inventory",
            Document::Portfolio(_) => "portfolio",
            Document::LayerStack(_) => "layer-stack",
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            Document::Network(d) => d.to_json(),
            Document::Inventory(d) => d.to_json(),
            Document::Portfolio(d) => d.to_json(),
            Document::LayerStack(d) => d.to_json(),
        }
    }
}

/// Parses any document, recognising its kind from the top-level keys.
pub fn parse_document<T: Scalar>(text: &str) -> Result<Document<T>, ModelError> {
    let value: Value = serde_json::from_str(text).map_err(json_error)?;
    let Value::Object(map) = &value else {
        return Err(ModelError::Schema(
            "top-level value must be an object".into(),
        ));
    };
    let schema = |e: serde_json::Error| ModelError::Schema(e.to_string());
    if map.contains_key("nodes") || map.contains_key("edges") {
        let doc: NetworkDoc<T> = serde_json::from_value(value).map_err(schema)?;
        Ok(Document::Network(doc.try_into()?))
    } else if map.contains_key("algorithms") {
        let doc: PortfolioDoc<T> = serde_json::from_value(value).map_err(schema)?;
        Ok(Document::Portfolio(doc.try_into()?))
    } else if map.contains_key("layers") {
        let doc: LayerStackDoc<T> = serde_json::from_value(value).map_err(schema)?;
        Ok(Document::LayerStack(doc.try_into()?))
    } else if map.contains_key("elements") {
        let doc: InventoryDoc<T> = serde_json::from_value(value).map_err(schema)?;
        Ok(Document::Inventory(doc.try_into()?))
    } else {
        Err(ModelError::Schema(
            "unrecognised document: expected a network, inventory, portfolio or layer stack".into(),
        ))
    }
}

// ---------------------------------------------------------------------------
// Metric configuration
// ---------------------------------------------------------------------------

/// Thresholds and parameters shared by all metrics.
///
/// Ranges are enforced by [`MetricConfigBuilder::build`] and on deserialization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "MetricConfigDoc<T>",
    into = "MetricConfigDoc<T>",
    bound = "T: Scalar"
)]
pub struct MetricConfig<T: Scalar = f64> {
    delta: T,
    epsilon: T,
    theta: T,
    lambda_max: T,
    beta_min: T,
    sigma: T,
    gamma_weight: T,
    log_base: LogBase,
    max_hops: usize,
    element_distance: DistanceKind,
    algorithm_distance: DistanceKind,
}

impl<T: Scalar> Default for MetricConfig<T> {
    fn default() -> Self {
        MetricConfig {
            delta: T::zero(),
            epsilon: T::zero(),
            theta: T::zero(),
            lambda_max: T::infinity(),
            beta_min: T::zero(),
            sigma: T::one(),
            gamma_weight: T::lit(0.5),
            log_base: LogBase::Two,
            max_hops: 8,
            element_distance: DistanceKind::Euclidean,
            algorithm_distance: DistanceKind::Cosine,
        }
    }
}

impl<T: Scalar> MetricConfig<T> {
    pub fn builder() -> MetricConfigBuilder<T> {
        MetricConfigBuilder(MetricConfig::default())
    }

    /// Builder seeded with this configuration.
    pub fn to_builder(&self) -> MetricConfigBuilder<T> {
        MetricConfigBuilder(self.clone())
    }

    /// Structural threshold δ.
    pub fn delta(&self) -> T {
        self.delta
    }
    /// Functional-similarity threshold ε.
    pub fn epsilon(&self) -> T {
        self.epsilon
    }
    /// Path-quality threshold θ.
    pub fn theta(&self) -> T {
        self.theta
    }
    /// Latency budget Λ (ms); may be infinite.
    pub fn lambda_max(&self) -> T {
        self.lambda_max
    }
    /// Minimum bandwidth β (Mbit/s).
    pub fn beta_min(&self) -> T {
        self.beta_min
    }
    /// Gaussian kernel width σ.
    pub fn sigma(&self) -> T {
        self.sigma
    }
    /// Cross-layer weight γ in MLDI*.
    pub fn gamma_weight(&self) -> T {
        self.gamma_weight
    }
    pub fn log_base(&self) -> LogBase {
        self.log_base
    }
    pub fn max_hops(&self) -> usize {
        self.max_hops
    }
    /// Distance on element embeddings used by the degeneracy score and FSS.
    pub fn element_distance(&self) -> DistanceKind {
        self.element_distance
    }
    /// Structural distance used by ARQ's indicator.
    pub fn algorithm_distance(&self) -> DistanceKind {
        self.algorithm_distance
    }

    /// Same configuration in another scalar type.
    pub fn cast<U: Scalar>(&self) -> MetricConfig<U> {
        let c = |x: T| U::lit(x.to_f64_lossy());
        MetricConfig {
            delta: c(self.delta),
            epsilon: c(self.epsilon),
            theta: c(self.theta),
            lambda_max: c(self.lambda_max),
            beta_min: c(self.beta_min),
            sigma: c(self.sigma),
            gamma_weight: c(self.gamma_weight),
            log_base: self.log_base,
            max_hops: self.max_hops,
            element_distance: self.element_distance,
            algorithm_distance: self.algorithm_distance,
        }
    }

    fn validate(self) -> Result<Self, ModelError> {
        let bad = |msg: &str| Err(ModelError::InvalidValue(msg.to_owned()));
        let non_negative = |x: T| x.is_finite() && x >= T::zero();
        if !non_negative(self.delta) {
            return bad("delta must be finite and >= 0");
        }
        if !non_negative(self.epsilon) {
            return bad("epsilon must be finite and >= 0");
        }
        if self.theta.is_nan() {
            return bad("theta must be a number");
        }
        if self.lambda_max.is_nan() || self.lambda_max < T::zero() {
            return bad("lambda_max must be >= 0");
        }
        if !non_negative(self.beta_min) {
            return bad("beta_min must be finite and >= 0");
        }
        if !(self.sigma.is_finite() && self.sigma > T::zero()) {
            return bad("sigma must be finite and > 0");
        }
        if !(self.gamma_weight >= T::zero() && self.gamma_weight <= T::one()) {
            return bad("gamma_weight must lie in [0, 1]");
        }
        if self.max_hops == 0 {
            return bad("max_hops must be >= 1");
        }
        Ok(self)
    }
}

#[derive(Clone, Debug)]
pub struct MetricConfigBuilder<T: Scalar>(MetricConfig<T>);

impl<T: Scalar> MetricConfigBuilder<T> {
    pub fn delta(mut self, v: T) -> Self {
        self.0.delta = v;
        self
    }
    pub fn epsilon(mut self, v: T) -> Self {
        self.0.epsilon = v;
        self
    }
    pub fn theta(mut self, v: T) -> Self {
        self.0.theta = v;
        self
    }
    pub fn lambda_max(mut self, v: T) -> Self {
        self.0.lambda_max = v;
        self
    }
    pub fn beta_min(mut self, v: T) -> Self {
        self.0.beta_min = v;
        self
    }
    pub fn sigma(mut self, v: T) -> Self {
        self.0.sigma = v;
        self
    }
    pub fn gamma_weight(mut self, v: T) -> Self {
        self.0.gamma_weight = v;
        self
    }
    pub fn log_base(mut self, v: LogBase) -> Self {
        self.0.log_base = v;
        self
    }
    pub fn max_hops(mut self, v: usize) -> Self {
        self.0.max_hops = v;
        self
    }
    pub fn element_distance(mut self, v: DistanceKind) -> Self {
        self.0.element_distance = v;
        self
    }
    pub fn algorithm_distance(mut self, v: DistanceKind) -> Self {
        self.0.algorithm_distance = v;
        self
    }
    pub fn build(self) -> Result<MetricConfig<T>, ModelError> {
        self.0.validate()
    }
}

/// Number that may also be written as `"inf"` / `"-inf"` in JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged, bound = "T: Scalar")]
enum ExtendedReal<T: Scalar> {
    Finite(T),
    Text(String),
}

impl<T: Scalar> ExtendedReal<T> {
    fn from_value(v: T) -> Self {
        if v == T::infinity() {
            ExtendedReal::Text("inf".into())
        } else if v == T::neg_infinity() {
            ExtendedReal::Text("-inf".into())
        } else {
            ExtendedReal::Finite(v)
        }
    }

    fn value(self) -> Result<T, ModelError> {
        match self {
            ExtendedReal::Finite(v) => Ok(v),
            ExtendedReal::Text(s) => match s.as_str() {
                "inf" | "+inf" | "infinity" => Ok(T::infinity()),
                "-inf" | "-infinity" => Ok(T::neg_infinity()),
                other => Err(ModelError::Schema(format!(
                    "expected a number, `inf` or `-inf`, found `{other}`"
                ))),
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
struct MetricConfigDoc<T: Scalar> {
    #[serde(default)]
    delta: Option<T>,
    #[serde(default)]
    epsilon: Option<T>,
    #[serde(default)]
    theta: Option<ExtendedReal<T>>,
    #[serde(default)]
    lambda_max: Option<ExtendedReal<T>>,
    #[serde(default)]
    beta_min: Option<T>,
    #[serde(default)]
    sigma: Option<T>,
    #[serde(default)]
    gamma_weight: Option<T>,
    #[serde(default)]
    log_base: Option<LogBase>,
    #[serde(default)]
    max_hops: Option<usize>,
    #[serde(default)]
    element_distance: Option<DistanceKind>,
    #[serde(default)]
    algorithm_distance: Option<DistanceKind>,
}

impl<T: Scalar> TryFrom<MetricConfigDoc<T>> for MetricConfig<T> {
    type Error = ModelError;

    fn try_from(doc: MetricConfigDoc<T>) -> Result<Self, Self::Error> {
        let d = MetricConfig::<T>::default();
        MetricConfig {
            delta: doc.delta.unwrap_or(d.delta),
            epsilon: doc.epsilon.unwrap_or(d.epsilon),
            theta: doc
                .theta
                .map(ExtendedReal::value)
                .transpose()?
                .unwrap_or(d.theta),
            lambda_max: doc
                .lambda_max
                .map(ExtendedReal::value)
                .transpose()?
                .unwrap_or(d.lambda_max),
            beta_min: doc.beta_min.unwrap_or(d.beta_min),
            sigma: doc.sigma.unwrap_or(d.sigma),
            gamma_weight: doc.gamma_weight.unwrap_or(d.gamma_weight),
            log_base: doc.log_base.unwrap_or(d.log_base),
            max_hops: doc.max_hops.unwrap_or(d.max_hops),
            element_distance: doc.element_distance.unwrap_or(d.element_distance),
            algorithm_distance: doc.algorithm_distance.unwrap_or(d.algorithm_distance),
        }
        .validate()
    }
}

impl<T: Scalar> From<MetricConfig<T>> for MetricConfigDoc<T> {
    fn from(c: MetricConfig<T>) -> Self {
        MetricConfigDoc {
            delta: Some(c.delta),
            epsilon: Some(c.epsilon),
            theta: Some(ExtendedReal::from_value(c.theta)),
            lambda_max: Some(ExtendedReal::from_value(c.lambda_max)),
            beta_min: Some(c.beta_min),
            sigma: Some(c.sigma),
            gamma_weight: Some(c.gamma_weight),
            log_base: Some(c.log_base),
            max_hops: Some(c.max_hops),
            element_distance: Some(c.element_distance),
            algorithm_distance: Some(c.algorithm_distance),
        }
    }
}
