//! Degeneracy and resilience metrics for multi-modal networks.
//!
//! The crate models a network (nodes joined by mode-labelled links), an
//! inventory of function-capable elements, a portfolio of algorithms and a
//! layered protocol stack, and computes metrics on each:
//!
//! * path metrics: DWPR and DWPR* over QoS-valid simple paths,
//! * substitution metrics: FSS and FSS* over capable elements,
//! * algorithm metrics: ARQ and ARQ* over a portfolio,
//! * layer metrics: MLDI and MLDI* over a layer stack.
//!
//! [`scenario`] re-runs chosen metrics after injected failures.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*F64` and
//! `*F32` aliases below fix the scalar.
//!
//! ```
//! use degenet::{dwpr, filter_qos, enumerate_simple_paths, NetworkF64};
//!
//! let net = NetworkF64::from_json(r#"{
//!     "nodes": [{"id": "s"}, {"id": "d"}],
//!     "edges": [{"u": "s", "v": "d", "mode": "rf", "latency_ms": 1, "bandwidth_mbps": 10}]
//! }"#).unwrap();
//! let paths = enumerate_simple_paths(&net, &"s".into(), &"d".into(), 8).unwrap();
//! let valid = filter_qos(&paths, f64::INFINITY, 0.0);
//! assert_eq!(dwpr(&valid, 0.0), 1.0);
//! ```

#![forbid(unsafe_code)]

pub mod algorithm_metrics;
pub mod error;
pub mod kernels;
pub mod layer_metrics;
pub mod model;
pub mod path_metrics;
pub mod paths;
pub mod scalar;
pub mod scenario;
pub mod substitution_metrics;

pub use algorithm_metrics::{arq, arq_report, arq_star, arq_with, ArqReport};
pub use error::MetricError;
pub use kernels::{
    cosine_structural_dissimilarity, gaussian_kernel, jaccard_dissimilarity, jsd, kl_divergence,
    shannon_entropy, vector_distance, DistanceKind, Distribution, KernelError,
};
pub use layer_metrics::{mldi, mldi_report, mldi_star, MldiReport};
pub use model::{
    parse_document, AlgorithmId, AlgorithmProfile, Document, Edge, EdgeKey, Element, ElementId,
    FunctionId, Inventory, Layer, LayerElement, LayerId, LayerStack, MetricConfig, ModeId,
    ModelError, Network, NodeId, Portfolio,
};
pub use path_metrics::{degeneracy_score, dwpr, dwpr_report, dwpr_star, DwprReport};
pub use paths::{
    enumerate_simple_paths, filter_qos, path_distribution, path_quality, search_paths, Path,
    PathError, PathSearch, ValidPathSet,
};
pub use scalar::{LogBase, Scalar};
pub use scenario::{emit_report, run_scenario, Report, ReportFormat, Scenario, ScenarioError};
pub use substitution_metrics::{fss, fss_report, fss_star, fss_with, FssReport};

pub type NetworkF64 = Network<f64>;
pub type InventoryF64 = Inventory<f64>;
pub type PortfolioF64 = Portfolio<f64>;
pub type LayerStackF64 = LayerStack<f64>;
pub type MetricConfigF64 = MetricConfig<f64>;
pub type PathF64 = Path<f64>;
pub type ValidPathSetF64 = ValidPathSet<f64>;
pub type DistributionF64 = Distribution<f64>;

pub type NetworkF32 = Network<f32>;
pub type InventoryF32 = Inventory<f32>;
pub type PortfolioF32 = Portfolio<f32>;
pub type LayerStackF32 = LayerStack<f32>;
pub type MetricConfigF32 = MetricConfig<f32>;
pub type PathF32 = Path<f32>;
pub type ValidPathSetF32 = ValidPathSet<f32>;
pub type DistributionF32 = Distribution<f32>;
