//! Failure-injection scenarios and their reports.
//!
//! A scenario names the input documents, the metrics to compute and a list
//! of failure steps. Metrics are computed on the intact system (step 0) and
//! again after each step. In cumulative mode step `k` removes everything
//! named in steps `1..=k`; in independent mode it removes only step `k`.
//!
//! Report values are rounded to 12 significant digits and held in ordered
//! maps, so identical inputs always produce byte-identical JSON.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path as FsPath, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithm_metrics::{arq_star, arq_with};
use crate::error::MetricError;
use crate::layer_metrics::{degenerate_subset, mldi, mldi_star};
use crate::model::{
    AlgorithmId, EdgeKey, ElementId, FunctionId, Inventory, LayerStack, MetricConfig, ModelError,
    Network, NodeId, Portfolio,
};
use crate::path_metrics::{degeneracy_score, dwpr, dwpr_star};
use crate::paths::{filter_qos, search_paths, PathError, PathSearch};
use crate::scalar::Scalar;
use crate::substitution_metrics::{capable_set, fss_star, fss_with};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Document {
        path: PathBuf,
        #[source]
        source: ModelError,
    },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("metric `{metric}` needs a {input} document")]
    MissingInput {
        metric: MetricKind,
        input: &'static str,
    },
    #[error("failure target {0} does not exist in the inputs")]
    UnresolvableTarget(String),
    #[error("{context}: {source}")]
    PathLimit {
        context: String,
        #[source]
        source: PathError,
    },
}

impl ScenarioError {
    /// 1 for input errors, 2 when a computation could not be carried out.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::PathLimit { .. } => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Dwpr,
    DwprStar,
    Fss,
    FssStar,
    Arq,
    ArqStar,
    Mldi,
    MldiStar,
    DegeneracyScore,
}

impl MetricKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Dwpr => "dwpr",
            MetricKind::DwprStar => "dwpr_star",
            MetricKind::Fss => "fss",
            MetricKind::FssStar => "fss_star",
            MetricKind::Arq => "arq",
            MetricKind::ArqStar => "arq_star",
            MetricKind::Mldi => "mldi",
            MetricKind::MldiStar => "mldi_star",
            MetricKind::DegeneracyScore => "degeneracy_score",
        }
    }

    fn is_path_metric(self) -> bool {
        matches!(self, MetricKind::Dwpr | MetricKind::DwprStar)
    }

    fn required_input(self) -> &'static str {
        match self {
            MetricKind::Dwpr | MetricKind::DwprStar => "network",
            MetricKind::Fss | MetricKind::FssStar | MetricKind::DegeneracyScore => "inventory",
            MetricKind::Arq | MetricKind::ArqStar => "portfolio",
            MetricKind::Mldi | MetricKind::MldiStar => "layers",
        }
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureMode {
    #[default]
    Cumulative,
    Independent,
}

/// Components removed by one step. `elements` names inventory elements,
/// algorithms or layer elements.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureStep {
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub nodes: BTreeSet<NodeId>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub edges: BTreeSet<EdgeKey>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub elements: BTreeSet<String>,
}

impl FailureStep {
    fn extend(&mut self, other: &FailureStep) {
        self.nodes.extend(other.nodes.iter().cloned());
        self.edges.extend(other.edges.iter().cloned());
        self.elements.extend(other.elements.iter().cloned());
    }
}

/// Input document locations, relative to the scenario file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPaths {
    #[serde(default)]
    pub network: Option<PathBuf>,
    #[serde(default)]
    pub inventory: Option<PathBuf>,
    #[serde(default)]
    pub portfolio: Option<PathBuf>,
    #[serde(default)]
    pub layers: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Scalar")]
pub struct Scenario<T: Scalar = f64> {
    pub name: String,
    #[serde(default)]
    pub inputs: InputPaths,
    pub metrics: Vec<MetricKind>,
    #[serde(default)]
    pub config: MetricConfig<T>,
    /// `(source, destination)` pairs for the path metrics.
    #[serde(default)]
    pub endpoints: Vec<(NodeId, NodeId)>,
    /// Function evaluated by FSS and the degeneracy score.
    #[serde(default)]
    pub function: Option<FunctionId>,
    #[serde(default)]
    pub failures: Vec<FailureStep>,
    #[serde(default)]
    pub mode: FailureMode,
}

impl<T: Scalar> Scenario<T> {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let scenario: Scenario<T> = serde_json::from_str(text)
            .map_err(|e| ScenarioError::InvalidScenario(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        if self.metrics.is_empty() {
            return Err(ScenarioError::InvalidScenario("no metric requested".into()));
        }
        if self.metrics.iter().any(|m| m.is_path_metric()) && self.endpoints.is_empty() {
            return Err(ScenarioError::InvalidScenario(
                "path metrics need at least one (source, destination) pair in `endpoints`".into(),
            ));
        }
        let needs_function = self.metrics.iter().any(|m| {
            matches!(
                m,
                MetricKind::Fss | MetricKind::FssStar | MetricKind::DegeneracyScore
            )
        });
        if needs_function && self.function.is_none() {
            return Err(ScenarioError::InvalidScenario(
                "fss, fss_star and degeneracy_score need `function`".into(),
            ));
        }
        Ok(())
    }
}

/// Parsed input documents.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Inputs<T: Scalar = f64> {
    pub network: Option<Network<T>>,
    pub inventory: Option<Inventory<T>>,
    pub portfolio: Option<Portfolio<T>>,
    pub layers: Option<LayerStack<T>>,
}

fn load<D>(
    base: &FsPath,
    rel: &Option<PathBuf>,
    parse: impl Fn(&str) -> Result<D, ModelError>,
) -> Result<Option<D>, ScenarioError> {
    let Some(rel) = rel else { return Ok(None) };
    let path = base.join(rel);
    let text = fs::read_to_string(&path).map_err(|e| ScenarioError::Io {
        path: path.clone(),
        message: e.to_string(),
    })?;
    parse(&text)
        .map(Some)
        .map_err(|source| ScenarioError::Document { path, source })
}

impl<T: Scalar> Inputs<T> {
    /// Reads the documents named by `paths`, resolved against `base_dir`.
    pub fn load(paths: &InputPaths, base_dir: &FsPath) -> Result<Self, ScenarioError> {
        Ok(Inputs {
            network: load(base_dir, &paths.network, Network::from_json)?,
            inventory: load(base_dir, &paths.inventory, Inventory::from_json)?,
            portfolio: load(base_dir, &paths.portfolio, Portfolio::from_json)?,
            layers: load(base_dir, &paths.layers, LayerStack::from_json)?,
        })
    }

    fn has(&self, input: &str) -> bool {
        match input {
            "network" => self.network.is_some(),
            "inventory" => self.inventory.is_some(),
            "portfolio" => self.portfolio.is_some(),
            "layers" => self.layers.is_some(),
            _ => false,
        }
    }

    fn without(&self, failed: &FailureStep) -> Result<Self, ScenarioError> {
        let elements: BTreeSet<ElementId> = failed
            .elements
            .iter()
            .map(|s| ElementId::new(s.as_str()))
            .collect();
        let algorithms: BTreeSet<AlgorithmId> = failed
            .elements
            .iter()
            .map(|s| AlgorithmId::new(s.as_str()))
            .collect();
        let network = match &self.network {
            Some(net) => Some(
                net.remove_failures(&failed.nodes, &failed.edges)
                    .map_err(|e| ScenarioError::UnresolvableTarget(e.to_string()))?,
            ),
            None => None,
        };
        Ok(Inputs {
            network,
            inventory: self.inventory.as_ref().map(|i| i.without(&elements)),
            portfolio: self.portfolio.as_ref().map(|p| p.without(&algorithms)),
            layers: self.layers.as_ref().map(|l| l.without(&elements)),
        })
    }

    fn check_targets(&self, step: &FailureStep) -> Result<(), ScenarioError> {
        for node in &step.nodes {
            if !self.network.as_ref().is_some_and(|n| n.contains_node(node)) {
                return Err(ScenarioError::UnresolvableTarget(format!("node `{node}`")));
            }
        }
        for edge in &step.edges {
            if !self.network.as_ref().is_some_and(|n| n.contains_edge(edge)) {
                return Err(ScenarioError::UnresolvableTarget(format!("edge {edge}")));
            }
        }
        for id in &step.elements {
            let known = self
                .inventory
                .as_ref()
                .is_some_and(|i| i.contains_element(&ElementId::new(id.as_str())))
                || self
                    .portfolio
                    .as_ref()
                    .is_some_and(|p| p.contains(&AlgorithmId::new(id.as_str())))
                || self
                    .layers
                    .as_ref()
                    .is_some_and(|l| l.contains_element(&ElementId::new(id.as_str())));
            if !known {
                return Err(ScenarioError::UnresolvableTarget(format!("element `{id}`")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Abort path enumeration past this many paths.
    pub max_paths: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub step: usize,
    /// Components this step names (empty for the baseline).
    pub failed: FailureStep,
    pub values: BTreeMap<String, Option<f64>>,
    /// `value − baseline`; null when either side is undefined.
    pub deltas: BTreeMap<String, Option<f64>>,
    /// Reason for every null value.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub undefined: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub scenario: String,
    pub mode: FailureMode,
    pub config: MetricConfig<f64>,
    /// Metric keys in request order; path metrics are keyed `name[s->d]`.
    pub metrics: Vec<String>,
    pub steps: Vec<StepReport>,
}

impl Report {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Metric keys that are undefined at every step.
    pub fn undefined_everywhere(&self) -> Vec<&str> {
        self.metrics
            .iter()
            .filter(|key| {
                self.steps
                    .iter()
                    .all(|s| s.values.get(*key).is_none_or(Option::is_none))
            })
            .map(String::as_str)
            .collect()
    }
}

/// Rounds to 12 significant digits.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x + 0.0;
    }
    format!("{x:.11e}")
        .parse::<f64>()
        .expect("formatted float parses")
        + 0.0
}

struct StepValues {
    values: BTreeMap<String, Result<f64, String>>,
    warnings: BTreeSet<String>,
}

impl StepValues {
    fn record<T: Scalar>(&mut self, key: String, value: Result<T, MetricError>) {
        let value = match value {
            Ok(v) if v.to_f64_lossy().is_finite() => Ok(v.to_f64_lossy()),
            Ok(_) => Err("non-finite result".to_owned()),
            Err(e) => Err(format!("{}: {e}", e.code())),
        };
        self.values.insert(key, value);
    }
}

fn path_key(metric: MetricKind, s: &NodeId, d: &NodeId) -> String {
    format!("{metric}[{s}->{d}]")
}

fn metric_keys<T: Scalar>(scenario: &Scenario<T>) -> Vec<String> {
    let mut keys = Vec::new();
    for &metric in &scenario.metrics {
        if metric.is_path_metric() {
            keys.extend(
                scenario
                    .endpoints
                    .iter()
                    .map(|(s, d)| path_key(metric, s, d)),
            );
        } else {
            keys.push(metric.as_str().to_owned());
        }
    }
    let mut seen = BTreeSet::new();
    keys.retain(|k| seen.insert(k.clone()));
    keys
}

fn evaluate<T: Scalar>(
    inputs: &Inputs<T>,
    scenario: &Scenario<T>,
    options: &RunOptions,
) -> Result<StepValues, ScenarioError> {
    let cfg = &scenario.config;
    let requested: BTreeSet<MetricKind> = scenario.metrics.iter().copied().collect();
    let mut out = StepValues {
        values: BTreeMap::new(),
        warnings: BTreeSet::new(),
    };

    if let Some(net) = &inputs.network {
        let path_metrics: Vec<MetricKind> = requested
            .iter()
            .copied()
            .filter(|m| m.is_path_metric())
            .collect();
        for (s, d) in scenario
            .endpoints
            .iter()
            .filter(|_| !path_metrics.is_empty())
        {
            let label = format!("{s}->{d}");
            let vps = if net.contains_node(s) && net.contains_node(d) {
                let search = PathSearch {
                    max_hops: cfg.max_hops(),
                    max_paths: options.max_paths,
                };
                let found = search_paths(net, s, d, search).map_err(|source| match source {
                    PathError::PathLimitExceeded { .. } => ScenarioError::PathLimit {
                        context: label.clone(),
                        source,
                    },
                    other => ScenarioError::InvalidScenario(format!("{label}: {other}")),
                })?;
                if found.hop_cap_reached {
                    out.warnings.insert(format!(
                        "{label}: path search truncated at max_hops = {}",
                        cfg.max_hops()
                    ));
                }
                filter_qos(&found.paths, cfg.lambda_max(), cfg.beta_min())
            } else {
                out.warnings
                    .insert(format!("{label}: endpoint removed by failure"));
                filter_qos(&[], cfg.lambda_max(), cfg.beta_min())
            };
            if vps.is_empty() {
                out.warnings
                    .insert(format!("{label}: no QoS-valid path, dwpr reported as 0"));
            }
            for &metric in &path_metrics {
                let key = path_key(metric, s, d);
                match metric {
                    MetricKind::Dwpr => out.record(key, Ok(dwpr(&vps, cfg.theta()))),
                    _ => out.record(key, dwpr_star(&vps, cfg.log_base())),
                }
            }
        }
    }

    if let (Some(inventory), Some(function)) = (&inputs.inventory, &scenario.function) {
        let known = inventory.has_function(function);
        let capable = capable_set(inventory.elements(), function);
        let unknown = || Err(MetricError::UnknownFunction(function.clone()));
        for metric in [
            MetricKind::Fss,
            MetricKind::FssStar,
            MetricKind::DegeneracyScore,
        ] {
            if !requested.contains(&metric) {
                continue;
            }
            let value = match metric {
                _ if !known => unknown(),
                MetricKind::Fss => fss_with(&capable, cfg.delta(), cfg.element_distance()),
                MetricKind::FssStar => fss_star(&capable, cfg.delta()),
                _ => degeneracy_score(inventory, function, cfg.element_distance(), cfg.delta())
                    .map(T::count),
            };
            out.record(metric.as_str().to_owned(), value);
        }
    }

    if let Some(portfolio) = &inputs.portfolio {
        let algorithms = portfolio.algorithms();
        if requested.contains(&MetricKind::Arq) {
            let v = arq_with(
                algorithms,
                cfg.epsilon(),
                cfg.delta(),
                cfg.algorithm_distance(),
            );
            out.record("arq".to_owned(), v);
        }
        if requested.contains(&MetricKind::ArqStar) {
            out.record("arq_star".to_owned(), arq_star(algorithms, cfg.sigma()));
        }
    }

    if let Some(stack) = &inputs.layers {
        if requested.contains(&MetricKind::Mldi) {
            out.record("mldi".to_owned(), mldi(stack, cfg.delta()));
        }
        if requested.contains(&MetricKind::MldiStar) {
            out.record(
                "mldi_star".to_owned(),
                mldi_star(stack, cfg.gamma_weight(), cfg.log_base()),
            );
        }
        let fallback = stack
            .layers()
            .iter()
            .any(|l| degenerate_subset(l, cfg.delta()).is_ok_and(|s| s.identity_fallback));
        if fallback && requested.contains(&MetricKind::Mldi) {
            out.warnings.insert(
                "mldi: no layer embeddings, structural diversity taken as distinct element identity"
                    .to_owned(),
            );
        }
    }

    for (key, value) in &out.values {
        if let Err(reason) = value {
            out.warnings.insert(format!("{key}: undefined ({reason})"));
        }
    }
    Ok(out)
}

/// Computes the requested metrics on the intact inputs and after every
/// failure step.
pub fn run_scenario<T: Scalar>(
    inputs: &Inputs<T>,
    scenario: &Scenario<T>,
    options: &RunOptions,
) -> Result<Report, ScenarioError> {
    scenario.validate()?;
    for &metric in &scenario.metrics {
        if !inputs.has(metric.required_input()) {
            return Err(ScenarioError::MissingInput {
                metric,
                input: metric.required_input(),
            });
        }
    }
    for step in &scenario.failures {
        inputs.check_targets(step)?;
    }

    let keys = metric_keys(scenario);
    let baseline = evaluate(inputs, scenario, options)?;
    let mut steps = vec![step_report(
        0,
        FailureStep::default(),
        &keys,
        &baseline,
        &baseline,
    )];
    let mut removed = FailureStep::default();
    for (i, step) in scenario.failures.iter().enumerate() {
        let failed = match scenario.mode {
            FailureMode::Cumulative => {
                removed.extend(step);
                removed.clone()
            }
            FailureMode::Independent => step.clone(),
        };
        let values = evaluate(&inputs.without(&failed)?, scenario, options)?;
        steps.push(step_report(i + 1, step.clone(), &keys, &values, &baseline));
    }

    Ok(Report {
        tool_version: TOOL_VERSION.to_owned(),
        scenario: scenario.name.clone(),
        mode: scenario.mode,
        config: scenario.config.cast(),
        metrics: keys,
        steps,
    })
}

fn step_report(
    step: usize,
    failed: FailureStep,
    keys: &[String],
    current: &StepValues,
    baseline: &StepValues,
) -> StepReport {
    let mut report = StepReport {
        step,
        failed,
        warnings: current.warnings.iter().cloned().collect(),
        ..StepReport::default()
    };
    for key in keys {
        let value = current
            .values
            .get(key)
            .cloned()
            .unwrap_or_else(|| Err("not computed".to_owned()));
        let base = baseline.values.get(key).and_then(|v| v.as_ref().ok());
        match value {
            Ok(v) => {
                report
                    .values
                    .insert(key.clone(), Some(round_significant(v)));
                report
                    .deltas
                    .insert(key.clone(), base.map(|b| round_significant(v - b)));
            }
            Err(reason) => {
                report.values.insert(key.clone(), None);
                report.deltas.insert(key.clone(), None);
                report.undefined.insert(key.clone(), reason);
            }
        }
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// JSON is the full report; CSV flattens to `step,metric,value,delta` rows.
pub fn emit_report(report: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(report).expect("report serializes");
            text.push('\n');
            text
        }
        ReportFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer
                .write_record(["step", "metric", "value", "delta"])
                .expect("in-memory write");
            let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            for step in &report.steps {
                for key in &report.metrics {
                    let value = step.values.get(key).copied().flatten();
                    let delta = step.deltas.get(key).copied().flatten();
                    writer
                        .write_record([
                            step.step.to_string(),
                            key.clone(),
                            cell(value),
                            cell(delta),
                        ])
                        .expect("in-memory write");
                }
            }
            String::from_utf8(writer.into_inner().expect("flush")).expect("utf8 csv")
        }
    }
}
