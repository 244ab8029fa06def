use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use degenet::paths::DEFAULT_MAX_HOPS;
use degenet::scenario::{FailureMode, Inputs, RunOptions};
use degenet::{
    arq_report, degeneracy_score, dwpr_report, emit_report, filter_qos, fss_report, mldi_report,
    parse_document, path_quality, run_scenario, search_paths, DistanceKind, Document, FunctionId,
    InventoryF64, LayerStackF64, LogBase, MetricConfigF64, MetricError, NetworkF64, NodeId,
    PathError, PathSearch, PortfolioF64, ReportFormat, Scenario, ScenarioError,
};

const MAX_PATHS_VAR: &str = "DEGENET_MAX_PATHS";
const DEFAULT_MAX_PATHS: usize = 100_000;

/// Degeneracy and resilience metrics for multi-modal networks.
#[derive(Parser)]
#[command(name = "degenet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a network, inventory, portfolio or layer-stack document.
    Validate { doc: PathBuf },
    /// List the simple paths between two nodes and mark the QoS-valid ones.
    Paths {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        src: String,
        #[arg(long)]
        dst: String,
        #[arg(long, default_value_t = DEFAULT_MAX_HOPS)]
        max_hops: usize,
        #[arg(long, default_value_t = f64::INFINITY)]
        lambda_max: f64,
        #[arg(long, default_value_t = 0.0)]
        beta_min: f64,
    },
    /// Compute one metric family and print a detailed JSON report.
    Metric {
        #[command(subcommand)]
        metric: MetricCommand,
    },
    /// Failure-injection scenarios.
    Scenario {
        #[command(subcommand)]
        action: ScenarioCommand,
    },
}

#[derive(Subcommand)]
enum MetricCommand {
    /// DWPR and DWPR* between two nodes.
    Dwpr {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        src: String,
        #[arg(long)]
        dst: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// FSS and FSS* for one function.
    Fss {
        #[arg(long)]
        inventory: PathBuf,
        #[arg(long)]
        function: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// ARQ and ARQ* over an algorithm portfolio.
    Arq {
        #[arg(long)]
        portfolio: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// MLDI and MLDI* over a layer stack.
    Mldi {
        #[arg(long)]
        layers: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Count of structurally distinct capable pairs for one function.
    Degeneracy {
        #[arg(long)]
        inventory: PathBuf,
        #[arg(long)]
        function: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Subcommand)]
enum ScenarioCommand {
    /// Run a scenario file and write its report.
    Run {
        #[arg(long)]
        file: PathBuf,
        /// JSON report destination.
        #[arg(long)]
        out: PathBuf,
        /// Also write a flat CSV of (step, metric, value, delta).
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Apply each failure step on its own instead of cumulatively.
        #[arg(long)]
        independent: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseArg {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
}

/// Overrides applied on top of `--config` (or the defaults).
#[derive(Args)]
struct ConfigArgs {
    /// MetricConfig JSON file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long)]
    lambda_max: Option<f64>,
    #[arg(long)]
    beta_min: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, value_enum)]
    log_base: Option<BaseArg>,
    #[arg(long)]
    max_hops: Option<usize>,
    #[arg(long)]
    element_distance: Option<DistanceKind>,
    #[arg(long)]
    algorithm_distance: Option<DistanceKind>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Undefined(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Undefined(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        let msg = format!("{}: {e}", e.code());
        match e {
            MetricError::UnknownFunction(_) | MetricError::Kernel(_) => CliError::Input(msg),
            MetricError::Path(PathError::UnknownNode(_))
            | MetricError::Path(PathError::SameEndpoints(_))
            | MetricError::Path(PathError::InvalidMaxHops) => CliError::Input(msg),
            _ => CliError::Undefined(msg),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e.exit_code() {
            2 => CliError::Undefined(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl ConfigArgs {
    fn resolve(&self) -> Result<MetricConfigF64, CliError> {
        let base = match &self.config {
            Some(path) => serde_json::from_str(&read(path)?)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
            None => MetricConfigF64::default(),
        };
        let mut b = base.to_builder();
        if let Some(v) = self.delta {
            b = b.delta(v);
        }
        if let Some(v) = self.epsilon {
            b = b.epsilon(v);
        }
        if let Some(v) = self.theta {
            b = b.theta(v);
        }
        if let Some(v) = self.lambda_max {
            b = b.lambda_max(v);
        }
        if let Some(v) = self.beta_min {
            b = b.beta_min(v);
        }
        if let Some(v) = self.sigma {
            b = b.sigma(v);
        }
        if let Some(v) = self.gamma {
            b = b.gamma_weight(v);
        }
        if let Some(v) = self.log_base {
            b = b.log_base(match v {
                BaseArg::Two => LogBase::Two,
                BaseArg::E => LogBase::E,
            });
        }
        if let Some(v) = self.max_hops {
            b = b.max_hops(v);
        }
        if let Some(v) = self.element_distance {
            b = b.element_distance(v);
        }
        if let Some(v) = self.algorithm_distance {
            b = b.algorithm_distance(v);
        }
        b.build()
            .map_err(|e| CliError::Input(format!("config: {e}")))
    }
}

fn read(path: &FsPath) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &FsPath, text: &str) -> Result<(), CliError> {
    fs::write(path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn load<D>(
    path: &FsPath,
    parse: impl Fn(&str) -> Result<D, degenet::ModelError>,
) -> Result<D, CliError> {
    parse(&read(path)?)
        .map_err(|e| CliError::Input(format!("{}: error[{}]: {e}", path.display(), e.code())))
}

fn max_paths() -> Result<usize, CliError> {
    match std::env::var(MAX_PATHS_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| {
                CliError::Input(format!(
                    "{MAX_PATHS_VAR} must be a positive integer, got `{v}`"
                ))
            }),
        Err(_) => Ok(DEFAULT_MAX_PATHS),
    }
}

fn print_json<S: Serialize>(value: &S) -> Result<(), CliError> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn validate(doc: &FsPath) -> Result<(), CliError> {
    let parsed = load(doc, parse_document::<f64>)?;
    let summary = match &parsed {
        Document::Network(n) => format!(
            "{} nodes, {} edges, {} modes",
            n.nodes().len(),
            n.edges().len(),
            n.modes().len()
        ),
        Document::Inventory(i) => format!(
            "{} functions, {} elements",
            i.functions().len(),
            i.elements().len()
        ),
        Document::Portfolio(p) => format!("{} algorithms", p.algorithms().len()),
        Document::LayerStack(s) => format!(
            "{} functions, {} layers",
            s.functions().len(),
            s.layers().len()
        ),
    };
    println!("valid {}: {summary}", parsed.kind());
    Ok(())
}

fn paths(
    net: &FsPath,
    src: &str,
    dst: &str,
    max_hops: usize,
    lambda_max: f64,
    beta_min: f64,
) -> Result<(), CliError> {
    let net = load(net, NetworkF64::from_json)?;
    let search = PathSearch {
        max_hops,
        max_paths: Some(max_paths()?),
    };
    let found = search_paths(&net, &NodeId::from(src), &NodeId::from(dst), search)
        .map_err(|e| CliError::from(MetricError::from(e)))?;
    let listed: Vec<_> = found
        .paths
        .iter()
        .map(|p| {
            let valid = !filter_qos(std::slice::from_ref(p), lambda_max, beta_min).is_empty();
            json!({
                "nodes": p.nodes(),
                "modes": p.modes().collect::<Vec<_>>(),
                "hop_count": p.hop_count(),
                "total_latency_ms": p.total_latency(),
                "min_bandwidth_mbps": p.min_bandwidth(),
                "quality": path_quality(p),
                "valid": valid,
            })
        })
        .collect();
    let valid_count = listed.iter().filter(|p| p["valid"] == true).count();
    print_json(&json!({
        "source": src,
        "destination": dst,
        "max_hops": max_hops,
        "hop_cap_reached": found.hop_cap_reached,
        "path_count": listed.len(),
        "valid_count": valid_count,
        "paths": listed,
    }))
}

fn metric(cmd: &MetricCommand) -> Result<(), CliError> {
    match cmd {
        MetricCommand::Dwpr {
            net,
            src,
            dst,
            config,
        } => {
            let cfg = config.resolve()?;
            let net = load(net, NetworkF64::from_json)?;
            let search = PathSearch {
                max_hops: cfg.max_hops(),
                max_paths: Some(max_paths()?),
            };
            let found = search_paths(
                &net,
                &NodeId::from(src.as_str()),
                &NodeId::from(dst.as_str()),
                search,
            )
            .map_err(|e| CliError::from(MetricError::from(e)))?;
            let vps = filter_qos(&found.paths, cfg.lambda_max(), cfg.beta_min());
            let mut report = dwpr_report(&vps, cfg.theta(), cfg.log_base())?;
            if found.hop_cap_reached {
                report.warnings.push(format!(
                    "path search truncated at max_hops = {}",
                    cfg.max_hops()
                ));
            }
            print_json(&report)?;
            if report.dwpr_star.is_none() {
                return Err(CliError::Undefined(
                    "no QoS-valid path between the endpoints".into(),
                ));
            }
            Ok(())
        }
        MetricCommand::Fss {
            inventory,
            function,
            config,
        } => {
            let cfg = config.resolve()?;
            let inventory = load(inventory, InventoryF64::from_json)?;
            let report = fss_report(
                &inventory,
                &FunctionId::from(function.as_str()),
                cfg.delta(),
                cfg.element_distance(),
            )?;
            print_json(&report)
        }
        MetricCommand::Arq { portfolio, config } => {
            let cfg = config.resolve()?;
            let portfolio = load(portfolio, PortfolioF64::from_json)?;
            let report = arq_report(
                portfolio.algorithms(),
                cfg.epsilon(),
                cfg.delta(),
                cfg.sigma(),
                cfg.algorithm_distance(),
            )?;
            print_json(&report)
        }
        MetricCommand::Mldi { layers, config } => {
            let cfg = config.resolve()?;
            let stack = load(layers, LayerStackF64::from_json)?;
            let report = mldi_report(&stack, cfg.delta(), cfg.gamma_weight(), cfg.log_base())?;
            print_json(&report)
        }
        MetricCommand::Degeneracy {
            inventory,
            function,
            config,
        } => {
            let cfg = config.resolve()?;
            let inventory = load(inventory, InventoryF64::from_json)?;
            let score = degeneracy_score(
                &inventory,
                &FunctionId::from(function.as_str()),
                cfg.element_distance(),
                cfg.delta(),
            )?;
            print_json(&json!({ "function": function, "degeneracy_score": score }))
        }
    }
}

fn scenario_run(
    file: &FsPath,
    out: &FsPath,
    csv: Option<&FsPath>,
    independent: bool,
) -> Result<(), CliError> {
    let mut scenario = Scenario::<f64>::from_json(&read(file)?)?;
    if independent {
        scenario.mode = FailureMode::Independent;
    }
    let base_dir = file.parent().unwrap_or_else(|| FsPath::new("."));
    let inputs = Inputs::load(&scenario.inputs, base_dir)?;
    let options = RunOptions {
        max_paths: Some(max_paths()?),
    };
    let report = run_scenario(&inputs, &scenario, &options)?;
    write(out, &emit_report(&report, ReportFormat::Json))?;
    if let Some(csv) = csv {
        write(csv, &emit_report(&report, ReportFormat::Csv))?;
    }
    let undefined = report.undefined_everywhere();
    if !undefined.is_empty() {
        return Err(CliError::Undefined(format!(
            "undefined at every step: {}",
            undefined.join(", ")
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { doc } => validate(&doc),
        Command::Paths {
            net,
            src,
            dst,
            max_hops,
            lambda_max,
            beta_min,
        } => paths(&net, &src, &dst, max_hops, lambda_max, beta_min),
        Command::Metric { metric: cmd } => metric(&cmd),
        Command::Scenario {
            action:
                ScenarioCommand::Run {
                    file,
                    out,
                    csv,
                    independent,
                },
        } => scenario_run(&file, &out, csv.as_deref(), independent),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = std::panic::catch_unwind(|| run(cli))
        .unwrap_or_else(|_| Err(CliError::Internal("internal error".into())));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
