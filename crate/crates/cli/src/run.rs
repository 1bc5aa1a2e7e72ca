use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use gammasum::certify::{self, CaseInput, CaseRecord, CertificateReport, Suite};
use gammasum::density::{self, DensityEvaluator, Engine};
use gammasum::entropy::{self, EntropyResult};
use gammasum::format::{self, real_vec};
use gammasum::numerics::QuadratureConfig;
use gammasum::transforms;
use gammasum::{Error, GammaSumModel};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Cli, Command, CommonArgs, Format, ModelArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CERT_FAILURE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Config(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

/// The fully resolved configuration, embedded in every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalize: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty", with = "real_vec")]
    pub alpha: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replay: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub seed: u64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

/// Top-level JSON document of every run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord<T> {
    pub config: RunConfig,
    pub results: T,
    pub version: String,
}

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn base_config(command: &str, common: &CommonArgs, format: Format, jobs: Option<usize>) -> CliResult<(RunConfig, QuadratureConfig)> {
    let defaults = QuadratureConfig::default();
    let cfg = QuadratureConfig::new(common.abs_tol, common.rel_tol, defaults.max_subdivisions, defaults.singularity_grading)?;
    let config = RunConfig {
        command: command.to_string(),
        gamma: None,
        weights: None,
        normalize: None,
        engine: None,
        alpha: Vec::new(),
        grid: None,
        max_order: None,
        suite: None,
        replay: None,
        trials: None,
        n: None,
        seed: common.seed,
        abs_tol: cfg.abs_tol,
        rel_tol: cfg.rel_tol,
        max_subdivisions: cfg.max_subdivisions,
        format: match format {
            Format::Csv => "csv",
            Format::Json => "json",
        }
        .to_string(),
        output: common.output.as_ref().map(|p| p.display().to_string()),
        jobs,
    };
    Ok((config, cfg))
}

fn model_config(
    command: &str,
    args: &ModelArgs,
    format: Format,
    jobs: Option<usize>,
) -> CliResult<(RunConfig, QuadratureConfig, GammaSumModel)> {
    let (mut config, cfg) = base_config(command, &args.common, format, jobs)?;
    let weights = if args.normalize {
        args.weights.normalized()
    } else {
        args.weights.clone()
    };
    let model = GammaSumModel::new(args.shape, weights)?;
    config.gamma = Some(args.shape);
    config.weights = Some(model.weights().as_slice().to_vec());
    config.normalize = Some(args.normalize);
    config.engine = Some(args.engine.map_or_else(|| "auto".to_string(), |e| e.to_string()));
    Ok((config, cfg, model))
}

fn json_only(common: &CommonArgs, command: &str) -> CliResult<Format> {
    match common.format.unwrap_or(Format::Json) {
        Format::Json => Ok(Format::Json),
        Format::Csv => Err(CliError::Config(format!("{command} writes JSON only; --format csv is not available"))),
    }
}

fn emit(text: &str, output: Option<&Path>) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Config(format!("cannot write to stdout: {e}")))
        }
    }
}

fn emit_json<T: Serialize>(config: RunConfig, results: T, output: Option<&Path>) -> CliResult<()> {
    let record = RunRecord {
        config,
        results,
        version: VERSION.to_string(),
    };
    emit(&format::to_json_pretty(&record)?, output)
}

fn parse_grid(spec: &str) -> CliResult<GridSpec> {
    let bad = || CliError::Config(format!("--grid expects min:max:count with 0 < min < max and count ≥ 2, got '{spec}'"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(min > 0.0 && max > min && max.is_finite() && count >= 2) {
        return Err(bad());
    }
    Ok(GridSpec { min, max, count })
}

fn parse_orders(list: &str) -> CliResult<Vec<f64>> {
    list.split(',')
        .map(|s| {
            let a = format::parse_real(s).map_err(|_| CliError::Config(format!("bad Rényi order '{}'", s.trim())))?;
            if a.is_nan() || a < 0.0 || (a.is_finite() && a > entropy::MAX_FINITE_ORDER) {
                return Err(CliError::Config(format!(
                    "Rényi order must lie in [0, {}] or be inf, got {}",
                    entropy::MAX_FINITE_ORDER,
                    s.trim()
                )));
            }
            Ok(a)
        })
        .collect()
}

pub fn dispatch(cli: &Cli) -> CliResult<u8> {
    match &cli.command {
        Command::Density(args) => {
            let format = args.model.common.format.unwrap_or(Format::Csv);
            let (mut config, cfg, model) = model_config("density", &args.model, format, cli.jobs)?;
            let grid = match &args.grid {
                Some(spec) => {
                    let g = parse_grid(spec)?;
                    let step = (g.max - g.min) / (g.count - 1) as f64;
                    let points = (0..g.count).map(|i| g.min + step * i as f64).collect();
                    config.grid = Some(g);
                    points
                }
                None => density::default_grid(&model, density::DEFAULT_GRID_POINTS),
            };
            let curve = density::density_curve(&model, &grid, args.model.engine, &cfg, args.model.common.seed)?;
            for w in &curve.warnings {
                eprintln!("warning: {w}");
            }
            let output = args.model.common.output.as_deref();
            match format {
                Format::Csv => {
                    let mut extra = serde_json::Map::new();
                    extra.insert(
                        "config".into(),
                        serde_json::to_value(&config).map_err(|e| CliError::Config(e.to_string()))?,
                    );
                    extra.insert("version".into(), VERSION.into());
                    emit(&curve.to_csv_with(extra)?, output)?;
                }
                Format::Json => emit_json(config, curve, output)?,
            }
            Ok(EXIT_OK)
        }
        Command::Entropy(args) => {
            let format = json_only(&args.model.common, "entropy")?;
            let (mut config, cfg, model) = model_config("entropy", &args.model, format, cli.jobs)?;
            let orders = parse_orders(&args.alpha)?;
            config.alpha = orders.clone();
            let results = entropies(&model, args.model.engine, &orders, &cfg)?;
            emit_json(config, results, args.model.common.output.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Moments(args) => {
            let format = json_only(&args.model.common, "moments")?;
            let (mut config, _, model) = model_config("moments", &args.model, format, cli.jobs)?;
            config.max_order = Some(args.max_order);
            let table = transforms::central_moments(&model, args.max_order)?;
            emit_json(config, table, args.model.common.output.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Maxdensity(args) => {
            let format = json_only(&args.common, "maxdensity")?;
            let (config, cfg, model) = model_config("maxdensity", args, format, cli.jobs)?;
            let m = if model.total_shape() < 1.0 || args.engine.is_none() {
                entropy::max_density(&model, &cfg)?
            } else {
                let eval = evaluator(&model, args.engine, &cfg)?;
                entropy::max_density_with(&eval, &model, &cfg)?
            };
            emit_json(config, m, args.common.output.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Certify(args) => certify_command(args, cli.jobs),
        Command::Explore(args) => {
            let format = json_only(&args.common, "explore")?;
            let (mut config, cfg) = base_config("explore", &args.common, format, cli.jobs)?;
            config.gamma = Some(args.shape);
            config.n = Some(args.n);
            config.trials = Some(args.trials);
            let report = certify::explore(args.shape, args.n, args.trials, args.common.seed, &cfg)?;
            emit_json(config, report, args.common.output.as_deref())?;
            Ok(EXIT_OK)
        }
    }
}

fn evaluator(model: &GammaSumModel, engine: Option<Engine>, cfg: &QuadratureConfig) -> CliResult<DensityEvaluator> {
    if engine == Some(Engine::MonteCarlo) {
        return Err(CliError::Config(
            "the Monte Carlo engine only produces density curves; choose closed, cf or convolution".into(),
        ));
    }
    Ok(DensityEvaluator::new(model, engine, cfg)?)
}

fn entropies(model: &GammaSumModel, engine: Option<Engine>, orders: &[f64], cfg: &QuadratureConfig) -> CliResult<Vec<EntropyResult>> {
    let needs_density = orders.iter().any(|&a| a != 0.0 && !(a.is_infinite() && model.total_shape() < 1.0));
    let eval = if needs_density {
        evaluator(model, engine, cfg)?
    } else {
        DensityEvaluator::Closed { shape: 1.0, scale: 1.0 }
    };
    orders
        .par_iter()
        .map(|&alpha| match entropy::renyi_entropy_with(&eval, model, alpha, cfg) {
            // an infinite entropy is a result, not a failure
            Err(Error::Divergent { value, .. }) => Ok(EntropyResult {
                order: alpha,
                value,
                err_est: 0.0,
                engine: eval.engine(),
            }),
            other => other.map_err(CliError::from),
        })
        .collect()
}

/// A replay file holds either a full case record or bare case inputs.
fn read_case(path: &Path) -> CliResult<CaseInput> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    if let Ok(rec) = serde_json::from_str::<CaseRecord>(&text) {
        return Ok(rec.inputs);
    }
    serde_json::from_str::<CaseInput>(&text)
        .map_err(|e| CliError::Config(format!("{} is neither a case record nor case inputs: {e}", path.display())))
}

fn certify_command(args: &crate::CertifyArgs, jobs: Option<usize>) -> CliResult<u8> {
    let format = json_only(&args.common, "certify")?;
    let (mut config, cfg) = base_config("certify", &args.common, format, jobs)?;
    let reports: Vec<CertificateReport> = if let Some(path) = &args.replay {
        config.replay = Some(path.display().to_string());
        let input = read_case(path)?;
        vec![certify::replay(&input, &cfg)]
    } else {
        let suites: Vec<Suite> = if args.suite == "all" {
            Suite::ALL.to_vec()
        } else {
            vec![args.suite.parse().map_err(|e: Error| CliError::Config(e.to_string()))?]
        };
        config.suite = Some(args.suite.clone());
        config.trials = Some(args.trials);
        suites
            .into_iter()
            .map(|s| certify::run_suite(s, args.trials, args.common.seed, &cfg))
            .collect::<Result<_, _>>()?
    };
    for r in &reports {
        eprintln!(
            "{:<16} {} ({} cases, min margin {})",
            r.suite,
            if r.passed() { "pass" } else { "FAIL" },
            r.cases.len(),
            format::fmt_real(r.min_margin)
        );
    }
    let all_pass = reports.iter().all(CertificateReport::passed);
    emit_json(config, reports, args.common.output.as_deref())?;
    Ok(if all_pass { EXIT_OK } else { EXIT_CERT_FAILURE })
}
