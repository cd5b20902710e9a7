use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::manifest::{self, sha256_hex, Outputs, RunManifest};
use super::{
    BandwidthArgs, CurveArgs, DetectArgs, DetectorArgs, InputArgs, ReplicateArgs, SimulateArgs,
    Stage, StageError,
};
use crate::bandwidth::{self, BandwidthSearchConfig, CriterionPoint};
use crate::datagen::{self, Builtin, ErrorScale, GeneratorConfig, UDist, XDist};
use crate::error::Error;
use crate::estimators::{DetectorConfig, JumpEstimate, Method};
use crate::experiments::{self, BootstrapPlan, ExperimentDesign};
use crate::io::{self, IngestOptions, IngestReport};
use crate::kernels::KernelFamily;
use crate::sample::{Domain, ObservedSample};
use crate::baseline;

type CmdResult<T = ()> = Result<T, StageError>;

pub const RESULT_FILE: &str = "result.json";
pub const DIFF_CURVE_FILE: &str = "diff_curve.csv";
pub const BANDWIDTH_FILE: &str = "bandwidth.json";
pub const SAMPLE_FILE: &str = "sample.csv";
pub const REPORT_FILE: &str = "report.json";
pub const TABLE_FILE: &str = "table.txt";
pub const RECORDS_FILE: &str = "records.csv";
pub const CURVE_FILE: &str = "curve.csv";

fn config_error(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

fn ingest_options(args: &InputArgs) -> IngestOptions {
    IngestOptions {
        w_column: args.w_column.clone(),
        y_column: args.y_column.clone(),
        log_transform: args.log,
        window: args.window,
        response: args.response.into(),
    }
}

struct Loaded {
    sample: ObservedSample,
    report: IngestReport,
    digest: String,
}

fn load(path: &Path, options: &IngestOptions) -> CmdResult<Loaded> {
    let bytes = fs::read(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
        .stage("ingest")?;
    let ingested = io::ingest_reader(bytes.as_slice(), options).stage("ingest")?;
    Ok(Loaded {
        sample: ingested.sample,
        report: ingested.report,
        digest: sha256_hex(&bytes),
    })
}

fn require_input(args: &InputArgs) -> CmdResult<&Path> {
    args.input
        .as_deref()
        .ok_or_else(|| config_error("--input is required"))
        .stage("ingest")
}

fn parse_method(args: &DetectorArgs) -> crate::error::Result<Method> {
    let kr = KernelFamily::from_str(&args.kernel)?;
    let kstar = KernelFamily::from_str(&args.kstar)?;
    Ok(match Method::from_str(&args.method)? {
        Method::New { .. } => Method::New { kr, kstar },
        Method::Dke { .. } => Method::Dke { kernel: kr },
    })
}

fn resolve_domain(arg: Option<(f64, f64)>, sample: &ObservedSample) -> crate::error::Result<Domain> {
    match arg {
        Some((lo, hi)) => Domain::new(lo, hi),
        None => sample.domain(),
    }
}

fn detector_config(h: f64, domain: Domain, spacing: Option<f64>) -> crate::error::Result<DetectorConfig> {
    match spacing {
        Some(s) => DetectorConfig::with_spacing(h, domain, s),
        None => DetectorConfig::new(h, domain),
    }
}

/// Resolved `detect` configuration; replaying it reproduces the run exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectConfig {
    pub input: PathBuf,
    pub ingest: IngestOptions,
    pub method: Method,
    /// Fixed bandwidth; when absent the bootstrap chooses among `candidates`.
    pub bandwidth: Option<f64>,
    pub candidates: Vec<f64>,
    /// Zero with a fixed bandwidth skips the interval.
    pub bootstrap_reps: usize,
    pub seed: u64,
    pub alpha: f64,
    /// Search grid spacing; `None` means bandwidth / 20.
    pub grid_spacing: Option<f64>,
    pub domain: Domain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectResult {
    pub method: String,
    pub n: usize,
    pub location: f64,
    pub magnitude: f64,
    pub bandwidth: f64,
    pub ci: Option<[f64; 2]>,
    pub alpha: f64,
    pub bootstrap_reps: usize,
    pub dropped_replicates: usize,
    pub diff_curve: String,
    pub manifest: String,
}

pub fn detect(args: &DetectArgs) -> CmdResult {
    let started = manifest::timestamp();
    let (config, loaded) = match &args.from_manifest {
        Some(path) => {
            let m = RunManifest::read(path).stage("manifest")?;
            if m.command != "detect" {
                return Err(config_error(format!("manifest records `{}`, not `detect`", m.command))).stage("manifest");
            }
            let config: DetectConfig = serde_json::from_value(m.config)
                .map_err(|e| config_error(format!("manifest config: {e}")))
                .stage("manifest")?;
            let loaded = load(&config.input, &config.ingest)?;
            if m.input_sha256.as_deref() != Some(loaded.digest.as_str()) {
                return Err(config_error(format!(
                    "{} has changed since the manifest was written",
                    config.input.display()
                )))
                .stage("manifest");
            }
            (config, loaded)
        }
        None => {
            let input = require_input(&args.input)?;
            let ingest = ingest_options(&args.input);
            let loaded = load(input, &ingest)?;
            let config = resolve_detect(args, input, ingest, &loaded.sample).stage("configuration")?;
            (config, loaded)
        }
    };

    let (estimate, ci, dropped) = run_detect(&config, &loaded.sample)?;
    let result = DetectResult {
        method: config.method.name().to_string(),
        n: loaded.sample.len(),
        location: estimate.location,
        magnitude: estimate.magnitude,
        bandwidth: estimate.bandwidth,
        ci: ci.map(|(lo, hi)| [lo, hi]),
        alpha: config.alpha,
        bootstrap_reps: config.bootstrap_reps,
        dropped_replicates: dropped,
        diff_curve: DIFF_CURVE_FILE.to_string(),
        manifest: manifest::MANIFEST_FILE.to_string(),
    };

    let mut outputs = Outputs::default();
    outputs.add_json(RESULT_FILE, &result).stage("output")?;
    let mut curve = Vec::new();
    io::write_pairs_csv(&mut curve, ["x", "diff"], estimate.diff_curve.iter().map(|p| (p.x, p.diff)))
        .stage("output")?;
    outputs.add(DIFF_CURVE_FILE, curve);
    let m = RunManifest::new(
        "detect",
        &config,
        Some(config.seed),
        Some(loaded.digest),
        started,
        outputs.names(),
    )
    .stage("output")?;
    outputs.commit(&args.out_dir, &m).stage("output")?;
    eprintln!(
        "rows read {}, kept {}; location {} (bandwidth {})",
        loaded.report.rows_read, loaded.report.rows_kept, result.location, result.bandwidth
    );
    Ok(())
}

fn resolve_detect(
    args: &DetectArgs,
    input: &Path,
    ingest: IngestOptions,
    sample: &ObservedSample,
) -> crate::error::Result<DetectConfig> {
    let method = parse_method(&args.detector)?;
    let domain = resolve_domain(args.detector.domain, sample)?;
    let candidates = match (args.bandwidth, &args.bootstrap.bandwidth_grid) {
        (Some(h), _) => vec![h],
        (None, Some(grid)) => grid.0.clone(),
        (None, None) => bandwidth::default_candidates(sample, &domain, bandwidth::DEFAULT_CANDIDATE_COUNT)?,
    };
    if args.bandwidth.is_none() && args.bootstrap.bootstrap_reps == 0 {
        return Err(config_error("bandwidth selection needs --bootstrap-reps of at least 1"));
    }
    let input = fs::canonicalize(input).unwrap_or_else(|_| input.to_path_buf());
    Ok(DetectConfig {
        input,
        ingest,
        method,
        bandwidth: args.bandwidth,
        candidates,
        bootstrap_reps: args.bootstrap.bootstrap_reps,
        seed: args.bootstrap.seed,
        alpha: args.bootstrap.alpha,
        grid_spacing: args.detector.grid_spacing,
        domain,
    })
}

type Detected = (JumpEstimate, Option<(f64, f64)>, usize);

fn run_detect(config: &DetectConfig, sample: &ObservedSample) -> CmdResult<Detected> {
    let (domain, spacing) = (config.domain, config.grid_spacing);
    if let (Some(h), 0) = (config.bandwidth, config.bootstrap_reps) {
        let dc = detector_config(h, domain, spacing).stage("configuration")?;
        let estimate = config.method.detect(sample, &dc).stage("detection")?;
        return Ok((estimate, None, 0));
    }
    let search = BandwidthSearchConfig::new(config.candidates.clone(), config.bootstrap_reps, config.seed)
        .with_alpha(config.alpha);
    let stage = if config.bandwidth.is_some() { "detection" } else { "bandwidth selection" };
    let result = bandwidth::select_bandwidth(sample, &search, &config.method, |h| detector_config(h, domain, spacing))
        .map_err(|e| match (e, config.bandwidth) {
            (Error::AllCandidatesFailed, Some(_)) => Error::NoValidGridPoint,
            (e, _) => e,
        })
        .stage(stage)?;
    Ok((result.estimate, Some(result.ci), result.dropped_replicates))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthConfig {
    pub input: PathBuf,
    pub ingest: IngestOptions,
    pub method: Method,
    pub candidates: Vec<f64>,
    pub bootstrap_reps: usize,
    pub seed: u64,
    pub alpha: f64,
    pub grid_spacing: Option<f64>,
    pub domain: Domain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthReport {
    pub selected_bandwidth: f64,
    pub location: f64,
    pub magnitude: f64,
    pub ci: [f64; 2],
    pub alpha: f64,
    pub criterion_by_bandwidth: Vec<CriterionPoint>,
}

pub fn bandwidth(args: &BandwidthArgs) -> CmdResult {
    let started = manifest::timestamp();
    let input = require_input(&args.input)?;
    let ingest = ingest_options(&args.input);
    let loaded = load(input, &ingest)?;
    let sample = &loaded.sample;
    let config = (|| -> crate::error::Result<BandwidthConfig> {
        let domain = resolve_domain(args.detector.domain, sample)?;
        let candidates = match &args.bootstrap.bandwidth_grid {
            Some(g) => g.0.clone(),
            None => bandwidth::default_candidates(sample, &domain, bandwidth::DEFAULT_CANDIDATE_COUNT)?,
        };
        Ok(BandwidthConfig {
            input: fs::canonicalize(input).unwrap_or_else(|_| input.to_path_buf()),
            ingest: ingest.clone(),
            method: parse_method(&args.detector)?,
            candidates,
            bootstrap_reps: args.bootstrap.bootstrap_reps,
            seed: args.bootstrap.seed,
            alpha: args.bootstrap.alpha,
            grid_spacing: args.detector.grid_spacing,
            domain,
        })
    })()
    .stage("configuration")?;

    let search = BandwidthSearchConfig::new(config.candidates.clone(), config.bootstrap_reps, config.seed)
        .with_alpha(config.alpha);
    let (domain, spacing) = (config.domain, config.grid_spacing);
    let r = bandwidth::select_bandwidth(sample, &search, &config.method, |h| detector_config(h, domain, spacing))
        .stage("bandwidth selection")?;
    let report = BandwidthReport {
        selected_bandwidth: r.selected_bandwidth,
        location: r.estimate.location,
        magnitude: r.estimate.magnitude,
        ci: [r.ci.0, r.ci.1],
        alpha: r.alpha,
        criterion_by_bandwidth: r.criterion_by_bandwidth,
    };
    let mut outputs = Outputs::default();
    outputs.add_json(BANDWIDTH_FILE, &report).stage("output")?;
    let m = RunManifest::new("bandwidth", &config, Some(config.seed), Some(loaded.digest), started, outputs.names())
        .stage("output")?;
    outputs.commit(&args.out_dir, &m).stage("output")
}

/// Reads a flat `key = value` file. Blank lines and lines starting with `#`
/// are ignored.
pub fn parse_key_values(text: &str) -> crate::error::Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| config_error(format!("line {}: expected key = value", i + 1)))?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

fn simulate_config(args: &SimulateArgs) -> crate::error::Result<(GeneratorConfig, bool)> {
    let mut kv = match &args.config {
        Some(p) => parse_key_values(&fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?)?,
        None => BTreeMap::new(),
    };
    let overrides = [
        ("design", args.design.clone()),
        ("n", args.n.map(|v| v.to_string())),
        ("u_dist", args.u_dist.clone()),
        ("x_dist", args.x_dist.clone()),
        ("seed", args.seed.map(|v| v.to_string())),
        ("sigma", args.sigma.map(|v| v.to_string())),
        ("var_ratio", args.var_ratio.map(|v| v.to_string())),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            match key {
                "sigma" => kv.remove("var_ratio"),
                "var_ratio" => kv.remove("sigma"),
                _ => None,
            };
            kv.insert(key.to_string(), v);
        }
    }
    if args.emit_latent {
        kv.insert("emit_latent".into(), "true".into());
    }

    let num = |key: &str, v: &str| -> crate::error::Result<f64> {
        v.parse().map_err(|_| config_error(format!("{key}: `{v}` is not a number")))
    };
    let design = Builtin::from_str(kv.get("design").map_or("ex1", String::as_str))?;
    let seed: u64 = match kv.get("seed") {
        Some(v) => v.parse().map_err(|_| config_error(format!("seed: `{v}` is not an integer")))?,
        None => 1,
    };
    let mut config = match design {
        Builtin::Example1 | Builtin::Example2 => GeneratorConfig::example(design, 100, UDist::Normal, seed),
        Builtin::Comparison => GeneratorConfig::comparison(XDist::Uniform01, seed),
        Builtin::PhiLike => GeneratorConfig::phi_like(seed),
    };
    let mut emit_latent = false;
    for (key, value) in &kv {
        match key.as_str() {
            "design" | "seed" => {}
            "n" => config.n = value.parse().map_err(|_| config_error(format!("n: `{value}` is not a count")))?,
            "u_dist" => config.u_dist = UDist::from_str(value)?,
            "x_dist" => config.x_dist = XDist::from_str(value)?,
            "sigma" => config.error_scale = ErrorScale::AbsoluteSigma(num(key, value)?),
            "var_ratio" => config.error_scale = ErrorScale::VarianceRatio(num(key, value)?),
            "emit_latent" => {
                emit_latent = matches!(value.to_ascii_lowercase().as_str(), "true" | "1" | "yes")
            }
            other => return Err(config_error(format!("unknown key `{other}`"))),
        }
    }
    Ok((config, emit_latent))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SimulateConfig {
    generator: GeneratorConfig,
    sigma: f64,
    emit_latent: bool,
}

pub fn simulate(args: &SimulateArgs) -> CmdResult {
    let started = manifest::timestamp();
    let (generator, emit_latent) = simulate_config(args).stage("configuration")?;
    let data = datagen::generate(&generator).stage("generation")?;
    let mut csv = Vec::new();
    io::write_sample_csv(&mut csv, &data.sample, emit_latent.then_some(data.latent.as_slice())).stage("output")?;
    let mut outputs = Outputs::default();
    outputs.add(SAMPLE_FILE, csv);
    let config = SimulateConfig {
        sigma: generator.sigma().stage("configuration")?,
        generator,
        emit_latent,
    };
    let m = RunManifest::new("simulate", &config, Some(config.generator.seed), None, started, outputs.names())
        .stage("output")?;
    outputs.commit(&args.out_dir, &m).stage("output")
}

fn replicate_design(args: &ReplicateArgs) -> crate::error::Result<ExperimentDesign> {
    let builtin = Builtin::from_str(&args.design)?;
    let mut design = match builtin {
        Builtin::Example1 | Builtin::Example2 => ExperimentDesign::example(
            builtin,
            args.n,
            UDist::from_str(&args.u_dist)?,
            args.reps,
            args.seed,
            args.bootstrap_reps,
        ),
        Builtin::Comparison => {
            let mut d = ExperimentDesign::comparison(XDist::from_str(&args.x_dist)?, args.reps, args.seed);
            d.bootstrap = (args.bootstrap_reps > 0).then(|| BootstrapPlan {
                candidates: Vec::new(),
                replicates: args.bootstrap_reps,
            });
            d
        }
        Builtin::PhiLike => return Err(config_error("replicate supports ex1, ex2 and compare")),
    };
    if let Some(sweep) = &args.sweep {
        design.bandwidth_sweep = sweep.0.clone();
    }
    if let Some(methods) = &args.methods {
        design.methods = methods.iter().map(|m| Method::from_str(m)).collect::<Result<_, _>>()?;
    }
    design.alpha = args.alpha;
    Ok(design)
}

pub fn replicate(args: &ReplicateArgs) -> CmdResult {
    let started = manifest::timestamp();
    let design = replicate_design(args).stage("configuration")?;
    let report = experiments::run_design(&design).stage("simulation")?;
    let table = experiments::format_table(&report);
    let mut outputs = Outputs::default();
    outputs.add_json(REPORT_FILE, &report).stage("output")?;
    outputs.add(TABLE_FILE, table.clone().into_bytes());
    if args.raw_csv {
        let mut csv = Vec::new();
        experiments::write_records_csv(&mut csv, &report).stage("output")?;
        outputs.add(RECORDS_FILE, csv);
    }
    let m = RunManifest::new("replicate", &design, Some(design.generator.seed), None, started, outputs.names())
        .stage("output")?;
    outputs.commit(&args.out_dir, &m).stage("output")?;
    print!("{table}");
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CurveConfig {
    input: PathBuf,
    ingest: IngestOptions,
    bandwidth: f64,
    grid: Vec<f64>,
}

pub fn curve(args: &CurveArgs) -> CmdResult {
    let started = manifest::timestamp();
    let input = require_input(&args.input)?;
    let ingest = ingest_options(&args.input);
    let loaded = load(input, &ingest)?;
    let grid = match &args.grid {
        Some(g) => g.0.clone(),
        None => {
            let d = loaded.sample.domain().stage("configuration")?;
            bandwidth::linspace(d.lo, d.hi, 201)
        }
    };
    let fit = baseline::llk_fit(&loaded.sample, &grid, args.bandwidth).stage("smoothing")?;
    let mut csv = Vec::new();
    let rows = fit.grid.iter().zip(&fit.values).filter_map(|(&x, v)| v.map(|v| (x, v)));
    io::write_pairs_csv(&mut csv, ["x", "value"], rows).stage("output")?;
    let mut outputs = Outputs::default();
    outputs.add(CURVE_FILE, csv);
    let config = CurveConfig {
        input: fs::canonicalize(input).unwrap_or_else(|_| input.to_path_buf()),
        ingest,
        bandwidth: args.bandwidth,
        grid,
    };
    let m = RunManifest::new("curve", &config, None, Some(loaded.digest), started, outputs.names()).stage("output")?;
    outputs.commit(&args.out_dir, &m).stage("output")
}
