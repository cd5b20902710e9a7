//! Seeded replication harness for the simulation studies.
//!
//! Every replication draws its own dataset from a seed derived from the
//! master seed and the replication index, runs each method at every bandwidth
//! of the sweep and, optionally, the bootstrap bandwidth selector. Summaries
//! are folds over the raw records in replication order, so a report is
//! reproducible bit-for-bit and every summary can be recomputed from its
//! records.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandwidth::{self, BandwidthSearchConfig};
use crate::datagen::{generate, Builtin, GeneratorConfig, JumpTruth, UDist, XDist};
use crate::error::{Error, Result};
use crate::estimators::{self, DetectorConfig, Method};
use crate::io;
use crate::rng;
use crate::sample::Domain;

/// A bandwidth whose failure rate exceeds this fraction is not eligible as `h_opt`.
pub const MAX_FAILURE_RATE: f64 = 0.05;

/// Bootstrap settings inside a replication. An empty candidate list reuses
/// the design's bandwidth sweep. Candidates infeasible for a dataset's domain
/// are dropped for that dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapPlan {
    pub candidates: Vec<f64>,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDesign {
    /// `generator.seed` is the master seed.
    pub generator: GeneratorConfig,
    pub replications: usize,
    pub bandwidth_sweep: Vec<f64>,
    pub methods: Vec<Method>,
    pub bootstrap: Option<BootstrapPlan>,
    pub alpha: f64,
    /// Detection domain; the range of each generated sample when absent.
    #[serde(default)]
    pub domain: Option<Domain>,
}

impl ExperimentDesign {
    /// 25 uniform values on `[0.10, 0.45]`.
    pub fn default_sweep() -> Vec<f64> {
        bandwidth::linspace(0.10, 0.45, 25)
    }

    /// 26 uniform values on `[0.05, 0.30]`, used for the n = 6000 comparison.
    pub fn comparison_sweep() -> Vec<f64> {
        bandwidth::linspace(0.05, 0.30, 26)
    }

    /// Example 1 or 2 design: robust detector only, bootstrap with `boot_reps`
    /// resamples per replication (none when zero).
    pub fn example(
        example: Builtin,
        n: usize,
        u_dist: UDist,
        replications: usize,
        seed: u64,
        boot_reps: usize,
    ) -> Self {
        Self {
            generator: GeneratorConfig::example(example, n, u_dist, seed),
            replications,
            bandwidth_sweep: Self::default_sweep(),
            methods: vec![Method::new_default()],
            bootstrap: (boot_reps > 0).then(|| BootstrapPlan {
                candidates: Vec::new(),
                replicates: boot_reps,
            }),
            alpha: bandwidth::DEFAULT_ALPHA,
            domain: None,
        }
    }

    /// Comparison design: both detectors, no bootstrap.
    pub fn comparison(x_dist: XDist, replications: usize, seed: u64) -> Self {
        Self {
            generator: GeneratorConfig::comparison(x_dist, seed),
            replications,
            bandwidth_sweep: Self::comparison_sweep(),
            methods: vec![Method::new_default(), Method::dke_default()],
            bootstrap: None,
            alpha: bandwidth::DEFAULT_ALPHA,
            domain: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidConfig("at least one replication is required".into()));
        }
        if self.bandwidth_sweep.is_empty() {
            return Err(Error::InvalidConfig("bandwidth sweep is empty".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("no methods selected".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!("alpha {} must lie in (0, 1)", self.alpha)));
        }
        Ok(())
    }

    pub fn replication_seed(&self, index: usize) -> u64 {
        rng::derive_seed(self.generator.seed, index as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub location: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapRecord {
    pub selected_bandwidth: f64,
    pub location: f64,
    pub magnitude: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRecord {
    pub method: Method,
    /// Aligned with the design's bandwidth sweep; `None` marks a failed detection.
    pub sweep: Vec<Option<Detection>>,
    pub bootstrap: Option<BootstrapRecord>,
    pub bootstrap_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub index: usize,
    pub seed: u64,
    pub methods: Vec<MethodRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub bandwidth: f64,
    /// `None` when more than 5% of replications failed at this bandwidth.
    pub mae: Option<f64>,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub sweep: Vec<SweepPoint>,
    pub h_opt: Option<f64>,
    pub mae_h_opt: Option<f64>,
    pub sdae: Option<f64>,
    pub mabjs: Option<f64>,
    pub sdabjs: Option<f64>,
    pub h_bt: Option<f64>,
    pub mae_h_bt: Option<f64>,
    pub cp: Option<f64>,
    pub bootstrap_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub design: ExperimentDesign,
    pub truth: JumpTruth,
    pub summaries: Vec<MethodSummary>,
    pub records: Vec<ReplicationRecord>,
    /// False when some method has no eligible bandwidth or more than 5% of
    /// its bootstrap runs failed.
    pub valid: bool,
}

impl SimulationReport {
    pub fn summary(&self, method_name: &str) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method.name() == method_name)
    }
}

pub fn run_design(design: &ExperimentDesign) -> Result<SimulationReport> {
    design.validate()?;
    let truth = design.generator.truth()?;
    let records = (0..design.replications)
        .into_par_iter()
        .map(|index| run_replication(design, index))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(design, truth, records))
}

fn run_replication(design: &ExperimentDesign, index: usize) -> Result<ReplicationRecord> {
    let seed = design.replication_seed(index);
    let generator = GeneratorConfig {
        seed,
        ..design.generator.clone()
    };
    let data = generate(&generator)?;
    let sample = &data.sample;
    let domain = match design.domain {
        Some(d) => d,
        None => sample.domain()?,
    };

    let mut methods = Vec::with_capacity(design.methods.len());
    for method in &design.methods {
        let sweep = design
            .bandwidth_sweep
            .iter()
            .map(|&h| {
                let config = DetectorConfig::new(h, domain).ok()?;
                method.detect(sample, &config).ok().map(|e| Detection {
                    location: e.location,
                    magnitude: e.magnitude,
                })
            })
            .collect();

        let (bootstrap, bootstrap_error) = match &design.bootstrap {
            None => (None, None),
            Some(plan) => {
                let listed = if plan.candidates.is_empty() {
                    &design.bandwidth_sweep
                } else {
                    &plan.candidates
                };
                let candidates: Vec<f64> = listed
                    .iter()
                    .copied()
                    .filter(|&h| estimators::is_feasible_bandwidth(h, &domain))
                    .collect();
                let outcome = {
                    let search = BandwidthSearchConfig::new(
                        candidates,
                        plan.replicates,
                        rng::derive_seed(seed, u64::MAX),
                    )
                    .with_alpha(design.alpha);
                    bandwidth::select_bandwidth(sample, &search, method, |h| {
                        DetectorConfig::new(h, domain)
                    })
                };
                match outcome {
                    Ok(r) => (
                        Some(BootstrapRecord {
                            selected_bandwidth: r.selected_bandwidth,
                            location: r.estimate.location,
                            magnitude: r.estimate.magnitude,
                            ci_lower: r.ci.0,
                            ci_upper: r.ci.1,
                            dropped: r.dropped_replicates,
                        }),
                        None,
                    ),
                    Err(e) => (None, Some(e.to_string())),
                }
            }
        };
        methods.push(MethodRecord {
            method: *method,
            sweep,
            bootstrap,
            bootstrap_error,
        });
    }
    Ok(ReplicationRecord {
        index,
        seed,
        methods,
    })
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Sample standard deviation (divisor `n - 1`); zero for a single value.
fn std_dev(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    if values.len() < 2 {
        return Some(0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - m).powi(2)).sum();
    Some((ss / (values.len() - 1) as f64).sqrt())
}

/// Recomputes every summary from raw records.
pub fn summarize(
    design: &ExperimentDesign,
    truth: JumpTruth,
    records: Vec<ReplicationRecord>,
) -> SimulationReport {
    let reps = records.len();
    let max_failures = (MAX_FAILURE_RATE * reps as f64).floor() as usize;
    let mut summaries = Vec::with_capacity(design.methods.len());
    let mut valid = true;

    for (m, method) in design.methods.iter().enumerate() {
        let detections_at = |j: usize| -> Vec<Detection> {
            records.iter().filter_map(|r| r.methods[m].sweep[j]).collect()
        };

        let sweep: Vec<SweepPoint> = design
            .bandwidth_sweep
            .iter()
            .enumerate()
            .map(|(j, &h)| {
                let found = detections_at(j);
                let failures = reps - found.len();
                let aes: Vec<f64> = found.iter().map(|d| (d.location - truth.location).abs()).collect();
                SweepPoint {
                    bandwidth: h,
                    mae: if failures <= max_failures { mean(&aes) } else { None },
                    failures,
                }
            })
            .collect();

        let best = sweep
            .iter()
            .enumerate()
            .filter_map(|(j, p)| p.mae.map(|v| (j, v, p.bandwidth)))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.2.total_cmp(&b.2)))
            .map(|(j, _, _)| j);

        let (h_opt, mae_h_opt, sdae, mabjs, sdabjs) = match best {
            Some(j) => {
                let found = detections_at(j);
                let aes: Vec<f64> = found.iter().map(|d| (d.location - truth.location).abs()).collect();
                let abjs: Vec<f64> = found.iter().map(|d| (d.magnitude - truth.magnitude).abs()).collect();
                (Some(sweep[j].bandwidth), mean(&aes), std_dev(&aes), mean(&abjs), std_dev(&abjs))
            }
            None => {
                valid = false;
                (None, None, None, None, None)
            }
        };

        let boots: Vec<BootstrapRecord> = records.iter().filter_map(|r| r.methods[m].bootstrap).collect();
        let bootstrap_failures = if design.bootstrap.is_some() { reps - boots.len() } else { 0 };
        if bootstrap_failures > max_failures {
            valid = false;
        }
        let selected: Vec<f64> = boots.iter().map(|b| b.selected_bandwidth).collect();
        let aes_bt: Vec<f64> = boots.iter().map(|b| (b.location - truth.location).abs()).collect();
        let covered: Vec<f64> = boots
            .iter()
            .map(|b| f64::from(u8::from(b.ci_lower <= truth.location && truth.location <= b.ci_upper)))
            .collect();

        summaries.push(MethodSummary {
            method: *method,
            sweep,
            h_opt,
            mae_h_opt,
            sdae,
            mabjs,
            sdabjs,
            h_bt: mean(&selected),
            mae_h_bt: mean(&aes_bt),
            cp: mean(&covered),
            bootstrap_failures,
        });
    }

    SimulationReport {
        design: design.clone(),
        truth,
        summaries,
        records,
        valid,
    }
}

/// Replication whose absolute error at sweep bandwidth `h` is the lower
/// median. Ties in error resolve to the lower replication index.
pub fn median_ae_sample(report: &SimulationReport, method_name: &str, h: f64) -> Option<usize> {
    let m = report.design.methods.iter().position(|x| x.name() == method_name)?;
    let j = report.design.bandwidth_sweep.iter().position(|&b| b == h)?;
    let mut aes: Vec<(f64, usize)> = report
        .records
        .iter()
        .filter_map(|r| {
            r.methods[m].sweep[j].map(|d| ((d.location - report.truth.location).abs(), r.index))
        })
        .collect();
    if aes.is_empty() {
        return None;
    }
    aes.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Some(aes[(aes.len() - 1) / 2].1)
}

/// Raw records as CSV: one `sweep` row per (replication, method, bandwidth)
/// and one `bootstrap` row per (replication, method). Failed detections leave
/// the estimate columns empty.
pub fn write_records_csv<W: std::io::Write>(out: W, report: &SimulationReport) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| Error::Io(e.to_string());
    wtr.write_record([
        "replication", "seed", "method", "kind", "bandwidth", "location", "magnitude", "ci_lower", "ci_upper",
    ])
    .map_err(io_err)?;
    let num = |v: Option<f64>| v.map(io::format_f64).unwrap_or_default();
    for r in &report.records {
        for m in &r.methods {
            let (idx, seed, name) = (r.index.to_string(), r.seed.to_string(), m.method.name());
            for (h, d) in report.design.bandwidth_sweep.iter().zip(&m.sweep) {
                wtr.write_record([
                    idx.as_str(),
                    &seed,
                    name,
                    "sweep",
                    &io::format_f64(*h),
                    &num(d.map(|d| d.location)),
                    &num(d.map(|d| d.magnitude)),
                    "",
                    "",
                ])
                .map_err(io_err)?;
            }
            if report.design.bootstrap.is_some() {
                let b = m.bootstrap;
                wtr.write_record([
                    idx.as_str(),
                    &seed,
                    name,
                    "bootstrap",
                    &num(b.map(|b| b.selected_bandwidth)),
                    &num(b.map(|b| b.location)),
                    &num(b.map(|b| b.magnitude)),
                    &num(b.map(|b| b.ci_lower)),
                    &num(b.map(|b| b.ci_upper)),
                ])
                .map_err(io_err)?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

fn cell(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.digits$}"))
}

/// Text table with one row per method.
pub fn format_table(report: &SimulationReport) -> String {
    let g = &report.design.generator;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "n = {}  f_X = {}  f_U = {}  replications = {}  truth: s = {}, d = {:.4}",
        g.n,
        g.x_dist,
        g.u_dist,
        report.design.replications,
        report.truth.location,
        report.truth.magnitude
    );
    let _ = writeln!(
        out,
        "{:<6} {:>8} {:>8} {:>10} {:>10} {:>6} {:>9} {:>9} {:>9} {:>9}",
        "method", "h_opt", "h_bt", "MAE(hopt)", "MAE(hbt)", "CP", "SDAE", "MABJS", "SDABJS", "failures"
    );
    for s in &report.summaries {
        let failures: usize = s.sweep.iter().map(|p| p.failures).sum::<usize>() + s.bootstrap_failures;
        let _ = writeln!(
            out,
            "{:<6} {:>8} {:>8} {:>10} {:>10} {:>6} {:>9} {:>9} {:>9} {:>9}",
            s.method.name(),
            cell(s.h_opt, 4),
            cell(s.h_bt, 4),
            cell(s.mae_h_opt, 4),
            cell(s.mae_h_bt, 4),
            cell(s.cp, 2),
            cell(s.sdae, 5),
            cell(s.mabjs, 5),
            cell(s.sdabjs, 5),
            failures
        );
    }
    if !report.valid {
        let _ = writeln!(out, "WARNING: report invalid (too many failed replications)");
    }
    out
}
