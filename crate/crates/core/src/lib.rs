//! Jump-point detection for nonparametric regression when the predictor is
//! observed with additive measurement error of unknown distribution.
//!
//! The detector compares error-robust one-sided kernel estimates of the
//! regression mean on either side of each candidate location and reports the
//! location of the largest discrepancy. Observations near a jump are
//! down-weighted according to how far their own one-sided estimate sits from
//! an anchor estimate taken one bandwidth away, which keeps mislocated
//! observations from smearing the jump.
//!
//! Modules:
//! - [`kernels`]: one-sided kernels on `[0, 1]` and their left mirrors.
//! - [`estimators`]: one-sided estimators and the jump locator.
//! - [`baseline`]: the difference-of-kernel-estimates comparator and a local
//!   linear smoother for display curves.
//! - [`bandwidth`]: bootstrap bandwidth selection and percentile intervals.
//! - [`datagen`]: synthetic designs with measurement error.
//! - [`experiments`]: seeded replication harness and summary metrics.
//! - [`io`]: CSV ingestion and fixed-precision output.

pub mod bandwidth;
pub mod baseline;
pub mod datagen;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod io;
pub mod kernels;
pub mod rng;
pub mod sample;

#[cfg(feature = "cli")]
pub mod cli;

pub use bandwidth::{
    bootstrap_resample, percentile_ci, select_bandwidth, BandwidthSearchConfig, BootstrapResult,
};
pub use baseline::{dke_detect, llk_fit, LlkCurve};
pub use datagen::{generate, GeneratedData, GeneratorConfig, JumpTruth, ResponseModel};
pub use error::{Error, Result};
pub use estimators::{
    conventional_onesided, detect_jump, robust_onesided, shifted_onesided, DetectorConfig,
    JumpEstimate, Method, Side,
};
pub use experiments::{run_design, ExperimentDesign, SimulationReport};
pub use kernels::{KernelFamily, KernelSpec, Support};
pub use sample::{Domain, ObservedSample};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
