//! Bootstrap bandwidth selection and percentile confidence intervals.
//!
//! For each candidate bandwidth the detector runs on the original sample and
//! on `B` resamples drawn with replacement. The selected bandwidth minimizes
//! the mean absolute deviation between the original location and the
//! resampled locations. The resampled locations at the selected bandwidth then
//! give a percentile interval for the jump location.
//!
//! Resample `k` is drawn from [`rng::stream`]`(seed, k)`, so every candidate
//! sees the same resamples and results do not depend on thread count.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{DetectorConfig, JumpEstimate, Method};
use crate::rng;
use crate::sample::{Domain, ObservedSample};

pub const DEFAULT_REPLICATES: usize = 999;
pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_CANDIDATE_COUNT: usize = 15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthSearchConfig {
    pub candidates: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    pub alpha: f64,
}

impl BandwidthSearchConfig {
    pub fn new(candidates: Vec<f64>, replicates: usize, seed: u64) -> Self {
        Self {
            candidates,
            replicates,
            seed,
            alpha: DEFAULT_ALPHA,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.candidates.is_empty() {
            return Err(Error::InvalidConfig("bandwidth candidate list is empty".into()));
        }
        if let Some(h) = self.candidates.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidConfig(format!("bandwidth candidate {h} must be positive")));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("at least one bootstrap replicate is required".into()));
        }
        check_alpha(self.alpha)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("alpha {alpha} must lie in (0, 1)")))
    }
}

/// Default candidates: `count` log-spaced values from four times the median
/// gap between sorted predictors up to just below a quarter of the domain width.
pub fn default_candidates(sample: &ObservedSample, domain: &Domain, count: usize) -> Result<Vec<f64>> {
    let mut gaps: Vec<f64> = sample.w().windows(2).map(|p| p[1] - p[0]).collect();
    gaps.sort_by(f64::total_cmp);
    let median_gap = gaps[(gaps.len() - 1) / 2];
    let hi = domain.width() / 4.0 * (1.0 - 1e-6);
    let lo = 4.0 * median_gap;
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::InvalidConfig(format!(
            "cannot build a bandwidth grid: lower end {lo} is not below upper end {hi}"
        )));
    }
    Ok(log_spaced(lo, hi, count))
}

pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|j| (a + (b - a) * j as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|j| lo + (hi - lo) * j as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Draws `w.len()` pairs with replacement, returned sorted by `w` when the
/// input is sorted. Works for a single pair.
pub fn resample_pairs<R: Rng + ?Sized>(w: &[f64], y: &[f64], rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let n = w.len();
    let mut idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    idx.sort_unstable();
    (idx.iter().map(|&i| w[i]).collect(), idx.iter().map(|&i| y[i]).collect())
}

/// One nonparametric bootstrap resample of `(W_i, Y_i)` pairs.
pub fn bootstrap_resample<R: Rng + ?Sized>(sample: &ObservedSample, rng: &mut R) -> ObservedSample {
    let (w, y) = resample_pairs(sample.w(), sample.y(), rng);
    ObservedSample::new(w, y).expect("resample of a valid sample is valid")
}

/// Empirical quantile by inverting the empirical distribution function:
/// the smallest order statistic `x_(k)` with `k/n >= p`.
pub fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let k = ((n as f64 * p) - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    sorted[k - 1]
}

/// `(q_{alpha/2}, q_{1-alpha/2})` of the replicate locations.
pub fn percentile_ci(replicate_locations: &[f64], alpha: f64) -> Result<(f64, f64)> {
    if replicate_locations.is_empty() {
        return Err(Error::InvalidConfig("no replicate locations".into()));
    }
    check_alpha(alpha)?;
    let mut sorted = replicate_locations.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok((
        empirical_quantile(&sorted, alpha / 2.0),
        empirical_quantile(&sorted, 1.0 - alpha / 2.0),
    ))
}

/// Objective value at one candidate bandwidth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionPoint {
    pub bandwidth: f64,
    /// Mean `|s_hat(h) - s_tilde_k(h)|` over successful replicates; `None`
    /// when the candidate failed on the original sample or on every resample.
    pub criterion: Option<f64>,
    pub original_location: Option<f64>,
    /// Replicates that produced no estimate at this bandwidth.
    pub dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub selected_bandwidth: f64,
    /// Detection on the original sample at the selected bandwidth.
    pub estimate: JumpEstimate,
    pub criterion_by_bandwidth: Vec<CriterionPoint>,
    /// Resampled locations at the selected bandwidth (dropped replicates omitted).
    pub replicate_locations: Vec<f64>,
    pub ci: (f64, f64),
    pub alpha: f64,
    /// Replicates dropped at the selected bandwidth.
    pub dropped_replicates: usize,
}

/// Bootstrap bandwidth selection. `config_for` maps a candidate bandwidth to
/// the detector configuration used for the original sample and every resample.
pub fn select_bandwidth<F>(
    sample: &ObservedSample,
    search: &BandwidthSearchConfig,
    method: &Method,
    config_for: F,
) -> Result<BootstrapResult>
where
    F: Fn(f64) -> Result<DetectorConfig>,
{
    search.validate()?;

    let mut configs = Vec::with_capacity(search.candidates.len());
    let mut originals = Vec::with_capacity(search.candidates.len());
    for &h in &search.candidates {
        let config = config_for(h)?;
        let estimate = match method.detect(sample, &config) {
            Ok(e) => Some(e),
            Err(Error::NoValidGridPoint) => None,
            Err(e) => return Err(e),
        };
        configs.push(config);
        originals.push(estimate);
    }
    if originals.iter().all(Option::is_none) {
        return Err(Error::AllCandidatesFailed);
    }

    // replicates[k][c]: location from resample k at candidate c.
    let replicates: Vec<Vec<Option<f64>>> = (0..search.replicates)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng::stream(search.seed, k as u64);
            let resample = bootstrap_resample(sample, &mut rng);
            configs
                .iter()
                .zip(&originals)
                .map(|(config, original)| {
                    original.as_ref()?;
                    method.detect(&resample, config).ok().map(|e| e.location)
                })
                .collect()
        })
        .collect();

    let mut points = Vec::with_capacity(configs.len());
    for (c, (h, original)) in search.candidates.iter().zip(&originals).enumerate() {
        let original_location = original.as_ref().map(|e| e.location);
        let locations: Vec<f64> = replicates.iter().filter_map(|r| r[c]).collect();
        let criterion = match original_location {
            Some(s) if !locations.is_empty() => {
                Some(locations.iter().map(|v| (s - v).abs()).sum::<f64>() / locations.len() as f64)
            }
            _ => None,
        };
        points.push(CriterionPoint {
            bandwidth: *h,
            criterion,
            original_location,
            dropped: search.replicates - locations.len(),
        });
    }

    // Minimum criterion; ties go to the smallest bandwidth.
    let best = points
        .iter()
        .enumerate()
        .filter_map(|(c, p)| p.criterion.map(|v| (c, v, p.bandwidth)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.2.total_cmp(&b.2)))
        .map(|(c, _, _)| c)
        .ok_or(Error::AllCandidatesFailed)?;

    let replicate_locations: Vec<f64> = replicates.iter().filter_map(|r| r[best]).collect();
    let ci = percentile_ci(&replicate_locations, search.alpha)?;
    let estimate = originals[best].clone().expect("selected candidate has an estimate");
    Ok(BootstrapResult {
        selected_bandwidth: search.candidates[best],
        estimate,
        dropped_replicates: points[best].dropped,
        criterion_by_bandwidth: points,
        replicate_locations,
        ci,
        alpha: search.alpha,
    })
}
