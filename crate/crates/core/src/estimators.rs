//! One-sided kernel estimators and the jump locator.
//!
//! For a right-side estimate at `x` with bandwidth `h`:
//!
//! - the *conventional* estimate averages `Y_i` with weights `K_r((W_i - x)/h)`,
//!   i.e. over `W_i` in `[x, x + h]`;
//! - the *shifted* estimate is the conventional estimate centred at `x + h`,
//!   so it only uses `W_i` in `[x + h, x + 2h]`, away from a possible jump at `x`;
//! - the *robust* estimate reuses the primary window `[x, x + h]` but multiplies
//!   each weight by `K*(|m*(W_i+) - anchor| / rho)`, where `m*(W_i+)` is the
//!   conventional estimate at `W_i`, `anchor` is the shifted estimate and `rho`
//!   is the largest such discrepancy within the window.
//!
//! Left-side estimates mirror every construction. The detector scans a grid
//! inside `(a + h, b - h)`, so both primary windows stay within the domain,
//! and returns the location maximizing `|m(x+) - m(x-)|`. Grid points whose
//! shifted anchor falls beyond the data are skipped.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baseline;
use crate::error::{Error, Result};
use crate::kernels::{KernelFamily, KernelSpec};
use crate::sample::{Domain, ObservedSample};

/// Grid points are spaced at most `bandwidth / DEFAULT_GRID_DIVISOR` apart.
pub const DEFAULT_GRID_DIVISOR: f64 = 20.0;

/// Maxima closer than this are ties; the smallest location wins.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// The search region excludes `SEARCH_MARGIN * h` at each end of the domain.
pub const SEARCH_MARGIN: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn kernel(self, family: KernelFamily) -> KernelSpec {
        match self {
            Side::Right => KernelSpec::right(family),
            Side::Left => KernelSpec::left(family),
        }
    }

    /// Closed window `[x, x + h]` or `[x - h, x]`.
    #[inline]
    fn window(self, x: f64, h: f64) -> (f64, f64) {
        match self {
            Side::Right => (x, x + h),
            Side::Left => (x - h, x),
        }
    }

    #[inline]
    fn shift(self, x: f64, h: f64) -> f64 {
        match self {
            Side::Right => x + h,
            Side::Left => x - h,
        }
    }
}

/// Conventional one-sided kernel estimate of `m(x+)` or `m(x-)`.
pub fn conventional_onesided(
    sample: &ObservedSample,
    x: f64,
    h: f64,
    side: Side,
    kernel: KernelFamily,
) -> Result<f64> {
    let spec = side.kernel(kernel);
    let (lo, hi) = side.window(x, h);
    let (w, y) = (sample.w(), sample.y());
    let mut num = 0.0;
    let mut den = 0.0;
    for i in sample.window(lo, hi) {
        let k = spec.evaluate((w[i] - x) / h);
        num += y[i] * k;
        den += k;
    }
    if den > 0.0 {
        Ok(num / den)
    } else {
        Err(Error::EmptyWindow)
    }
}

/// One-step-shifted estimate: the conventional estimate centred at `x ± h`.
pub fn shifted_onesided(
    sample: &ObservedSample,
    x: f64,
    h: f64,
    side: Side,
    kernel: KernelFamily,
) -> Result<f64> {
    conventional_onesided(sample, side.shift(x, h), h, side, kernel)
}

/// Double-kernel estimate robust to measurement error in the predictor.
pub fn robust_onesided(
    sample: &ObservedSample,
    x: f64,
    h: f64,
    side: Side,
    kr: KernelFamily,
    kstar: KernelFamily,
) -> Result<f64> {
    robust_with(sample, x, h, side, kr, kstar, |i| {
        conventional_onesided(sample, sample.w()[i], h, side, kr).ok()
    })
}

/// Core of [`robust_onesided`], with the per-observation conventional
/// estimates supplied by `local` (`None` excludes the observation).
fn robust_with(
    sample: &ObservedSample,
    x: f64,
    h: f64,
    side: Side,
    kr: KernelFamily,
    kstar: KernelFamily,
    local: impl Fn(usize) -> Option<f64>,
) -> Result<f64> {
    let anchor = shifted_onesided(sample, x, h, side, kr)?;
    let spec = side.kernel(kr);
    let (lo, hi) = side.window(x, h);
    let (w, y) = (sample.w(), sample.y());

    let range = sample.window(lo, hi);
    let mut terms = Vec::with_capacity(range.len());
    let mut rho = 0.0f64;
    for i in range {
        let Some(m) = local(i) else { continue };
        let gap = (m - anchor).abs();
        rho = rho.max(gap);
        terms.push((i, spec.evaluate((w[i] - x) / h), gap));
    }

    let mut num = 0.0;
    let mut den = 0.0;
    for (i, k, gap) in terms {
        let t = if rho > 0.0 { gap / rho } else { 0.0 };
        let weight = k * kstar.profile(t);
        num += y[i] * weight;
        den += weight;
    }
    if den > 0.0 {
        Ok(num / den)
    } else {
        Err(Error::EmptyWindow)
    }
}

/// Conventional one-sided estimates at every observation, for one bandwidth.
struct LocalEstimates {
    right: Vec<Option<f64>>,
    left: Vec<Option<f64>>,
}

impl LocalEstimates {
    fn compute(sample: &ObservedSample, h: f64, kernel: KernelFamily) -> Self {
        let at = |side| {
            sample
                .w()
                .iter()
                .map(|&wi| conventional_onesided(sample, wi, h, side, kernel).ok())
                .collect()
        };
        Self {
            right: at(Side::Right),
            left: at(Side::Left),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub bandwidth: f64,
    pub search_grid: Vec<f64>,
    pub domain: Domain,
}

impl DetectorConfig {
    /// Uniform grid with spacing at most `bandwidth / 20`.
    pub fn new(bandwidth: f64, domain: Domain) -> Result<Self> {
        Self::with_spacing(bandwidth, domain, bandwidth / DEFAULT_GRID_DIVISOR)
    }

    /// Uniform grid over the open search region `(a + h, b - h)`, with
    /// spacing at most `spacing`. Points sit at cell midpoints so the grid is
    /// symmetric under reflection of the domain.
    pub fn with_spacing(bandwidth: f64, domain: Domain, spacing: f64) -> Result<Self> {
        check_bandwidth(bandwidth, &domain)?;
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidConfig(format!("grid spacing {spacing} must be positive")));
        }
        let (lo, hi) = search_region(bandwidth, &domain);
        let cells = ((hi - lo) / spacing - 1e-9).ceil().max(1.0) as usize;
        let step = (hi - lo) / cells as f64;
        let grid = (0..cells).map(|j| lo + (j as f64 + 0.5) * step).collect();
        Self::with_grid(bandwidth, domain, grid)
    }

    pub fn with_grid(bandwidth: f64, domain: Domain, search_grid: Vec<f64>) -> Result<Self> {
        check_bandwidth(bandwidth, &domain)?;
        if search_grid.is_empty() {
            return Err(Error::InvalidConfig("search grid is empty".into()));
        }
        let (lo, hi) = search_region(bandwidth, &domain);
        if let Some(x) = search_grid.iter().find(|&&x| !(x > lo && x < hi)) {
            return Err(Error::InvalidConfig(format!(
                "grid point {x} lies outside the search region ({lo}, {hi})"
            )));
        }
        Ok(Self {
            bandwidth,
            search_grid,
            domain,
        })
    }

    pub fn search_region(&self) -> (f64, f64) {
        search_region(self.bandwidth, &self.domain)
    }
}

fn search_region(h: f64, domain: &Domain) -> (f64, f64) {
    (domain.lo + SEARCH_MARGIN * h, domain.hi - SEARCH_MARGIN * h)
}

/// True when the search region `(a + h, b - h)` is nonempty.
pub fn is_feasible_bandwidth(h: f64, domain: &Domain) -> bool {
    h < domain.width() / (2.0 * SEARCH_MARGIN)
}

fn check_bandwidth(h: f64, domain: &Domain) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidConfig(format!("bandwidth {h} must be positive")));
    }
    if !is_feasible_bandwidth(h, domain) {
        return Err(Error::InvalidConfig(format!(
            "bandwidth {h} must be below half the domain width {}",
            domain.width()
        )));
    }
    Ok(())
}

/// One point of the detection criterion `|m(x+) - m(x-)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpEstimate {
    pub location: f64,
    /// Right limit minus left limit at `location`.
    pub magnitude: f64,
    pub bandwidth: f64,
    /// Criterion at every grid point where both sides were defined.
    pub diff_curve: Vec<CurvePoint>,
}

/// Locates the jump with the error-robust double-kernel estimates.
pub fn detect_jump(
    sample: &ObservedSample,
    config: &DetectorConfig,
    kr: KernelFamily,
    kstar: KernelFamily,
) -> Result<JumpEstimate> {
    let h = config.bandwidth;
    let locals = LocalEstimates::compute(sample, h, kr);
    scan_grid(config, |x| {
        let right = robust_with(sample, x, h, Side::Right, kr, kstar, |i| locals.right[i]).ok()?;
        let left = robust_with(sample, x, h, Side::Left, kr, kstar, |i| locals.left[i]).ok()?;
        Some(right - left)
    })
}

/// Evaluates the signed difference at every grid point and takes the argmax
/// of its absolute value. Points where `signed_diff` is `None` are skipped.
pub(crate) fn scan_grid(
    config: &DetectorConfig,
    signed_diff: impl Fn(f64) -> Option<f64>,
) -> Result<JumpEstimate> {
    let signed: Vec<(f64, f64)> = config
        .search_grid
        .iter()
        .filter_map(|&x| signed_diff(x).map(|d| (x, d)))
        .collect();
    let peak = signed
        .iter()
        .map(|&(_, d)| d.abs())
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
        .ok_or(Error::NoValidGridPoint)?;
    let (location, magnitude) = signed
        .iter()
        .copied()
        .filter(|&(_, d)| d.abs() >= peak - TIE_TOLERANCE)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or(Error::NoValidGridPoint)?;
    Ok(JumpEstimate {
        location,
        magnitude,
        bandwidth: config.bandwidth,
        diff_curve: signed
            .into_iter()
            .map(|(x, d)| CurvePoint { x, diff: d.abs() })
            .collect(),
    })
}

/// Which detection procedure to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Method {
    /// Double-kernel estimator robust to predictor measurement error.
    New { kr: KernelFamily, kstar: KernelFamily },
    /// Difference of conventional one-sided estimates; ignores measurement error.
    Dke { kernel: KernelFamily },
}

impl Method {
    pub fn new_default() -> Self {
        Method::New {
            kr: KernelFamily::Epanechnikov,
            kstar: KernelFamily::Epanechnikov,
        }
    }

    pub fn dke_default() -> Self {
        Method::Dke {
            kernel: KernelFamily::Epanechnikov,
        }
    }

    /// Same procedure with every kernel replaced by `family`.
    pub fn with_kernel(self, family: KernelFamily) -> Self {
        match self {
            Method::New { .. } => Method::New {
                kr: family,
                kstar: family,
            },
            Method::Dke { .. } => Method::Dke { kernel: family },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::New { .. } => "new",
            Method::Dke { .. } => "dke",
        }
    }

    pub fn detect(&self, sample: &ObservedSample, config: &DetectorConfig) -> Result<JumpEstimate> {
        match *self {
            Method::New { kr, kstar } => detect_jump(sample, config, kr, kstar),
            Method::Dke { kernel } => baseline::dke_detect(sample, config, kernel),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "new" => Ok(Method::new_default()),
            "dke" => Ok(Method::dke_default()),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}
