//! Comparator detector and display smoother.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{conventional_onesided, scan_grid, DetectorConfig, JumpEstimate, Side};
use crate::kernels::KernelFamily;
use crate::sample::ObservedSample;

/// Difference of conventional one-sided estimates (DKE). Treats `W` as if it
/// were the error-free predictor.
pub fn dke_detect(
    sample: &ObservedSample,
    config: &DetectorConfig,
    kernel: KernelFamily,
) -> Result<JumpEstimate> {
    let h = config.bandwidth;
    scan_grid(config, |x| {
        let right = conventional_onesided(sample, x, h, Side::Right, kernel).ok()?;
        let left = conventional_onesided(sample, x, h, Side::Left, kernel).ok()?;
        Some(right - left)
    })
}

/// Local linear fit evaluated on a grid. `values[j]` is `None` where the fit
/// was singular.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlkCurve {
    pub grid: Vec<f64>,
    pub values: Vec<Option<f64>>,
    pub bandwidth: f64,
}

/// Two-sided Epanechnikov on `[-1, 1]`.
#[inline]
fn epanechnikov2(u: f64) -> f64 {
    if (-1.0..=1.0).contains(&u) {
        0.75 * (1.0 - u * u)
    } else {
        0.0
    }
}

/// Local linear estimate at a single point.
pub fn llk_at(sample: &ObservedSample, x: f64, h: f64) -> Result<f64> {
    let (w, y) = (sample.w(), sample.y());
    let (mut s0, mut s1, mut s2, mut t0, mut t1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut first: Option<f64> = None;
    let mut distinct = false;
    for i in sample.window(x - h, x + h) {
        let k = epanechnikov2((w[i] - x) / h);
        if k <= 0.0 {
            continue;
        }
        match first {
            None => first = Some(w[i]),
            Some(v) if v != w[i] => distinct = true,
            _ => {}
        }
        let d = w[i] - x;
        s0 += k;
        s1 += k * d;
        s2 += k * d * d;
        t0 += k * y[i];
        t1 += k * d * y[i];
    }
    let det = s0 * s2 - s1 * s1;
    if !distinct || det <= 0.0 {
        return Err(Error::SingularFit { x });
    }
    Ok((s2 * t0 - s1 * t1) / det)
}

pub fn llk_fit(sample: &ObservedSample, grid: &[f64], h: f64) -> Result<LlkCurve> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidConfig(format!("bandwidth {h} must be positive")));
    }
    let values = grid.iter().map(|&x| llk_at(sample, x, h).ok()).collect();
    Ok(LlkCurve {
        grid: grid.to_vec(),
        values,
        bandwidth: h,
    })
}
