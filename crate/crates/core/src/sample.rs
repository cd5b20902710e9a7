use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed predictor interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidConfig(format!(
                "domain [{lo}, {hi}] must be a finite interval with lo < hi"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn reflect(&self, v: f64) -> f64 {
        self.lo + self.hi - v
    }
}

/// Observed pairs `(W_i, Y_i)`, sorted ascending by `W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedSample {
    w: Vec<f64>,
    y: Vec<f64>,
}

impl ObservedSample {
    /// Validates and sorts by `w`, permuting `y` in lockstep. Ties keep their input order.
    pub fn new(w: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if w.len() != y.len() {
            return Err(Error::InvalidSample(format!(
                "w has {} values but y has {}",
                w.len(),
                y.len()
            )));
        }
        if w.len() < 2 {
            return Err(Error::InvalidSample(format!(
                "need at least 2 observations, got {}",
                w.len()
            )));
        }
        if let Some(i) = w.iter().zip(&y).position(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(Error::InvalidSample(format!("non-finite value at index {i}")));
        }
        if w.windows(2).all(|p| p[0] <= p[1]) {
            return Ok(Self { w, y });
        }
        let mut order: Vec<usize> = (0..w.len()).collect();
        order.sort_by(|&a, &b| w[a].total_cmp(&w[b]));
        let w_sorted = order.iter().map(|&i| w[i]).collect();
        let y_sorted = order.iter().map(|&i| y[i]).collect();
        Ok(Self {
            w: w_sorted,
            y: y_sorted,
        })
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// `[min(w), max(w)]`. Fails when every predictor value is identical.
    pub fn domain(&self) -> Result<Domain> {
        Domain::new(self.w[0], self.w[self.w.len() - 1])
    }

    pub fn y_range(&self) -> (f64, f64) {
        self.y
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Indices `i` with `lo <= w[i] <= hi`.
    #[inline]
    pub fn window(&self, lo: f64, hi: f64) -> Range<usize> {
        let start = self.w.partition_point(|&v| v < lo);
        let end = start + self.w[start..].partition_point(|&v| v <= hi);
        start..end
    }

    /// Reflects predictors through the midpoint of `domain` (`w -> lo + hi - w`).
    pub fn reflected(&self, domain: &Domain) -> Self {
        let w = self.w.iter().rev().map(|&v| domain.reflect(v)).collect();
        let y = self.y.iter().rev().copied().collect();
        Self { w, y }
    }
}
