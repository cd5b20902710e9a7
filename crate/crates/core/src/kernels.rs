//! One-sided kernels.
//!
//! Every family is a non-increasing density on `[0, 1]`. The right-support
//! kernel evaluates the profile at `u`; its left mirror evaluates it at `-u`,
//! so `K_l(u) = K_r(-u)` holds exactly. Both supports are closed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    /// `(3/2)(1 - t^2)` on `[0, 1]`.
    #[default]
    Epanechnikov,
    /// `2(1 - t)` on `[0, 1]`.
    Triangular,
    /// `1` on `[0, 1]`.
    Uniform,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 3] = [
        KernelFamily::Epanechnikov,
        KernelFamily::Triangular,
        KernelFamily::Uniform,
    ];

    /// Density profile on `[0, 1]`; zero elsewhere (and for NaN).
    #[inline]
    pub fn profile(self, t: f64) -> f64 {
        if !(0.0..=1.0).contains(&t) {
            return 0.0;
        }
        match self {
            KernelFamily::Epanechnikov => 1.5 * (1.0 - t * t),
            KernelFamily::Triangular => 2.0 * (1.0 - t),
            KernelFamily::Uniform => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Epanechnikov => "epanechnikov",
            KernelFamily::Triangular => "triangular",
            KernelFamily::Uniform => "uniform",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "epanechnikov" | "epa" => Ok(KernelFamily::Epanechnikov),
            "triangular" | "tri" => Ok(KernelFamily::Triangular),
            "uniform" | "box" => Ok(KernelFamily::Uniform),
            other => Err(Error::InvalidConfig(format!("unknown kernel `{other}`"))),
        }
    }
}

/// Orientation of a one-sided kernel's support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Support {
    /// `[0, 1]`
    RightSupport01,
    /// `[-1, 0]`
    LeftSupportNeg10,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub side: Support,
}

impl KernelSpec {
    pub const fn right(family: KernelFamily) -> Self {
        Self {
            family,
            side: Support::RightSupport01,
        }
    }

    pub const fn left(family: KernelFamily) -> Self {
        Self {
            family,
            side: Support::LeftSupportNeg10,
        }
    }

    pub const fn mirrored(self) -> Self {
        let side = match self.side {
            Support::RightSupport01 => Support::LeftSupportNeg10,
            Support::LeftSupportNeg10 => Support::RightSupport01,
        };
        Self {
            family: self.family,
            side,
        }
    }

    /// Kernel weight at `u`. Exactly zero outside the support.
    #[inline]
    pub fn evaluate(&self, u: f64) -> f64 {
        match self.side {
            Support::RightSupport01 => self.family.profile(u),
            Support::LeftSupportNeg10 => self.family.profile(-u),
        }
    }

    /// Closed support as `(lo, hi)`.
    pub fn support(&self) -> (f64, f64) {
        match self.side {
            Support::RightSupport01 => (0.0, 1.0),
            Support::LeftSupportNeg10 => (-1.0, 0.0),
        }
    }
}

/// Free-function form of [`KernelSpec::evaluate`].
#[inline]
pub fn evaluate(spec: &KernelSpec, u: f64) -> f64 {
    spec.evaluate(u)
}
