//! Synthetic data with measurement error in the predictor.
//!
//! A draw takes a latent `X ~ f_X`, a standardized error `U ~ f_U` (mean 0,
//! variance 1), sets `W = X + sigma * U` and samples `Y | X` from a Gaussian or
//! Bernoulli response whose mean is a piecewise closed-form function of `X`.

use std::cmp::Ordering;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::ObservedSample;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum XDist {
    Uniform01,
    Beta { a: f64, b: f64 },
    /// `lo + (hi - lo) * Beta(a, b)`.
    ScaledBeta { a: f64, b: f64, lo: f64, hi: f64 },
}

impl XDist {
    pub fn variance(&self) -> f64 {
        match *self {
            XDist::Uniform01 => 1.0 / 12.0,
            XDist::Beta { a, b } => beta_variance(a, b),
            XDist::ScaledBeta { a, b, lo, hi } => beta_variance(a, b) * (hi - lo).powi(2),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            XDist::Uniform01 | XDist::Beta { .. } => (0.0, 1.0),
            XDist::ScaledBeta { lo, hi, .. } => (lo, hi),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            XDist::Uniform01 => Ok(()),
            XDist::Beta { a, b } | XDist::ScaledBeta { a, b, .. } if !(a > 0.0 && b > 0.0) => Err(
                Error::InvalidConfig(format!("beta parameters ({a}, {b}) must be positive")),
            ),
            XDist::ScaledBeta { lo, hi, .. } if lo.partial_cmp(&hi) != Some(Ordering::Less) => {
                Err(Error::InvalidConfig(format!("support [{lo}, {hi}] is empty")))
            }
            _ => Ok(()),
        }
    }

    fn sampler(&self) -> Result<XSampler> {
        self.validate()?;
        Ok(match *self {
            XDist::Uniform01 => XSampler::Uniform,
            XDist::Beta { a, b } => XSampler::Beta(beta(a, b)?, 0.0, 1.0),
            XDist::ScaledBeta { a, b, lo, hi } => XSampler::Beta(beta(a, b)?, lo, hi),
        })
    }
}

fn beta(a: f64, b: f64) -> Result<Beta<f64>> {
    Beta::new(a, b).map_err(|e| Error::InvalidConfig(format!("beta({a}, {b}): {e}")))
}

fn beta_variance(a: f64, b: f64) -> f64 {
    a * b / ((a + b).powi(2) * (a + b + 1.0))
}

enum XSampler {
    Uniform,
    Beta(Beta<f64>, f64, f64),
}

impl XSampler {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            XSampler::Uniform => rng.random::<f64>(),
            XSampler::Beta(d, lo, hi) => lo + (hi - lo) * d.sample(rng),
        }
    }
}

impl fmt::Display for XDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XDist::Uniform01 => write!(f, "unif"),
            XDist::Beta { a, b } => write!(f, "beta({a},{b})"),
            XDist::ScaledBeta { a, b, lo, hi } => write!(f, "beta({a},{b})@[{lo},{hi}]"),
        }
    }
}

impl FromStr for XDist {
    type Err = Error;

    /// `unif`, or `beta(a,b)` / `beta:a,b`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase().replace(' ', "");
        if matches!(t.as_str(), "unif" | "uniform" | "uniform01" | "unif[0,1]") {
            return Ok(XDist::Uniform01);
        }
        let inner = t
            .strip_prefix("beta(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| t.strip_prefix("beta:"));
        if let Some(inner) = inner {
            let parts: Vec<&str> = inner.split(',').collect();
            if let [a, b] = parts.as_slice() {
                if let (Ok(a), Ok(b)) = (a.parse(), b.parse()) {
                    let d = XDist::Beta { a, b };
                    d.validate()?;
                    return Ok(d);
                }
            }
        }
        Err(Error::InvalidConfig(format!("unknown predictor distribution `{s}`")))
    }
}

/// Standardized measurement-error family (mean 0, variance 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UDist {
    Normal,
    /// Scale `1/sqrt(2)`.
    Laplace,
    /// `Unif[-sqrt(3), sqrt(3)]`.
    Uniform,
}

impl UDist {
    pub const ALL: [UDist; 3] = [UDist::Normal, UDist::Laplace, UDist::Uniform];

    pub fn name(self) -> &'static str {
        match self {
            UDist::Normal => "normal",
            UDist::Laplace => "laplace",
            UDist::Uniform => "uniform",
        }
    }
}

impl fmt::Display for UDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" | "gaussian" => Ok(UDist::Normal),
            "laplace" => Ok(UDist::Laplace),
            "uniform" | "unif" => Ok(UDist::Uniform),
            other => Err(Error::InvalidConfig(format!("unknown error distribution `{other}`"))),
        }
    }
}

/// One draw from the standardized error distribution.
pub fn standardized_draw<R: Rng + ?Sized>(dist: UDist, rng: &mut R) -> f64 {
    match dist {
        UDist::Normal => StandardNormal.sample(rng),
        UDist::Laplace => {
            // Inverse CDF; v in (-1/2, 1/2).
            let v = rng.sample::<f64, _>(Open01) - 0.5;
            -v.signum() * (1.0 - 2.0 * v.abs()).ln() / SQRT_2
        }
        UDist::Uniform => rng.random_range(-SQRT_3..=SQRT_3),
    }
}

/// How the measurement-error standard deviation is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "snake_case")]
pub enum ErrorScale {
    /// `Var(sigma * U) / Var(X) = r`.
    VarianceRatio(f64),
    AbsoluteSigma(f64),
}

impl ErrorScale {
    pub fn sigma(&self, x_dist: &XDist) -> Result<f64> {
        match *self {
            ErrorScale::VarianceRatio(r) if r > 0.0 && r <= 1.0 => Ok((r * x_dist.variance()).sqrt()),
            ErrorScale::VarianceRatio(r) => {
                Err(Error::InvalidConfig(format!("variance ratio {r} must lie in (0, 1]")))
            }
            ErrorScale::AbsoluteSigma(s) if s >= 0.0 && s.is_finite() => Ok(s),
            ErrorScale::AbsoluteSigma(s) => {
                Err(Error::InvalidConfig(format!("error sigma {s} must be non-negative")))
            }
        }
    }
}

/// Closed-form piece of a regression function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expr {
    /// `sum_k coeffs[k] * (x - center)^k`
    Poly { center: f64, coeffs: Vec<f64> },
    /// `amplitude * sin(2 pi frequency x + phase) + offset`
    Sine {
        amplitude: f64,
        frequency: f64,
        phase: f64,
        offset: f64,
    },
}

impl Expr {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Poly { center, coeffs } => {
                let d = x - center;
                coeffs.iter().rev().fold(0.0, |acc, c| acc * d + c)
            }
            Expr::Sine {
                amplitude,
                frequency,
                phase,
                offset,
            } => amplitude * (2.0 * PI * frequency * x + phase).sin() + offset,
        }
    }
}

/// Expression valid on the closed interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub lo: f64,
    pub hi: f64,
    pub expr: Expr,
}

/// Piecewise function: branches in ascending order, first match wins on a
/// shared endpoint. `jumps` lists the discontinuities, each a branch boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseFn {
    pub branches: Vec<Branch>,
    pub jumps: Vec<f64>,
}

impl PiecewiseFn {
    pub fn new(branches: Vec<Branch>, jumps: Vec<f64>) -> Result<Self> {
        let f = Self { branches, jumps };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<()> {
        if self.branches.is_empty() {
            return Err(Error::InvalidConfig("piecewise function has no branches".into()));
        }
        if self.branches.iter().any(|b| !matches!(b.lo.partial_cmp(&b.hi), Some(Ordering::Less | Ordering::Equal))) {
            return Err(Error::InvalidConfig("branch with lo > hi".into()));
        }
        if self.branches.windows(2).any(|p| p[0].hi != p[1].lo) {
            return Err(Error::InvalidConfig("branches must be contiguous".into()));
        }
        for &s in &self.jumps {
            if !self.branches.windows(2).any(|p| p[0].hi == s) {
                return Err(Error::InvalidConfig(format!(
                    "jump point {s} is not a branch boundary"
                )));
            }
        }
        Ok(())
    }

    /// Outside the branches the nearest end branch is extended.
    pub fn eval(&self, x: f64) -> f64 {
        let branch = self
            .branches
            .iter()
            .find(|b| x >= b.lo && x <= b.hi)
            .unwrap_or_else(|| {
                if x < self.branches[0].lo {
                    &self.branches[0]
                } else {
                    &self.branches[self.branches.len() - 1]
                }
            });
        branch.expr.eval(x)
    }

    /// `(f(s-), f(s+))` from the two branches meeting at `s`.
    pub fn limits_at(&self, s: f64) -> Option<(f64, f64)> {
        self.branches
            .windows(2)
            .find(|p| p[0].hi == s)
            .map(|p| (p[0].expr.eval(s), p[1].expr.eval(s)))
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.branches[0].lo, self.branches[self.branches.len() - 1].hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResponseModel {
    /// `Y | X = x ~ N(theta(x), sd^2)`; the mean equals `theta`.
    GaussianMean { theta: PiecewiseFn, sd: f64 },
    /// `Y | X = x ~ Bernoulli(p(x))`.
    BernoulliProb { p: PiecewiseFn },
    PiecewiseBuiltin { example: Builtin },
}

/// Response designs used by the simulation studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    /// Gaussian, `theta(x) = -sin(2 pi x) + 1{x > 0.5}`, sd 0.01.
    Example1,
    /// Bernoulli, `p = 1 - x^2` on `[0, 0.5]`, `0.5 (1 - x)^2` after.
    Example2,
    /// Bernoulli, `p = (25/36) x^2 + 0.15` on `[0, 0.6]`, `12 (x - 0.8)^3 + 0.596` after.
    Comparison,
    /// Bernoulli on log-income `[9.8, 11.3]` with a jump of 0.19 at 10.93.
    PhiLike,
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ex1" | "example1" => Ok(Builtin::Example1),
            "ex2" | "example2" => Ok(Builtin::Example2),
            "compare" | "comparison" => Ok(Builtin::Comparison),
            "phi" | "phi-like" | "phi_like" => Ok(Builtin::PhiLike),
            other => Err(Error::InvalidConfig(format!("unknown design `{other}`"))),
        }
    }
}

fn poly(center: f64, coeffs: &[f64]) -> Expr {
    Expr::Poly {
        center,
        coeffs: coeffs.to_vec(),
    }
}

fn branch(lo: f64, hi: f64, expr: Expr) -> Branch {
    Branch { lo, hi, expr }
}

impl Builtin {
    pub fn model(self) -> ResponseModel {
        let sine = |offset| Expr::Sine {
            amplitude: -1.0,
            frequency: 1.0,
            phase: 0.0,
            offset,
        };
        match self {
            Builtin::Example1 => ResponseModel::GaussianMean {
                theta: PiecewiseFn {
                    branches: vec![branch(0.0, 0.5, sine(0.0)), branch(0.5, 1.0, sine(1.0))],
                    jumps: vec![0.5],
                },
                sd: 0.01,
            },
            Builtin::Example2 => ResponseModel::BernoulliProb {
                p: PiecewiseFn {
                    branches: vec![
                        branch(0.0, 0.5, poly(0.0, &[1.0, 0.0, -1.0])),
                        branch(0.5, 1.0, poly(1.0, &[0.0, 0.0, 0.5])),
                    ],
                    jumps: vec![0.5],
                },
            },
            Builtin::Comparison => ResponseModel::BernoulliProb {
                p: PiecewiseFn {
                    branches: vec![
                        branch(0.0, 0.6, poly(0.0, &[0.15, 0.0, 25.0 / 36.0])),
                        branch(0.6, 1.0, poly(0.8, &[0.596, 0.0, 0.0, 12.0])),
                    ],
                    jumps: vec![0.6],
                },
            },
            // Take-up rises from 0.15 to 0.25 below the jump, then from 0.44 to 0.60.
            Builtin::PhiLike => ResponseModel::BernoulliProb {
                p: PiecewiseFn {
                    branches: vec![
                        branch(9.8, 10.93, poly(9.8, &[0.15, 0.1 / 1.13])),
                        branch(10.93, 11.3, poly(10.93, &[0.44, 0.16 / 0.37])),
                    ],
                    jumps: vec![10.93],
                },
            },
        }
    }
}

impl ResponseModel {
    fn resolved(&self) -> ResponseModel {
        match self {
            ResponseModel::PiecewiseBuiltin { example } => example.model(),
            other => other.clone(),
        }
    }

    /// Conditional mean `m(x) = E[Y | X = x]`.
    pub fn mean_fn(&self) -> PiecewiseFn {
        match self.resolved() {
            ResponseModel::GaussianMean { theta, .. } => theta,
            ResponseModel::BernoulliProb { p } => p,
            ResponseModel::PiecewiseBuiltin { .. } => unreachable!("resolved above"),
        }
    }

    fn validate(&self) -> Result<()> {
        match self.resolved() {
            ResponseModel::GaussianMean { theta, sd } => {
                theta.validate()?;
                if !(sd >= 0.0 && sd.is_finite()) {
                    return Err(Error::InvalidConfig(format!("response sd {sd} must be non-negative")));
                }
                Ok(())
            }
            ResponseModel::BernoulliProb { p } => {
                p.validate()?;
                for b in &p.branches {
                    for j in 0..=1000 {
                        let x = b.lo + (b.hi - b.lo) * j as f64 / 1000.0;
                        let v = b.expr.eval(x);
                        if !(0.0..=1.0).contains(&v) {
                            return Err(Error::InvalidConfig(format!(
                                "success probability {v} at x = {x} is outside [0, 1]"
                            )));
                        }
                    }
                }
                Ok(())
            }
            ResponseModel::PiecewiseBuiltin { .. } => unreachable!("resolved above"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n: usize,
    pub x_dist: XDist,
    pub u_dist: UDist,
    pub error_scale: ErrorScale,
    pub response: ResponseModel,
    pub seed: u64,
}

impl GeneratorConfig {
    /// Example 1 and 2 designs: uniform predictor, error variance 15% of `Var(X)`.
    pub fn example(example: Builtin, n: usize, u_dist: UDist, seed: u64) -> Self {
        Self {
            n,
            x_dist: XDist::Uniform01,
            u_dist,
            error_scale: ErrorScale::VarianceRatio(0.15),
            response: ResponseModel::PiecewiseBuiltin { example },
            seed,
        }
    }

    /// Comparison design: n = 6000, `N(0, 0.05^2)` error.
    pub fn comparison(x_dist: XDist, seed: u64) -> Self {
        Self {
            n: 6000,
            x_dist,
            u_dist: UDist::Normal,
            error_scale: ErrorScale::AbsoluteSigma(0.05),
            response: ResponseModel::PiecewiseBuiltin {
                example: Builtin::Comparison,
            },
            seed,
        }
    }

    /// Stand-in for the income data: n = 9685 log-incomes on `[9.8, 11.3]`.
    pub fn phi_like(seed: u64) -> Self {
        Self {
            n: 9685,
            x_dist: XDist::ScaledBeta {
                a: 2.0,
                b: 3.0,
                lo: 9.8,
                hi: 11.3,
            },
            u_dist: UDist::Normal,
            error_scale: ErrorScale::AbsoluteSigma(0.05),
            response: ResponseModel::PiecewiseBuiltin {
                example: Builtin::PhiLike,
            },
            seed,
        }
    }

    pub fn sigma(&self) -> Result<f64> {
        self.error_scale.sigma(&self.x_dist)
    }

    pub fn truth(&self) -> Result<JumpTruth> {
        let m = self.response.mean_fn();
        let location = *m
            .jumps
            .first()
            .ok_or_else(|| Error::InvalidConfig("response has no jump point".into()))?;
        let (left, right) = m
            .limits_at(location)
            .ok_or_else(|| Error::InvalidConfig(format!("no branch boundary at {location}")))?;
        Ok(JumpTruth {
            location,
            magnitude: right - left,
        })
    }
}

/// True jump location and magnitude `m(s+) - m(s-)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpTruth {
    pub location: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedData {
    pub sample: ObservedSample,
    /// Latent `X`, aligned with `sample` (sorted by `W`).
    pub latent: Vec<f64>,
    pub truth: JumpTruth,
}

pub fn generate(config: &GeneratorConfig) -> Result<GeneratedData> {
    if config.n < 2 {
        return Err(Error::InvalidConfig(format!("sample size {} must be at least 2", config.n)));
    }
    let x_sampler = config.x_dist.sampler()?;
    let sigma = config.sigma()?;
    config.response.validate()?;
    let truth = config.truth()?;
    let response = config.response.resolved();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut rows: Vec<(f64, f64, f64)> = Vec::with_capacity(config.n);
    for _ in 0..config.n {
        let x = x_sampler.draw(&mut rng);
        let u = standardized_draw(config.u_dist, &mut rng);
        let y = match &response {
            ResponseModel::GaussianMean { theta, sd } => {
                let z: f64 = StandardNormal.sample(&mut rng);
                theta.eval(x) + sd * z
            }
            ResponseModel::BernoulliProb { p } => {
                if rng.random::<f64>() < p.eval(x) {
                    1.0
                } else {
                    0.0
                }
            }
            ResponseModel::PiecewiseBuiltin { .. } => unreachable!("resolved above"),
        };
        rows.push((x + sigma * u, y, x));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let latent = rows.iter().map(|r| r.2).collect();
    let sample = ObservedSample::new(rows.iter().map(|r| r.0).collect(), rows.iter().map(|r| r.1).collect())?;
    Ok(GeneratedData {
        sample,
        latent,
        truth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_relative_eq;

    fn moments(dist: UDist, n: usize) -> (f64, f64, f64, f64) {
        let mut r = rng::stream(2024, dist as u64);
        let draws: Vec<f64> = (0..n).map(|_| standardized_draw(dist, &mut r)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let lo = draws.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = draws.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (mean, var, lo, hi)
    }

    #[test]
    fn standardized_moments() {
        for dist in UDist::ALL {
            let (mean, var, lo, hi) = moments(dist, 1_000_000);
            assert!(mean.abs() < 0.01, "{dist}: mean {mean}");
            assert!((var - 1.0).abs() < 0.01, "{dist}: var {var}");
            if dist == UDist::Uniform {
                assert!(lo >= -SQRT_3 && hi <= SQRT_3);
            }
        }
    }

    #[test]
    fn draws_are_reproducible() {
        for dist in UDist::ALL {
            let a: Vec<f64> = {
                let mut r = rng::stream(5, 1);
                (0..16).map(|_| standardized_draw(dist, &mut r)).collect()
            };
            let b: Vec<f64> = {
                let mut r = rng::stream(5, 1);
                (0..16).map(|_| standardized_draw(dist, &mut r)).collect()
            };
            assert_eq!(a, b);
        }
    }

    #[test]
    fn variance_ratio_sigma() {
        let s = ErrorScale::VarianceRatio(0.15).sigma(&XDist::Uniform01).unwrap();
        assert_relative_eq!(s, (0.15f64 / 12.0).sqrt(), epsilon = 1e-15);
        assert!((s - 0.1118).abs() < 1e-4);
        assert!(ErrorScale::VarianceRatio(0.0).sigma(&XDist::Uniform01).is_err());
        assert!(ErrorScale::VarianceRatio(1.5).sigma(&XDist::Uniform01).is_err());
        assert!(ErrorScale::AbsoluteSigma(-0.1).sigma(&XDist::Uniform01).is_err());
        assert_eq!(ErrorScale::AbsoluteSigma(0.0).sigma(&XDist::Uniform01), Ok(0.0));
    }

    #[test]
    fn truths() {
        let ex1 = GeneratorConfig::example(Builtin::Example1, 100, UDist::Normal, 0).truth().unwrap();
        assert_eq!(ex1.location, 0.5);
        assert_relative_eq!(ex1.magnitude, 1.0, epsilon = 1e-15);
        let ex2 = GeneratorConfig::example(Builtin::Example2, 100, UDist::Normal, 0).truth().unwrap();
        assert_eq!(ex2.location, 0.5);
        // 0.5 * (1 - 0.5)^2 - (1 - 0.5^2)
        assert_relative_eq!(ex2.magnitude, -0.625, epsilon = 1e-15);
        let cmp = GeneratorConfig::comparison(XDist::Uniform01, 0).truth().unwrap();
        assert_eq!(cmp.location, 0.6);
        assert_relative_eq!(cmp.magnitude, 0.1, epsilon = 1e-12);
        let phi = GeneratorConfig::phi_like(0).truth().unwrap();
        assert_relative_eq!(phi.magnitude, 0.19, epsilon = 1e-12);
    }

    #[test]
    fn zero_sigma_keeps_latent() {
        let mut cfg = GeneratorConfig::example(Builtin::Example1, 200, UDist::Laplace, 3);
        cfg.error_scale = ErrorScale::AbsoluteSigma(0.0);
        cfg.response = ResponseModel::GaussianMean {
            theta: Builtin::Example1.model().mean_fn(),
            sd: 0.0,
        };
        let data = generate(&cfg).unwrap();
        assert_eq!(data.sample.w(), data.latent.as_slice());
        let theta = cfg.response.mean_fn();
        for (x, y) in data.latent.iter().zip(data.sample.y()) {
            assert_eq!(*y, theta.eval(*x));
        }
    }

    #[test]
    fn bernoulli_responses_track_probability() {
        let cfg = GeneratorConfig::example(Builtin::Example2, 200_000, UDist::Normal, 8);
        let data = generate(&cfg).unwrap();
        assert!(data.sample.y().iter().all(|&v| v == 0.0 || v == 1.0));
        let p = cfg.response.mean_fn();
        for x0 in [0.2, 0.45, 0.7] {
            let ys: Vec<f64> = data
                .latent
                .iter()
                .zip(data.sample.y())
                .filter(|(x, _)| (**x - x0).abs() < 0.005)
                .map(|(_, y)| *y)
                .collect();
            let mean = ys.iter().sum::<f64>() / ys.len() as f64;
            assert!((mean - p.eval(x0)).abs() < 3.0 / (ys.len() as f64).sqrt(), "x0 {x0}: {mean}");
        }
    }

    #[test]
    fn generation_is_seeded() {
        let cfg = GeneratorConfig::comparison(XDist::Beta { a: 3.0, b: 2.0 }, 77);
        assert_eq!(generate(&cfg).unwrap().sample, generate(&cfg).unwrap().sample);
        let data = generate(&cfg).unwrap();
        assert_eq!(data.sample.len(), 6000);
        assert!(data.latent.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = GeneratorConfig::example(Builtin::Example2, 100, UDist::Normal, 0);
        cfg.x_dist = XDist::Beta { a: 0.0, b: 1.0 };
        assert!(generate(&cfg).is_err());
        let bad_p = PiecewiseFn::new(
            vec![branch(0.0, 0.5, poly(0.0, &[1.2])), branch(0.5, 1.0, poly(0.0, &[0.1]))],
            vec![0.5],
        )
        .unwrap();
        cfg.x_dist = XDist::Uniform01;
        cfg.response = ResponseModel::BernoulliProb { p: bad_p };
        assert!(generate(&cfg).is_err());
        assert!(PiecewiseFn::new(vec![branch(0.0, 1.0, poly(0.0, &[0.0]))], vec![0.5]).is_err());
    }

    #[test]
    fn parses_distributions() {
        assert_eq!("beta(2,3)".parse::<XDist>().unwrap(), XDist::Beta { a: 2.0, b: 3.0 });
        assert_eq!("unif".parse::<XDist>().unwrap(), XDist::Uniform01);
        assert!("beta(2)".parse::<XDist>().is_err());
        assert_eq!("Laplace".parse::<UDist>().unwrap(), UDist::Laplace);
        assert_eq!("compare".parse::<Builtin>().unwrap(), Builtin::Comparison);
    }
}
