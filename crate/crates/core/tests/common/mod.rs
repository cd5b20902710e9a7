//! Helpers shared by the integration test targets: brute-force estimators
//! written directly from the weighted-average formulas, and the invariant
//! checks reused by the property tests and the acceptance suite.
#![allow(dead_code)]

pub mod brute {
    use jumpfinder::KernelFamily;

    /// One-sided kernel on `[0, 1]`, zero elsewhere.
    pub fn k(family: KernelFamily, u: f64) -> f64 {
        if !(0.0..=1.0).contains(&u) {
            return 0.0;
        }
        match family {
            KernelFamily::Epanechnikov => 3.0 / 2.0 * (1.0 - u.powi(2)),
            KernelFamily::Triangular => 2.0 - 2.0 * u,
            KernelFamily::Uniform => 1.0,
        }
    }

    /// Scaled distance from `x` into the window on the given side.
    fn dist(w: f64, x: f64, h: f64, right: bool) -> f64 {
        if right {
            (w - x) / h
        } else {
            (x - w) / h
        }
    }

    pub fn conventional(w: &[f64], y: &[f64], x: f64, h: f64, right: bool, kr: KernelFamily) -> Option<f64> {
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..w.len() {
            let weight = k(kr, dist(w[j], x, h, right));
            num += weight * y[j];
            den += weight;
        }
        (den > 0.0).then(|| num / den)
    }

    pub fn shifted(w: &[f64], y: &[f64], x: f64, h: f64, right: bool, kr: KernelFamily) -> Option<f64> {
        let center = if right { x + h } else { x - h };
        conventional(w, y, center, h, right, kr)
    }

    pub fn robust(
        w: &[f64],
        y: &[f64],
        x: f64,
        h: f64,
        right: bool,
        kr: KernelFamily,
        kstar: KernelFamily,
    ) -> Option<f64> {
        let anchor = shifted(w, y, x, h, right, kr)?;
        let mut members = Vec::new();
        for j in 0..w.len() {
            let u = dist(w[j], x, h, right);
            if !(0.0..=1.0).contains(&u) {
                continue;
            }
            if let Some(local) = conventional(w, y, w[j], h, right, kr) {
                members.push((j, u, (local - anchor).abs()));
            }
        }
        let rho = members.iter().map(|m| m.2).fold(0.0, f64::max);
        let (mut num, mut den) = (0.0, 0.0);
        for (j, u, gap) in members {
            let t = if rho == 0.0 { 0.0 } else { gap / rho };
            let weight = k(kr, u) * k(kstar, t);
            num += weight * y[j];
            den += weight;
        }
        (den > 0.0).then(|| num / den)
    }

    /// Signed right-minus-left difference of conventional estimates at each
    /// grid point; `None` where either side is empty.
    pub fn dke_curve(w: &[f64], y: &[f64], grid: &[f64], h: f64, kr: KernelFamily) -> Vec<Option<f64>> {
        grid.iter()
            .map(|&x| Some(conventional(w, y, x, h, true, kr)? - conventional(w, y, x, h, false, kr)?))
            .collect()
    }

    pub fn robust_curve(
        w: &[f64],
        y: &[f64],
        grid: &[f64],
        h: f64,
        kr: KernelFamily,
        kstar: KernelFamily,
    ) -> Vec<Option<f64>> {
        grid.iter()
            .map(|&x| Some(robust(w, y, x, h, true, kr, kstar)? - robust(w, y, x, h, false, kr, kstar)?))
            .collect()
    }
}

use jumpfinder::bandwidth::percentile_ci;
use jumpfinder::estimators::{conventional_onesided, detect_jump, robust_onesided, shifted_onesided, Side};
use jumpfinder::kernels::{KernelFamily, KernelSpec};
use jumpfinder::{dke_detect, DetectorConfig, Domain, Error, JumpEstimate, ObservedSample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FAMILIES: [KernelFamily; 3] = [KernelFamily::Epanechnikov, KernelFamily::Triangular, KernelFamily::Uniform];

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn compare_point(what: &str, got: jumpfinder::Result<f64>, want: Option<f64>, tol: f64) -> Result<(), String> {
    match (got, want) {
        (Ok(g), Some(w)) if close(g, w, tol) => Ok(()),
        (Err(Error::EmptyWindow), None) => Ok(()),
        (g, w) => Err(format!("{what}: implementation {g:?}, brute force {w:?}")),
    }
}

/// The estimate's location must attain the brute-force maximum and its
/// magnitude must equal the brute-force difference there.
fn compare_scan(
    what: &str,
    got: jumpfinder::Result<JumpEstimate>,
    grid: &[f64],
    curve: &[Option<f64>],
    tol: f64,
) -> Result<(), String> {
    let peak = curve.iter().flatten().map(|d| d.abs()).fold(None, |a: Option<f64>, v| Some(a.map_or(v, |a| a.max(v))));
    match (got, peak) {
        (Err(Error::NoValidGridPoint), None) => Ok(()),
        (Ok(est), Some(peak)) => {
            let j = grid
                .iter()
                .position(|&x| x == est.location)
                .ok_or_else(|| format!("{what}: location {} is not a grid point", est.location))?;
            let d = curve[j].ok_or_else(|| format!("{what}: brute force undefined at {}", est.location))?;
            if !close(est.magnitude, d, tol) {
                return Err(format!("{what}: magnitude {} vs brute force {d}", est.magnitude));
            }
            if d.abs() < peak - 2.0 * tol {
                return Err(format!("{what}: |{d}| at {} is below the brute-force peak {peak}", est.location));
            }
            let defined = curve.iter().flatten().count();
            if est.diff_curve.len() != defined {
                return Err(format!("{what}: {} curve points vs {defined} defined", est.diff_curve.len()));
            }
            Ok(())
        }
        (g, p) => Err(format!("{what}: implementation {g:?}, brute-force peak {p:?}")),
    }
}

/// Random small instance: `n <= 30` points on `[0, 1]` with a noisy step.
pub fn random_instance(rng: &mut ChaCha8Rng) -> (ObservedSample, f64) {
    let n = rng.random_range(2..=30);
    let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let y: Vec<f64> = w
        .iter()
        .map(|&x| if x >= 0.5 { 1.0 } else { 0.0 } + 0.3 * (rng.random::<f64>() - 0.5))
        .collect();
    let h = rng.random_range(0.05..0.45);
    (ObservedSample::new(w, y).unwrap(), h)
}

/// Compares every one-sided estimator and both detectors with the
/// brute-force versions on `count` random instances. Returns the number of
/// individual comparisons made.
pub fn oracle_equivalence(count: usize, seed: u64, tol: f64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = Domain::new(0.0, 1.0).unwrap();
    let mut checks = 0;
    for case in 0..count {
        let (sample, h) = random_instance(&mut rng);
        let (w, y) = (sample.w(), sample.y());
        let kr = FAMILIES[rng.random_range(0..3)];
        let kstar = FAMILIES[rng.random_range(0..3)];
        let tag = |s: &str| format!("case {case} (n={}, h={h}, {kr:?}/{kstar:?}) {s}", sample.len());

        let mut points: Vec<f64> = (0..4).map(|_| rng.random::<f64>()).collect();
        points.push(w[rng.random_range(0..w.len())]);
        for &x in &points {
            for side in [Side::Right, Side::Left] {
                let right = side == Side::Right;
                compare_point(
                    &tag("conventional"),
                    conventional_onesided(&sample, x, h, side, kr),
                    brute::conventional(w, y, x, h, right, kr),
                    tol,
                )?;
                let got = shifted_onesided(&sample, x, h, side, kr);
                compare_point(&tag("shifted"), got, brute::shifted(w, y, x, h, right, kr), tol)?;
                compare_point(
                    &tag("robust"),
                    robust_onesided(&sample, x, h, side, kr, kstar),
                    brute::robust(w, y, x, h, right, kr, kstar),
                    tol,
                )?;
                checks += 3;
            }
        }

        let config = DetectorConfig::new(h, domain).unwrap();
        let grid = &config.search_grid;
        compare_scan(
            &tag("dke"),
            dke_detect(&sample, &config, kr),
            grid,
            &brute::dke_curve(w, y, grid, h, kr),
            tol,
        )?;
        compare_scan(
            &tag("robust detector"),
            detect_jump(&sample, &config, kr, kstar),
            grid,
            &brute::robust_curve(w, y, grid, h, kr, kstar),
            tol,
        )?;
        checks += 2;
    }
    Ok(checks)
}

/// Normalization by trapezoid quadrature, monotonicity and left/right mirror.
pub fn check_kernels() -> Result<(), String> {
    for family in FAMILIES {
        let right = KernelSpec::right(family);
        let left = KernelSpec::left(family);
        let nodes = 1_000_000;
        let step = 1.0 / nodes as f64;
        let mut integral = 0.0;
        for i in 0..=nodes {
            let v = right.evaluate(i as f64 * step);
            integral += if i == 0 || i == nodes { 0.5 * v } else { v };
        }
        integral *= step;
        if (integral - 1.0).abs() > 1e-9 {
            return Err(format!("{family:?}: integral {integral}"));
        }
        let mut prev = f64::INFINITY;
        for i in 0..=1000 {
            let u = i as f64 / 1000.0;
            let v = right.evaluate(u);
            if v > prev {
                return Err(format!("{family:?}: increases at {u}"));
            }
            prev = v;
            if right.evaluate(u) != left.evaluate(-u) {
                return Err(format!("{family:?}: left kernel is not the mirror at {u}"));
            }
        }
        for u in [-1.5, -0.01, 1.01, 2.0] {
            if right.evaluate(u) != 0.0 {
                return Err(format!("{family:?}: nonzero outside support at {u}"));
            }
        }
    }
    Ok(())
}

/// `shifted(x) == conventional(x + h)` on the right, exactly, at every grid point.
pub fn check_shift_identity(sample: &ObservedSample, h: f64, kr: KernelFamily) -> Result<(), String> {
    let config = DetectorConfig::new(h, sample.domain().unwrap()).map_err(|e| e.to_string())?;
    for &x in &config.search_grid {
        let a = shifted_onesided(sample, x, h, Side::Right, kr);
        let b = conventional_onesided(sample, x + h, h, Side::Right, kr);
        if a != b {
            return Err(format!("x={x}: shifted {a:?} vs conventional {b:?}"));
        }
    }
    Ok(())
}

/// Every estimator output lies in `[min y, max y]`.
pub fn check_range(sample: &ObservedSample, h: f64) -> Result<(), String> {
    let (lo, hi) = sample.y_range();
    let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    let kr = KernelFamily::Epanechnikov;
    let config = DetectorConfig::new(h, sample.domain().unwrap()).map_err(|e| e.to_string())?;
    for &x in &config.search_grid {
        for side in [Side::Right, Side::Left] {
            for v in [
                conventional_onesided(sample, x, h, side, kr),
                shifted_onesided(sample, x, h, side, kr),
                robust_onesided(sample, x, h, side, kr, kr),
            ]
            .into_iter()
            .flatten()
            {
                if v < lo - slack || v > hi + slack {
                    return Err(format!("x={x} {side:?}: {v} outside [{lo}, {hi}]"));
                }
            }
        }
    }
    Ok(())
}

/// Reflecting the predictor through the domain midpoint reflects the
/// location (within one grid step) and negates the magnitude. Returns
/// `Ok(false)` without comparing when the maximum is attained at grid points
/// more than one step apart, since ties go to the smallest location on both
/// sides of the reflection.
pub fn check_mirror(sample: &ObservedSample, h: f64) -> Result<bool, String> {
    let domain = Domain::new(0.0, 1.0).unwrap();
    let reflected = ObservedSample::new(
        sample.w().iter().map(|&v| domain.reflect(v)).collect(),
        sample.y().to_vec(),
    )
    .unwrap();
    let config = DetectorConfig::new(h, domain).map_err(|e| e.to_string())?;
    let step = config.search_grid.get(1).map_or(h, |g| g - config.search_grid[0]);
    let kr = KernelFamily::Epanechnikov;
    for (name, a, b) in [
        ("robust", detect_jump(sample, &config, kr, kr), detect_jump(&reflected, &config, kr, kr)),
        ("dke", dke_detect(sample, &config, kr), dke_detect(&reflected, &config, kr)),
    ] {
        match (a, b) {
            (Ok(a), Ok(b)) => {
                if tied_apart(&a, step) || tied_apart(&b, step) {
                    return Ok(false);
                }
                if (domain.reflect(a.location) - b.location).abs() > step * (1.0 + 1e-9) {
                    return Err(format!("{name}: location {} vs reflected {}", a.location, b.location));
                }
                if (a.magnitude + b.magnitude).abs() > 1e-9 {
                    return Err(format!("{name}: magnitude {} vs reflected {}", a.magnitude, b.magnitude));
                }
            }
            (Err(a), Err(b)) if a == b => {}
            (a, b) => return Err(format!("{name}: {a:?} vs reflected {b:?}")),
        }
    }
    Ok(true)
}

fn tied_apart(est: &JumpEstimate, step: f64) -> bool {
    let peak = est.magnitude.abs();
    est.diff_curve
        .iter()
        .any(|p| p.diff >= peak - 1e-9 && (p.x - est.location).abs() > step * (1.0 + 1e-9))
}

/// Lower bound never exceeds the upper bound, and a smaller alpha gives a
/// wider interval.
pub fn check_ci(locations: &[f64], alpha_small: f64, alpha_large: f64) -> Result<(), String> {
    let wide = percentile_ci(locations, alpha_small).map_err(|e| e.to_string())?;
    let narrow = percentile_ci(locations, alpha_large).map_err(|e| e.to_string())?;
    if wide.0 > wide.1 || narrow.0 > narrow.1 {
        return Err(format!("unordered interval {wide:?} / {narrow:?}"));
    }
    if wide.0 > narrow.0 || wide.1 < narrow.1 {
        return Err(format!("alpha {alpha_small} gives {wide:?}, not containing {narrow:?} at {alpha_large}"));
    }
    Ok(())
}

/// Writing a sample as CSV and ingesting it back gives the identical sample.
pub fn check_csv_roundtrip(sample: &ObservedSample) -> Result<(), String> {
    let mut buf = Vec::new();
    jumpfinder::io::write_sample_csv(&mut buf, sample, None).map_err(|e| e.to_string())?;
    let back = jumpfinder::io::ingest_reader(buf.as_slice(), &jumpfinder::io::IngestOptions::default())
        .map_err(|e| e.to_string())?;
    if back.sample != *sample {
        return Err("ingested sample differs from the written one".into());
    }
    Ok(())
}

/// Noisy step on `[0, 1]` with continuous noise, so the criterion has no flat plateaus.
pub fn noisy_step(n: usize, seed: u64) -> ObservedSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let y = w
        .iter()
        .map(|&x| if x >= 0.5 { 1.0 } else { 0.0 } + 0.5 * x + 0.2 * (rng.random::<f64>() - 0.5))
        .collect();
    ObservedSample::new(w, y).unwrap()
}
