//! Monte Carlo estimates of the chemical-distance time constant `λ_p(τ)` and
//! the weighted surface tension `φ_{p,β}(ν)`, plus evaluation of the limit
//! perimeter functional on polygonal phases.
//!
//! Trial `t` always samples with seed `seed ^ t`, and labels are keyed by
//! global coordinates, so estimates at different `p`, `β` or margins are
//! coupled through common random numbers.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::Serialize;

use crate::clusters::SpanningCluster;
use crate::distance::{passage_time, points_within, weighted_between, Beta};
use crate::error::{Error, Result};
use crate::lattice::{BondConfig, DualPoint, Vertex, Window};
use crate::rng::trial_seed;
use crate::stats::mean_se;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimatorOptions {
    /// Also estimate at scale `2m` and report `2·mean(2m) − mean(m)`.
    pub extrapolate: bool,
    /// Re-run every tenth trial with a doubled margin and report the mean
    /// shift.
    pub margin_check: bool,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        EstimatorOptions { extrapolate: false, margin_check: true }
    }
}

impl EstimatorOptions {
    pub fn plain() -> Self {
        EstimatorOptions { extrapolate: false, margin_check: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
    pub discarded: usize,
    pub m: usize,
    pub p: f64,
    /// Lattice direction of the sampled paths.
    pub tau: (f64, f64),
    /// Interface normal, for surface-tension estimates.
    pub nu: Option<(f64, f64)>,
    pub beta: Option<f64>,
    pub seed: u64,
    pub extrapolated: Option<f64>,
    /// Mean change of the per-trial value when the margin is doubled.
    pub margin_shift: Option<f64>,
    /// False when more than half of the trials were discarded.
    pub valid: bool,
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl Estimate {
    pub const CSV_HEADER: &'static str = "p,beta,tau_x,tau_y,m,trials,discarded,mean,std_error,extrapolated";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.p,
            opt(self.beta),
            self.tau.0,
            self.tau.1,
            self.m,
            self.trials,
            self.discarded,
            self.mean,
            self.std_error,
            opt(self.extrapolated)
        )
    }

    pub fn discard_rate(&self) -> f64 {
        self.discarded as f64 / self.trials as f64
    }
}

fn check_common(p: f64, dir: (f64, f64), m: usize, trials: usize) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    if !dir.0.is_finite() || !dir.1.is_finite() {
        return Err(Error::InvalidParameter(format!("direction ({}, {}) is not finite", dir.0, dir.1)));
    }
    if dir == (0.0, 0.0) {
        return Err(Error::ZeroDirection);
    }
    if m < 8 {
        return Err(Error::InvalidParameter(format!("m must be at least 8, got {m}")));
    }
    if trials < 2 {
        return Err(Error::InvalidParameter("at least two trials are needed".into()));
    }
    Ok(())
}

/// `⌊m τ⌋`, coordinatewise.
pub fn scaled_point(tau: (f64, f64), m: usize) -> Vertex {
    Vertex::new((m as f64 * tau.0).floor() as i64, (m as f64 * tau.1).floor() as i64)
}

/// Bounding box of the segment from 0 to `target`, grown by `margin` on every
/// side (and one extra column so the bond east of `target` fits).
pub fn segment_window(target: Vertex, margin: usize) -> Window {
    let g = margin as i64;
    let min = Vertex::new(target.x.min(0) - g, target.y.min(0) - g);
    let max = Vertex::new(target.x.max(0) + g + 1, target.y.max(0) + g);
    Window::spanning(min, max).expect("segment window is never degenerate")
}

fn margin_for(m: usize, factor: usize) -> usize {
    m.div_ceil(2) * factor
}

fn ceil_sqrt(m: usize) -> u64 {
    let mut r = (m as f64).sqrt() as u64;
    while r * r < m as u64 {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= m as u64 {
        r -= 1;
    }
    r
}

/// One chemical-distance sample `D/m`, or `None` when an endpoint has no
/// spanning-cluster bond within `⌈√m⌉`.
///
/// Endpoints are the bonds east of `0` and of `⌊mτ⌋`. Each may be moved to a
/// spanning-cluster bond within the radius at a cost of 2 per unit of ℓ¹
/// shift; the cheapest combination is taken. A cost of 1 would let the search
/// trade cheap shifts for chemical length and bias the estimate low.
pub fn lambda_trial(p: f64, tau: (f64, f64), m: usize, seed: u64, margin_factor: usize) -> Result<Option<f64>> {
    let target = scaled_point(tau, m);
    let cfg = BondConfig::sample(segment_window(target, margin_for(m, margin_factor)), p, seed)?;
    Ok(snapped_distance(&cfg, target, ceil_sqrt(m)).map(|d| d as f64 / m as f64))
}

fn snapped_distance(cfg: &BondConfig, target: Vertex, radius: u64) -> Option<u64> {
    let mut cluster = SpanningCluster::new(cfg);
    if !cluster.exists() {
        return None;
    }
    let mut candidates = |x: DualPoint| -> Vec<(usize, u64)> {
        points_within(cfg, x, radius, |k| cluster.contains(cfg, k)).into_iter().map(|(_, k, d2)| (k, d2)).collect()
    };
    let y = DualPoint::east_of(target);
    let sources = candidates(DualPoint::east_of(Vertex::new(0, 0)));
    let targets = candidates(y);
    if sources.is_empty() || targets.is_empty() {
        return None;
    }
    weighted_between(cfg, &sources, &targets, 1, Some(y))
}

/// Per-trial samples of `D/m` in trial order (`None` for discarded trials).
pub fn lambda_samples(p: f64, tau: (f64, f64), m: usize, trials: usize, seed: u64) -> Result<Vec<Option<f64>>> {
    check_common(p, tau, m, trials)?;
    (0..trials).into_par_iter().map(|t| lambda_trial(p, tau, m, trial_seed(seed, t), 1)).collect()
}

fn margin_shift(samples: &[Option<f64>], redo: impl Fn(usize) -> Result<Option<f64>> + Sync) -> Result<Option<f64>> {
    let picked: Vec<usize> = (0..samples.len()).step_by(10).collect();
    let shifts: Vec<Option<f64>> = picked
        .par_iter()
        .map(|&t| Ok(match (samples[t], redo(t)?) {
            (Some(a), Some(b)) => Some(b - a),
            _ => None,
        }))
        .collect::<Result<_>>()?;
    let shifts: Vec<f64> = shifts.into_iter().flatten().collect();
    Ok((!shifts.is_empty()).then(|| mean_se(&shifts).0))
}

/// Estimate of `λ_p(τ)` at scale `m`.
pub fn estimate_lambda(
    p: f64,
    tau: (f64, f64),
    m: usize,
    trials: usize,
    seed: u64,
    opts: &EstimatorOptions,
) -> Result<Estimate> {
    let samples = lambda_samples(p, tau, m, trials, seed)?;
    lambda_estimate(p, tau, m, seed, &samples, opts)
}

fn lambda_estimate(
    p: f64,
    tau: (f64, f64),
    m: usize,
    seed: u64,
    samples: &[Option<f64>],
    opts: &EstimatorOptions,
) -> Result<Estimate> {
    let trials = samples.len();
    let kept: Vec<f64> = samples.iter().flatten().copied().collect();
    if kept.is_empty() {
        return Err(Error::AllTrialsDiscarded { trials });
    }
    let (mean, std_error) = mean_se(&kept);
    let margin_shift = if opts.margin_check {
        margin_shift(samples, |t| lambda_trial(p, tau, m, trial_seed(seed, t), 2))?
    } else {
        None
    };
    let extrapolated = if opts.extrapolate {
        let big = estimate_lambda(p, tau, 2 * m, trials, seed, &EstimatorOptions::plain())?;
        Some(2.0 * big.mean - mean)
    } else {
        None
    };
    let discarded = trials - kept.len();
    Ok(Estimate {
        mean,
        std_error,
        trials,
        discarded,
        m,
        p,
        tau,
        nu: None,
        beta: None,
        seed,
        extrapolated,
        margin_shift,
        valid: 2 * discarded <= trials,
    })
}

fn unit(v: (f64, f64)) -> (f64, f64) {
    let n = v.0.hypot(v.1);
    (v.0 / n, v.1 / n)
}

/// `ν^⊥ = (ν_y, −ν_x)`, the path direction for interface normal `ν`.
pub fn perp(nu: (f64, f64)) -> (f64, f64) {
    // adding zero turns -0.0 into 0.0
    (nu.1 + 0.0, -nu.0 + 0.0)
}

/// Passage-time samples `ψ(0, ⌊mτ⌋)/m` for every `β` on one configuration
/// per trial: `result[t][k]` belongs to `betas[k]`.
pub fn passage_samples(
    p: f64,
    betas: &[f64],
    tau: (f64, f64),
    m: usize,
    trials: usize,
    seed: u64,
    margin_factor: usize,
) -> Result<Vec<Vec<f64>>> {
    check_common(p, tau, m, trials)?;
    let betas: Vec<Beta> = betas.iter().map(|&b| Beta::new(b)).collect::<Result<_>>()?;
    if betas.iter().any(|b| matches!(b, Beta::Impassable)) {
        return Err(Error::InvalidParameter("beta must be finite".into()));
    }
    let target = scaled_point(tau, m);
    let window = segment_window(target, margin_for(m, margin_factor));
    (0..trials)
        .into_par_iter()
        .map(|t| passage_trial(window, p, &betas, target, m, trial_seed(seed, t)))
        .collect()
}

fn passage_trial(window: Window, p: f64, betas: &[Beta], target: Vertex, m: usize, seed: u64) -> Result<Vec<f64>> {
    let cfg = BondConfig::sample(window, p, seed)?;
    betas
        .iter()
        .map(|&b| {
            let v = passage_time(&cfg, b, Vertex::new(0, 0), target)?
                .value()
                .expect("finite weights connect the window");
            Ok(v / m as f64)
        })
        .collect()
}

/// Estimate of `φ_{p,β}(ν)` at scale `m`.
pub fn estimate_phi(
    p: f64,
    beta: f64,
    nu: (f64, f64),
    m: usize,
    trials: usize,
    seed: u64,
    opts: &EstimatorOptions,
) -> Result<Estimate> {
    check_common(p, nu, m, trials)?;
    let nu = unit(nu);
    let tau = perp(nu);
    let samples: Vec<f64> = passage_samples(p, &[beta], tau, m, trials, seed, 1)?.into_iter().map(|v| v[0]).collect();
    phi_estimate(p, beta, nu, m, seed, &samples, opts)
}

fn phi_estimate(
    p: f64,
    beta: f64,
    nu: (f64, f64),
    m: usize,
    seed: u64,
    samples: &[f64],
    opts: &EstimatorOptions,
) -> Result<Estimate> {
    let tau = perp(nu);
    let trials = samples.len();
    let (mean, std_error) = mean_se(samples);
    let margin_shift = if opts.margin_check {
        let wrapped: Vec<Option<f64>> = samples.iter().map(|&v| Some(v)).collect();
        let target = scaled_point(tau, m);
        let window = segment_window(target, margin_for(m, 2));
        let b = [Beta::new(beta)?];
        margin_shift(&wrapped, |t| Ok(Some(passage_trial(window, p, &b, target, m, trial_seed(seed, t))?[0])))?
    } else {
        None
    };
    let extrapolated = if opts.extrapolate {
        let big = estimate_phi(p, beta, nu, 2 * m, trials, seed, &EstimatorOptions::plain())?;
        Some(2.0 * big.mean - mean)
    } else {
        None
    };
    Ok(Estimate {
        mean,
        std_error,
        trials,
        discarded: 0,
        m,
        p,
        tau,
        nu: Some(nu),
        beta: Some(beta),
        seed,
        extrapolated,
        margin_shift,
        valid: true,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub beta: f64,
    pub estimate: Estimate,
    /// `λ̂ − φ̂_β`, absent when every λ trial was discarded.
    pub gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    /// `None` when every λ trial was discarded (typical for `p > 1/2`).
    pub lambda: Option<Estimate>,
    /// `phi_samples[t][k]`: trial `t`, `beta_grid[k]`.
    #[serde(skip)]
    pub phi_samples: Vec<Vec<f64>>,
    #[serde(skip)]
    pub lambda_samples: Vec<Option<f64>>,
}

impl Sweep {
    pub const CSV_HEADER: &'static str = "p,beta,tau_x,tau_y,m,trials,discarded,mean,std_error,extrapolated,gap";

    /// One row per β, then the λ reference row (empty `beta` and `gap`).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{}\n", r.estimate.to_csv(), opt(r.gap)));
        }
        if let Some(l) = &self.lambda {
            out.push_str(&format!("{},\n", l.to_csv()));
        }
        out
    }
}

/// `φ̂_{p,β}(ν)` along an ascending β grid on shared configurations, with
/// `λ̂_p(ν^⊥)` on the same seeds as reference.
pub fn continuity_sweep(
    p: f64,
    nu: (f64, f64),
    m: usize,
    beta_grid: &[f64],
    trials: usize,
    seed: u64,
    opts: &EstimatorOptions,
) -> Result<Sweep> {
    check_common(p, nu, m, trials)?;
    if beta_grid.is_empty() {
        return Err(Error::InvalidParameter("empty beta grid".into()));
    }
    if beta_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("beta grid must be strictly ascending".into()));
    }
    let nu = unit(nu);
    let tau = perp(nu);
    let phi_samples = passage_samples(p, beta_grid, tau, m, trials, seed, 1)?;
    let lambda_samples = lambda_samples(p, tau, m, trials, seed)?;
    let lambda = match lambda_estimate(p, tau, m, seed, &lambda_samples, opts) {
        Ok(e) => Some(e),
        Err(Error::AllTrialsDiscarded { .. }) => None,
        Err(e) => return Err(e),
    };
    let rows = beta_grid
        .iter()
        .enumerate()
        .map(|(k, &beta)| {
            let column: Vec<f64> = phi_samples.iter().map(|s| s[k]).collect();
            let estimate = phi_estimate(p, beta, nu, m, seed, &column, opts)?;
            let gap = lambda.as_ref().map(|l| l.mean - estimate.mean);
            Ok(SweepRow { beta, estimate, gap })
        })
        .collect::<Result<_>>()?;
    Ok(Sweep { rows, lambda, phi_samples, lambda_samples })
}

/// `{1, 2, 4, …, max}`.
pub fn doubling_grid(max: f64) -> Vec<f64> {
    let mut out = vec![1.0];
    while out.last().unwrap() * 2.0 <= max {
        out.push(out.last().unwrap() * 2.0);
    }
    out
}

/// Reduces a direction to its angle in `[0, π/2)`. `λ` is invariant under
/// `ν ↦ −ν` and `ν ↦ ν^⊥`, so this angle determines the value.
pub fn reduced_angle(v: (f64, f64)) -> f64 {
    let a = v.1.atan2(v.0).rem_euclid(FRAC_PI_2);
    if FRAC_PI_2 - a < 1e-12 {
        0.0
    } else {
        a
    }
}

/// Values of `λ` on a set of directions, looked up modulo the symmetries of
/// the square lattice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaTable {
    /// (reduced angle, value), sorted by angle
    entries: Vec<(f64, f64)>,
    interpolate: bool,
}

impl LambdaTable {
    /// Table that answers only for the listed directions.
    pub fn exact(entries: &[((f64, f64), f64)]) -> Result<Self> {
        Self::build(entries, false)
    }

    /// Table that interpolates linearly in angle between the listed
    /// directions, periodically on `[0, π/2)`.
    pub fn interpolated(entries: &[((f64, f64), f64)]) -> Result<Self> {
        Self::build(entries, true)
    }

    fn build(entries: &[((f64, f64), f64)], interpolate: bool) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter("empty lambda table".into()));
        }
        let mut list = Vec::with_capacity(entries.len());
        for &(dir, value) in entries {
            if dir == (0.0, 0.0) {
                return Err(Error::ZeroDirection);
            }
            list.push((reduced_angle(dir), value));
        }
        list.sort_by(|a, b| a.0.total_cmp(&b.0));
        list.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12);
        Ok(LambdaTable { entries: list, interpolate })
    }

    /// `n` evenly spaced directions `θ_k = k·(π/2)/n` with values `f(θ_k)`.
    pub fn from_angles(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let entries: Vec<_> = (0..n)
            .map(|k| {
                let a = k as f64 * FRAC_PI_2 / n as f64;
                ((a.cos(), a.sin()), f(a))
            })
            .collect();
        Self::interpolated(&entries)
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn lookup(&self, dir: (f64, f64)) -> Result<f64> {
        if dir == (0.0, 0.0) {
            return Err(Error::ZeroDirection);
        }
        let a = reduced_angle(dir);
        let close = |x: f64| {
            let d = (x - a).abs();
            d.min(FRAC_PI_2 - d) < 1e-9
        };
        if let Some(&(_, v)) = self.entries.iter().find(|e| close(e.0)) {
            return Ok(v);
        }
        if !self.interpolate {
            return Err(Error::MissingDirection(a));
        }
        let k = self.entries.partition_point(|e| e.0 < a);
        let n = self.entries.len();
        let (first, last) = (self.entries[0], self.entries[n - 1]);
        let (lo, hi) = if k == 0 {
            ((last.0 - FRAC_PI_2, last.1), first)
        } else if k == n {
            (last, (first.0 + FRAC_PI_2, first.1))
        } else {
            (self.entries[k - 1], self.entries[k])
        };
        if hi.0 - lo.0 <= 0.0 {
            return Ok(lo.1);
        }
        let t = (a - lo.0) / (hi.0 - lo.0);
        Ok(lo.1 + t * (hi.1 - lo.1))
    }
}

/// Interpolated table of `λ̂_p` on `per_quadrant` directions in `[0, π/2)`.
pub fn lambda_table(
    p: f64,
    m: usize,
    per_quadrant: usize,
    trials: usize,
    seed: u64,
) -> Result<(LambdaTable, Vec<Estimate>)> {
    if per_quadrant == 0 {
        return Err(Error::InvalidParameter("need at least one direction".into()));
    }
    let mut entries = Vec::new();
    let mut estimates = Vec::new();
    for k in 0..per_quadrant {
        let a = k as f64 * FRAC_PI_2 / per_quadrant as f64;
        let tau = (a.cos(), a.sin());
        let e = estimate_lambda(p, tau, m, trials, seed, &EstimatorOptions::plain())?;
        entries.push((tau, e.mean));
        estimates.push(e);
    }
    Ok((LambdaTable::interpolated(&entries)?, estimates))
}

/// Axis-aligned rectangle `[min.0, max.0] x [min.1, max.1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Domain {
    pub min: (f64, f64),
    pub max: (f64, f64),
}

impl Domain {
    pub fn new(min: (f64, f64), max: (f64, f64)) -> Result<Self> {
        if !(min.0 < max.0 && min.1 < max.1) {
            return Err(Error::InvalidParameter("degenerate domain".into()));
        }
        Ok(Domain { min, max })
    }
}

/// Boundary of the phase `{u = 1}` as a closed simple polygon inside a
/// rectangular domain. An empty vertex list means no interface.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolygonalPhase {
    pub domain: Domain,
    vertices: Vec<(f64, f64)>,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn on_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> bool {
    p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

fn segments_touch(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let (d1, d2) = (cross(c, d, a), cross(c, d, b));
    let (d3, d4) = (cross(a, b, c), cross(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(a, c, d))
        || (d2 == 0.0 && on_segment(b, c, d))
        || (d3 == 0.0 && on_segment(c, a, b))
        || (d4 == 0.0 && on_segment(d, a, b))
}

impl PolygonalPhase {
    pub fn empty(domain: Domain) -> Self {
        PolygonalPhase { domain, vertices: Vec::new() }
    }

    pub fn new(domain: Domain, vertices: Vec<(f64, f64)>) -> Result<Self> {
        if vertices.is_empty() {
            return Ok(Self::empty(domain));
        }
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolygon(format!("{n} vertices")));
        }
        if vertices.iter().any(|v| !v.0.is_finite() || !v.1.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite vertex".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                if vertices[i] == vertices[j] {
                    return Err(Error::InvalidPolygon(format!("repeated vertex {:?}", vertices[i])));
                }
            }
        }
        let edge = |i: usize| (vertices[i], vertices[(i + 1) % n]);
        for i in 0..n {
            let (a, b) = edge(i);
            if cross(vertices[(i + n - 1) % n], a, b) == 0.0 {
                let prev = vertices[(i + n - 1) % n];
                // a straight angle is fine, a fold back is not
                if (a.0 - prev.0) * (b.0 - a.0) + (a.1 - prev.1) * (b.1 - a.1) < 0.0 {
                    return Err(Error::InvalidPolygon(format!("edge folds back at {a:?}")));
                }
            }
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                let (c, d) = edge(j);
                if segments_touch(a, b, c, d) {
                    return Err(Error::InvalidPolygon(format!("edges {i} and {j} intersect")));
                }
            }
        }
        Ok(PolygonalPhase { domain, vertices })
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Pieces of the polygon edges inside the open domain, each with its
    /// outward-or-inward normal (orientation does not matter for `λ`).
    pub fn interface_segments(&self) -> Vec<((f64, f64), (f64, f64))> {
        let n = self.vertices.len();
        let mut out = Vec::new();
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            if let Some((s, t)) = clip(a, b, &self.domain) {
                if !on_domain_boundary(s, t, &self.domain) {
                    out.push((s, t));
                }
            }
        }
        out
    }
}

/// Liang–Barsky clipping of segment `ab` to the closed domain.
fn clip(a: (f64, f64), b: (f64, f64), dom: &Domain) -> Option<((f64, f64), (f64, f64))> {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (pk, qk) in [
        (-dx, a.0 - dom.min.0),
        (dx, dom.max.0 - a.0),
        (-dy, a.1 - dom.min.1),
        (dy, dom.max.1 - a.1),
    ] {
        if pk == 0.0 {
            if qk < 0.0 {
                return None;
            }
        } else {
            let r = qk / pk;
            if pk < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    (t0 < t1).then_some(((a.0 + t0 * dx, a.1 + t0 * dy), (a.0 + t1 * dx, a.1 + t1 * dy)))
}

fn on_domain_boundary(s: (f64, f64), t: (f64, f64), dom: &Domain) -> bool {
    (s.0 == t.0 && (s.0 == dom.min.0 || s.0 == dom.max.0)) || (s.1 == t.1 && (s.1 == dom.min.1 || s.1 == dom.max.1))
}

/// `Σ length · λ(normal)` over the parts of the phase boundary inside the
/// domain.
pub fn limit_functional(phase: &PolygonalPhase, table: &LambdaTable) -> Result<f64> {
    let mut total = 0.0;
    for (s, t) in phase.interface_segments() {
        let (dx, dy) = (t.0 - s.0, t.1 - s.1);
        let len = dx.hypot(dy);
        total += len * table.lookup((dy / len, -dx / len))?;
    }
    Ok(total)
}
