//! Rigid spin energies and boundary-value ground states.
//!
//! A broken weak bond costs `eps`; a broken strong bond makes the energy
//! infinite. Ground states are minimum cuts between the `+1` and `-1` frozen
//! sets, with strong bonds priced above any possible weak cut so that the
//! solver minimizes broken strong bonds first.

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::estimators::{estimate_lambda, Estimate, EstimatorOptions};
use crate::flow::FlowNetwork;
use crate::lattice::{BondConfig, Window};
use crate::rng::{splitmix64, trial_seed};
use crate::stats::mean_se;

/// ±1 spins on the vertices of a window, with a mask of frozen vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinField {
    window: Window,
    values: Vec<i8>,
    frozen: Vec<bool>,
    eps: f64,
}

impl SpinField {
    pub fn uniform(window: Window, value: i8, eps: f64) -> Self {
        assert!(value == 1 || value == -1);
        SpinField {
            window,
            values: vec![value; window.vertex_count()],
            frozen: vec![false; window.vertex_count()],
            eps,
        }
    }

    /// `f(i, j)` gives the value and frozen flag of local vertex `(i, j)`.
    pub fn from_fn(window: Window, eps: f64, mut f: impl FnMut(usize, usize) -> (i8, bool)) -> Self {
        let mut field = SpinField::uniform(window, 1, eps);
        for j in 0..window.height() {
            for i in 0..window.width() {
                let (v, fr) = f(i, j);
                assert!(v == 1 || v == -1);
                let k = window.vertex_index(i, j);
                field.values[k] = v;
                field.frozen[k] = fr;
            }
        }
        field
    }

    /// Boundary ring frozen: `+1` on rows `j >= height / 2`, `-1` below.
    /// The sign changes sit at mid-height on the left and right edges.
    pub fn halves(window: Window, eps: f64) -> Self {
        let (w, h) = (window.width(), window.height());
        SpinField::from_fn(window, eps, |i, j| {
            let ring = i == 0 || j == 0 || i + 1 == w || j + 1 == h;
            (if j >= h / 2 { 1 } else { -1 }, ring)
        })
    }

    /// Top row frozen `+1`, bottom row frozen `-1`, everything else free.
    pub fn top_bottom(window: Window, eps: f64) -> Self {
        let h = window.height();
        SpinField::from_fn(window, eps, |_, j| {
            if j + 1 == h {
                (1, true)
            } else if j == 0 {
                (-1, true)
            } else {
                (1, false)
            }
        })
    }

    /// Boundary ring frozen to i.i.d. fair ±1 values drawn from `seed`.
    pub fn random_ring(window: Window, eps: f64, seed: u64) -> Self {
        let (w, h) = (window.width(), window.height());
        SpinField::from_fn(window, eps, |i, j| {
            let ring = i == 0 || j == 0 || i + 1 == w || j + 1 == h;
            let bit = splitmix64(seed ^ splitmix64(window.vertex_index(i, j) as u64)) >> 63;
            (if bit == 1 { 1 } else { -1 }, ring)
        })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.values[self.window.vertex_index(i, j)]
    }

    pub fn is_frozen(&self, i: usize, j: usize) -> bool {
        self.frozen[self.window.vertex_index(i, j)]
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    /// Sets a free vertex. Frozen vertices are left untouched and `false` is
    /// returned.
    pub fn set(&mut self, i: usize, j: usize, value: i8) -> bool {
        assert!(value == 1 || value == -1);
        let k = self.window.vertex_index(i, j);
        if self.frozen[k] {
            return false;
        }
        self.values[k] = value;
        true
    }

    /// Copy with every frozen value negated.
    pub fn with_flipped_boundary(&self) -> Self {
        let mut out = self.clone();
        for k in 0..out.values.len() {
            if out.frozen[k] {
                out.values[k] = -out.values[k];
            }
        }
        out
    }

    /// Grid of `+`/`-` characters, row 0 at the top.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity((self.window.width() + 1) * self.window.height());
        for j in (0..self.window.height()).rev() {
            for i in 0..self.window.width() {
                out.push(if self.get(i, j) > 0 { '+' } else { '-' });
            }
            out.push('\n');
        }
        out
    }

    /// Parses a `+`/`-` grid (row 0 at the top) into a field with nothing
    /// frozen, on a window with origin 0.
    pub fn from_text(text: &str, eps: f64) -> Result<Self> {
        let rows: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Parse("ragged spin grid".into()));
        }
        let window = Window::new(width, height)?;
        let mut field = SpinField::uniform(window, 1, eps);
        for (r, row) in rows.iter().enumerate() {
            let j = height - 1 - r;
            for (i, c) in row.chars().enumerate() {
                let v = match c {
                    '+' => 1,
                    '-' => -1,
                    _ => return Err(Error::Parse(format!("unexpected spin character {c:?}"))),
                };
                field.values[window.vertex_index(i, j)] = v;
            }
        }
        Ok(field)
    }
}

/// Energy of a spin field: `eps` per broken weak bond, infinite as soon as a
/// strong bond is broken.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyValue {
    pub eps: f64,
    pub broken_weak: u64,
    pub broken_strong: u64,
}

impl EnergyValue {
    pub fn is_finite(&self) -> bool {
        self.broken_strong == 0
    }

    pub fn value(&self) -> Option<f64> {
        self.is_finite().then_some(self.eps * self.broken_weak as f64)
    }

    /// `f64::INFINITY` for infinite energies.
    pub fn as_f64(&self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }
}

impl Serialize for EnergyValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("EnergyValue", 4)?;
        st.serialize_field("finite", &self.is_finite())?;
        st.serialize_field("value", &self.value())?;
        st.serialize_field("broken_weak", &self.broken_weak)?;
        st.serialize_field("broken_strong", &self.broken_strong)?;
        st.end()
    }
}

pub fn energy(cfg: &BondConfig, u: &SpinField) -> Result<EnergyValue> {
    let w = cfg.window();
    if w != u.window() {
        return Err(Error::WindowMismatch);
    }
    let (mut weak, mut strong) = (0, 0);
    for k in 0..w.bond_count() {
        let [(i0, j0), (i1, j1)] = w.endpoints(w.bond(k));
        if u.get(i0, j0) != u.get(i1, j1) {
            if cfg.is_strong_flat(k) {
                strong += 1;
            } else {
                weak += 1;
            }
        }
    }
    Ok(EnergyValue { eps: u.eps, broken_weak: weak, broken_strong: strong })
}

/// Minimizes the energy over the free vertices of `bc`, keeping its frozen
/// values. Among minimizers the one with the smallest `+1` region is
/// returned.
pub fn ground_state(cfg: &BondConfig, bc: &SpinField) -> Result<(SpinField, EnergyValue)> {
    let w = cfg.window();
    if w != bc.window() {
        return Err(Error::WindowMismatch);
    }
    let frozen_values = || bc.values.iter().zip(&bc.frozen).filter(|(_, &f)| f).map(|(&v, _)| v);
    if frozen_values().next().is_none() {
        return Err(Error::EmptyFrozenSet);
    }
    let has_plus = frozen_values().any(|v| v > 0);
    let has_minus = frozen_values().any(|v| v < 0);
    let mut out = bc.clone();
    if !(has_plus && has_minus) {
        let fill = if has_plus { 1 } else { -1 };
        for k in 0..out.values.len() {
            if !out.frozen[k] {
                out.values[k] = fill;
            }
        }
        let e = energy(cfg, &out)?;
        return Ok((out, e));
    }

    let n = w.vertex_count();
    let (s, t) = (n, n + 1);
    let strong_cap = cfg.weak_count() as i64 + 1;
    let pin = strong_cap * (w.bond_count() as i64 + 1);
    let mut net = FlowNetwork::new(n + 2);
    for k in 0..w.bond_count() {
        let [(i0, j0), (i1, j1)] = w.endpoints(w.bond(k));
        let cap = if cfg.is_strong_flat(k) { strong_cap } else { 1 };
        net.add_undirected(w.vertex_index(i0, j0), w.vertex_index(i1, j1), cap);
    }
    for v in 0..n {
        if bc.frozen[v] {
            if bc.values[v] > 0 {
                net.add_edge(s, v, pin);
            } else {
                net.add_edge(v, t, pin);
            }
        }
    }
    net.max_flow(s, t);
    let plus_side = net.residual_reachable(s);
    for v in 0..n {
        if !out.frozen[v] {
            out.values[v] = if plus_side[v] { 1 } else { -1 };
        }
    }
    let e = energy(cfg, &out)?;
    Ok((out, e))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RigidityReport {
    pub p: f64,
    pub n: usize,
    pub trials: usize,
    pub infinite: usize,
    pub fraction: f64,
}

/// Fraction of `n x n` windows whose half/half boundary ring forces an
/// infinite ground-state energy.
pub fn rigidity_probe(p: f64, n: usize, trials: usize, seed: u64) -> Result<RigidityReport> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!("N must be at least 8, got {n}")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let window = Window::new(n, n)?;
    let bc = SpinField::halves(window, 1.0);
    let infinite: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let cfg = BondConfig::sample(window, p, trial_seed(seed, t))?;
            Ok(!ground_state(&cfg, &bc)?.1.is_finite())
        })
        .collect::<Result<_>>()?;
    let count = infinite.iter().filter(|&&x| x).count();
    Ok(RigidityReport { p, n, trials, infinite: count, fraction: count as f64 / trials as f64 })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterfaceComparison {
    pub p: f64,
    pub n: usize,
    pub trials: usize,
    /// trials with infinite ground-state energy
    pub discarded: usize,
    pub density_mean: f64,
    pub density_se: f64,
    pub densities: Vec<Option<f64>>,
    pub lambda: Estimate,
    pub difference: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

impl InterfaceComparison {
    pub const CSV_HEADER: &'static str =
        "p,N,trials,discarded,density_mean,density_se,lambda_mean,lambda_se,difference,tolerance,within_tolerance";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.p,
            self.n,
            self.trials,
            self.discarded,
            self.density_mean,
            self.density_se,
            self.lambda.mean,
            self.lambda.std_error,
            self.difference,
            self.tolerance,
            self.within_tolerance
        )
    }
}

/// Ground-state interface energy per unit length under the half/half ring,
/// against the chemical-distance time constant in direction e1 at scale `n`.
/// Infinite-energy trials are discarded. The tolerance is three combined
/// standard errors plus `8 / n`.
pub fn interface_vs_lambda(p: f64, n: usize, trials: usize, seed: u64) -> Result<InterfaceComparison> {
    if !(0.0..0.5).contains(&p) {
        return Err(Error::InvalidParameter(format!("interface comparison needs 0 <= p < 1/2, got {p}")));
    }
    if n < 8 {
        return Err(Error::InvalidParameter(format!("N must be at least 8, got {n}")));
    }
    if trials < 2 {
        return Err(Error::InvalidParameter("at least two trials are needed".into()));
    }
    let window = Window::new(n, n)?;
    let bc = SpinField::halves(window, 1.0);
    let densities: Vec<Option<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let cfg = BondConfig::sample(window, p, trial_seed(seed, t))?;
            let (_, e) = ground_state(&cfg, &bc)?;
            Ok(e.value().map(|v| v / (bc.eps() * n as f64)))
        })
        .collect::<Result<_>>()?;
    let finite: Vec<f64> = densities.iter().flatten().copied().collect();
    if finite.is_empty() {
        return Err(Error::AllTrialsDiscarded { trials });
    }
    let (density_mean, density_se) = mean_se(&finite);
    let lambda = estimate_lambda(p, (1.0, 0.0), n, trials, seed, &EstimatorOptions::default())?;
    let difference = density_mean - lambda.mean;
    let tolerance = 3.0 * density_se.hypot(lambda.std_error) + 8.0 / n as f64;
    Ok(InterfaceComparison {
        p,
        n,
        trials,
        discarded: trials - finite.len(),
        density_mean,
        density_se,
        densities,
        lambda,
        difference,
        tolerance,
        within_tolerance: difference.abs() <= tolerance,
    })
}
