//! Disjoint weak channels in (rotated) rectangles, strong channels on the
//! shifted lattice `Z^2 + (1/2, 1/2)`, and the minimal strong-link count of
//! length-limited channels.
//!
//! A channel is a path of bonds joining the two short sides of a rectangle.
//! Channels are counted bond-disjoint: the maximum family is a max-flow with
//! unit node capacities on the bond adjacency graph.

use std::collections::{BinaryHeap, VecDeque};
use std::cmp::Reverse;

use serde::Serialize;

use crate::clusters::Direction;
use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::lattice::{BondConfig, BondId, Orientation, Vertex, Window};
use crate::unionfind::UnionFind;

const EPS: f64 = 1e-9;

/// The rectangle `N (T + x0)` with
/// `T = { |<x, nu>| <= delta/2, 0 <= <x, nu_perp> <= 1 }` and
/// `nu_perp = (nu_y, -nu_x)`: long side `N` along `nu_perp`, short side
/// `delta N` along `nu`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RectangleSpec {
    pub x0: (f64, f64),
    pub nu: (f64, f64),
    pub delta: f64,
    pub n: usize,
}

/// Finds small integers `(a, b)` with `(a, b) ∥ (x, y)`.
fn rational_direction(x: f64, y: f64) -> Option<(i64, i64)> {
    if x == 0.0 {
        return Some((0, y.signum() as i64));
    }
    if y == 0.0 {
        return Some((x.signum() as i64, 0));
    }
    // continued fraction of |y / x|
    let target = (y / x).abs();
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = target;
    for _ in 0..40 {
        let a = r.floor();
        let (h2, k2) = (a as i64 * h1 + h0, a as i64 * k1 + k0);
        if k2 > 1000 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64 / k1 as f64) - target).abs() <= 1e-9 * target.max(1.0) {
            return Some((k1 * x.signum() as i64, h1 * y.signum() as i64));
        }
        let frac = r - a;
        if frac < 1e-12 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

impl RectangleSpec {
    pub fn new(x0: (f64, f64), nu: (f64, f64), delta: f64, n: usize) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidParameter(format!("delta must lie in (0, 1], got {delta}")));
        }
        if n < 4 {
            return Err(Error::InvalidParameter(format!("N must be at least 4, got {n}")));
        }
        let norm = nu.0.hypot(nu.1);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroDirection);
        }
        if rational_direction(nu.0, nu.1).is_none() {
            return Err(Error::IrrationalDirection(nu.0, nu.1));
        }
        Ok(RectangleSpec { x0, nu: (nu.0 / norm, nu.1 / norm), delta, n })
    }

    pub fn nu_perp(&self) -> (f64, f64) {
        (self.nu.1, -self.nu.0)
    }

    fn anchor(&self) -> (f64, f64) {
        (self.n as f64 * self.x0.0, self.n as f64 * self.x0.1)
    }

    /// Coordinate along the long side, 0 on the first short side and `N` on
    /// the second.
    pub fn along(&self, x: f64, y: f64) -> f64 {
        let (ax, ay) = self.anchor();
        let (px, py) = self.nu_perp();
        (x - ax) * px + (y - ay) * py
    }

    /// Signed distance from the centre line along `nu`.
    pub fn across(&self, x: f64, y: f64) -> f64 {
        let (ax, ay) = self.anchor();
        (x - ax) * self.nu.0 + (y - ay) * self.nu.1
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let s = self.along(x, y);
        let t = self.across(x, y);
        let n = self.n as f64;
        s >= -EPS && s <= n + EPS && t.abs() <= self.delta * n / 2.0 + EPS
    }

    fn corners(&self) -> [(f64, f64); 4] {
        let (ax, ay) = self.anchor();
        let (px, py) = self.nu_perp();
        let n = self.n as f64;
        let h = self.delta * n / 2.0;
        let mut out = [(0.0, 0.0); 4];
        let mut k = 0;
        for s in [0.0, n] {
            for t in [-h, h] {
                out[k] = (ax + s * px + t * self.nu.0, ay + s * py + t * self.nu.1);
                k += 1;
            }
        }
        out
    }

    /// Integer bounding box of the rectangle grown by one lattice unit.
    pub fn bounding_box(&self) -> (Vertex, Vertex) {
        let c = self.corners();
        let min_x = c.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let max_x = c.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let min_y = c.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let max_y = c.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        (
            Vertex::new((min_x + EPS).floor() as i64 - 1, (min_y + EPS).floor() as i64 - 1),
            Vertex::new((max_x - EPS).ceil() as i64 + 1, (max_y - EPS).ceil() as i64 + 1),
        )
    }

    /// Smallest window holding the rectangle with a unit margin.
    pub fn fitting_window(&self) -> Window {
        let (lo, hi) = self.bounding_box();
        Window::spanning(lo, hi).expect("rectangle with N >= 4 spans at least two vertices")
    }

    fn check_fits(&self, w: &Window) -> Result<()> {
        let (lo, hi) = self.bounding_box();
        if w.contains(lo) && w.contains(hi) {
            Ok(())
        } else {
            Err(Error::RectangleOutsideWindow)
        }
    }
}

/// Which bonds form channels and how they connect.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Lattice {
    /// weak bonds, adjacent through shared Z^2 endpoints
    Weak,
    /// strong bonds, adjacent through shared endpoints of their dual segments
    StrongDual,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelReport {
    pub count: usize,
    pub max_length: usize,
    pub normalized: f64,
    pub length_ratio: f64,
    /// A maximum bond-disjoint family, each path ordered from the first short
    /// side to the second.
    #[serde(skip)]
    pub paths: Vec<Vec<BondId>>,
    /// A minimum set of bonds whose removal disconnects the two sides.
    #[serde(skip)]
    pub cut: Vec<BondId>,
}

impl ChannelReport {
    pub const CSV_HEADER: &'static str = "p,N,delta,nu_x,nu_y,seed,count,normalized,max_length,length_ratio";

    pub fn to_csv(&self, cfg: &BondConfig, rect: &RectangleSpec) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            cfg.p(),
            rect.n,
            rect.delta,
            rect.nu.0,
            rect.nu.1,
            cfg.seed(),
            self.count,
            self.normalized,
            self.max_length,
            self.length_ratio
        )
    }
}

/// Members of the channel graph inside a rectangle.
struct ChannelGraph {
    lattice: Lattice,
    /// flat ids of member bonds
    members: Vec<usize>,
    /// member index of each flat bond, or usize::MAX
    slot: Vec<usize>,
    source: Vec<bool>,
    sink: Vec<bool>,
}

fn segment(w: &Window, flat: usize, lattice: Lattice) -> [(f64, f64); 2] {
    let b = w.bond(flat);
    let (i, j) = w.bond_base(b);
    let v = w.to_global(i, j);
    let (x, y) = (v.x as f64, v.y as f64);
    match (lattice, b.orientation) {
        (Lattice::Weak, Orientation::Horizontal) => [(x, y), (x + 1.0, y)],
        (Lattice::Weak, Orientation::Vertical) => [(x, y), (x, y + 1.0)],
        (Lattice::StrongDual, Orientation::Horizontal) => [(x + 0.5, y - 0.5), (x + 0.5, y + 0.5)],
        (Lattice::StrongDual, Orientation::Vertical) => [(x - 0.5, y + 0.5), (x + 0.5, y + 0.5)],
    }
}

impl ChannelGraph {
    fn build(cfg: &BondConfig, rect: &RectangleSpec, lattice: Lattice, member: impl Fn(usize) -> bool) -> Result<Self> {
        let w = cfg.window();
        rect.check_fits(w)?;
        let n = rect.n as f64;
        let mut members = Vec::new();
        let mut slot = vec![usize::MAX; w.bond_count()];
        let mut source = Vec::new();
        let mut sink = Vec::new();
        for k in 0..w.bond_count() {
            if !member(k) {
                continue;
            }
            let mid = w.midpoint_unchecked(w.bond(k));
            if !rect.contains(mid.x(), mid.y()) {
                continue;
            }
            let [a, b] = segment(w, k, lattice);
            let (sa, sb) = (rect.along(a.0, a.1), rect.along(b.0, b.1));
            let (lo, hi) = (sa.min(sb), sa.max(sb));
            slot[k] = members.len();
            members.push(k);
            source.push(lo <= EPS && hi >= -EPS);
            sink.push(lo <= n + EPS && hi >= n - EPS);
        }
        Ok(ChannelGraph { lattice, members, slot, source, sink })
    }

    fn neighbors<'a>(&'a self, w: &'a Window, m: usize) -> impl Iterator<Item = usize> + 'a {
        let flat = self.members[m];
        let it = match self.lattice {
            Lattice::Weak => w.neighbors(flat),
            Lattice::StrongDual => w.dual_neighbors(flat),
        };
        it.filter(|&k| self.slot[k] != usize::MAX).map(|k| self.slot[k])
    }
}

fn count_channels(cfg: &BondConfig, rect: &RectangleSpec, lattice: Lattice) -> Result<ChannelReport> {
    let graph = match lattice {
        Lattice::Weak => ChannelGraph::build(cfg, rect, lattice, |k| cfg.is_weak_flat(k))?,
        Lattice::StrongDual => ChannelGraph::build(cfg, rect, lattice, |k| cfg.is_strong_flat(k))?,
    };
    let w = cfg.window();
    let m = graph.members.len();
    let (s, t) = (2 * m, 2 * m + 1);
    // only the split arcs in -> out are finite, so every minimum cut is a
    // set of bonds
    let unbounded = m as i64 + 1;
    let mut net = FlowNetwork::new(2 * m + 2);
    for v in 0..m {
        net.add_edge(2 * v, 2 * v + 1, 1);
        for u in graph.neighbors(w, v) {
            net.add_edge(2 * v + 1, 2 * u, unbounded);
        }
        if graph.source[v] {
            net.add_edge(s, 2 * v, unbounded);
        }
        if graph.sink[v] {
            net.add_edge(2 * v + 1, t, unbounded);
        }
    }
    let count = net.max_flow(s, t) as usize;

    // path decomposition: every member carries at most one unit
    let mut next = vec![usize::MAX; 2 * m + 2];
    let mut starts = Vec::new();
    for (from, to, _) in net.positive_flow_arcs() {
        if from == s {
            starts.push(to / 2);
        } else if from % 2 == 1 {
            next[from] = to;
        }
    }
    starts.sort_unstable();
    let mut paths = Vec::with_capacity(count);
    for start in starts {
        let mut path = vec![w.bond(graph.members[start])];
        let mut cur = start;
        loop {
            let to = next[2 * cur + 1];
            if to == t {
                break;
            }
            cur = to / 2;
            path.push(w.bond(graph.members[cur]));
        }
        paths.push(path);
    }

    let reach = net.residual_reachable(s);
    let cut: Vec<BondId> = (0..m)
        .filter(|&v| reach[2 * v] && !reach[2 * v + 1])
        .map(|v| w.bond(graph.members[v]))
        .collect();

    let max_length = paths.iter().map(Vec::len).max().unwrap_or(0);
    Ok(ChannelReport {
        count,
        max_length,
        normalized: count as f64 / (rect.n as f64 * rect.delta),
        length_ratio: max_length as f64 / rect.n as f64,
        paths,
        cut,
    })
}

/// Maximum number of bond-disjoint weak channels joining the short sides.
pub fn count_disjoint_channels(cfg: &BondConfig, rect: &RectangleSpec) -> Result<ChannelReport> {
    count_channels(cfg, rect, Lattice::Weak)
}

/// Same count for strong bonds, with adjacency through the shifted lattice.
pub fn count_strong_dual_channels(cfg: &BondConfig, rect: &RectangleSpec) -> Result<ChannelReport> {
    count_channels(cfg, rect, Lattice::StrongDual)
}

/// Checks both Menger certificates of a report: the paths form a valid
/// bond-disjoint family of the stated size, and removing the cut (of the
/// same size) disconnects the two short sides.
pub fn verify_weak_certificates(cfg: &BondConfig, rect: &RectangleSpec, report: &ChannelReport) -> std::result::Result<(), String> {
    verify(cfg, rect, report, Lattice::Weak)
}

pub fn verify_strong_certificates(cfg: &BondConfig, rect: &RectangleSpec, report: &ChannelReport) -> std::result::Result<(), String> {
    verify(cfg, rect, report, Lattice::StrongDual)
}

fn verify(cfg: &BondConfig, rect: &RectangleSpec, report: &ChannelReport, lattice: Lattice) -> std::result::Result<(), String> {
    let graph = match lattice {
        Lattice::Weak => ChannelGraph::build(cfg, rect, lattice, |k| cfg.is_weak_flat(k)),
        Lattice::StrongDual => ChannelGraph::build(cfg, rect, lattice, |k| cfg.is_strong_flat(k)),
    }
    .map_err(|e| e.to_string())?;
    let w = cfg.window();
    if report.paths.len() != report.count {
        return Err(format!("{} paths for count {}", report.paths.len(), report.count));
    }
    if report.cut.len() != report.count {
        return Err(format!("cut of size {} for count {}", report.cut.len(), report.count));
    }
    let mut used = vec![false; graph.members.len()];
    for path in &report.paths {
        let slots: Vec<usize> = path.iter().map(|&b| graph.slot[w.flat(b)]).collect();
        if slots.contains(&usize::MAX) {
            return Err("path uses a bond outside the channel graph".into());
        }
        if !graph.source[slots[0]] || !graph.sink[*slots.last().unwrap()] {
            return Err("path does not join the two sides".into());
        }
        for pair in slots.windows(2) {
            if !graph.neighbors(w, pair[0]).any(|u| u == pair[1]) {
                return Err("consecutive path bonds are not adjacent".into());
            }
        }
        for &s in &slots {
            if used[s] {
                return Err("paths share a bond".into());
            }
            used[s] = true;
        }
    }
    let mut removed = vec![false; graph.members.len()];
    for &b in &report.cut {
        let s = graph.slot[w.flat(b)];
        if s == usize::MAX {
            return Err("cut bond outside the channel graph".into());
        }
        removed[s] = true;
    }
    let mut seen = vec![false; graph.members.len()];
    let mut queue: VecDeque<usize> = (0..graph.members.len()).filter(|&v| graph.source[v] && !removed[v]).collect();
    for &v in &queue {
        seen[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        if graph.sink[v] {
            return Err("cut does not separate the sides".into());
        }
        for u in graph.neighbors(w, v) {
            if !seen[u] && !removed[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    Ok(())
}

/// Minimal number of strong bonds over all channels (weak or strong bonds,
/// Z^2 adjacency) with at most `budget` bonds. `None` when no channel fits
/// the budget.
///
/// Label-setting over `(strong count, length)` labels in lexicographic
/// order; a label is dropped when its node already holds a settled label of
/// no greater length.
pub fn strong_link_percentage(cfg: &BondConfig, rect: &RectangleSpec, budget: usize) -> Result<Option<u64>> {
    let graph = ChannelGraph::build(cfg, rect, Lattice::Weak, |_| true)?;
    let w = cfg.window();
    let m = graph.members.len();
    let budget = budget as u64;
    let cost = |v: usize| u64::from(cfg.is_strong_flat(graph.members[v]));
    let mut best_len = vec![u64::MAX; m];
    let mut heap = BinaryHeap::new();
    if budget >= 1 {
        for v in (0..m).filter(|&v| graph.source[v]) {
            heap.push(Reverse((cost(v), 1u64, v)));
        }
    }
    while let Some(Reverse((strong, len, v))) = heap.pop() {
        if len >= best_len[v] {
            continue;
        }
        best_len[v] = len;
        if graph.sink[v] {
            return Ok(Some(strong));
        }
        if len == budget {
            continue;
        }
        for u in graph.neighbors(w, v) {
            if len + 1 < best_len[u] {
                heap.push(Reverse((strong + cost(u), len + 1, u)));
            }
        }
    }
    Ok(None)
}

/// True iff strong bonds joined through shared faces connect the two
/// opposite edges of the dual window. A left-right weak crossing and a
/// bottom-top strong dual crossing exclude each other; on a window of
/// `(n+1) x n` vertices exactly one of them occurs.
pub fn has_strong_dual_crossing(cfg: &BondConfig, direction: Direction) -> bool {
    let w = cfg.window();
    let (fw, fh) = (w.width() + 1, w.height() + 1);
    let face = |a: i64, b: i64| (a + 1) as usize + (b + 1) as usize * fw;
    let mut uf = UnionFind::new(fw * fh);
    for k in 0..w.bond_count() {
        if cfg.is_strong_flat(k) {
            let [(a0, b0), (a1, b1)] = w.adjacent_faces(k);
            uf.union(face(a0, b0), face(a1, b1));
        }
    }
    let (wi, hi) = (w.width() as i64, w.height() as i64);
    let (start, end): (Vec<usize>, Vec<usize>) = match direction {
        Direction::BottomTop => ((-1..wi).map(|a| face(a, -1)).collect(), (-1..wi).map(|a| face(a, hi - 1)).collect()),
        Direction::LeftRight => ((-1..hi).map(|b| face(-1, b)).collect(), (-1..hi).map(|b| face(wi - 1, b)).collect()),
    };
    let mut marked = vec![false; fw * fh];
    for f in start {
        let r = uf.find(f);
        marked[r] = true;
    }
    end.into_iter().any(|f| {
        let r = uf.find(f);
        marked[r]
    })
}
