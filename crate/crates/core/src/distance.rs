//! Chemical distance on the weak cluster and passage times on the weighted
//! lattice.
//!
//! Chemical distances count bonds, both end bonds included: two adjacent weak
//! bonds are at distance 2 and a weak bond is at distance 1 from itself.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};
use std::fmt::Write as _;

use crate::clusters::ClusterLabels;
use crate::error::{Error, Result};
use crate::lattice::{BondConfig, BondId, DualPoint, Vertex};

#[derive(Clone, Debug, PartialEq)]
pub enum PathResult<T, P> {
    Finite { value: T, path: Vec<P> },
    Unreachable,
}

impl<T: Copy, P> PathResult<T, P> {
    pub fn value(&self) -> Option<T> {
        match self {
            PathResult::Finite { value, .. } => Some(*value),
            PathResult::Unreachable => None,
        }
    }

    pub fn path(&self) -> Option<&[P]> {
        match self {
            PathResult::Finite { path, .. } => Some(path),
            PathResult::Unreachable => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, PathResult::Finite { .. })
    }
}

/// Bond count and the weak bonds of one optimal path.
pub type ChemicalPath = PathResult<u64, BondId>;
/// Total weight and the vertices of one optimal path.
pub type PassagePath = PathResult<f64, Vertex>;

/// Weight of a strong bond in the passage-time model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Beta {
    Finite(f64),
    Impassable,
}

impl Beta {
    /// `+∞` maps to [`Beta::Impassable`]; finite values must be at least 1.
    pub fn new(value: f64) -> Result<Self> {
        if value == f64::INFINITY {
            Ok(Beta::Impassable)
        } else if value.is_finite() && value >= 1.0 {
            Ok(Beta::Finite(value))
        } else {
            Err(Error::InvalidParameter(format!("beta must be >= 1 or +inf, got {value}")))
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Beta::Finite(b) => b,
            Beta::Impassable => f64::INFINITY,
        }
    }
}

/// Minimal number of weak bonds in a weak path from bond `x` to bond `y`.
pub fn chemical_distance(cfg: &BondConfig, x: DualPoint, y: DualPoint) -> Result<ChemicalPath> {
    let w = cfg.window();
    let bx = w.flat(w.bond_at_midpoint(x)?);
    let by = w.flat(w.bond_at_midpoint(y)?);
    if cfg.is_strong_flat(bx) || cfg.is_strong_flat(by) {
        return Ok(PathResult::Unreachable);
    }
    let n = w.bond_count();
    let mut dist = vec![u32::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    dist[bx] = 1;
    queue.push_back(bx);
    while let Some(b) = queue.pop_front() {
        if b == by {
            break;
        }
        for c in w.neighbors(b) {
            if cfg.is_weak_flat(c) && dist[c] == u32::MAX {
                dist[c] = dist[b] + 1;
                parent[c] = b;
                queue.push_back(c);
            }
        }
    }
    if dist[by] == u32::MAX {
        return Ok(PathResult::Unreachable);
    }
    let mut path = vec![w.bond(by)];
    let mut cur = by;
    while cur != bx {
        cur = parent[cur];
        path.push(w.bond(cur));
    }
    path.reverse();
    Ok(PathResult::Finite { value: dist[by] as u64, path })
}

/// Shortest weak path between two sets of bonds with per-bond entry and exit
/// costs: the minimum over `(s, a)` in `sources` and `(t, b)` in `targets` of
/// `a + D(s, t) + b`, where `D` is the bond-inclusive chemical distance.
/// Strong bonds in either list are ignored.
pub fn chemical_distance_between(cfg: &BondConfig, sources: &[(usize, u64)], targets: &[(usize, u64)]) -> Option<u64> {
    weighted_between(cfg, sources, targets, 1, None)
}

/// As [`chemical_distance_between`], with every bond costing `step`.
/// Runs a bucket queue, since all costs are small integers.
///
/// With `goal = Some(y)` the search is goal-directed with lower bound
/// `step/2 · doubled ℓ¹ distance to y`. That is only valid when every exit
/// cost is at least `step/2` times the doubled distance from its bond to `y`.
pub(crate) fn weighted_between(
    cfg: &BondConfig,
    sources: &[(usize, u64)],
    targets: &[(usize, u64)],
    step: u64,
    goal: Option<DualPoint>,
) -> Option<u64> {
    let w = cfg.window();
    let n = w.bond_count();
    let mut exit_cost = vec![u64::MAX; n];
    for &(t, b) in targets {
        if cfg.is_weak_flat(t) {
            exit_cost[t] = exit_cost[t].min(b);
        }
    }
    // bounds are in units of step/2 per doubled unit, kept integral by
    // scaling every cost by 2
    let h = |b: usize| -> u64 {
        goal.map_or(0, |y| step * w.midpoint_unchecked(w.bond(b)).l1_doubled(y))
    };
    let mut dist = vec![u64::MAX; n];
    let mut buckets: Vec<Vec<usize>> = Vec::new();
    let push = |buckets: &mut Vec<Vec<usize>>, f: u64, b: usize| {
        let f = f as usize;
        if buckets.len() <= f {
            buckets.resize_with(f + 1, Vec::new);
        }
        buckets[f].push(b);
    };
    for &(s, a) in sources {
        if cfg.is_weak_flat(s) && a + step < dist[s] {
            dist[s] = a + step;
            push(&mut buckets, 2 * (a + step) + h(s), s);
        }
    }
    let mut best = u64::MAX;
    let mut f = 0usize;
    while f < buckets.len() && (f as u64) < best.saturating_mul(2) {
        while let Some(b) = buckets[f].pop() {
            let d = dist[b];
            if 2 * d + h(b) != f as u64 {
                continue;
            }
            if exit_cost[b] != u64::MAX {
                best = best.min(d + exit_cost[b]);
            }
            let nd = d + step;
            for c in w.neighbors(b) {
                if cfg.is_weak_flat(c) && nd < dist[c] {
                    dist[c] = nd;
                    push(&mut buckets, 2 * nd + h(c), c);
                }
            }
        }
        f += 1;
    }
    (best != u64::MAX).then_some(best)
}

#[derive(Clone, Copy, PartialEq)]
struct Cost(f64);

impl Eq for Cost {}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Minimal total weight of a lattice path from `x` to `y`, where weak bonds
/// weigh 1 and strong bonds weigh `beta`.
pub fn passage_time(cfg: &BondConfig, beta: Beta, x: Vertex, y: Vertex) -> Result<PassagePath> {
    let w = cfg.window();
    let (xi, xj) = w.to_local(x).ok_or(Error::VertexOutOfWindow(x))?;
    let (yi, yj) = w.to_local(y).ok_or(Error::VertexOutOfWindow(y))?;
    let src = w.vertex_index(xi, xj);
    let dst = w.vertex_index(yi, yj);
    let n = w.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(Reverse((Cost(0.0), src)));
    while let Some(Reverse((Cost(d), v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        if v == dst {
            break;
        }
        let (i, j) = w.vertex_coords(v);
        for bond in w.incident(i, j) {
            let weight = if cfg.is_strong_flat(bond) {
                match beta {
                    Beta::Finite(b) => b,
                    Beta::Impassable => continue,
                }
            } else {
                1.0
            };
            let [a, b] = w.endpoints(w.bond(bond));
            let other = if a == (i, j) { b } else { a };
            let u = w.vertex_index(other.0, other.1);
            let nd = d + weight;
            if nd < dist[u] {
                dist[u] = nd;
                parent[u] = v;
                heap.push(Reverse((Cost(nd), u)));
            }
        }
    }
    if dist[dst].is_infinite() {
        return Ok(PathResult::Unreachable);
    }
    let mut path = vec![y];
    let mut cur = dst;
    while cur != src {
        cur = parent[cur];
        let (i, j) = w.vertex_coords(cur);
        path.push(w.to_global(i, j));
    }
    path.reverse();
    Ok(PathResult::Finite { value: dist[dst], path })
}

/// Nearest bond midpoint (ℓ¹, ties broken by doubled coordinates) within
/// `radius` that belongs to the spanning cluster of `labels`.
pub fn snap_to_cluster(cfg: &BondConfig, labels: &ClusterLabels, x: DualPoint, radius: u64) -> Option<DualPoint> {
    cluster_points_within(cfg, labels, x, radius).into_iter().next().map(|(p, _)| p)
}

/// Every spanning-cluster bond midpoint within ℓ¹ distance `radius` of `x`,
/// paired with its doubled ℓ¹ distance and sorted by (distance, x2, y2).
pub(crate) fn cluster_points_within(
    cfg: &BondConfig,
    labels: &ClusterLabels,
    x: DualPoint,
    radius: u64,
) -> Vec<(DualPoint, u64)> {
    let Some(target) = labels.spanning_id else {
        return Vec::new();
    };
    points_within(cfg, x, radius, |k| labels.cluster(k) == Some(target))
        .into_iter()
        .map(|(p, _, d)| (p, d))
        .collect()
}

/// Bond midpoints within ℓ¹ distance `radius` of `x` whose flat id passes
/// `member`, as (midpoint, flat id, doubled distance) sorted by
/// (distance, x2, y2).
pub(crate) fn points_within(
    cfg: &BondConfig,
    x: DualPoint,
    radius: u64,
    mut member: impl FnMut(usize) -> bool,
) -> Vec<(DualPoint, usize, u64)> {
    let w = cfg.window();
    let r2 = 2 * radius as i64;
    let mut out = Vec::new();
    for dx in -r2..=r2 {
        let rest = r2 - dx.abs();
        for dy in -rest..=rest {
            let p = DualPoint::from_doubled(x.x2 + dx, x.y2 + dy);
            if let Ok(b) = w.bond_at_midpoint(p) {
                let k = w.flat(b);
                if member(k) {
                    out.push((p, k, p.l1_doubled(x)));
                }
            }
        }
    }
    out.sort_by_key(|&(p, _, d)| (d, p.x2, p.y2));
    out
}

/// CSV dump of a bond path as doubled midpoint coordinates.
pub fn path_csv(cfg: &BondConfig, path: &[BondId]) -> String {
    let w = cfg.window();
    let mut out = String::from("x2,y2\n");
    for &b in path {
        let p = w.midpoint_unchecked(b);
        let _ = writeln!(out, "{},{}", p.x2, p.y2);
    }
    out
}
