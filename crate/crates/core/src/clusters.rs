//! Weak clusters, crossing events and threshold scans.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{BondConfig, Window};
use crate::rng::trial_seed;
use crate::stats::{binomial_se, mean_se};
use crate::unionfind::UnionFind;

pub const UNLABELED: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    LeftRight,
    BottomTop,
}

/// Partition of the weak bonds into clusters.
///
/// Ids are assigned in order of the smallest flat bond index in each
/// cluster, so equal partitions always get equal labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterLabels {
    pub cluster_of: Vec<u32>,
    pub sizes: Vec<usize>,
    pub largest_id: Option<usize>,
    pub left_right_crossing_id: Option<usize>,
    pub bottom_top_crossing_id: Option<usize>,
    /// The cluster crossing the window in both directions, if any. There is
    /// at most one: two such clusters would have to meet at a vertex.
    pub spanning_id: Option<usize>,
}

impl ClusterLabels {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn cluster(&self, flat: usize) -> Option<usize> {
        let id = self.cluster_of[flat];
        (id != UNLABELED).then_some(id as usize)
    }

    pub fn largest_size(&self) -> usize {
        self.largest_id.map_or(0, |id| self.sizes[id])
    }
}

const LEFT: u8 = 1;
const RIGHT: u8 = 2;
const BOTTOM: u8 = 4;
const TOP: u8 = 8;

/// Union of weak bonds over their shared endpoints.
fn weak_vertex_components(cfg: &BondConfig) -> UnionFind {
    let w = cfg.window();
    let mut uf = UnionFind::new(w.vertex_count());
    for k in 0..w.bond_count() {
        if cfg.is_weak_flat(k) {
            let [(i0, j0), (i1, j1)] = w.endpoints(w.bond(k));
            uf.union(w.vertex_index(i0, j0), w.vertex_index(i1, j1));
        }
    }
    uf
}

fn edge_flags(w: &Window, i: usize, j: usize) -> u8 {
    let mut f = 0;
    if i == 0 {
        f |= LEFT;
    }
    if i + 1 == w.width() {
        f |= RIGHT;
    }
    if j == 0 {
        f |= BOTTOM;
    }
    if j + 1 == w.height() {
        f |= TOP;
    }
    f
}

pub fn weak_clusters(cfg: &BondConfig) -> ClusterLabels {
    let w = cfg.window();
    let mut uf = weak_vertex_components(cfg);
    let mut id_of_root = vec![UNLABELED; w.vertex_count()];
    let mut cluster_of = vec![UNLABELED; w.bond_count()];
    let mut sizes: Vec<usize> = Vec::new();
    let mut flags: Vec<u8> = Vec::new();
    for k in 0..w.bond_count() {
        if cfg.is_strong_flat(k) {
            continue;
        }
        let [(i0, j0), (i1, j1)] = w.endpoints(w.bond(k));
        let root = uf.find(w.vertex_index(i0, j0));
        if id_of_root[root] == UNLABELED {
            id_of_root[root] = sizes.len() as u32;
            sizes.push(0);
            flags.push(0);
        }
        let id = id_of_root[root] as usize;
        cluster_of[k] = id as u32;
        sizes[id] += 1;
        flags[id] |= edge_flags(w, i0, j0) | edge_flags(w, i1, j1);
    }
    let largest_id = (0..sizes.len()).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c)));
    let find = |mask: u8| (0..sizes.len()).find(|&c| flags[c] & mask == mask);
    let left_right_crossing_id = find(LEFT | RIGHT);
    let bottom_top_crossing_id = find(BOTTOM | TOP);
    let spanning_id = find(LEFT | RIGHT | BOTTOM | TOP);
    ClusterLabels {
        cluster_of,
        sizes,
        largest_id,
        left_right_crossing_id,
        bottom_top_crossing_id,
        spanning_id,
    }
}

/// Membership test for the cluster crossing the window both ways, without
/// labelling every bond.
pub(crate) struct SpanningCluster {
    uf: UnionFind,
    root: Option<usize>,
}

impl SpanningCluster {
    pub(crate) fn new(cfg: &BondConfig) -> Self {
        let w = cfg.window();
        let mut uf = weak_vertex_components(cfg);
        let mut flags = vec![0u8; w.vertex_count()];
        let (wd, ht) = (w.width(), w.height());
        let ring = (0..wd).flat_map(|i| [(i, 0), (i, ht - 1)]).chain((0..ht).flat_map(|j| [(0, j), (wd - 1, j)]));
        for (i, j) in ring {
            let r = uf.find(w.vertex_index(i, j));
            flags[r] |= edge_flags(w, i, j);
        }
        let all = LEFT | RIGHT | BOTTOM | TOP;
        let root = (0..flags.len()).find(|&r| flags[r] == all);
        SpanningCluster { uf, root }
    }

    pub(crate) fn exists(&self) -> bool {
        self.root.is_some()
    }

    pub(crate) fn contains(&mut self, cfg: &BondConfig, flat: usize) -> bool {
        let Some(root) = self.root else {
            return false;
        };
        if cfg.is_strong_flat(flat) {
            return false;
        }
        let w = cfg.window();
        let (i, j) = w.endpoints(w.bond(flat))[0];
        self.uf.find(w.vertex_index(i, j)) == root
    }
}

/// Vertex indices along two opposite edges of the window.
pub(crate) fn opposite_edges(w: &Window, direction: Direction) -> (Vec<usize>, Vec<usize>) {
    match direction {
        Direction::LeftRight => (
            (0..w.height()).map(|j| w.vertex_index(0, j)).collect(),
            (0..w.height()).map(|j| w.vertex_index(w.width() - 1, j)).collect(),
        ),
        Direction::BottomTop => (
            (0..w.width()).map(|i| w.vertex_index(i, 0)).collect(),
            (0..w.width()).map(|i| w.vertex_index(i, w.height() - 1)).collect(),
        ),
    }
}

/// True iff a weak path joins the two opposite edges of the window.
pub fn has_weak_crossing(cfg: &BondConfig, direction: Direction) -> bool {
    let w = cfg.window();
    let mut uf = weak_vertex_components(cfg);
    let (start, end) = opposite_edges(w, direction);
    let mut marked = vec![false; w.vertex_count()];
    for v in start {
        let r = uf.find(v);
        marked[r] = true;
    }
    // the two edges are disjoint, so a shared root implies a weak path
    end.into_iter().any(|v| {
        let r = uf.find(v);
        marked[r]
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub p: f64,
    pub trials: usize,
    pub crossing_freq: f64,
    pub crossing_se: f64,
    pub largest_fraction: f64,
    pub largest_fraction_se: f64,
}

impl ScanRow {
    pub const CSV_HEADER: &'static str = "p,trials,crossing_freq,crossing_se,largest_fraction,largest_fraction_se";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.p, self.trials, self.crossing_freq, self.crossing_se, self.largest_fraction, self.largest_fraction_se
        )
    }
}

/// Left-right crossing frequency and mean largest-cluster share of the weak
/// bonds, for every `p` in the grid. Trial `t` uses seed `seed ^ t` at every
/// `p`, so rows are coupled through shared uniforms.
pub fn threshold_scan(window: Window, p_grid: &[f64], trials: usize, seed: u64) -> Result<Vec<ScanRow>> {
    if p_grid.is_empty() {
        return Err(Error::InvalidParameter("empty p grid".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    for &p in p_grid {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
    }
    if p_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("p grid must be sorted".into()));
    }
    p_grid
        .iter()
        .map(|&p| {
            let samples: Vec<(bool, f64)> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let cfg = BondConfig::sample(window, p, trial_seed(seed, t))?;
                    let labels = weak_clusters(&cfg);
                    let weak = cfg.weak_count();
                    let fraction = if weak == 0 { 0.0 } else { labels.largest_size() as f64 / weak as f64 };
                    Ok((labels.left_right_crossing_id.is_some(), fraction))
                })
                .collect::<Result<_>>()?;
            let hits = samples.iter().filter(|s| s.0).count();
            let freq = hits as f64 / trials as f64;
            let fractions: Vec<f64> = samples.iter().map(|s| s.1).collect();
            let (largest_fraction, largest_fraction_se) = mean_se(&fractions);
            Ok(ScanRow {
                p,
                trials,
                crossing_freq: freq,
                crossing_se: binomial_se(freq, trials),
                largest_fraction,
                largest_fraction_se,
            })
        })
        .collect()
}
