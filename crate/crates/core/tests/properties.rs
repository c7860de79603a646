//! Invariants checked on random configurations, against independent
//! reference computations built from global coordinates.

use std::collections::{HashMap, HashSet, VecDeque};

use proptest::prelude::*;
use rigidperc::channels::has_strong_dual_crossing;
use rigidperc::clusters::{has_weak_crossing, weak_clusters, Direction};
use rigidperc::distance::{chemical_distance, passage_time, Beta};
use rigidperc::estimators::lambda_samples;
use rigidperc::spin::{energy, ground_state, SpinField};
use rigidperc::{BondConfig, BondId, DualPoint, Vertex, Window};

type Pt = (i64, i64);

/// Global endpoints of every bond, keyed by flat id.
fn global_bonds(w: &Window) -> Vec<(Pt, Pt)> {
    w.bonds()
        .map(|b| {
            let [(i0, j0), (i1, j1)] = w.endpoints(b);
            let a = w.to_global(i0, j0);
            let c = w.to_global(i1, j1);
            ((a.x, a.y), (c.x, c.y))
        })
        .collect()
}

/// Bond adjacency through shared endpoints, restricted to weak bonds.
fn weak_adjacency(cfg: &BondConfig) -> Vec<Vec<usize>> {
    let w = cfg.window();
    let ends = global_bonds(w);
    let mut at: HashMap<Pt, Vec<usize>> = HashMap::new();
    for (k, &(a, b)) in ends.iter().enumerate() {
        if !cfg.is_strong(w.bond(k)) {
            at.entry(a).or_default().push(k);
            at.entry(b).or_default().push(k);
        }
    }
    let mut adj = vec![Vec::new(); ends.len()];
    for list in at.values() {
        for &a in list {
            for &b in list {
                if a != b {
                    adj[a].push(b);
                }
            }
        }
    }
    adj
}

fn bfs(adj: &[Vec<usize>], from: usize) -> Vec<Option<u64>> {
    let mut dist = vec![None; adj.len()];
    dist[from] = Some(1);
    let mut q = VecDeque::from([from]);
    while let Some(a) = q.pop_front() {
        for &b in &adj[a] {
            if dist[b].is_none() {
                dist[b] = Some(dist[a].unwrap() + 1);
                q.push_back(b);
            }
        }
    }
    dist
}

fn window_strategy() -> impl Strategy<Value = Window> {
    (2usize..9, 2usize..9, -5i64..5, -5i64..5).prop_map(|(w, h, ox, oy)| Window::with_origin(w, h, ox, oy).unwrap())
}

fn midpoint(w: &Window, flat: usize) -> DualPoint {
    w.dual_midpoint(w.bond(flat)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn labels_survive_window_growth(w in window_strategy(), grow in (0usize..4, 0usize..4, 0i64..4, 0i64..4), p in 0.0f64..1.0, seed: u64) {
        let (gx, gy, sx, sy) = grow;
        let (ox, oy) = w.origin();
        let big = Window::with_origin(w.width() + gx + sx as usize, w.height() + gy + sy as usize, ox - sx, oy - sy).unwrap();
        let small = BondConfig::sample(w, p, seed).unwrap();
        let large = BondConfig::sample(big, p, seed).unwrap();
        for k in 0..w.bond_count() {
            let m = midpoint(&w, k);
            let b = big.bond_at_midpoint(m).unwrap();
            prop_assert_eq!(small.is_strong(w.bond(k)), large.is_strong(b));
        }
    }

    #[test]
    fn bond_counts_and_midpoints(w in window_strategy()) {
        let (wd, ht) = (w.width(), w.height());
        prop_assert_eq!(w.bond_count(), (wd - 1) * ht + wd * (ht - 1));
        let mut seen = HashSet::new();
        for k in 0..w.bond_count() {
            let m = midpoint(&w, k);
            prop_assert!(m.is_bond_midpoint());
            prop_assert!(seen.insert(m));
            prop_assert_eq!(w.flat(w.bond_at_midpoint(m).unwrap()), k);
        }
    }

    #[test]
    fn clusters_match_graph_search(w in window_strategy(), p in 0.0f64..1.0, seed: u64) {
        let cfg = BondConfig::sample(w, p, seed).unwrap();
        let labels = weak_clusters(&cfg);
        let adj = weak_adjacency(&cfg);
        for a in 0..w.bond_count() {
            let weak = !cfg.is_strong(w.bond(a));
            prop_assert_eq!(labels.cluster(a).is_some(), weak);
            if !weak {
                continue;
            }
            let reach = bfs(&adj, a);
            for b in 0..w.bond_count() {
                let same = labels.cluster(b).is_some() && labels.cluster(a) == labels.cluster(b);
                prop_assert_eq!(same, reach[b].is_some());
            }
        }
        let total: usize = labels.sizes.iter().sum();
        prop_assert_eq!(total, cfg.weak_count());
    }

    #[test]
    fn coupled_labels_are_monotone(w in window_strategy(), p in 0.0f64..1.0, q in 0.0f64..1.0, seed: u64) {
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        let a = BondConfig::sample(w, lo, seed).unwrap();
        let b = BondConfig::sample(w, hi, seed).unwrap();
        for k in 0..w.bond_count() {
            prop_assert!(!a.is_strong(w.bond(k)) || b.is_strong(w.bond(k)));
        }
        // fewer weak bonds can only lengthen chemical distances
        let (x, y) = (midpoint(&w, 0), midpoint(&w, w.bond_count() - 1));
        let da = chemical_distance(&a, x, y).unwrap().value();
        let db = chemical_distance(&b, x, y).unwrap().value();
        if let Some(db) = db {
            prop_assert!(da.is_some_and(|da| da <= db));
        }
    }

    #[test]
    fn chemical_distance_matches_bfs(w in window_strategy(), p in 0.0f64..0.6, seed: u64, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let cfg = BondConfig::sample(w, p, seed).unwrap();
        let (a, b) = (i.index(w.bond_count()), j.index(w.bond_count()));
        let got = chemical_distance(&cfg, midpoint(&w, a), midpoint(&w, b)).unwrap();
        let weak = |k: usize| !cfg.is_strong(w.bond(k));
        let want = if weak(a) && weak(b) { bfs(&weak_adjacency(&cfg), a)[b] } else { None };
        prop_assert_eq!(got.value(), want);
        if let Some(path) = got.path() {
            prop_assert_eq!(path.len() as u64, want.unwrap());
            prop_assert_eq!(w.flat(path[0]), a);
            prop_assert_eq!(w.flat(*path.last().unwrap()), b);
            let adj = weak_adjacency(&cfg);
            for pair in path.windows(2) {
                prop_assert!(adj[w.flat(pair[0])].contains(&w.flat(pair[1])));
            }
        }
    }

    #[test]
    fn chemical_distance_metric_axioms(w in window_strategy(), p in 0.0f64..0.5, seed: u64, picks in prop::array::uniform3(any::<prop::sample::Index>())) {
        let cfg = BondConfig::sample(w, p, seed).unwrap();
        let [x, y, z] = picks.map(|i| midpoint(&w, i.index(w.bond_count())));
        let d = |a, b| chemical_distance(&cfg, a, b).unwrap().value();
        prop_assert_eq!(d(x, y), d(y, x));
        if let (Some(xy), Some(yz)) = (d(x, y), d(y, z)) {
            // y is counted in both legs
            prop_assert!(d(x, z).unwrap() < xy + yz);
        }
        if let Some(xy) = d(x, y) {
            prop_assert!(xy > x.l1_doubled(y) / 2);
        }
        if let Some(xx) = d(x, x) {
            prop_assert_eq!(xx, 1);
        }
    }

    #[test]
    fn passage_time_matches_bellman_ford(w in window_strategy(), p in 0.0f64..1.0, seed: u64, beta in 1.0f64..20.0, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let cfg = BondConfig::sample(w, p, seed).unwrap();
        let n = w.vertex_count();
        let (s, t) = (i.index(n), j.index(n));
        let ends = global_bonds(&w);
        let vid = |v: Pt| {
            let (i, j) = w.to_local(Vertex::new(v.0, v.1)).unwrap();
            w.vertex_index(i, j)
        };
        let mut dist = vec![f64::INFINITY; n];
        dist[s] = 0.0;
        for _ in 0..n {
            for (k, &(a, b)) in ends.iter().enumerate() {
                let c = if cfg.is_strong(w.bond(k)) { beta } else { 1.0 };
                let (a, b) = (vid(a), vid(b));
                dist[b] = dist[b].min(dist[a] + c);
                dist[a] = dist[a].min(dist[b] + c);
            }
        }
        let (si, sj) = w.vertex_coords(s);
        let (ti, tj) = w.vertex_coords(t);
        let got = passage_time(&cfg, Beta::new(beta).unwrap(), w.to_global(si, sj), w.to_global(ti, tj)).unwrap();
        prop_assert!((got.value().unwrap() - dist[t]).abs() < 1e-9);
    }

    #[test]
    fn passage_time_is_monotone_in_beta(w in window_strategy(), p in 0.0f64..1.0, seed: u64, b1 in 1.0f64..50.0, b2 in 1.0f64..50.0) {
        let cfg = BondConfig::sample(w, p, seed).unwrap();
        let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
        let x = w.to_global(0, 0);
        let y = w.to_global(w.width() - 1, w.height() - 1);
        let t = |b: f64| passage_time(&cfg, Beta::new(b).unwrap(), x, y).unwrap().value().unwrap();
        let l1 = x.l1(y) as f64;
        prop_assert_eq!(t(1.0), l1);
        prop_assert!(t(lo) <= t(hi));
        prop_assert!(t(hi) <= hi * l1);
        let rigid = passage_time(&cfg, Beta::Impassable, x, y).unwrap().value();
        if let Some(r) = rigid {
            prop_assert!(t(hi) <= r);
        }
    }

    #[test]
    fn passage_time_never_exceeds_chemical_distance(w in window_strategy(), p in 0.0f64..0.6, seed: u64, beta in 1.0f64..2000.0, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        prop_assume!(w.width() >= 3);
        let cfg = BondConfig::sample(w, p, seed).unwrap();
        let pick = |ix: prop::sample::Index| {
            let k = ix.index((w.width() - 1) * w.height());
            w.to_global(k % (w.width() - 1), k / (w.width() - 1))
        };
        let (a, b) = (pick(i), pick(j));
        if let Some(d) = chemical_distance(&cfg, DualPoint::east_of(a), DualPoint::east_of(b)).unwrap().value() {
            let t = passage_time(&cfg, Beta::new(beta).unwrap(), a, b).unwrap().value().unwrap();
            prop_assert!(t <= d as f64);
        }
    }

    #[test]
    fn crossing_is_coupled_monotone(w in window_strategy(), p in 0.0f64..1.0, dp in 0.0f64..0.3, seed: u64) {
        let a = BondConfig::sample(w, p, seed).unwrap();
        let b = BondConfig::sample(w, (p + dp).min(1.0), seed).unwrap();
        for dir in [Direction::LeftRight, Direction::BottomTop] {
            prop_assert!(!has_weak_crossing(&b, dir) || has_weak_crossing(&a, dir));
        }
    }

    #[test]
    fn planar_duality(n in 2usize..24, p in 0.0f64..1.0, seed: u64) {
        let cfg = BondConfig::sample(Window::new(n + 1, n).unwrap(), p, seed).unwrap();
        let weak = has_weak_crossing(&cfg, Direction::LeftRight);
        let strong = has_strong_dual_crossing(&cfg, Direction::BottomTop);
        prop_assert!(weak != strong);
    }

    #[test]
    fn energy_matches_ordered_sum(w in window_strategy(), p in 0.0f64..1.0, seed: u64, spins: Vec<bool>, eps in 0.01f64..4.0) {
        let cfg = BondConfig::sample(w, p, seed).unwrap();
        let u = SpinField::from_fn(w, eps, |i, j| {
            let k = w.vertex_index(i, j);
            (if spins.get(k).copied().unwrap_or(true) { 1 } else { -1 }, false)
        });
        // (1/8) Σ over ordered neighbour pairs of ε σ_ij (u_i − u_j)^2
        let mut sum = 0.0;
        let mut infinite = false;
        for j in 0..w.height() {
            for i in 0..w.width() {
                for (di, dj) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 || ni as usize >= w.width() || nj as usize >= w.height() {
                        continue;
                    }
                    let (ni, nj) = (ni as usize, nj as usize);
                    let b = if di != 0 { w.horizontal(i.min(ni), j) } else { w.vertical(i, j.min(nj)) }.unwrap();
                    let diff = (u.get(i, j) - u.get(ni, nj)) as f64;
                    if diff != 0.0 {
                        if cfg.is_strong(b) {
                            infinite = true;
                        } else {
                            sum += eps * diff * diff / 8.0;
                        }
                    }
                }
            }
        }
        let e = energy(&cfg, &u).unwrap();
        prop_assert_eq!(!e.is_finite(), infinite);
        if !infinite {
            prop_assert!((e.value().unwrap() - sum).abs() < 1e-9 * (1.0 + sum));
        }
    }

    #[test]
    fn ground_state_matches_enumeration(w in (2usize..5, 2usize..5).prop_map(|(a, b)| Window::new(a, b).unwrap()), p in 0.0f64..1.0, seed: u64, frozen: u16, signs: u16) {
        let cfg = BondConfig::sample(w, p, seed).unwrap();
        let n = w.vertex_count();
        prop_assume!(frozen as usize & ((1 << n) - 1) != 0);
        let bc = SpinField::from_fn(w, 1.0, |i, j| {
            let k = w.vertex_index(i, j);
            (if signs >> k & 1 == 1 { 1 } else { -1 }, frozen >> k & 1 == 1)
        });
        let (gs, e) = ground_state(&cfg, &bc).unwrap();
        let free: Vec<usize> = (0..n).filter(|&k| frozen >> k & 1 == 0).collect();
        let mut best = (u64::MAX, u64::MAX);
        for mask in 0u32..1 << free.len() {
            let mut u = bc.clone();
            for (b, &k) in free.iter().enumerate() {
                let (i, j) = w.vertex_coords(k);
                u.set(i, j, if mask >> b & 1 == 1 { 1 } else { -1 });
            }
            let eu = energy(&cfg, &u).unwrap();
            best = best.min((eu.broken_strong, eu.broken_weak));
        }
        prop_assert_eq!((e.broken_strong, e.broken_weak), best);
        prop_assert_eq!(energy(&cfg, &gs).unwrap(), e);
        for k in 0..n {
            if frozen >> k & 1 == 1 {
                prop_assert_eq!(gs.values()[k], bc.values()[k]);
            }
        }
    }

    #[test]
    fn flipping_the_boundary(p in 0.0f64..1.0, seed: u64) {
        let w = Window::new(10, 10).unwrap();
        let cfg = BondConfig::sample(w, p, seed).unwrap();
        let bc = SpinField::random_ring(w, 1.0, seed);
        let flipped = bc.with_flipped_boundary();
        let (_, ea) = ground_state(&cfg, &bc).unwrap();
        let (b, eb) = ground_state(&cfg, &flipped).unwrap();
        prop_assert_eq!(ea, eb);
        // the negated solution is optimal for the original data too
        let negated = SpinField::from_fn(w, 1.0, |i, j| (-b.get(i, j), bc.is_frozen(i, j)));
        prop_assert_eq!(energy(&cfg, &negated).unwrap(), ea);
    }

    #[test]
    fn ground_state_beats_random_fields(p in 0.0f64..0.6, seed: u64, fields in prop::collection::vec(any::<u64>(), 20)) {
        let w = Window::new(16, 16).unwrap();
        let cfg = BondConfig::sample(w, p, seed).unwrap();
        let bc = SpinField::halves(w, 1.0);
        let (_, best) = ground_state(&cfg, &bc).unwrap();
        for f in fields {
            let u = SpinField::from_fn(w, 1.0, |i, j| {
                if bc.is_frozen(i, j) {
                    (bc.get(i, j), true)
                } else {
                    let bit = rigidperc::rng::splitmix64(f ^ (w.vertex_index(i, j) as u64)) >> 63;
                    (if bit == 1 { 1 } else { -1 }, false)
                }
            });
            let e = energy(&cfg, &u).unwrap();
            prop_assert!((best.broken_strong, best.broken_weak) <= (e.broken_strong, e.broken_weak));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn lambda_samples_are_coupled_monotone(p in 0.0f64..0.45, dp in 0.0f64..0.1, seed: u64) {
        let a = lambda_samples(p, (1.0, 0.0), 24, 8, seed).unwrap();
        let b = lambda_samples(p + dp, (1.0, 0.0), 24, 8, seed).unwrap();
        for (x, y) in a.iter().zip(&b) {
            if let Some(y) = y {
                prop_assert!(x.is_some_and(|x| x <= *y));
            }
        }
    }
}

#[test]
fn halves_boundary_on_all_weak_matches_chemical_distance() {
    for n in [8usize, 11, 16] {
        let w = Window::new(n, n).unwrap();
        let cfg = BondConfig::sample(w, 0.0, 0).unwrap();
        let (_, e) = ground_state(&cfg, &SpinField::halves(w, 1.0)).unwrap();
        // the two ring bonds carrying the sign changes
        let left = w.vertical(0, n / 2 - 1).unwrap();
        let right = w.vertical(n - 1, n / 2 - 1).unwrap();
        let d = chemical_distance(&cfg, w.dual_midpoint(left).unwrap(), w.dual_midpoint(right).unwrap())
            .unwrap()
            .value()
            .unwrap();
        assert_eq!(e.value().unwrap() as u64 + 1, d, "n = {n}");
    }
}

#[test]
fn strong_fraction_concentrates() {
    let w = Window::new(64, 64).unwrap();
    let fractions: Vec<f64> = (0..1000u64)
        .map(|s| BondConfig::sample(w, 0.5, s).unwrap().strong_count() as f64 / w.bond_count() as f64)
        .collect();
    let mean = fractions.iter().sum::<f64>() / fractions.len() as f64;
    let se = (0.25 / (w.bond_count() as f64 * fractions.len() as f64)).sqrt();
    assert!((mean - 0.5).abs() <= 3.0 * se, "mean {mean}, se {se}");
}

#[test]
fn adjacency_helper_agrees() {
    let w = Window::new(5, 4).unwrap();
    let cfg = BondConfig::sample(w, 0.3, 12).unwrap();
    let adj = weak_adjacency(&cfg);
    for a in 0..w.bond_count() {
        for b in 0..w.bond_count() {
            let (ba, bb): (BondId, BondId) = (w.bond(a), w.bond(b));
            assert_eq!(rigidperc::lattice::adjacent_weak(ba, bb, &cfg).unwrap(), adj[a].contains(&b));
        }
    }
}
