//! Finite windows of Z^2, bond indexing, dual points and i.i.d. strong/weak
//! sampling.
//!
//! A [`Window`] holds `width * height` vertices whose local coordinates
//! `(i, j)` map to global coordinates `origin + (i, j)`. Horizontal bond
//! `(i, j)-(i+1, j)` has index `j * (width - 1) + i`, vertical bond
//! `(i, j)-(i, j+1)` has index `j * width + i`. Algorithms address bonds by a
//! flat index with all horizontal bonds first.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::bond_uniform;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl Orientation {
    fn code(self) -> u8 {
        match self {
            Orientation::Horizontal => 0,
            Orientation::Vertical => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BondId {
    pub orientation: Orientation,
    pub index: usize,
}

impl fmt::Display for BondId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.orientation {
            Orientation::Horizontal => 'h',
            Orientation::Vertical => 'v',
        };
        write!(f, "{tag}{}", self.index)
    }
}

/// A vertex of Z^2 in global coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub x: i64,
    pub y: i64,
}

impl Vertex {
    pub fn new(x: i64, y: i64) -> Self {
        Vertex { x, y }
    }

    pub fn l1(self, other: Vertex) -> u64 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A point with half-integer coordinates, stored doubled.
///
/// Bond midpoints have exactly one odd doubled coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DualPoint {
    pub x2: i64,
    pub y2: i64,
}

impl DualPoint {
    pub fn from_doubled(x2: i64, y2: i64) -> Self {
        DualPoint { x2, y2 }
    }

    /// Parses real coordinates that must be multiples of 1/2.
    pub fn from_coords(x: f64, y: f64) -> Option<Self> {
        let (x2, y2) = (2.0 * x, 2.0 * y);
        if x2.fract() != 0.0 || y2.fract() != 0.0 || !x2.is_finite() || !y2.is_finite() {
            return None;
        }
        Some(DualPoint { x2: x2 as i64, y2: y2 as i64 })
    }

    /// Midpoint of the horizontal bond starting at `v`.
    pub fn east_of(v: Vertex) -> Self {
        DualPoint { x2: 2 * v.x + 1, y2: 2 * v.y }
    }

    pub fn x(self) -> f64 {
        self.x2 as f64 / 2.0
    }

    pub fn y(self) -> f64 {
        self.y2 as f64 / 2.0
    }

    pub fn is_bond_midpoint(self) -> bool {
        (self.x2 + self.y2).rem_euclid(2) == 1
    }

    /// ℓ¹ distance in doubled units (twice the real ℓ¹ distance).
    pub fn l1_doubled(self, other: DualPoint) -> u64 {
        self.x2.abs_diff(other.x2) + self.y2.abs_diff(other.y2)
    }
}

impl fmt::Display for DualPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x(), self.y())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    width: usize,
    height: usize,
    origin: (i64, i64),
}

impl Window {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::with_origin(width, height, 0, 0)
    }

    pub fn with_origin(width: usize, height: usize, origin_x: i64, origin_y: i64) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(Error::InvalidWindow { width, height });
        }
        Ok(Window { width, height, origin: (origin_x, origin_y) })
    }

    /// Smallest window containing both corners (inclusive).
    pub fn spanning(min: Vertex, max: Vertex) -> Result<Self> {
        let width = (max.x - min.x + 1).max(0) as usize;
        let height = (max.y - min.y + 1).max(0) as usize;
        Self::with_origin(width, height, min.x, min.y)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn origin(&self) -> (i64, i64) {
        self.origin
    }

    pub fn horizontal_bonds(&self) -> usize {
        (self.width - 1) * self.height
    }

    pub fn vertical_bonds(&self) -> usize {
        self.width * (self.height - 1)
    }

    pub fn bond_count(&self) -> usize {
        self.horizontal_bonds() + self.vertical_bonds()
    }

    pub fn vertex_count(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn vertex_index(&self, i: usize, j: usize) -> usize {
        j * self.width + i
    }

    #[inline]
    pub fn vertex_coords(&self, index: usize) -> (usize, usize) {
        (index % self.width, index / self.width)
    }

    pub fn to_global(&self, i: usize, j: usize) -> Vertex {
        Vertex::new(self.origin.0 + i as i64, self.origin.1 + j as i64)
    }

    pub fn to_local(&self, v: Vertex) -> Option<(usize, usize)> {
        let i = v.x - self.origin.0;
        let j = v.y - self.origin.1;
        if i < 0 || j < 0 || i as usize >= self.width || j as usize >= self.height {
            None
        } else {
            Some((i as usize, j as usize))
        }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.to_local(v).is_some()
    }

    /// Horizontal bond `(i, j)-(i+1, j)` in local coordinates.
    pub fn horizontal(&self, i: usize, j: usize) -> Option<BondId> {
        (i + 1 < self.width && j < self.height).then(|| BondId {
            orientation: Orientation::Horizontal,
            index: j * (self.width - 1) + i,
        })
    }

    /// Vertical bond `(i, j)-(i, j+1)` in local coordinates.
    pub fn vertical(&self, i: usize, j: usize) -> Option<BondId> {
        (i < self.width && j + 1 < self.height).then(|| BondId {
            orientation: Orientation::Vertical,
            index: j * self.width + i,
        })
    }

    pub fn contains_bond(&self, b: BondId) -> bool {
        match b.orientation {
            Orientation::Horizontal => b.index < self.horizontal_bonds(),
            Orientation::Vertical => b.index < self.vertical_bonds(),
        }
    }

    fn check(&self, b: BondId) -> Result<()> {
        if self.contains_bond(b) {
            Ok(())
        } else {
            Err(Error::BondOutOfWindow(b.to_string()))
        }
    }

    /// Local coordinates of the lower-left endpoint.
    #[inline]
    pub fn bond_base(&self, b: BondId) -> (usize, usize) {
        match b.orientation {
            Orientation::Horizontal => (b.index % (self.width - 1), b.index / (self.width - 1)),
            Orientation::Vertical => (b.index % self.width, b.index / self.width),
        }
    }

    /// Both endpoints in local coordinates, lower-left first.
    pub fn endpoints(&self, b: BondId) -> [(usize, usize); 2] {
        let (i, j) = self.bond_base(b);
        match b.orientation {
            Orientation::Horizontal => [(i, j), (i + 1, j)],
            Orientation::Vertical => [(i, j), (i, j + 1)],
        }
    }

    #[inline]
    pub fn flat(&self, b: BondId) -> usize {
        match b.orientation {
            Orientation::Horizontal => b.index,
            Orientation::Vertical => self.horizontal_bonds() + b.index,
        }
    }

    #[inline]
    pub fn bond(&self, flat: usize) -> BondId {
        let nh = self.horizontal_bonds();
        if flat < nh {
            BondId { orientation: Orientation::Horizontal, index: flat }
        } else {
            BondId { orientation: Orientation::Vertical, index: flat - nh }
        }
    }

    pub fn bonds(&self) -> impl Iterator<Item = BondId> + '_ {
        (0..self.bond_count()).map(|k| self.bond(k))
    }

    pub fn dual_midpoint(&self, b: BondId) -> Result<DualPoint> {
        self.check(b)?;
        Ok(self.midpoint_unchecked(b))
    }

    #[inline]
    pub(crate) fn midpoint_unchecked(&self, b: BondId) -> DualPoint {
        let (i, j) = self.bond_base(b);
        let x2 = 2 * (self.origin.0 + i as i64);
        let y2 = 2 * (self.origin.1 + j as i64);
        match b.orientation {
            Orientation::Horizontal => DualPoint { x2: x2 + 1, y2 },
            Orientation::Vertical => DualPoint { x2, y2: y2 + 1 },
        }
    }

    /// Inverse of [`Window::dual_midpoint`].
    pub fn bond_at_midpoint(&self, p: DualPoint) -> Result<BondId> {
        let fail = || Error::NotABondMidpoint(p);
        if !p.is_bond_midpoint() {
            return Err(fail());
        }
        let lx = p.x2 - 2 * self.origin.0;
        let ly = p.y2 - 2 * self.origin.1;
        if lx < 0 || ly < 0 {
            return Err(fail());
        }
        let bond = if lx % 2 == 1 {
            self.horizontal((lx / 2) as usize, (ly / 2) as usize)
        } else {
            self.vertical((lx / 2) as usize, (ly / 2) as usize)
        };
        bond.ok_or_else(fail)
    }

    /// Flat ids of the bonds incident to local vertex `(i, j)`.
    pub fn incident(&self, i: usize, j: usize) -> Neighbors {
        let mut out = Neighbors::default();
        if i > 0 {
            out.push(j * (self.width - 1) + i - 1);
        }
        if i + 1 < self.width {
            out.push(j * (self.width - 1) + i);
        }
        let nh = self.horizontal_bonds();
        if j > 0 {
            out.push(nh + (j - 1) * self.width + i);
        }
        if j + 1 < self.height {
            out.push(nh + j * self.width + i);
        }
        out
    }

    /// Flat ids of the bonds sharing a Z^2 endpoint with bond `flat`.
    pub fn neighbors(&self, flat: usize) -> Neighbors {
        let b = self.bond(flat);
        let mut out = Neighbors::default();
        for (i, j) in self.endpoints(b) {
            for k in self.incident(i, j) {
                if k != flat {
                    out.push(k);
                }
            }
        }
        out
    }

    /// Flat ids of the bonds whose dual segments share an endpoint with the
    /// dual segment of bond `flat`, i.e. bonds on the boundary of a common
    /// face.
    pub fn dual_neighbors(&self, flat: usize) -> Neighbors {
        let mut out = Neighbors::default();
        for face in self.adjacent_faces(flat) {
            for k in self.face_bonds(face.0, face.1) {
                if k != flat {
                    out.push(k);
                }
            }
        }
        out
    }

    /// The two faces on either side of a bond, as lower-left corners in local
    /// coordinates. Faces outside the window get coordinate -1 or
    /// `width - 1` / `height - 1`.
    #[inline]
    pub fn adjacent_faces(&self, flat: usize) -> [(i64, i64); 2] {
        let b = self.bond(flat);
        let (i, j) = self.bond_base(b);
        let (i, j) = (i as i64, j as i64);
        match b.orientation {
            Orientation::Horizontal => [(i, j - 1), (i, j)],
            Orientation::Vertical => [(i - 1, j), (i, j)],
        }
    }

    /// Flat ids of the window bonds on the boundary of face `(a, b)`.
    pub fn face_bonds(&self, a: i64, b: i64) -> Neighbors {
        let mut out = Neighbors::default();
        let in_x = |x: i64| x >= 0 && (x as usize) < self.width;
        let in_y = |y: i64| y >= 0 && (y as usize) < self.height;
        if in_y(b) && a >= 0 {
            if let Some(h) = self.horizontal(a as usize, b as usize) {
                out.push(self.flat(h));
            }
        }
        if in_y(b + 1) && a >= 0 {
            if let Some(h) = self.horizontal(a as usize, (b + 1) as usize) {
                out.push(self.flat(h));
            }
        }
        if in_x(a) && b >= 0 {
            if let Some(v) = self.vertical(a as usize, b as usize) {
                out.push(self.flat(v));
            }
        }
        if in_x(a + 1) && b >= 0 {
            if let Some(v) = self.vertical((a + 1) as usize, b as usize) {
                out.push(self.flat(v));
            }
        }
        out
    }
}

/// Fixed-capacity list of at most six flat bond ids.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neighbors {
    items: [usize; 6],
    len: usize,
    pos: usize,
}

impl Neighbors {
    #[inline]
    fn push(&mut self, k: usize) {
        self.items[self.len] = k;
        self.len += 1;
    }
}

impl Iterator for Neighbors {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.pos < self.len {
            self.pos += 1;
            Some(self.items[self.pos - 1])
        } else {
            None
        }
    }
}

/// Packed bitset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, k: usize) -> bool {
        debug_assert!(k < self.len);
        self.words[k / 64] >> (k % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, k: usize, value: bool) {
        let mask = 1u64 << (k % 64);
        if value {
            self.words[k / 64] |= mask;
        } else {
            self.words[k / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Bytes with bit `k` stored at bit `k % 8` of byte `k / 8`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.len.div_ceil(8);
        (0..n).map(|b| (self.words[b / 8] >> (8 * (b % 8))) as u8).collect()
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Option<Self> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        let mut set = BitSet::new(len);
        for (b, &byte) in bytes.iter().enumerate() {
            set.words[b / 8] |= (byte as u64) << (8 * (b % 8));
        }
        // stray bits past the end are rejected
        if !len.is_multiple_of(8) && bytes.last().is_some_and(|&x| x >> (len % 8) != 0) {
            return None;
        }
        Some(set)
    }
}

/// One realization: the strong/weak label of every bond in a window.
#[derive(Clone, Debug, PartialEq)]
pub struct BondConfig {
    window: Window,
    p: f64,
    seed: u64,
    strong: BitSet,
}

impl BondConfig {
    /// Samples each bond strong with probability `p`, keyed by
    /// `(seed, global bond position)`.
    pub fn sample(window: Window, p: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        let mut strong = BitSet::new(window.bond_count());
        let (ox, oy) = window.origin();
        for k in 0..window.bond_count() {
            let b = window.bond(k);
            let (i, j) = window.bond_base(b);
            let u = bond_uniform(seed, b.orientation.code(), ox + i as i64, oy + j as i64);
            if u < p {
                strong.set(k, true);
            }
        }
        Ok(BondConfig { window, p, seed, strong })
    }

    /// Hand-built configuration. `p` is recorded as the empirical strong
    /// fraction and the seed as 0.
    pub fn from_fn(window: Window, mut is_strong: impl FnMut(&Window, BondId) -> bool) -> Self {
        let mut strong = BitSet::new(window.bond_count());
        for k in 0..window.bond_count() {
            if is_strong(&window, window.bond(k)) {
                strong.set(k, true);
            }
        }
        let p = strong.count_ones() as f64 / window.bond_count() as f64;
        BondConfig { window, p, seed: 0, strong }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn labels(&self) -> &BitSet {
        &self.strong
    }

    #[inline]
    pub fn is_strong_flat(&self, flat: usize) -> bool {
        self.strong.get(flat)
    }

    #[inline]
    pub fn is_weak_flat(&self, flat: usize) -> bool {
        !self.strong.get(flat)
    }

    pub fn is_strong(&self, b: BondId) -> bool {
        self.strong.get(self.window.flat(b))
    }

    pub fn strong_count(&self) -> usize {
        self.strong.count_ones()
    }

    pub fn weak_count(&self) -> usize {
        self.window.bond_count() - self.strong_count()
    }

    /// Header line `W H origin_x origin_y p seed`, then the hex-encoded
    /// bitset (horizontal bonds first, bit 1 = strong).
    pub fn to_text(&self) -> String {
        let (ox, oy) = self.window.origin();
        let mut out = format!(
            "{} {} {} {} {} {}\n",
            self.window.width(),
            self.window.height(),
            ox,
            oy,
            self.p,
            self.seed
        );
        for byte in self.strong.to_bytes() {
            out.push_str(&format!("{byte:02x}"));
        }
        out.push('\n');
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("missing header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::Parse(format!("expected 6 header fields, found {}", fields.len())));
        }
        let bad = |what: &str| Error::Parse(format!("bad {what} in header"));
        let width: usize = fields[0].parse().map_err(|_| bad("width"))?;
        let height: usize = fields[1].parse().map_err(|_| bad("height"))?;
        let ox: i64 = fields[2].parse().map_err(|_| bad("origin_x"))?;
        let oy: i64 = fields[3].parse().map_err(|_| bad("origin_y"))?;
        let p: f64 = fields[4].parse().map_err(|_| bad("p"))?;
        let seed: u64 = fields[5].parse().map_err(|_| bad("seed"))?;
        let window = Window::with_origin(width, height, ox, oy)?;
        let hex = lines.next().unwrap_or("").trim();
        if !hex.len().is_multiple_of(2) {
            return Err(Error::Parse("odd hex length".into()));
        }
        let bytes = (0..hex.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&hex[i..i + 2], 16))
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map_err(|_| Error::Parse("invalid hex digit".into()))?;
        let strong = BitSet::from_bytes(&bytes, window.bond_count())
            .ok_or_else(|| Error::Parse("bitset length does not match window".into()))?;
        Ok(BondConfig { window, p, seed, strong })
    }
}

pub fn sample_config(window: Window, p: f64, seed: u64) -> Result<BondConfig> {
    BondConfig::sample(window, p, seed)
}

pub fn dual_midpoint(window: &Window, b: BondId) -> Result<DualPoint> {
    window.dual_midpoint(b)
}

/// True iff both bonds are weak and share a Z^2 endpoint.
pub fn adjacent_weak(b1: BondId, b2: BondId, cfg: &BondConfig) -> Result<bool> {
    let w = cfg.window();
    w.check(b1)?;
    w.check(b2)?;
    if b1 == b2 || cfg.is_strong(b1) || cfg.is_strong(b2) {
        return Ok(false);
    }
    let e1 = w.endpoints(b1);
    let e2 = w.endpoints(b2);
    Ok(e1.iter().any(|v| e2.contains(v)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(w: &Window, i: usize, j: usize) -> BondId {
        w.horizontal(i, j).unwrap()
    }

    fn v(w: &Window, i: usize, j: usize) -> BondId {
        w.vertical(i, j).unwrap()
    }

    #[test]
    fn rejects_degenerate_windows_and_probabilities() {
        assert!(Window::new(1, 5).is_err());
        assert!(Window::new(5, 1).is_err());
        let w = Window::new(4, 4).unwrap();
        assert_eq!(BondConfig::sample(w, -0.1, 0), Err(Error::InvalidProbability(-0.1)));
        assert!(BondConfig::sample(w, 1.5, 0).is_err());
        assert!(BondConfig::sample(w, f64::NAN, 0).is_err());
    }

    #[test]
    fn extreme_probabilities() {
        let w = Window::new(17, 9).unwrap();
        for seed in 0..5 {
            assert_eq!(BondConfig::sample(w, 0.0, seed).unwrap().strong_count(), 0);
            assert_eq!(BondConfig::sample(w, 1.0, seed).unwrap().strong_count(), w.bond_count());
        }
    }

    #[test]
    fn midpoints() {
        let w = Window::new(5, 5).unwrap();
        assert_eq!(w.dual_midpoint(h(&w, 0, 0)).unwrap(), DualPoint::from_coords(0.5, 0.0).unwrap());
        assert_eq!(w.dual_midpoint(v(&w, 2, 3)).unwrap(), DualPoint::from_coords(2.0, 3.5).unwrap());
        let bogus = BondId { orientation: Orientation::Vertical, index: 999 };
        assert!(w.dual_midpoint(bogus).is_err());
    }

    #[test]
    fn midpoint_round_trip_exhaustive() {
        for origin in [(0, 0), (-3, 7)] {
            let w = Window::with_origin(4, 4, origin.0, origin.1).unwrap();
            for b in w.bonds() {
                assert_eq!(w.bond_at_midpoint(w.dual_midpoint(b).unwrap()).unwrap(), b);
            }
        }
        let w = Window::new(4, 4).unwrap();
        assert!(w.bond_at_midpoint(DualPoint::from_doubled(2, 2)).is_err());
        assert!(w.bond_at_midpoint(DualPoint::from_doubled(7, 0)).is_err());
        assert!(w.bond_at_midpoint(DualPoint::from_doubled(-1, 0)).is_err());
    }

    #[test]
    fn adjacency_examples() {
        let w = Window::new(3, 3).unwrap();
        let cfg = BondConfig::sample(w, 0.0, 0).unwrap();
        assert!(adjacent_weak(h(&w, 0, 0), h(&w, 1, 0), &cfg).unwrap());
        assert!(!adjacent_weak(h(&w, 0, 0), h(&w, 0, 1), &cfg).unwrap());
        let strong = BondConfig::sample(w, 1.0, 0).unwrap();
        assert!(!adjacent_weak(h(&w, 0, 0), h(&w, 1, 0), &strong).unwrap());
    }

    #[test]
    fn interior_bonds_have_six_neighbours() {
        // 3x3 cells = 4x4 vertices. A bond whose endpoints both have degree 4
        // meets 3 other bonds at each end.
        let w = Window::new(4, 4).unwrap();
        let cfg = BondConfig::sample(w, 0.0, 0).unwrap();
        let interior = |i: usize, j: usize| (1..3).contains(&i) && (1..3).contains(&j);
        let mut seen = 0;
        for b in w.bonds() {
            let [(i0, j0), (i1, j1)] = w.endpoints(b);
            let count = w.bonds().filter(|&o| adjacent_weak(b, o, &cfg).unwrap()).count();
            assert_eq!(count, w.neighbors(w.flat(b)).count());
            if interior(i0, j0) && interior(i1, j1) {
                assert_eq!(count, 6);
                seen += 1;
            }
        }
        assert_eq!(seen, 4);
        // corner bond: corner vertex of degree 2, edge vertex of degree 3
        assert_eq!(w.neighbors(w.flat(h(&w, 0, 0))).count(), 1 + 2);
    }

    #[test]
    fn adjacency_is_symmetric() {
        let w = Window::new(5, 4).unwrap();
        let cfg = BondConfig::sample(w, 0.4, 3).unwrap();
        for a in w.bonds() {
            for b in w.bonds() {
                assert_eq!(adjacent_weak(a, b, &cfg).unwrap(), adjacent_weak(b, a, &cfg).unwrap());
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let w = Window::with_origin(7, 5, -2, 3).unwrap();
        let cfg = BondConfig::sample(w, 0.37, 99).unwrap();
        let text = cfg.to_text();
        assert!(text.starts_with("7 5 -2 3 0.37 99\n"));
        assert_eq!(BondConfig::from_text(&text).unwrap(), cfg);
        assert!(BondConfig::from_text("7 5 -2 3 0.37\nff").is_err());
        assert!(BondConfig::from_text("3 3 0 0 0.5 1\nzz").is_err());
    }

    #[test]
    fn dual_neighbors_are_face_mates() {
        let w = Window::new(4, 4).unwrap();
        // interior horizontal bond: two faces, three other bonds each
        let b = w.flat(h(&w, 1, 1));
        assert_eq!(w.dual_neighbors(b).count(), 6);
        // bottom-row horizontal bond: outer face has no other window bond
        let b = w.flat(h(&w, 1, 0));
        assert_eq!(w.dual_neighbors(b).count(), 3);
    }
}
