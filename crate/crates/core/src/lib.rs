//! Bernoulli bond percolation on Z^2: weak clusters, chemical distances,
//! first-passage time constants, disjoint channels and rigid spin ground
//! states.
//!
//! Every bond of Z^2 is independently *strong* with probability `p` and
//! *weak* otherwise. Strong bonds are rigid: in the spin model they may never
//! be broken, in the passage-time model they cost `beta` instead of 1.

pub mod channels;
pub mod clusters;
pub mod distance;
pub mod error;
pub mod estimators;
pub mod flow;
pub mod lattice;
pub mod rng;
pub mod spin;
pub mod stats;
pub mod unionfind;

pub use error::{Error, Result};
pub use lattice::{BondConfig, BondId, DualPoint, Orientation, Vertex, Window};
