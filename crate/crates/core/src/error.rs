use thiserror::Error;

use crate::lattice::{DualPoint, Vertex};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid probability {0}: must lie in [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid window {width}x{height}: both sides need at least 2 vertices")]
    InvalidWindow { width: usize, height: usize },
    #[error("bond {0} lies outside the window")]
    BondOutOfWindow(String),
    #[error("{0} is not the midpoint of a bond in the window")]
    NotABondMidpoint(DualPoint),
    #[error("vertex {0} lies outside the window")]
    VertexOutOfWindow(Vertex),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("zero direction vector")]
    ZeroDirection,
    #[error("direction ({0}, {1}) is not a rational direction")]
    IrrationalDirection(f64, f64),
    #[error("rectangle (with unit margin) exceeds the window")]
    RectangleOutsideWindow,
    #[error("spin field and bond configuration live on different windows")]
    WindowMismatch,
    #[error("no spin is frozen")]
    EmptyFrozenSet,
    #[error("all {trials} trials were discarded")]
    AllTrialsDiscarded { trials: usize },
    #[error("no table entry for normal angle {0} and interpolation is disabled")]
    MissingDirection(f64),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by bad inputs, as opposed to failures that only
    /// show up while running (for example every trial being discarded).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::AllTrialsDiscarded { .. })
    }
}
