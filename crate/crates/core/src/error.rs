use thiserror::Error;

use crate::VertexId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid instance: {0}")]
    Invalid(String),

    #[error("rankings range over different vertex sets ({left} vs {right} vertices)")]
    VertexSetMismatch { left: usize, right: usize },

    #[error("position {0} is already occupied")]
    PositionCollision(String),

    #[error("instance has {n} vertices, limit for this method is {limit}")]
    TooLarge { n: usize, limit: usize },

    /// The band is too wide for the configured resource budget. This is the
    /// signal that OPT is too large to solve exactly within the caps.
    #[error("band too wide: psi {psi}, {states} states (psi cap {psi_cap}, state cap {state_cap})")]
    BandTooWide {
        psi: usize,
        states: usize,
        psi_cap: usize,
        state_cap: usize,
    },

    #[error("complement identity violated on {} pair(s), first ({}, {})", .0.len(), .0[0].0, .0[0].1)]
    Complement(Vec<(VertexId, VertexId)>),
}

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// True for resource-guard failures (as opposed to bad input).
    pub fn is_resource_guard(&self) -> bool {
        matches!(self, Error::BandTooWide { .. } | Error::TooLarge { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
