use thiserror::Error;

use crate::amalgam::Hypothesis;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground mismatch: expected {expected}, found {found}")]
    GroundMismatch { expected: usize, found: usize },

    #[error("point {point} out of range for ground {ground}")]
    PointOutOfRange { point: usize, ground: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("element {index} is not a member of its subalgebra")]
    NotAMember { index: usize },

    #[error("the meet of the tuple is not zero")]
    MeetNotZero,

    #[error("invalid overlap system: {0}")]
    InvalidSystem(String),

    #[error("invalid cube: {0}")]
    InvalidCube(String),

    #[error("size {size} exceeds the cap {cap}")]
    SizeCap { size: u128, cap: u128 },

    #[error("assembly hypothesis failed at stage {stage}: {which}")]
    HypothesisFailed { stage: usize, which: Hypothesis },

    #[error(transparent)]
    Logic(#[from] crate::logic::LogicError),

    /// Two independent constructions of the same object disagreed.
    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),
}

impl Error {
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::CrossCheck(_))
    }
}

pub(crate) fn check_ground(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::GroundMismatch { expected, found })
    }
}
