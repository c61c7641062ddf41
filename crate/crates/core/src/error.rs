use thiserror::Error;

use crate::model::{RoadId, ZoneId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown road `{0}`")]
    UnknownRoad(RoadId),
    #[error("invalid time-slot partition: {0}")]
    InvalidPartition(String),
    #[error("minute out of range: {0}")]
    MinuteOutOfRange(i64),
    #[error("individual `{0}` has no historical trips")]
    EmptyProfile(String),
    #[error("corrupt input: no catalog paths for OD pair ({origin}, {destination})")]
    MissingOdPair { origin: ZoneId, destination: ZoneId },
    #[error("corrupt input: path {0} has no duration samples")]
    UnknownPath(u32),
    #[error("distributions have different bins")]
    BinMismatch,
    #[error("set sizes differ: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("empty distribution")]
    EmptyDistribution,
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("store: {0}")]
    Store(String),
    #[error("{path}:{line}: {message}")]
    Input {
        path: String,
        line: u64,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
