use std::fmt;

use thiserror::Error;

/// Coordinate axis, used to name the offending axis in degenerate-geometry errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

fn join_axes(axes: &[Axis]) -> String {
    axes.iter()
        .map(Axis::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{input}: expected {expected_width}x{expected_height}, found {width}x{height}")]
    DimensionMismatch {
        input: &'static str,
        expected_width: usize,
        expected_height: usize,
        width: usize,
        height: usize,
    },
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error("rotation is not orthonormal with det 1 (deviation {deviation:e})")]
    InvalidRotation { deviation: f64 },
    #[error("invalid point cloud: {0}")]
    InvalidCloud(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid {what}: {reason}")]
    InvalidGrid { what: &'static str, reason: String },
    #[error("empty point cloud")]
    EmptyCloud,
    #[error("degenerate bounding box: zero extent on axis {}", join_axes(.axes))]
    DegenerateAabb { axes: Vec<Axis> },
    #[error("scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("tool projection has zero bounding-box area")]
    DegenerateTool,
    #[error("masked tissue projection has zero bounding-box area")]
    DegenerateMask,
    #[error("mask has no set pixels: {0}")]
    EmptyMask(&'static str),
    #[error("tool lies entirely behind the camera")]
    BehindCamera,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("correlation undefined: {0}")]
    CorrelationUndefined(String),
    #[error("dilation kernel must be odd and positive, got {0}")]
    InvalidKernel(usize),
    #[error("invalid splat set: {0}")]
    InvalidSplats(String),
    #[error("lattice has {candidates} candidates, limit is {limit}")]
    LatticeTooLarge { candidates: usize, limit: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
