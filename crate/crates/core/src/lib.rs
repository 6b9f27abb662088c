//! Scene composition for endoscopic reconstructions: place independently
//! reconstructed tool models into a tissue point cloud at the right scale
//! and position, render the result and score it.

pub mod error;
pub mod geometry;
pub mod metrics;
pub mod opjpo;
pub mod par;
pub mod render;
pub mod synth;

pub use error::{Axis, Error, Result};
