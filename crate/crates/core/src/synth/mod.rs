//! Synthetic scenes with exact ground truth and brute-force oracles.

mod oracle;
mod rng;
mod scene;
mod tool;

pub use oracle::{
    brute_force_dilate, brute_force_silhouette, exhaustive_search_oracle, naive_render,
    LatticeSpec, OracleResult, MAX_LATTICE_CANDIDATES,
};
pub use rng::SplitMix64;
pub use scene::{
    generate, synth_camera, Difficulty, SynthScene, SYNTH_DEPTH_SCALE, SYNTH_FOCAL, SYNTH_HEIGHT,
    SYNTH_TOOL_ID, SYNTH_WIDTH,
};
pub use tool::{grasper_mesh, GrasperShape};
