//! Forward splat renderer, silhouette rasterizer, masked losses and mask dilation.

mod loss;
mod morphology;
mod silhouette;
mod splat;

pub use loss::{color_loss, color_loss_mean, depth_loss, DepthLoss, EPSILON_DEPTH};
pub use morphology::dilate_mask;
pub use silhouette::rasterize_silhouette;
pub use splat::{render, RasterConfig, RenderOutput, SplatSet};

pub(crate) use splat::project_splats as project_splats_for_oracle;
