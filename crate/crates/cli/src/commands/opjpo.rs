use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use splatfuse_core::geometry::{BinaryMask, Camera, PointCloud, RigidTransform};
use splatfuse_core::opjpo::{
    compose_scene, median_depth, optimize_position, points_under_mask, solve_scale_with,
    PlacementResult, ScaleMode, SearchConfig, ToolGeometry, ToolInstance,
};
use splatfuse_core::par;
use splatfuse_core::render::{dilate_mask, RasterConfig};
use splatfuse_io::{read_label_masks, read_obj, read_ply, read_pointcloud, write_ply, PlyFormat};

use super::{check_mask_dims, load_camera, transform_cloud, write_json, SCHEMA_VERSION};
use crate::args::OpjpoArgs;
use crate::error::{CliError, Result};

fn default_dilate() -> usize {
    47
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

/// Contents of `--config`. Every field is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpjpoConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub search: SearchConfig,
    pub raster: RasterConfig,
    /// Kernel used to grow each tool mask before collecting the tissue under it.
    #[serde(default = "default_dilate")]
    pub mask_dilate: usize,
    pub scale_mode: ScaleMode,
}

impl Default for OpjpoConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            search: SearchConfig::default(),
            raster: RasterConfig::default(),
            mask_dilate: default_dilate(),
            scale_mode: ScaleMode::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementReport {
    pub schema_version: u32,
    pub tools: Vec<ToolEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolEntry {
    pub tool_id: u32,
    #[serde(flatten)]
    pub outcome: ToolOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ToolOutcome {
    Placed {
        sigma: f64,
        /// Camera-frame translation applied after scaling the model.
        offset: [f64; 3],
        iou: f64,
        initial_iou: f64,
        iterations: usize,
        candidate_evaluations: usize,
        depth_prior: Option<f64>,
        masked_tissue_points: usize,
    },
    Failed {
        error: String,
    },
}

struct ToolSpec {
    id: Option<u32>,
    path: PathBuf,
}

fn parse_tool_specs(raw: &[String]) -> Result<Vec<ToolSpec>> {
    let specs: Vec<ToolSpec> = raw
        .iter()
        .map(|s| match s.split_once('=') {
            Some((id, path)) if id.parse::<u32>().is_ok() => ToolSpec {
                id: Some(id.parse().unwrap()),
                path: PathBuf::from(path),
            },
            _ => ToolSpec {
                id: None,
                path: PathBuf::from(s),
            },
        })
        .collect();
    if specs.iter().filter(|s| s.id.is_none()).count() > 1 {
        return Err(CliError::Usage(
            "at most one --tool without an ID= prefix".into(),
        ));
    }
    let mut seen = BTreeSet::new();
    if let Some(dup) = specs
        .iter()
        .filter_map(|s| s.id)
        .find(|&id| !seen.insert(id))
    {
        return Err(CliError::Usage(format!("tool id {dup} given twice")));
    }
    if let Some(zero) = specs.iter().find(|s| s.id == Some(0)) {
        return Err(CliError::Usage(format!(
            "tool id 0 is reserved for tissue ({})",
            zero.path.display()
        )));
    }
    Ok(specs)
}

/// OBJ, a PLY with faces, or a PLY point cloud.
fn read_tool(path: &Path) -> Result<ToolGeometry> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    Ok(match ext.as_deref() {
        Some("obj") => ToolGeometry::Mesh(read_obj(path)?),
        _ => {
            let scene = read_ply(path)?;
            if scene.faces.is_empty() {
                ToolGeometry::Points(scene.cloud)
            } else {
                ToolGeometry::Mesh(scene.into_mesh()?)
            }
        }
    })
}

pub(crate) fn read_config(path: Option<&Path>) -> Result<OpjpoConfig> {
    let Some(path) = path else {
        return Ok(OpjpoConfig::default());
    };
    let text = std::fs::read(path).map_err(|source| CliError::Fs {
        path: path.to_path_buf(),
        source,
    })?;
    let cfg: OpjpoConfig = serde_json::from_slice(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(CliError::Usage(format!(
            "{}: unsupported schema_version {}",
            path.display(),
            cfg.schema_version
        )));
    }
    let bad = |e: splatfuse_core::Error| CliError::Usage(format!("{}: {e}", path.display()));
    cfg.search.validate().map_err(bad)?;
    cfg.raster.validate().map_err(bad)?;
    if cfg.mask_dilate.is_multiple_of(2) {
        return Err(CliError::Usage(format!(
            "{}: mask_dilate must be odd, got {}",
            path.display(),
            cfg.mask_dilate
        )));
    }
    Ok(cfg)
}

struct Solved {
    tool: ToolInstance,
    result: PlacementResult,
    depth_prior: Option<f64>,
    masked: usize,
}

fn solve_one(
    id: u32,
    geometry: &ToolGeometry,
    mask: &BinaryMask,
    tissue: &PointCloud,
    cam: &Camera,
    cfg: &OpjpoConfig,
) -> splatfuse_core::Result<Solved> {
    let tool = ToolInstance::new(id, geometry.clone(), mask.clone())?;
    let dilated = dilate_mask(mask, cfg.mask_dilate)?;
    let masked = points_under_mask(tissue, cam, &RigidTransform::identity(), &dilated)?;
    let sigma = solve_scale_with(&tool, tissue, &masked, cfg.scale_mode, Some(cam))?;
    let depth_prior = cfg.search.depth_prior.or_else(|| median_depth(&masked));
    let search = SearchConfig {
        depth_prior,
        ..cfg.search
    };
    let result = optimize_position(&tool, sigma, cam, &search, &cfg.raster)?;
    Ok(Solved {
        tool,
        result,
        depth_prior,
        masked: masked.len(),
    })
}

/// Places every tool independently. A tool that cannot be solved gets an
/// error entry; the run fails only when no tool could be placed.
pub fn opjpo(args: &OpjpoArgs) -> Result<PlacementReport> {
    let specs = parse_tool_specs(&args.tools)?;
    let cfg = read_config(args.config.as_deref())?;
    let cam = load_camera(&args.camera)?;
    let world_to_camera = cam.camera_to_world.inverse();
    let tissue = transform_cloud(read_pointcloud(&args.tissue)?, &world_to_camera)?;

    let labels: BTreeMap<u32, BinaryMask> = read_label_masks(&args.mask)?
        .into_iter()
        .map(|(id, m)| (id as u32, m))
        .collect();
    for m in labels.values() {
        check_mask_dims(m, &cam.camera, "mask")?;
    }

    let mut models: BTreeMap<PathBuf, ToolGeometry> = BTreeMap::new();
    for s in &specs {
        if !models.contains_key(&s.path) {
            models.insert(s.path.clone(), read_tool(&s.path)?);
        }
    }
    let fallback = specs.iter().find(|s| s.id.is_none()).map(|s| &s.path);
    let explicit: BTreeMap<u32, &PathBuf> = specs
        .iter()
        .filter_map(|s| Some((s.id?, &s.path)))
        .collect();
    let ids: BTreeSet<u32> = labels.keys().chain(explicit.keys()).copied().collect();
    let ids: Vec<u32> = ids.into_iter().collect();

    let empty = BinaryMask::empty(
        cam.camera.width(),
        cam.camera.height(),
        splatfuse_core::geometry::MaskSemantics::Tool,
    );
    let outcomes: Vec<std::result::Result<Solved, String>> = par::map_slice(&ids, |&id| {
        let path = explicit
            .get(&id)
            .copied()
            .or(fallback)
            .ok_or_else(|| format!("no tool model for label {id}"))?;
        let mask = labels.get(&id).unwrap_or(&empty);
        solve_one(id, &models[path], mask, &tissue, &cam.camera, &cfg).map_err(|e| e.to_string())
    });

    let mut tools = Vec::with_capacity(ids.len());
    let mut placed = Vec::new();
    for (&id, outcome) in ids.iter().zip(outcomes) {
        let outcome = match outcome {
            Ok(s) => {
                let r = s.result;
                log::info!(
                    "tool {id}: sigma {:.6} iou {:.4} after {} sweeps",
                    r.sigma,
                    r.iou,
                    r.iterations
                );
                placed.push((s.tool, r));
                ToolOutcome::Placed {
                    sigma: r.sigma,
                    offset: [r.offset.x, r.offset.y, r.offset.z],
                    iou: r.iou,
                    initial_iou: r.initial_iou,
                    iterations: r.iterations,
                    candidate_evaluations: r.candidate_evaluations,
                    depth_prior: s.depth_prior,
                    masked_tissue_points: s.masked,
                }
            }
            Err(error) => {
                log::warn!("tool {id}: {error}");
                ToolOutcome::Failed { error }
            }
        };
        tools.push(ToolEntry {
            tool_id: id,
            outcome,
        });
    }
    let report = PlacementReport {
        schema_version: SCHEMA_VERSION,
        tools,
    };
    write_json(&args.out_placement, &report)?;

    if placed.is_empty() {
        return Err(CliError::Compute(if ids.is_empty() {
            "mask contains no tool labels".into()
        } else {
            "no tool could be placed".into()
        }));
    }
    if let Some(out) = &args.out_scene {
        let scene = compose_scene(&tissue, &placed)?;
        let cloud = transform_cloud(scene.cloud, &cam.camera_to_world)?;
        let codes: Vec<i64> = scene.labels.iter().map(|l| l.code()).collect();
        write_ply(
            out,
            &cloud,
            Some(&codes),
            &scene.faces,
            PlyFormat::BinaryLittleEndian,
        )?;
    }
    Ok(report)
}
