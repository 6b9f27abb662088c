use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Point3, Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use super::rng::SplitMix64;
use super::tool::{grasper_mesh, GrasperShape};
use crate::geometry::{
    perspective_project, Aabb, BinaryMask, Camera, DepthMap, ImageRgb, MaskSemantics, PointCloud,
    Rgb, RigidTransform, TriangleMesh,
};
use crate::opjpo::{median_depth, points_under_mask, ToolGeometry, ToolInstance};
use crate::render::{dilate_mask, rasterize_silhouette, RasterConfig};

pub const SYNTH_WIDTH: usize = 480;
pub const SYNTH_HEIGHT: usize = 360;
pub const SYNTH_FOCAL: f64 = 300.0;
/// Stored-16-bit-to-scene-units multiplier used for exported depth maps.
pub const SYNTH_DEPTH_SCALE: f64 = 1e-5;
pub const SYNTH_TOOL_ID: u32 = 1;

pub fn synth_camera() -> Camera {
    Camera::new(
        SYNTH_FOCAL,
        SYNTH_FOCAL,
        SYNTH_WIDTH as f64 / 2.0,
        SYNTH_HEIGHT as f64 / 2.0,
        SYNTH_WIDTH,
        SYNTH_HEIGHT,
    )
    .expect("synthetic camera is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    /// Tool near the image center at a moderate height above the tissue.
    Easy,
    /// Easy placement perturbed by up to 10% of the tissue's AABB diagonal.
    Displaced,
    /// Tool straddling the image border, partly outside the frustum.
    Occluded,
}

impl Difficulty {
    pub const ALL: [Difficulty; 3] = [
        Difficulty::Easy,
        Difficulty::Displaced,
        Difficulty::Occluded,
    ];
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Difficulty::Easy => "easy",
            Difficulty::Displaced => "displaced",
            Difficulty::Occluded => "occluded",
        })
    }
}

impl FromStr for Difficulty {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "easy" => Ok(Difficulty::Easy),
            "displaced" => Ok(Difficulty::Displaced),
            "occluded" => Ok(Difficulty::Occluded),
            other => Err(format!(
                "unknown difficulty {other:?} (easy, displaced, occluded)"
            )),
        }
    }
}

/// A generated frame with its ground truth. The tool model is normalized
/// (centered, largest extent 1); the world tool is `true_sigma * model + true_offset`
/// in the camera frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthScene {
    pub seed: u64,
    pub difficulty: Difficulty,
    pub camera: Camera,
    /// Complete tissue surface, one point per pixel in row-major order.
    pub tissue: PointCloud,
    pub tool: TriangleMesh,
    pub tool_id: u32,
    pub true_sigma: f64,
    pub true_offset: Vector3<f64>,
    /// Tool silhouette of the ground-truth placement.
    pub mask: BinaryMask,
    /// Observed depth: nearest of tissue and tool.
    pub depth: DepthMap,
    pub image: ImageRgb,
}

impl SynthScene {
    pub fn tool_instance(&self) -> ToolInstance {
        ToolInstance::new(
            self.tool_id,
            ToolGeometry::Mesh(self.tool.clone()),
            self.mask.clone(),
        )
        .expect("generated scenes have a non-empty mask")
    }

    /// Tool mesh at its ground-truth placement.
    pub fn placed_tool(&self) -> TriangleMesh {
        place(&self.tool, self.true_sigma, &self.true_offset)
    }

    /// Tissue points under the tool mask dilated by `kernel`.
    pub fn masked_tissue(&self, kernel: usize) -> PointCloud {
        let dilated = dilate_mask(&self.mask, kernel).expect("odd kernel");
        points_under_mask(
            &self.tissue,
            &self.camera,
            &RigidTransform::identity(),
            &dilated,
        )
        .expect("mask matches camera")
    }

    /// Median depth of the masked tissue, the usual depth prior for the search.
    pub fn depth_prior(&self, kernel: usize) -> Option<f64> {
        median_depth(&self.masked_tissue(kernel))
    }

    pub fn tissue_aabb(&self) -> Aabb {
        self.tissue.aabb().expect("tissue is non-empty")
    }
}

fn place(mesh: &TriangleMesh, sigma: f64, offset: &Vector3<f64>) -> TriangleMesh {
    let v = mesh
        .vertices()
        .iter()
        .map(|p| Point3::from(p.coords * sigma + offset))
        .collect();
    TriangleMesh::new(v, mesh.faces().to_vec()).expect("placement keeps topology")
}

/// Smooth tissue height field over pixel coordinates.
struct TissueField {
    base: f64,
    amp: f64,
    freq: (f64, f64),
    phase: (f64, f64),
    grad: (f64, f64),
    tint: (f64, f64),
}

impl TissueField {
    fn sample(rng: &mut SplitMix64) -> Self {
        Self {
            base: rng.uniform(0.28, 0.33),
            amp: rng.uniform(0.006, 0.014),
            freq: (rng.uniform(0.8, 1.6), rng.uniform(0.6, 1.2)),
            phase: (rng.uniform(0.0, TAU), rng.uniform(0.0, TAU)),
            grad: (rng.uniform(-0.02, 0.02), rng.uniform(-0.016, 0.016)),
            tint: (rng.uniform(0.0, TAU), rng.uniform(3.0, 7.0)),
        }
    }

    fn depth(&self, u: f64, v: f64) -> f64 {
        let (s, t) = (u / SYNTH_WIDTH as f64, v / SYNTH_HEIGHT as f64);
        self.base
            + self.amp
                * (TAU * self.freq.0 * s + self.phase.0).sin()
                * (TAU * self.freq.1 * t + self.phase.1).cos()
            + self.grad.0 * (s - 0.5)
            + self.grad.1 * (t - 0.5)
    }

    fn color(&self, u: f64, v: f64) -> Rgb {
        let (s, t) = (u / SYNTH_WIDTH as f64, v / SYNTH_HEIGHT as f64);
        let n = 0.5
            + 0.5
                * (self.tint.1 * (s + 0.7 * t) * TAU / 4.0 + self.tint.0).sin()
                * (5.0 * t + 2.0 * s).cos();
        [0.62 + 0.3 * n, 0.28 + 0.15 * n, 0.3 + 0.12 * (1.0 - n)]
    }
}

/// Mesh depth per pixel (`f64::INFINITY` where uncovered) and a flat shade.
fn zbuffer(mesh: &TriangleMesh, cam: &Camera) -> (Vec<f64>, Vec<f64>) {
    let (w, h) = (cam.width(), cam.height());
    let mut depth = vec![f64::INFINITY; w * h];
    let mut shade = vec![0.0; w * h];
    let proj = perspective_project(mesh.vertices(), cam, &RigidTransform::identity());
    for f in mesh.faces() {
        let (Some(a), Some(b), Some(c)) = (proj.points[f[0]], proj.points[f[1]], proj.points[f[2]])
        else {
            continue;
        };
        let area = (b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u);
        if area == 0.0 {
            continue;
        }
        let va = mesh.vertices()[f[0]];
        let n = (mesh.vertices()[f[1]] - va).cross(&(mesh.vertices()[f[2]] - va));
        let lit = 0.55 + 0.45 * (n.z / n.norm().max(1e-300)).abs();
        let x0 = a.u.min(b.u).min(c.u).ceil().max(0.0) as usize;
        let y0 = a.v.min(b.v).min(c.v).ceil().max(0.0) as usize;
        let x1 = a.u.max(b.u).max(c.u).floor().min(w as f64 - 1.0);
        let y1 = a.v.max(b.v).max(c.v).floor().min(h as f64 - 1.0);
        if x1 < 0.0 || y1 < 0.0 {
            continue;
        }
        for y in y0..=y1 as usize {
            for x in x0..=x1 as usize {
                let (px, py) = (x as f64, y as f64);
                let l0 = ((b.u - px) * (c.v - py) - (b.v - py) * (c.u - px)) / area;
                let l1 = ((c.u - px) * (a.v - py) - (c.v - py) * (a.u - px)) / area;
                let l2 = 1.0 - l0 - l1;
                if l0 < 0.0 || l1 < 0.0 || l2 < 0.0 {
                    continue;
                }
                let z = 1.0 / (l0 / a.z + l1 / b.z + l2 / c.z);
                let i = y * w + x;
                if z < depth[i] {
                    depth[i] = z;
                    shade[i] = lit;
                }
            }
        }
    }
    (depth, shade)
}

fn random_unit(rng: &mut SplitMix64) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.uniform(-1.0, 1.0),
            rng.uniform(-1.0, 1.0),
            rng.uniform(-1.0, 1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Deterministic scene for `(seed, difficulty)`.
pub fn generate(seed: u64, difficulty: Difficulty) -> SynthScene {
    let mix = match difficulty {
        Difficulty::Easy => 0x0101,
        Difficulty::Displaced => 0x0202,
        Difficulty::Occluded => 0x0303,
    };
    let mut rng = SplitMix64::new(seed.wrapping_mul(0x2545_F491_4F6C_DD1D) ^ mix);
    let cam = synth_camera();
    let (w, h) = (cam.width(), cam.height());

    let field = TissueField::sample(&mut rng);
    let mut tissue_pts = Vec::with_capacity(w * h);
    let mut tissue_rgb = Vec::with_capacity(w * h);
    let mut tissue_depth = Vec::with_capacity(w * h);
    for v in 0..h {
        for u in 0..w {
            let d = field.depth(u as f64, v as f64);
            tissue_pts.push(cam.unproject(u as f64, v as f64, d));
            tissue_rgb.push(field.color(u as f64, v as f64));
            tissue_depth.push(d);
        }
    }
    let tissue = PointCloud::new(tissue_pts, Some(tissue_rgb)).expect("tissue is finite");
    let diag = tissue.aabb().expect("non-empty").diagonal();

    let shape = GrasperShape {
        shaft_length: rng.uniform(0.087, 0.105),
        shaft_radius: rng.uniform(0.053, 0.067),
        jaw_length: rng.uniform(0.08, 0.095),
        jaw_opening: rng.uniform(0.2, 0.4),
        ..GrasperShape::default()
    };
    let raw = grasper_mesh(&shape);
    let rot: Matrix3<f64> =
        *(Rotation3::from_axis_angle(&Vector3::z_axis(), rng.uniform(0.0, TAU))
            * Rotation3::from_axis_angle(&Vector3::y_axis(), rng.uniform(0.2, 0.5)))
        .matrix();
    let rotated: Vec<Point3<f64>> = raw
        .vertices()
        .iter()
        .map(|p| Point3::from(rot * p.coords))
        .collect();
    let bb = Aabb::from_points(&rotated).expect("non-empty");
    let center = crate::geometry::centroid(&rotated).expect("non-empty");
    let true_sigma = bb.extent().max();
    let model_vertices = rotated
        .iter()
        .map(|p| Point3::from((p - center) / true_sigma))
        .collect();
    let model = TriangleMesh::new(model_vertices, raw.faces().to_vec()).expect("same topology");

    let raster = RasterConfig::default();
    let mut attempt = 0;
    loop {
        attempt += 1;
        let (pu, pv) = match difficulty {
            Difficulty::Easy | Difficulty::Displaced => (
                cam.cx() + rng.uniform(-20.0, 20.0),
                cam.cy() + rng.uniform(-16.0, 16.0),
            ),
            Difficulty::Occluded => match rng.below(4) {
                0 => (
                    rng.uniform(0.0, 0.06) * w as f64,
                    rng.uniform(0.35, 0.65) * h as f64,
                ),
                1 => (
                    rng.uniform(0.94, 1.0) * w as f64,
                    rng.uniform(0.35, 0.65) * h as f64,
                ),
                2 => (
                    rng.uniform(0.35, 0.65) * w as f64,
                    rng.uniform(0.0, 0.06) * h as f64,
                ),
                _ => (
                    rng.uniform(0.35, 0.65) * w as f64,
                    rng.uniform(0.94, 1.0) * h as f64,
                ),
            },
        };
        let gap = rng.uniform(0.03, 0.06);
        let mut offset = cam.unproject(pu, pv, field.depth(pu, pv) - gap).coords;
        if difficulty == Difficulty::Displaced {
            let mut d = random_unit(&mut rng) * rng.uniform(0.25, 1.0) * 0.1 * diag;
            d.z *= 0.4;
            offset += d;
        }
        let placed = place(&model, true_sigma, &offset);
        let proj = perspective_project(placed.vertices(), &cam, &RigidTransform::identity());
        let mask = rasterize_silhouette(&proj, &cam, &raster, Some(placed.faces()));
        if mask.count() < 150 && attempt < 16 {
            continue;
        }

        let (tool_depth, tool_shade) = zbuffer(&placed, &cam);
        let mut depth = Vec::with_capacity(w * h);
        let mut image = Vec::with_capacity(w * h);
        for i in 0..w * h {
            if tool_depth[i] < tissue_depth[i] {
                depth.push(tool_depth[i]);
                let s = tool_shade[i];
                image.push([0.72 * s, 0.72 * s, 0.76 * s]);
            } else {
                depth.push(tissue_depth[i]);
                image.push(tissue.colors().expect("colored")[i]);
            }
        }
        return SynthScene {
            seed,
            difficulty,
            camera: cam,
            tissue,
            tool: model,
            tool_id: SYNTH_TOOL_ID,
            true_sigma,
            true_offset: offset,
            mask: mask.with_semantics(MaskSemantics::Tool),
            depth: DepthMap::new(w, h, depth).expect("positive depths"),
            image: ImageRgb::new(w, h, image).expect("colors in range"),
        };
    }
}
