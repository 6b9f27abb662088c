use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{PlacementResult, ToolGeometry, ToolInstance};
use crate::error::Result;
use crate::geometry::{scale_points, PointCloud, Rgb};

/// Color given to tool points when the model carries none.
pub const TOOL_COLOR: Rgb = [0.75, 0.75, 0.78];
const TISSUE_COLOR: Rgb = [0.5, 0.5, 0.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Provenance {
    Tissue,
    Tool(u32),
}

impl Provenance {
    /// Integer form used in files: 0 for tissue, the tool id otherwise.
    pub fn code(self) -> i64 {
        match self {
            Provenance::Tissue => 0,
            Provenance::Tool(id) => id as i64,
        }
    }

    pub fn from_code(code: i64) -> Self {
        if code <= 0 {
            Provenance::Tissue
        } else {
            Provenance::Tool(code as u32)
        }
    }
}

/// Tissue plus placed tools, with a provenance label per point. Tool faces
/// are re-indexed into the combined point list.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComposedScene {
    pub cloud: PointCloud,
    pub labels: Vec<Provenance>,
    pub faces: Vec<[usize; 3]>,
}

impl ComposedScene {
    pub fn label_histogram(&self) -> BTreeMap<Provenance, usize> {
        let mut h = BTreeMap::new();
        for &l in &self.labels {
            *h.entry(l).or_insert(0) += 1;
        }
        h
    }
}

pub fn compose_scene(
    tissue: &PointCloud,
    placements: &[(ToolInstance, PlacementResult)],
) -> Result<ComposedScene> {
    let tool_colored = placements.iter().any(|(t, _)| match t.geometry() {
        ToolGeometry::Points(c) => c.colors().is_some(),
        ToolGeometry::Mesh(_) => false,
    });
    let colored = tissue.colors().is_some() || tool_colored;

    let mut positions = tissue.positions().to_vec();
    let mut colors: Vec<Rgb> = Vec::new();
    if colored {
        match tissue.colors() {
            Some(c) => colors.extend_from_slice(c),
            None => colors.resize(tissue.len(), TISSUE_COLOR),
        }
    }
    let mut labels = vec![Provenance::Tissue; tissue.len()];
    let mut faces = Vec::new();

    for (tool, placement) in placements {
        let base = positions.len();
        let placed = scale_points(tool.geometry().points(), placement.sigma, &placement.offset)?;
        let n = placed.len();
        positions.extend(placed);
        labels.extend(std::iter::repeat_n(Provenance::Tool(tool.id()), n));
        if colored {
            match tool.geometry() {
                ToolGeometry::Points(c) if c.colors().is_some() => {
                    colors.extend_from_slice(c.colors().unwrap())
                }
                _ => colors.extend(std::iter::repeat_n(TOOL_COLOR, n)),
            }
        }
        if let Some(f) = tool.geometry().faces() {
            faces.extend(f.iter().map(|t| t.map(|i| i + base)));
        }
    }

    Ok(ComposedScene {
        cloud: PointCloud::new(positions, colored.then_some(colors))?,
        labels,
        faces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BinaryMask, MaskSemantics, TriangleMesh};
    use nalgebra::{Point3, Vector3};

    fn placement(sigma: f64, offset: Vector3<f64>) -> PlacementResult {
        PlacementResult {
            sigma,
            offset,
            iou: 1.0,
            initial_iou: 1.0,
            iterations: 0,
            candidate_evaluations: 1,
        }
    }

    fn tool(id: u32, n: usize) -> ToolInstance {
        let pts = (0..n).map(|i| Point3::new(i as f64, 0.0, 1.0)).collect();
        ToolInstance::new(
            id,
            ToolGeometry::Points(PointCloud::from_positions(pts).unwrap()),
            BinaryMask::full(1, 1, MaskSemantics::Tool),
        )
        .unwrap()
    }

    fn tissue() -> PointCloud {
        PointCloud::new(
            vec![Point3::new(0.0, 0.0, 2.0); 5],
            Some(vec![[0.9, 0.4, 0.4]; 5]),
        )
        .unwrap()
    }

    #[test]
    fn no_tools_is_tissue() {
        let s = compose_scene(&tissue(), &[]).unwrap();
        assert_eq!(s.cloud, tissue());
        assert!(s.labels.iter().all(|&l| l == Provenance::Tissue));
    }

    #[test]
    fn identity_placement_adds_counts() {
        let t = tool(1, 3);
        let s = compose_scene(&tissue(), &[(t.clone(), placement(1.0, Vector3::zeros()))]).unwrap();
        assert_eq!(s.cloud.len(), 8);
        assert_eq!(&s.cloud.positions()[5..], t.geometry().points());
        assert_eq!(s.cloud.colors().unwrap()[6], TOOL_COLOR);
    }

    #[test]
    fn label_histogram_conserves_counts() {
        let s = compose_scene(
            &tissue(),
            &[
                (tool(1, 3), placement(2.0, Vector3::x())),
                (tool(2, 4), placement(0.5, Vector3::zeros())),
            ],
        )
        .unwrap();
        let h = s.label_histogram();
        assert_eq!(h[&Provenance::Tissue], 5);
        assert_eq!(h[&Provenance::Tool(1)], 3);
        assert_eq!(h[&Provenance::Tool(2)], 4);
        assert_eq!(s.cloud.positions()[6], Point3::new(3.0, 0.0, 2.0));
    }

    #[test]
    fn mesh_faces_are_reindexed() {
        let mesh = TriangleMesh::new(
            vec![
                Point3::origin(),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let t = ToolInstance::new(
            4,
            ToolGeometry::Mesh(mesh),
            BinaryMask::full(1, 1, MaskSemantics::Tool),
        )
        .unwrap();
        let s = compose_scene(&tissue(), &[(t, placement(1.0, Vector3::zeros()))]).unwrap();
        assert_eq!(s.faces, vec![[5, 6, 7]]);
        assert_eq!(
            Provenance::from_code(Provenance::Tool(4).code()),
            Provenance::Tool(4)
        );
    }
}
