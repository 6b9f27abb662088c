use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use splatfuse_core::geometry::{BinaryMask, ImageRgb, MaskSemantics};
use splatfuse_core::metrics::{iou, psnr, ssim, RegionLabel, RegionReport};
use splatfuse_core::Error as CoreError;
use splatfuse_io::{read_image, read_label_masks, read_mask};

use super::{write_json, SCHEMA_VERSION};
use crate::args::MetricsArgs;
use crate::error::Result;

/// Tools in ascending id order, then tissue (label 0) when it has pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub regions: Vec<RegionReport>,
}

fn same_dims(input: &'static str, (w, h): (usize, usize), (ew, eh): (usize, usize)) -> Result<()> {
    if (w, h) != (ew, eh) {
        return Err(CoreError::DimensionMismatch {
            input,
            expected_width: ew,
            expected_height: eh,
            width: w,
            height: h,
        }
        .into());
    }
    Ok(())
}

fn region(
    label: RegionLabel,
    a: &ImageRgb,
    b: &ImageRgb,
    mask: &BinaryMask,
    iou: Option<f64>,
) -> Result<RegionReport> {
    Ok(RegionReport {
        label,
        iou,
        psnr: psnr(a, b, mask)?,
        ssim: ssim(a, b, mask)?,
    })
}

pub fn metrics(args: &MetricsArgs) -> Result<MetricsReport> {
    let rendered = read_image(&args.rendered)?;
    let reference = read_image(&args.reference)?;
    same_dims("rendered image", rendered.dims(), reference.dims())?;
    let union = read_mask(&args.mask, MaskSemantics::Tool)?;
    same_dims("mask", union.dims(), reference.dims())?;
    let tools = read_label_masks(&args.mask)?;

    let rendered_tools: Option<BTreeMap<u8, BinaryMask>> = match &args.rendered_mask {
        Some(p) => {
            let m = read_mask(p, MaskSemantics::Tool)?;
            same_dims("rendered mask", m.dims(), reference.dims())?;
            Some(read_label_masks(p)?.into_iter().collect())
        }
        None => None,
    };

    let mut regions = Vec::with_capacity(tools.len() + 1);
    for (id, mask) in &tools {
        let tool_iou = match &rendered_tools {
            Some(r) => {
                let empty = BinaryMask::empty(mask.width(), mask.height(), MaskSemantics::Tool);
                Some(iou(r.get(id).unwrap_or(&empty), mask)?)
            }
            None => None,
        };
        regions.push(region(
            RegionLabel::Tool {
                tool_id: *id as u32,
            },
            &rendered,
            &reference,
            mask,
            tool_iou,
        )?);
    }
    let tissue = union.complement(MaskSemantics::Keep);
    if tissue.is_empty() {
        log::warn!("metrics: mask leaves no tissue pixels, tissue region omitted");
    } else {
        regions.push(region(
            RegionLabel::Tissue,
            &rendered,
            &reference,
            &tissue,
            None,
        )?);
    }
    let report = MetricsReport {
        schema_version: SCHEMA_VERSION,
        regions,
    };
    write_json(&args.report, &report)?;
    Ok(report)
}
