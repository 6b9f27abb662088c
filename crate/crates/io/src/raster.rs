//! PNG images, masks, label masks and 16-bit depth maps.

use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, GrayImage, ImageBuffer, ImageFormat, Luma, Rgb as Px, RgbImage};
use splatfuse_core::geometry::{BinaryMask, DepthMap, ImageRgb, MaskSemantics};

use crate::error::{IoError, Result};
use crate::fsutil::{read_bytes, write_atomic};

fn decode(path: &Path) -> Result<DynamicImage> {
    let bytes = read_bytes(path)?;
    image::load_from_memory_with_format(&bytes, ImageFormat::Png).map_err(|source| IoError::Image {
        path: path.to_path_buf(),
        source,
    })
}

fn encode(path: &Path, img: DynamicImage) -> Result<()> {
    let mut buf = Cursor::new(Vec::new());
    img.write_to(&mut buf, ImageFormat::Png)
        .map_err(|source| IoError::Image {
            path: path.to_path_buf(),
            source,
        })?;
    write_atomic(path, buf.get_ref())
}

fn expect(path: &Path, img: &DynamicImage, want: &str) -> IoError {
    IoError::unsupported(
        path,
        format!("expected {want} PNG, found {:?}", img.color()),
    )
}

/// 8-bit RGB, mapped to `[0, 1]` by `/255`.
pub fn read_image(path: &Path) -> Result<ImageRgb> {
    let img = decode(path)?;
    let DynamicImage::ImageRgb8(rgb) = &img else {
        return Err(expect(path, &img, "8-bit RGB"));
    };
    let px = rgb
        .pixels()
        .map(|p| p.0.map(|c| c as f64 / 255.0))
        .collect();
    ImageRgb::new(rgb.width() as usize, rgb.height() as usize, px)
        .map_err(|e| IoError::invalid(path, e))
}

/// Channels are clamped to `[0, 1]` and rounded to 8 bits.
pub fn write_image(path: &Path, image: &ImageRgb) -> Result<()> {
    let (w, h) = dims_u32(path, image.dims())?;
    let data = image
        .pixels()
        .iter()
        .flat_map(|p| p.map(|c| (c.clamp(0.0, 1.0) * 255.0).round() as u8))
        .collect();
    let buf: RgbImage =
        ImageBuffer::<Px<u8>, _>::from_raw(w, h, data).expect("buffer sized from dims");
    encode(path, DynamicImage::ImageRgb8(buf))
}

fn read_gray8(path: &Path) -> Result<GrayImage> {
    match decode(path)? {
        DynamicImage::ImageLuma8(g) => Ok(g),
        other => Err(expect(path, &other, "8-bit grayscale")),
    }
}

/// 8-bit grayscale; any nonzero value sets the bit.
pub fn read_mask(path: &Path, semantics: MaskSemantics) -> Result<BinaryMask> {
    let g = read_gray8(path)?;
    let bits = g.as_raw().iter().map(|&v| v != 0).collect();
    BinaryMask::new(g.width() as usize, g.height() as usize, bits, semantics)
        .map_err(|e| IoError::invalid(path, e))
}

/// Splits a label PNG into one tool mask per distinct nonzero value, sorted by id.
pub fn read_label_masks(path: &Path) -> Result<Vec<(u8, BinaryMask)>> {
    let g = read_gray8(path)?;
    let (w, h) = (g.width() as usize, g.height() as usize);
    let mut present = [false; 256];
    for &v in g.as_raw() {
        present[v as usize] = true;
    }
    (1..=255u8)
        .filter(|&id| present[id as usize])
        .map(|id| {
            let bits = g.as_raw().iter().map(|&v| v == id).collect();
            BinaryMask::new(w, h, bits, MaskSemantics::Tool)
                .map(|m| (id, m))
                .map_err(|e| IoError::invalid(path, e))
        })
        .collect()
}

/// Set bits become 255.
pub fn write_mask(path: &Path, mask: &BinaryMask) -> Result<()> {
    let (w, h) = dims_u32(path, mask.dims())?;
    let data = mask
        .bits()
        .iter()
        .map(|&b| if b { 255 } else { 0 })
        .collect();
    let buf = GrayImage::from_raw(w, h, data).expect("buffer sized from dims");
    encode(path, DynamicImage::ImageLuma8(buf))
}

/// Writes `id` wherever a mask is set; later masks win on overlap.
pub fn write_label_mask(
    path: &Path,
    width: usize,
    height: usize,
    masks: &[(u8, &BinaryMask)],
) -> Result<()> {
    let (w, h) = dims_u32(path, (width, height))?;
    let mut data = vec![0u8; width * height];
    for (id, m) in masks {
        if m.dims() != (width, height) {
            return Err(IoError::unsupported(
                path,
                format!(
                    "mask {id} is {}x{}, expected {width}x{height}",
                    m.width(),
                    m.height()
                ),
            ));
        }
        for (d, &b) in data.iter_mut().zip(m.bits()) {
            if b {
                *d = *id;
            }
        }
    }
    let buf = GrayImage::from_raw(w, h, data).expect("buffer sized from dims");
    encode(path, DynamicImage::ImageLuma8(buf))
}

/// 16-bit grayscale, each stored value multiplied by `depth_scale`.
pub fn read_depth(path: &Path, depth_scale: f64) -> Result<DepthMap> {
    let img = decode(path)?;
    let DynamicImage::ImageLuma16(g) = &img else {
        return Err(expect(path, &img, "16-bit grayscale"));
    };
    let values = g.as_raw().iter().map(|&v| v as f64 * depth_scale).collect();
    DepthMap::new(g.width() as usize, g.height() as usize, values)
        .map_err(|e| IoError::invalid(path, e))
}

/// Stores `round(d / depth_scale)`; values that do not fit in 16 bits are an error.
pub fn write_depth(path: &Path, depth: &DepthMap, depth_scale: f64) -> Result<()> {
    let (w, h) = dims_u32(path, depth.dims())?;
    let mut data = Vec::with_capacity(depth.values().len());
    for (i, &d) in depth.values().iter().enumerate() {
        let q = (d / depth_scale).round();
        if !(0.0..=u16::MAX as f64).contains(&q) {
            return Err(IoError::unsupported(
                path,
                format!("depth {d} at pixel {i} does not fit 16 bits at scale {depth_scale}"),
            ));
        }
        data.push(q as u16);
    }
    let buf = ImageBuffer::<Luma<u16>, _>::from_raw(w, h, data).expect("buffer sized from dims");
    encode(path, DynamicImage::ImageLuma16(buf))
}

fn dims_u32(path: &Path, (w, h): (usize, usize)) -> Result<(u32, u32)> {
    match (u32::try_from(w), u32::try_from(h)) {
        (Ok(w), Ok(h)) if w > 0 && h > 0 => Ok((w, h)),
        _ => Err(IoError::unsupported(
            path,
            format!("cannot encode a {w}x{h} PNG"),
        )),
    }
}
