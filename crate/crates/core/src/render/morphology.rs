use crate::error::{Error, Result};
use crate::geometry::BinaryMask;
use crate::par;

/// Dilation by a `kernel x kernel` square, clipped at the image border.
///
/// The square element is separable, so this runs a horizontal then a vertical
/// window-OR, each in O(pixels) via prefix counts.
pub fn dilate_mask(mask: &BinaryMask, kernel: usize) -> Result<BinaryMask> {
    if kernel == 0 || kernel.is_multiple_of(2) {
        return Err(Error::InvalidKernel(kernel));
    }
    if kernel == 1 {
        return Ok(mask.clone());
    }
    let r = kernel / 2;
    let (w, h) = mask.dims();
    let bits = mask.bits();

    let mut horiz = vec![false; w * h];
    par::for_each_row(&mut horiz, w, |y, row| {
        window_or(&bits[y * w..(y + 1) * w], r, row);
    });

    // Vertical pass on the transpose keeps both passes row-contiguous.
    let mut transposed = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            transposed[x * h + y] = horiz[y * w + x];
        }
    }
    let mut vert = vec![false; w * h];
    par::for_each_row(&mut vert, h, |x, col| {
        window_or(&transposed[x * h..(x + 1) * h], r, col);
    });
    let mut out = vec![false; w * h];
    for x in 0..w {
        for y in 0..h {
            out[y * w + x] = vert[x * h + y];
        }
    }
    BinaryMask::new(w, h, out, mask.semantics())
}

/// `out[i] = any(line[i-r ..= i+r])`, clipped to the line.
fn window_or(line: &[bool], r: usize, out: &mut [bool]) {
    let n = line.len();
    let mut prefix = vec![0u32; n + 1];
    for (i, &b) in line.iter().enumerate() {
        prefix[i + 1] = prefix[i] + b as u32;
    }
    for (i, o) in out.iter_mut().enumerate() {
        let lo = i.saturating_sub(r);
        let hi = (i + r + 1).min(n);
        *o = prefix[hi] > prefix[lo];
    }
}
