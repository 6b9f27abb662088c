//! Wavefront OBJ, `v` and `f` records only.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Point3;
use splatfuse_core::geometry::TriangleMesh;

use crate::error::{IoError, ParseError, Result};
use crate::fsutil::{read_bytes, write_atomic};

/// Vertices and fan-triangulated faces. Face corners may use the `a/b/c`
/// forms; only the position index is kept, and negative indices count back
/// from the last vertex read so far.
pub fn parse_obj(bytes: &[u8]) -> Result<(Vec<Point3<f64>>, Vec<[usize; 3]>), ParseError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut face_starts = Vec::new();
    let mut offset = 0;
    for raw in bytes.split(|&b| b == b'\n') {
        let start = offset;
        offset += raw.len() + 1;
        let line =
            std::str::from_utf8(raw).map_err(|_| ParseError::new(start, "line is not UTF-8"))?;
        let line = line.split('#').next().unwrap_or("");
        let mut tok = line.split_ascii_whitespace();
        match tok.next() {
            Some("v") => {
                let mut c = [0.0; 3];
                for slot in &mut c {
                    let t = tok
                        .next()
                        .ok_or_else(|| ParseError::new(start, "vertex needs 3 coordinates"))?;
                    *slot = t
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| ParseError::new(start, format!("bad coordinate '{t}'")))?;
                }
                vertices.push(Point3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let mut idx = Vec::new();
                for t in tok {
                    let head = t.split('/').next().unwrap_or("");
                    let i: i64 = head
                        .parse()
                        .map_err(|_| ParseError::new(start, format!("bad face index '{t}'")))?;
                    let n = vertices.len() as i64;
                    let resolved = match i {
                        0 => {
                            return Err(ParseError::new(
                                start,
                                "face index 0 (OBJ indices start at 1)",
                            ))
                        }
                        i if i > 0 => i - 1,
                        i => n + i,
                    };
                    if resolved < 0 {
                        return Err(ParseError::new(
                            start,
                            format!("face index {i} out of range"),
                        ));
                    }
                    idx.push(resolved as usize);
                }
                if idx.len() < 3 {
                    return Err(ParseError::new(
                        start,
                        format!("face with {} vertices cannot be triangulated", idx.len()),
                    ));
                }
                for j in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[j], idx[j + 1]]);
                    face_starts.push(start);
                }
            }
            _ => {}
        }
    }
    let n = vertices.len();
    if let Some(k) = faces.iter().position(|f| f.iter().any(|&i| i >= n)) {
        let bad = faces[k].iter().find(|&&i| i >= n).copied().unwrap_or(0);
        return Err(ParseError::new(
            face_starts[k],
            format!("face references vertex {} of {n}", bad + 1),
        ));
    }
    Ok((vertices, faces))
}

pub fn read_obj(path: &Path) -> Result<TriangleMesh> {
    let bytes = read_bytes(path)?;
    let (v, f) = parse_obj(&bytes).map_err(|e| IoError::parse(path, e))?;
    TriangleMesh::new(v, f).map_err(|e| IoError::invalid(path, e))
}

pub fn write_obj(path: &Path, mesh: &TriangleMesh) -> Result<()> {
    let mut s = String::new();
    for p in mesh.vertices() {
        let _ = writeln!(s, "v {} {} {}", p.x, p.y, p.z);
    }
    for f in mesh.faces() {
        let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    write_atomic(path, s.as_bytes())
}
