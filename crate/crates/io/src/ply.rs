//! PLY point clouds and meshes: ASCII and binary little-endian.
//!
//! Vertices need `x`, `y`, `z`; `red`/`green`/`blue` are read as colors
//! (integers scaled by their type's maximum, floats taken as-is) and an
//! integer `label` property as provenance. Faces come from a `vertex_indices`
//! (or `vertex_index`) list and are fan-triangulated. Everything else is
//! skipped.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Point3;
use splatfuse_core::geometry::{PointCloud, Rgb, TriangleMesh};

use crate::error::{IoError, ParseError, Result};
use crate::fsutil::{read_bytes, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlyFormat {
    Ascii,
    #[default]
    BinaryLittleEndian,
}

/// Decoded PLY contents.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlyScene {
    pub cloud: PointCloud,
    pub labels: Option<Vec<i64>>,
    pub faces: Vec<[usize; 3]>,
}

impl PlyScene {
    pub fn into_mesh(self) -> splatfuse_core::Result<TriangleMesh> {
        let (positions, _) = self.cloud.into_parts();
        TriangleMesh::new(positions, self.faces)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Scalar::I8 | Scalar::U8 => 1,
            Scalar::I16 | Scalar::U16 => 2,
            Scalar::I32 | Scalar::U32 | Scalar::F32 => 4,
            Scalar::F64 => 8,
        }
    }

    fn is_integer(self) -> bool {
        !matches!(self, Scalar::F32 | Scalar::F64)
    }

    fn range(self) -> (f64, f64) {
        match self {
            Scalar::I8 => (i8::MIN as f64, i8::MAX as f64),
            Scalar::U8 => (0.0, u8::MAX as f64),
            Scalar::I16 => (i16::MIN as f64, i16::MAX as f64),
            Scalar::U16 => (0.0, u16::MAX as f64),
            Scalar::I32 => (i32::MIN as f64, i32::MAX as f64),
            Scalar::U32 => (0.0, u32::MAX as f64),
            Scalar::F32 | Scalar::F64 => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn decode_le(self, b: &[u8]) -> f64 {
        match self {
            Scalar::I8 => b[0] as i8 as f64,
            Scalar::U8 => b[0] as f64,
            Scalar::I16 => i16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::U16 => u16::from_le_bytes([b[0], b[1]]) as f64,
            Scalar::I32 => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::U32 => u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            Scalar::F64 => f64::from_le_bytes([b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7]]),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Scalar(Scalar),
    List { count: Scalar, item: Scalar },
}

#[derive(Debug, Clone)]
struct Property {
    name: String,
    kind: Kind,
}

#[derive(Debug, Clone)]
struct Element {
    name: String,
    count: usize,
    props: Vec<Property>,
    offset: usize,
}

struct Header {
    format: PlyFormat,
    elements: Vec<Element>,
    body: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header, ParseError> {
    let mut pos = 0;
    let mut line_no = 0;
    let mut format = None;
    let mut elements: Vec<Element> = Vec::new();
    loop {
        let start = pos;
        let Some(len) = bytes[pos..].iter().position(|&b| b == b'\n') else {
            return Err(ParseError::new(
                start,
                "header not terminated by end_header",
            ));
        };
        pos += len + 1;
        let raw = &bytes[start..start + len];
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        let line = std::str::from_utf8(raw)
            .map_err(|_| ParseError::new(start, "header line is not UTF-8"))?;
        let mut tok = line.split_ascii_whitespace();
        let key = tok.next().unwrap_or("");
        if line_no == 0 {
            if line.trim() != "ply" {
                return Err(ParseError::new(start, "missing 'ply' magic"));
            }
            line_no += 1;
            continue;
        }
        line_no += 1;
        match key {
            "" | "comment" | "obj_info" => {}
            "format" => {
                format = Some(match (tok.next(), tok.next()) {
                    (Some("ascii"), Some("1.0")) => PlyFormat::Ascii,
                    (Some("binary_little_endian"), Some("1.0")) => PlyFormat::BinaryLittleEndian,
                    (Some(f), _) => return Err(ParseError::new(
                        start,
                        format!(
                            "unsupported format '{f}' (expected ascii or binary_little_endian 1.0)"
                        ),
                    )),
                    _ => return Err(ParseError::new(start, "malformed format line")),
                });
            }
            "element" => {
                let (Some(name), Some(count)) = (tok.next(), tok.next()) else {
                    return Err(ParseError::new(start, "malformed element line"));
                };
                let count = count
                    .parse::<usize>()
                    .map_err(|_| ParseError::new(start, format!("bad element count '{count}'")))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    props: Vec::new(),
                    offset: start,
                });
            }
            "property" => {
                let Some(el) = elements.last_mut() else {
                    return Err(ParseError::new(start, "property before any element"));
                };
                let parts: Vec<&str> = tok.collect();
                let bad_type =
                    |t: &str| ParseError::new(start, format!("unknown property type '{t}'"));
                let prop = match parts.as_slice() {
                    ["list", c, i, name] => Property {
                        name: name.to_string(),
                        kind: Kind::List {
                            count: Scalar::from_name(c)
                                .filter(|s| s.is_integer())
                                .ok_or_else(|| bad_type(c))?,
                            item: Scalar::from_name(i).ok_or_else(|| bad_type(i))?,
                        },
                    },
                    [t, name] => Property {
                        name: name.to_string(),
                        kind: Kind::Scalar(Scalar::from_name(t).ok_or_else(|| bad_type(t))?),
                    },
                    _ => return Err(ParseError::new(start, "malformed property line")),
                };
                el.props.push(prop);
            }
            "end_header" => break,
            other => {
                return Err(ParseError::new(
                    start,
                    format!("unknown header keyword '{other}'"),
                ))
            }
        }
    }
    let format = format.ok_or_else(|| ParseError::new(0, "header has no format line"))?;
    Ok(Header {
        format,
        elements,
        body: pos,
    })
}

/// Sequential scalar reader over the body; `Ok(None)` means the data ran out.
trait Body {
    fn scalar(&mut self, t: Scalar) -> Result<Option<f64>, ParseError>;
    fn offset(&self) -> usize;
    fn remaining(&self) -> usize;
}

struct AsciiBody<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Body for AsciiBody<'_> {
    fn scalar(&mut self, t: Scalar) -> Result<Option<f64>, ParseError> {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos == self.bytes.len() {
            return Ok(None);
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let tok = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or("");
        let value = if t.is_integer() {
            tok.parse::<i64>().ok().map(|v| v as f64)
        } else {
            tok.parse::<f64>().ok()
        };
        let (lo, hi) = t.range();
        match value {
            Some(v) if v >= lo && v <= hi => Ok(Some(v)),
            _ => Err(ParseError::new(
                start,
                format!("expected {t:?} value, found '{tok}'"),
            )),
        }
    }

    fn offset(&self) -> usize {
        self.pos
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

struct BinaryBody<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Body for BinaryBody<'_> {
    fn scalar(&mut self, t: Scalar) -> Result<Option<f64>, ParseError> {
        let n = t.size();
        if self.bytes.len() - self.pos < n {
            return Ok(None);
        }
        let v = t.decode_le(&self.bytes[self.pos..self.pos + n]);
        self.pos += n;
        Ok(Some(v))
    }

    fn offset(&self) -> usize {
        self.pos
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }
}

struct VertexLayout {
    xyz: [usize; 3],
    rgb: Option<([usize; 3], Scalar)>,
    label: Option<usize>,
}

fn scalar_index(el: &Element, name: &str) -> Option<(usize, Scalar)> {
    el.props.iter().enumerate().find_map(|(i, p)| match p.kind {
        Kind::Scalar(s) if p.name == name => Some((i, s)),
        _ => None,
    })
}

fn vertex_layout(el: &Element) -> Result<VertexLayout, ParseError> {
    let find = |n: &str| scalar_index(el, n);
    let (Some(x), Some(y), Some(z)) = (find("x"), find("y"), find("z")) else {
        return Err(ParseError::new(
            el.offset,
            "vertex element lacks scalar x/y/z properties",
        ));
    };
    let rgb = match (find("red"), find("green"), find("blue")) {
        (Some(r), Some(g), Some(b)) => Some(([r.0, g.0, b.0], r.1)),
        _ => None,
    };
    let label = match find("label") {
        Some((i, s)) if s.is_integer() => Some(i),
        Some(_) => {
            return Err(ParseError::new(
                el.offset,
                "label property must have an integer type",
            ))
        }
        None => None,
    };
    Ok(VertexLayout {
        xyz: [x.0, y.0, z.0],
        rgb,
        label,
    })
}

fn color_value(v: f64, t: Scalar) -> f64 {
    match t {
        Scalar::F32 | Scalar::F64 => v,
        _ => v / t.range().1,
    }
}

fn face_list(el: &Element) -> Option<usize> {
    el.props.iter().position(|p| {
        matches!(p.kind, Kind::List { item, .. } if item.is_integer())
            && (p.name == "vertex_indices" || p.name == "vertex_index")
    })
}

/// Decodes a whole PLY buffer. Never panics on malformed input.
pub fn parse_ply(bytes: &[u8]) -> Result<PlyScene, ParseError> {
    let header = parse_header(bytes)?;
    let data = &bytes[header.body..];
    let mut ascii;
    let mut binary;
    let body: &mut dyn Body = match header.format {
        PlyFormat::Ascii => {
            ascii = AsciiBody {
                bytes: data,
                pos: 0,
            };
            &mut ascii
        }
        PlyFormat::BinaryLittleEndian => {
            binary = BinaryBody {
                bytes: data,
                pos: 0,
            };
            &mut binary
        }
    };
    let at = |body: &dyn Body| header.body + body.offset();

    let mut positions: Option<Vec<Point3<f64>>> = None;
    let mut colors: Option<Vec<Rgb>> = None;
    let mut labels: Option<Vec<i64>> = None;
    let mut faces = Vec::new();
    let mut face_starts = Vec::new();

    for el in &header.elements {
        let is_vertex = el.name == "vertex" && positions.is_none();
        let layout = if is_vertex {
            Some(vertex_layout(el)?)
        } else {
            None
        };
        let face_prop = if el.name == "face" {
            face_list(el)
        } else {
            None
        };
        // Every row takes at least one byte, which bounds allocations on hostile counts.
        let cap = el.count.min(body.remaining());
        let mut pos = Vec::with_capacity(if is_vertex { cap } else { 0 });
        let mut col = Vec::new();
        let mut lab = Vec::new();
        let mut row = vec![0.0; el.props.len()];
        let mut list = Vec::new();

        for r in 0..el.count {
            let row_start = at(body);
            let truncated = || {
                ParseError::new(
                    bytes.len(),
                    format!(
                        "truncated payload: element '{}' expects {} rows, data ends in row {r}",
                        el.name, el.count
                    ),
                )
            };
            for (k, p) in el.props.iter().enumerate() {
                match p.kind {
                    Kind::Scalar(t) => {
                        row[k] = body
                            .scalar(t)
                            .map_err(|e| shift(e, header.body))?
                            .ok_or_else(truncated)?
                    }
                    Kind::List { count, item } => {
                        let n = body
                            .scalar(count)
                            .map_err(|e| shift(e, header.body))?
                            .ok_or_else(truncated)?;
                        if n < 0.0 || n as usize > body.remaining() {
                            return Err(ParseError::new(
                                at(body),
                                format!("list length {n} exceeds remaining data"),
                            ));
                        }
                        let keep = face_prop == Some(k);
                        list.clear();
                        for _ in 0..n as usize {
                            let v = body
                                .scalar(item)
                                .map_err(|e| shift(e, header.body))?
                                .ok_or_else(truncated)?;
                            if keep {
                                list.push(v);
                            }
                        }
                    }
                }
            }
            if let Some(l) = &layout {
                pos.push(Point3::new(row[l.xyz[0]], row[l.xyz[1]], row[l.xyz[2]]));
                if let Some((idx, t)) = l.rgb {
                    col.push(idx.map(|i| color_value(row[i], t)));
                }
                if let Some(i) = l.label {
                    lab.push(row[i] as i64);
                }
            }
            if face_prop.is_some() {
                if list.len() < 3 {
                    return Err(ParseError::new(
                        row_start,
                        format!("face with {} vertices", list.len()),
                    ));
                }
                if list.iter().any(|&v| v < 0.0) {
                    return Err(ParseError::new(row_start, "negative face index"));
                }
                for j in 1..list.len() - 1 {
                    faces.push([list[0] as usize, list[j] as usize, list[j + 1] as usize]);
                    face_starts.push(row_start);
                }
            }
        }
        if let Some(l) = layout {
            positions = Some(pos);
            if l.rgb.is_some() {
                colors = Some(col);
            }
            if l.label.is_some() {
                labels = Some(lab);
            }
        }
    }

    if header.format == PlyFormat::Ascii {
        let rest = &data[body.offset()..];
        if let Some(extra) = rest.iter().position(|b| !b.is_ascii_whitespace()) {
            return Err(ParseError::new(
                at(body) + extra,
                "data after the last declared element",
            ));
        }
    }

    let positions = positions.unwrap_or_default();
    let n = positions.len();
    if let Some(i) = faces.iter().position(|f| f.iter().any(|&v| v >= n)) {
        return Err(ParseError::new(
            face_starts[i],
            format!("face index out of range for {n} vertices"),
        ));
    }
    let cloud = PointCloud::new(positions, colors)
        .map_err(|e| ParseError::new(header.body, e.to_string()))?;
    Ok(PlyScene {
        cloud,
        labels,
        faces,
    })
}

fn shift(e: ParseError, by: usize) -> ParseError {
    ParseError::new(e.offset + by, e.message)
}

/// Encodes positions as doubles, colors as uchar and labels as int32.
pub fn encode_ply(
    cloud: &PointCloud,
    labels: Option<&[i64]>,
    faces: &[[usize; 3]],
    format: PlyFormat,
) -> std::result::Result<Vec<u8>, String> {
    if let Some(l) = labels {
        if l.len() != cloud.len() {
            return Err(format!("{} labels for {} points", l.len(), cloud.len()));
        }
        if let Some(v) = l.iter().find(|&&v| i32::try_from(v).is_err()) {
            return Err(format!("label {v} does not fit in int32"));
        }
    }
    if let Some(f) = faces.iter().find(|f| {
        f.iter()
            .any(|&i| i >= cloud.len() || i32::try_from(i).is_err())
    }) {
        return Err(format!("face {f:?} references a missing vertex"));
    }
    let mut h = String::from("ply\n");
    let _ = writeln!(
        h,
        "format {} 1.0",
        match format {
            PlyFormat::Ascii => "ascii",
            PlyFormat::BinaryLittleEndian => "binary_little_endian",
        }
    );
    let _ = writeln!(h, "comment written by splatfuse");
    let _ = writeln!(h, "element vertex {}", cloud.len());
    h.push_str("property double x\nproperty double y\nproperty double z\n");
    if cloud.colors().is_some() {
        h.push_str("property uchar red\nproperty uchar green\nproperty uchar blue\n");
    }
    if labels.is_some() {
        h.push_str("property int label\n");
    }
    if !faces.is_empty() {
        let _ = writeln!(h, "element face {}", faces.len());
        h.push_str("property list uchar int vertex_indices\n");
    }
    h.push_str("end_header\n");

    let quant = |c: f64| (c.clamp(0.0, 1.0) * 255.0).round() as u8;
    let mut out = h.into_bytes();
    match format {
        PlyFormat::BinaryLittleEndian => {
            for (i, p) in cloud.positions().iter().enumerate() {
                for c in [p.x, p.y, p.z] {
                    out.extend_from_slice(&c.to_le_bytes());
                }
                if let Some(colors) = cloud.colors() {
                    out.extend(colors[i].iter().map(|&c| quant(c)));
                }
                if let Some(l) = labels {
                    out.extend_from_slice(&(l[i] as i32).to_le_bytes());
                }
            }
            for f in faces {
                out.push(3);
                for &i in f {
                    out.extend_from_slice(&(i as i32).to_le_bytes());
                }
            }
        }
        PlyFormat::Ascii => {
            let mut s = String::new();
            for (i, p) in cloud.positions().iter().enumerate() {
                let _ = write!(s, "{} {} {}", p.x, p.y, p.z);
                if let Some(colors) = cloud.colors() {
                    let c = colors[i];
                    let _ = write!(s, " {} {} {}", quant(c[0]), quant(c[1]), quant(c[2]));
                }
                if let Some(l) = labels {
                    let _ = write!(s, " {}", l[i]);
                }
                s.push('\n');
            }
            for f in faces {
                let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
            }
            out.extend_from_slice(s.as_bytes());
        }
    }
    Ok(out)
}

pub fn read_ply(path: &Path) -> Result<PlyScene> {
    let bytes = read_bytes(path)?;
    parse_ply(&bytes).map_err(|e| IoError::parse(path, e))
}

pub fn read_pointcloud(path: &Path) -> Result<PointCloud> {
    Ok(read_ply(path)?.cloud)
}

/// Binary little-endian PLY with an optional integer `label` per point.
pub fn write_pointcloud(cloud: &PointCloud, path: &Path, labels: Option<&[i64]>) -> Result<()> {
    write_ply(path, cloud, labels, &[], PlyFormat::BinaryLittleEndian)
}

pub fn write_ply(
    path: &Path,
    cloud: &PointCloud,
    labels: Option<&[i64]>,
    faces: &[[usize; 3]],
    format: PlyFormat,
) -> Result<()> {
    let bytes =
        encode_ply(cloud, labels, faces, format).map_err(|m| IoError::unsupported(path, m))?;
    write_atomic(path, &bytes)
}
