use std::fs;
use std::path::Path;

use nalgebra::{Matrix3, Point3, Rotation3, Vector3};
use proptest::prelude::*;
use splatfuse_core::geometry::{
    Camera, DepthMap, ImageRgb, MaskSemantics, PointCloud, RigidTransform,
};
use splatfuse_core::synth::SplitMix64;
use splatfuse_io::*;
use tempfile::tempdir;

fn random_cloud(rng: &mut SplitMix64, n: usize, colored: bool) -> PointCloud {
    let pts = (0..n)
        .map(|_| {
            Point3::new(
                rng.uniform(-5.0, 5.0),
                rng.uniform(-5.0, 5.0),
                rng.uniform(0.0, 10.0),
            )
        })
        .collect();
    let colors = colored.then(|| {
        (0..n)
            .map(|_| [0, 1, 2].map(|_| (rng.next_u64() % 256) as f64 / 255.0))
            .collect()
    });
    PointCloud::new(pts, colors).unwrap()
}

#[test]
fn binary_ply_round_trip_is_bitwise() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("cloud.ply");
    let mut rng = SplitMix64::new(3);
    let cloud = random_cloud(&mut rng, 1000, false);
    write_pointcloud(&cloud, &path, None).unwrap();
    let back = read_pointcloud(&path).unwrap();
    let bits = |c: &PointCloud| {
        c.positions()
            .iter()
            .flat_map(|p| [p.x, p.y, p.z].map(f64::to_bits))
            .collect::<Vec<_>>()
    };
    assert_eq!(bits(&back), bits(&cloud));
}

#[test]
fn write_read_covers_empty_colored_and_labeled() {
    let dir = tempdir().unwrap();
    let mut rng = SplitMix64::new(9);

    let p = dir.path().join("empty.ply");
    write_pointcloud(&PointCloud::empty(), &p, None).unwrap();
    assert!(read_pointcloud(&p).unwrap().is_empty());

    let colored = random_cloud(&mut rng, 50, true);
    let p = dir.path().join("colored.ply");
    write_pointcloud(&colored, &p, None).unwrap();
    assert_eq!(read_pointcloud(&p).unwrap(), colored);

    let labels: Vec<i64> = (0..50).map(|i| i % 3).collect();
    for format in [PlyFormat::BinaryLittleEndian, PlyFormat::Ascii] {
        let p = dir.path().join("scene.ply");
        write_ply(&p, &colored, Some(&labels), &[[0, 1, 2], [3, 4, 5]], format).unwrap();
        let s = read_ply(&p).unwrap();
        assert_eq!(s.cloud, colored);
        assert_eq!(s.labels.unwrap(), labels);
        assert_eq!(s.faces.len(), 2);
    }
}

#[test]
fn unwritable_path_is_an_io_error() {
    let dir = tempdir().unwrap();
    let p = dir.path().join("missing").join("x.ply");
    let e = write_pointcloud(&PointCloud::empty(), &p, None).unwrap_err();
    assert!(matches!(e, IoError::Io { .. }), "{e}");
}

#[test]
fn mesh_examples() {
    let dir = tempdir().unwrap();
    let p = dir.path().join("tri.obj");
    fs::write(&p, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n").unwrap();
    assert_eq!(read_mesh(&p).unwrap().faces(), &[[0, 1, 2]]);

    fs::write(&p, "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n").unwrap();
    assert_eq!(read_mesh(&p).unwrap().faces(), &[[0, 1, 2], [0, 2, 3]]);

    fs::write(&p, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 5\n").unwrap();
    let e = read_mesh(&p).unwrap_err();
    assert!(e.to_string().contains("vertex 5 of 3"), "{e}");

    let ply = dir.path().join("mesh.ply");
    let cloud = PointCloud::from_positions(vec![
        Point3::origin(),
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(0.0, 1.0, 0.0),
    ])
    .unwrap();
    write_ply(&ply, &cloud, None, &[[0, 1, 2]], PlyFormat::Ascii).unwrap();
    let m = read_mesh(&ply).unwrap();
    assert_eq!(m.vertices(), cloud.positions());
    write_pointcloud(&cloud, &ply, None).unwrap();
    assert!(read_mesh(&ply).is_err());

    let obj = dir.path().join("out.obj");
    write_obj(&obj, &m).unwrap();
    assert_eq!(read_mesh(&obj).unwrap(), m);
}

fn gray(path: &Path, w: u32, h: u32, data: Vec<u8>) {
    image::GrayImage::from_raw(w, h, data)
        .unwrap()
        .save(path)
        .unwrap();
}

#[test]
fn mask_examples() {
    let dir = tempdir().unwrap();
    let p = dir.path().join("m.png");
    gray(&p, 4, 3, vec![255; 12]);
    let m = read_mask(&p, MaskSemantics::Tool).unwrap();
    assert_eq!(m.count(), 12);
    assert_eq!(m.semantics(), MaskSemantics::Tool);

    gray(&p, 3, 2, vec![0, 7, 9, 9, 0, 7]);
    let labels = read_label_masks(&p).unwrap();
    assert_eq!(
        labels.iter().map(|(id, _)| *id).collect::<Vec<_>>(),
        vec![7, 9]
    );
    assert_eq!(
        labels[0].1.bits(),
        &[false, true, false, false, false, true]
    );
    assert_eq!(labels[1].1.count(), 2);

    let out = dir.path().join("labels.png");
    write_label_mask(&out, 3, 2, &[(7, &labels[0].1), (9, &labels[1].1)]).unwrap();
    assert_eq!(read_label_masks(&out).unwrap(), labels);

    write_mask(&out, &labels[1].1).unwrap();
    assert_eq!(read_mask(&out, MaskSemantics::Tool).unwrap(), labels[1].1);
}

#[test]
fn depth_examples() {
    let dir = tempdir().unwrap();
    let p = dir.path().join("d.png");
    image::ImageBuffer::<image::Luma<u16>, _>::from_raw(1, 1, vec![1000u16])
        .unwrap()
        .save(&p)
        .unwrap();
    let d = read_depth(&p, 0.001).unwrap();
    assert_eq!(d.values(), &[1.0]);

    let depth = DepthMap::new(3, 1, vec![0.0, 0.5, 65.535]).unwrap();
    write_depth(&p, &depth, 0.001).unwrap();
    assert_eq!(read_depth(&p, 0.001).unwrap(), depth);
    let too_far = DepthMap::new(1, 1, vec![70.0]).unwrap();
    assert!(write_depth(&p, &too_far, 0.001).is_err());

    let e = read_mask(&p, MaskSemantics::Tool).unwrap_err();
    assert!(e.to_string().contains("expected 8-bit grayscale"), "{e}");
    let e = read_image(&p).unwrap_err();
    assert!(e.to_string().contains("expected 8-bit RGB"), "{e}");
    let e = read_depth(&dir.path().join("nope.png"), 1.0).unwrap_err();
    assert!(matches!(e, IoError::Io { .. }));
}

#[test]
fn image_round_trip_at_8_bits() {
    let dir = tempdir().unwrap();
    let p = dir.path().join("i.png");
    let px: Vec<_> = (0..20)
        .map(|i| {
            [
                i as f64 / 255.0,
                (255 - i) as f64 / 255.0,
                (i * 7 % 256) as f64 / 255.0,
            ]
        })
        .collect();
    let img = ImageRgb::new(5, 4, px).unwrap();
    write_image(&p, &img).unwrap();
    assert_eq!(read_image(&p).unwrap(), img);
}

#[test]
fn camera_json_round_trip_and_validation() {
    let dir = tempdir().unwrap();
    let p = dir.path().join("camera.json");
    let cam = Camera::new(300.0, 310.0, 240.0, 180.0, 480, 360).unwrap();
    let rot: Matrix3<f64> = *Rotation3::from_euler_angles(0.3, -0.2, 1.1).matrix();
    let pose = RigidTransform::new(rot, Vector3::new(0.1, 0.2, -0.3)).unwrap();
    let cfg = CameraConfigFile::new(&cam, 1e-5, Some(&pose));
    write_camera(&p, &cfg).unwrap();
    let back = read_camera(&p).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.camera().unwrap(), cam);
    assert!(
        (back.pose().unwrap().to_matrix() - pose.to_matrix())
            .abs()
            .max()
            < 1e-15
    );

    fs::write(
        &p,
        r#"{"fx":1,"fy":1,"cx":0,"cy":0,"width":2,"height":2,"depth_scale":0.001}"#,
    )
    .unwrap();
    let c = read_camera(&p).unwrap();
    assert_eq!(c.schema_version, 1);
    assert!(c.pose().unwrap().is_identity());

    fs::write(
        &p,
        r#"{"fx":1,"fy":1,"cx":0,"cy":0,"width":2,"height":2,"depth_scale":0}"#,
    )
    .unwrap();
    assert!(read_camera(&p)
        .unwrap_err()
        .to_string()
        .contains("depth_scale"));
    fs::write(
        &p,
        r#"{"fx":1,"fy":1,"cx":0,"cy":0,"width":2,"height":2,"depth_scale":1,
            "pose":[[1,0,0,0],[0,1,0,0],[0,0,1.01,0],[0,0,0,1]]}"#,
    )
    .unwrap();
    assert!(read_camera(&p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn ply_parser_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..512)) {
        let _ = parse_ply(&bytes);
    }

    #[test]
    fn ply_parser_survives_corrupted_valid_files(
        seed in any::<u64>(),
        ascii in any::<bool>(),
        flips in proptest::collection::vec((any::<usize>(), any::<u8>()), 1..8),
        cut in any::<usize>(),
    ) {
        let mut rng = SplitMix64::new(seed);
        let cloud = random_cloud(&mut rng, 6, true);
        let format = if ascii { PlyFormat::Ascii } else { PlyFormat::BinaryLittleEndian };
        let mut bytes = encode_ply(&cloud, Some(&[1, 2, 3, 4, 5, 6]), &[[0, 1, 2]], format).unwrap();
        for (i, b) in flips {
            let n = bytes.len();
            bytes[i % n] = b;
        }
        bytes.truncate(cut % (bytes.len() + 1));
        let _ = parse_ply(&bytes);
    }

    #[test]
    fn obj_parser_never_panics(text in "[vf0-9 ./\\-\n#e]{0,200}") {
        let _ = parse_obj(text.as_bytes());
    }

    #[test]
    fn obj_parser_never_panics_on_bytes(bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
        let _ = parse_obj(&bytes);
    }
}
