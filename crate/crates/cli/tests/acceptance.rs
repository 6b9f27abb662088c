//! Acceptance checks, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits nonzero if any check fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{Point3, Vector3};
use serde_json::Value;
use splatfuse_core::geometry::{
    back_project, make_ortho_matrix, perspective_project, Aabb, BinaryMask, Camera, DepthMap,
    ImageRgb, MaskSemantics, RigidTransform, TriangleMesh,
};
use splatfuse_core::metrics::{iou, psnr, ssim, RegionReport};
use splatfuse_core::opjpo::{
    optimize_position, solve_scale, PlacementResult, SearchConfig, ToolGeometry, ToolInstance,
};
use splatfuse_core::render::{color_loss, depth_loss, dilate_mask, render, RasterConfig, SplatSet};
use splatfuse_core::synth::{
    brute_force_dilate, exhaustive_search_oracle, generate, naive_render, Difficulty, LatticeSpec,
    SplitMix64, SynthScene,
};

const MASK_DILATE: usize = 47;

struct Check {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Check {
    Check { pass, detail }
}

fn displaced_scenes() -> Vec<SynthScene> {
    (0..50)
        .map(|seed| generate(seed, Difficulty::Displaced))
        .collect()
}

fn descend(s: &SynthScene) -> PlacementResult {
    let cfg = SearchConfig {
        depth_prior: s.depth_prior(MASK_DILATE),
        ..SearchConfig::default()
    };
    optimize_position(
        &s.tool_instance(),
        s.true_sigma,
        &s.camera,
        &cfg,
        &RasterConfig::default(),
    )
    .unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn offset_recovery(scenes: &[SynthScene], results: &mut Vec<PlacementResult>) -> Check {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let start = Instant::now();
    *results = pool.install(|| scenes.iter().map(descend).collect());
    let elapsed = start.elapsed();

    let tol = 2.0 * SearchConfig::default().min_step;
    let good = scenes
        .iter()
        .zip(results.iter())
        .filter(|(s, r)| (r.offset - s.true_offset).iter().all(|d| d.abs() <= tol) && r.iou >= 0.95)
        .count();
    let med = median(results.iter().map(|r| r.iou).collect());
    let need = (scenes.len() * 9).div_ceil(10);
    check(
        good >= need && med >= 0.97 && elapsed < Duration::from_secs(60),
        format!(
            "{good}/{} displaced scenes within {tol:e}/axis and IoU>=0.95 (need {need}), median IoU {med:.4} \
             (need 0.97), {:.1} s on one thread (limit 60 s)",
            scenes.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn scale_law() -> Check {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for seed in 0..10 {
        let s = generate(seed, Difficulty::Displaced);
        let masked = s.masked_tissue(MASK_DILATE);
        let base = solve_scale(&s.tool_instance(), &s.tissue, &masked).unwrap();
        for k in [0.25, 0.5, 2.0, 4.0] {
            let v: Vec<_> = s.tool.vertices().iter().map(|p| p * k).collect();
            let mesh = TriangleMesh::new(v, s.tool.faces().to_vec()).unwrap();
            let tool =
                ToolInstance::new(s.tool_id, ToolGeometry::Mesh(mesh), s.mask.clone()).unwrap();
            let sigma = solve_scale(&tool, &s.tissue, &masked).unwrap();
            let expected = base / k;
            worst = worst.max((sigma - expected).abs() / expected);
            cases += 1;
        }
    }
    check(
        worst <= 1e-6,
        format!("{cases} scaled tools, worst relative error {worst:.3e} (limit 1e-6)"),
    )
}

fn oracle_dominance(scenes: &[SynthScene], descent: &[PlacementResult]) -> Check {
    let start = Instant::now();
    let raster = RasterConfig::default();
    let spacing = SearchConfig::default().min_step;
    let mut dominated = 0;
    let mut close = 0;
    let mut worst_gap: f64 = 0.0;
    for (s, r) in scenes.iter().zip(descent) {
        let lattice = LatticeSpec {
            center: s.true_offset,
            spacing,
            half_steps: 10,
        };
        let best = exhaustive_search_oracle(
            &s.tool_instance(),
            s.true_sigma,
            &s.camera,
            &raster,
            &lattice,
        )
        .unwrap();
        let gap = best.iou - r.iou;
        dominated += (gap >= 0.0) as usize;
        close += (gap <= 0.02) as usize;
        worst_gap = worst_gap.max(gap);
    }
    let elapsed = start.elapsed();
    let n = scenes.len();
    let need = (n * 9).div_ceil(10);
    check(
        dominated == n && close >= need && elapsed < Duration::from_secs(600),
        format!(
            "21^3 lattice: oracle >= descent on {dominated}/{n}, gap <= 0.02 on {close}/{n} (need {need}), \
             worst gap {worst_gap:.4}, {:.0} s (limit 600 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn compositing_oracle() -> Check {
    let mut rng = SplitMix64::new(0xC0FFEE);
    let cfg = RasterConfig {
        alpha_epsilon: 1e-9,
        ..RasterConfig::default()
    };
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let w = 1 + rng.below(8) as usize;
        let h = 1 + rng.below(8) as usize;
        let f = rng.uniform(2.0, 10.0);
        let cam = Camera::new(
            f,
            f,
            rng.uniform(0.0, w as f64 - 1e-9),
            rng.uniform(0.0, h as f64 - 1e-9),
            w,
            h,
        )
        .unwrap();
        let n = rng.below(11) as usize;
        let mut centers = Vec::with_capacity(n);
        for _ in 0..n {
            let z = rng.uniform(0.5, 3.0);
            centers.push(cam.unproject(
                rng.uniform(-1.0, w as f64),
                rng.uniform(-1.0, h as f64),
                z,
            ));
        }
        let colors = (0..n)
            .map(|_| [rng.next_f64(), rng.next_f64(), rng.next_f64()])
            .collect();
        let opacities = (0..n).map(|_| rng.uniform(0.05, 1.0)).collect();
        let radii = (0..n).map(|_| rng.uniform(0.05, 0.6)).collect();
        let splats = SplatSet::new(centers, colors, opacities, radii).unwrap();
        let fast = render(&splats, &cam, &cfg).unwrap();
        let slow = naive_render(&splats, &cam, &cfg);
        for (a, b) in fast.color.pixels().iter().zip(slow.color.pixels()) {
            for c in 0..3 {
                worst = worst.max((a[c] - b[c]).abs());
            }
        }
        for (a, b) in fast.depth.values().iter().zip(slow.depth.values()) {
            worst = worst.max((a - b).abs());
        }
    }
    check(
        worst <= 1e-6,
        format!("100 random scenes, max |tiled - naive| {worst:.3e} per channel (limit 1e-6)"),
    )
}

fn random_mask(rng: &mut SplitMix64, w: usize, h: usize, density: f64) -> BinaryMask {
    let bits = (0..w * h).map(|_| rng.next_f64() < density).collect();
    BinaryMask::new(w, h, bits, MaskSemantics::Keep).unwrap()
}

fn loss_identities() -> Check {
    let mut rng = SplitMix64::new(0x5EED);
    let mut color_max: f64 = 0.0;
    let mut corr_max: f64 = 0.0;
    for _ in 0..50 {
        let (w, h) = (1 + rng.below(32) as usize, 2 + rng.below(32) as usize);
        let px = (0..w * h)
            .map(|_| [rng.next_f64(), rng.next_f64(), rng.next_f64()])
            .collect();
        let img = ImageRgb::new(w, h, px).unwrap();
        let mask = random_mask(&mut rng, w, h, 0.7);
        color_max = color_max.max(color_loss(&img, &img, &mask).unwrap().abs());

        let d: Vec<f64> = (0..w * h).map(|_| rng.uniform(0.5, 5.0)).collect();
        let a = rng.uniform(0.1, 10.0);
        let b = rng.uniform(-0.4 * a * 0.5, 2.0);
        let scaled: Vec<f64> = d.iter().map(|x| a * x + b).collect();
        let full = BinaryMask::full(w, h, MaskSemantics::Keep);
        let l = depth_loss(
            &DepthMap::new(w, h, scaled).unwrap(),
            &DepthMap::new(w, h, d).unwrap(),
            &full,
        )
        .unwrap();
        corr_max = corr_max.max(l.correlation.abs());
    }
    let mut mismatches = 0;
    for kernel in [1, 3, 47] {
        for _ in 0..100 {
            let density = rng.uniform(0.0, 0.05);
            let m = random_mask(&mut rng, 64, 64, density);
            mismatches += (dilate_mask(&m, kernel).unwrap().bits()
                != brute_force_dilate(&m, kernel).bits()) as usize;
        }
    }
    check(
        color_max == 0.0 && corr_max <= 1e-9 && mismatches == 0,
        format!(
            "color_loss(x,x) max {color_max:e}; affine depth correlation term max {corr_max:.2e} (limit 1e-9); \
             dilation vs brute force: {mismatches} mismatches over 300 masks, kernels 1/3/47"
        ),
    )
}

fn projection_round_trip() -> Check {
    let mut rng = SplitMix64::new(0xBAC4);
    let mut worst_px: f64 = 0.0;
    let mut depth_exact = true;
    let mut points = 0;
    for _ in 0..10 {
        let (w, h) = (8 + rng.below(57) as usize, 8 + rng.below(57) as usize);
        let cam = Camera::new(
            rng.uniform(20.0, 800.0),
            rng.uniform(20.0, 800.0),
            rng.uniform(0.0, w as f64 - 1e-9),
            rng.uniform(0.0, h as f64 - 1e-9),
            w,
            h,
        )
        .unwrap();
        let depth: Vec<f64> = (0..w * h)
            .map(|_| {
                if rng.next_f64() < 0.1 {
                    0.0
                } else {
                    rng.uniform(0.01, 50.0)
                }
            })
            .collect();
        let img = ImageRgb::filled(w, h, [0.5; 3]).unwrap();
        let dm = DepthMap::new(w, h, depth.clone()).unwrap();
        let keep = BinaryMask::full(w, h, MaskSemantics::Keep);
        let cloud = back_project(&img, &dm, &keep, &cam, &RigidTransform::identity()).unwrap();
        let proj = perspective_project(cloud.positions(), &cam, &RigidTransform::identity());
        let pixels = (0..w * h).filter(|&i| depth[i] > 0.0);
        for (i, p) in pixels.zip(&proj.points) {
            let p = p.expect("in front of the camera");
            let (u, v) = ((i % w) as f64, (i / w) as f64);
            worst_px = worst_px.max((p.u - u).abs()).max((p.v - v).abs());
            depth_exact &= p.z == depth[i];
            points += 1;
        }
        depth_exact &= proj.points.len() == depth.iter().filter(|&&d| d > 0.0).count();
    }
    check(
        worst_px <= 1e-6 && depth_exact,
        format!(
            "10 cameras, {points} points: max pixel error {worst_px:.2e} (limit 1e-6), depths {}",
            if depth_exact { "exact" } else { "NOT exact" }
        ),
    )
}

fn ortho_normalization() -> Check {
    let mut rng = SplitMix64::new(0x0A7B);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = 2 + rng.below(200) as usize;
        let scale = Vector3::new(
            rng.uniform(1e-3, 1e3),
            rng.uniform(1e-3, 1e3),
            rng.uniform(1e-3, 1e3),
        );
        let shift = Vector3::new(
            rng.uniform(-1e3, 1e3),
            rng.uniform(-1e3, 1e3),
            rng.uniform(-1e3, 1e3),
        );
        let pts: Vec<Point3<f64>> = (0..n)
            .map(|_| {
                let r = Vector3::new(
                    rng.uniform(-1.0, 1.0),
                    rng.uniform(-1.0, 1.0),
                    rng.uniform(-1.0, 1.0),
                );
                Point3::from(r.component_mul(&scale) + shift)
            })
            .collect();
        let m = make_ortho_matrix(&pts).unwrap();
        for c in Aabb::from_points(&pts).unwrap().corners() {
            let q = m.apply(&c);
            // Corners must land on the faces of the cube, i.e. at +-1 per axis.
            for x in q.iter() {
                worst = worst.max((x.abs() - 1.0).abs());
            }
        }
    }
    check(
        worst <= 1e-9,
        format!(
            "1000 random clouds, max corner deviation from [-1,1]^3 faces {worst:.2e} (limit 1e-9)"
        ),
    )
}

fn metric_ground_truth() -> Check {
    let zeros = ImageRgb::filled(16, 16, [0.0; 3]).unwrap();
    let halves = ImageRgb::filled(16, 16, [0.5; 3]).unwrap();
    let all = BinaryMask::full(16, 16, MaskSemantics::Keep);
    let p = psnr(&zeros, &halves, &all).unwrap();

    let mut rng = SplitMix64::new(11);
    let px = (0..32 * 24)
        .map(|_| [rng.next_f64(), rng.next_f64(), rng.next_f64()])
        .collect();
    let a = ImageRgb::new(32, 24, px).unwrap();
    let s = ssim(&a, &a, &BinaryMask::full(32, 24, MaskSemantics::Keep)).unwrap();

    let bar = |x0: usize| {
        let mut m = BinaryMask::empty(4, 4, MaskSemantics::Tool);
        for y in 0..4 {
            for x in x0..x0 + 2 {
                m.set(x, y, true);
            }
        }
        m
    };
    let j = iou(&bar(0), &bar(1)).unwrap();
    check(
        (p - 6.0206).abs() <= 1e-3 && s == 1.0 && j == 1.0 / 3.0,
        format!("PSNR(0, 0.5) {p:.4} dB (expect 6.0206 +- 1e-3), SSIM(a,a) {s}, bar IoU {j} (expect 1/3 exactly)"),
    )
}

fn cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_splatfuse"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "{} exited {:?}: {}",
            args[0],
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ))
    }
}

fn pipeline(dir: &Path, seed: u64, difficulty: Difficulty) -> Result<Vec<RegionReport>, String> {
    let d = dir.join(format!("{difficulty}-{seed}"));
    let f = |name: &str| d.join(name).to_str().unwrap().to_string();
    cli(&[
        "synth",
        "--seed",
        &seed.to_string(),
        "--difficulty",
        &difficulty.to_string(),
        "--out-dir",
        &f(""),
    ])?;
    cli(&[
        "backproject",
        "--image",
        &f("image.png"),
        "--depth",
        &f("depth.png"),
        "--mask",
        &f("mask.png"),
        "--camera",
        &f("camera.json"),
        "--out",
        &f("backprojected.ply"),
    ])?;
    cli(&[
        "opjpo",
        "--tissue",
        &f("tissue.ply"),
        "--tool",
        &f("tool.obj"),
        "--mask",
        &f("mask.png"),
        "--camera",
        &f("camera.json"),
        "--out-placement",
        &f("placement.json"),
        "--out-scene",
        &f("scene.ply"),
    ])?;
    cli(&[
        "render",
        "--scene",
        &f("scene.ply"),
        "--camera",
        &f("camera.json"),
        "--out-color",
        &f("render.png"),
        "--out-depth",
        &f("render_depth.png"),
        "--out-mask",
        &f("render_mask.png"),
    ])?;
    cli(&[
        "metrics",
        "--rendered",
        &f("render.png"),
        "--reference",
        &f("image.png"),
        "--mask",
        &f("mask.png"),
        "--rendered-mask",
        &f("render_mask.png"),
        "--report",
        &f("report.json"),
    ])?;
    let text = std::fs::read(d.join("report.json")).map_err(|e| e.to_string())?;
    let v: Value = serde_json::from_slice(&text).map_err(|e| e.to_string())?;
    if v["schema_version"] != 1 {
        return Err("report lacks schema_version 1".into());
    }
    serde_json::from_value(v["regions"].clone()).map_err(|e| e.to_string())
}

fn pipeline_closure() -> Check {
    let tmp = tempfile::tempdir().unwrap();
    let mut runs: Vec<(u64, Difficulty)> = (0..50).map(|s| (s, Difficulty::Displaced)).collect();
    for d in [Difficulty::Easy, Difficulty::Occluded] {
        runs.extend((0..10).map(|s| (s, d)));
    }
    let mut failures = Vec::new();
    let mut regions = 0;
    for &(seed, difficulty) in &runs {
        match pipeline(tmp.path(), seed, difficulty) {
            Ok(reports) => {
                regions += reports.len();
                let bad = reports.iter().find(|r| {
                    !r.is_within_bounds()
                        || !r.psnr.is_finite()
                        || r.iou.is_some_and(|v| !v.is_finite())
                });
                if reports.len() != 2 || reports[0].iou.is_none() {
                    failures.push(format!(
                        "{difficulty} {seed}: unexpected regions {reports:?}"
                    ));
                } else if let Some(r) = bad {
                    failures.push(format!("{difficulty} {seed}: out of bounds {r:?}"));
                }
            }
            Err(e) => failures.push(format!("{difficulty} {seed}: {e}")),
        }
    }
    let mut detail = format!(
        "{}/{} pipelines (displaced 0-49, easy and occluded 0-9) exit 0 with {regions} finite, in-bounds regions",
        runs.len() - failures.len(),
        runs.len()
    );
    if let Some(first) = failures.first() {
        detail.push_str(&format!("; first failure: {first}"));
    }
    check(failures.is_empty(), detail)
}

fn run(name: &str, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let c = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        check(false, format!("panicked: {}", msg.unwrap_or_default()))
    });
    println!(
        "{} {name}: {} [{:.1} s]",
        if c.pass { "PASS" } else { "FAIL" },
        c.detail,
        start.elapsed().as_secs_f64()
    );
    c.pass
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let scenes = displaced_scenes();
    let mut descent = Vec::new();
    let results = [
        run("offset recovery", || offset_recovery(&scenes, &mut descent)),
        run("scale law", scale_law),
        run("oracle dominance", || {
            if descent.len() != scenes.len() {
                descent = scenes.iter().map(descend).collect();
            }
            oracle_dominance(&scenes, &descent)
        }),
        run("compositing oracle", compositing_oracle),
        run("loss identities", loss_identities),
        run("projection round trip", projection_round_trip),
        run("ortho normalization", ortho_normalization),
        run("metric ground truth", metric_ground_truth),
        run("pipeline closure", pipeline_closure),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
