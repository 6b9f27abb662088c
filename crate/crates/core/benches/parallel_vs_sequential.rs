use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPool;
use splatfuse_core::geometry::{BinaryMask, MaskSemantics};
use splatfuse_core::metrics::ssim;
use splatfuse_core::render::{dilate_mask, render, RasterConfig, SplatSet};
use splatfuse_core::synth::{exhaustive_search_oracle, generate, Difficulty, LatticeSpec};

fn single_thread() -> ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
}

/// Runs `f` once on the global pool and once pinned to one thread, where the
/// crate's parallel helpers take their sequential path.
fn both<F: Fn() + Sync>(c: &mut Criterion, name: &str, f: F) {
    let seq = single_thread();
    let mut g = c.benchmark_group(name);
    g.sample_size(10);
    g.bench_function(BenchmarkId::from_parameter("parallel"), |b| b.iter(&f));
    g.bench_function(BenchmarkId::from_parameter("sequential"), |b| {
        b.iter(|| seq.install(&f))
    });
    g.finish();
}

fn benches(c: &mut Criterion) {
    let scene = generate(0, Difficulty::Easy);
    let raster = RasterConfig::default();

    let cloud = &scene.tissue;
    let z: Vec<f64> = cloud.positions().iter().map(|p| p.z).collect();
    let splats = SplatSet::new(
        cloud.positions().to_vec(),
        cloud.colors().unwrap().to_vec(),
        vec![0.9; cloud.len()],
        z.iter().map(|z| 1.2 * z / scene.camera.fx()).collect(),
    )
    .unwrap();
    both(c, "render_tissue", || {
        black_box(render(&splats, &scene.camera, &raster).unwrap());
    });

    both(c, "dilate_47", || {
        black_box(dilate_mask(&scene.mask, 47).unwrap());
    });

    let keep = BinaryMask::full(
        scene.camera.width(),
        scene.camera.height(),
        MaskSemantics::Keep,
    );
    both(c, "ssim_full_frame", || {
        black_box(ssim(&scene.image, &scene.image, &keep).unwrap());
    });

    let tool = scene.tool_instance();
    let lattice = LatticeSpec {
        center: scene.true_offset,
        spacing: 1e-3,
        half_steps: 2,
    };
    both(c, "oracle_5x5x5", || {
        black_box(
            exhaustive_search_oracle(&tool, scene.true_sigma, &scene.camera, &raster, &lattice)
                .unwrap(),
        );
    });
}

criterion_group!(parallel_vs_sequential, benches);
criterion_main!(parallel_vs_sequential);
