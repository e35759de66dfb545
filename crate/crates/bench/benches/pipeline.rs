//! Hot-path benchmarks: field construction, layout generation, Chamfer
//! scoring, and manipulation planning.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use darkstore_core::arrangement::{arrange_store, ArrangeParams};
use darkstore_core::catalog::{default_products, default_templates};
use darkstore_core::geometry::{Pose3, Vec3};
use darkstore_core::layout::{generate_layout, LayoutParams, StoreSpec};
use darkstore_core::lod::synthetic::box_mesh;
use darkstore_core::lod::{chamfer_distance, sample_surface_points};
use darkstore_core::planner::model::{default_model, fk};
use darkstore_core::planner::{plan_screw, Config, PlannerParams, SceneObstacles};
use darkstore_core::rng::substream;
use darkstore_core::tensor_field::build_field;

fn bench_field(c: &mut Criterion) {
    let store = StoreSpec::rectangular(20.0, 15.0).unwrap();
    let walls = darkstore_core::geometry::resample_polygon(&store.walls, 1.0).unwrap();
    c.bench_function("build_field 20x15 @0.25", |b| {
        b.iter(|| build_field(black_box(&[walls.clone()]), 0.4, 0.25, store.bounds()).unwrap())
    });
}

fn bench_layout(c: &mut Criterion) {
    let store = StoreSpec::rectangular(12.0, 9.0).unwrap();
    let templates = default_templates();
    c.bench_function("generate_layout 12x9", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            let params = LayoutParams {
                seed,
                ..LayoutParams::default()
            };
            generate_layout(black_box(&store), &templates, &params).unwrap()
        })
    });
}

fn bench_arrange(c: &mut Criterion) {
    let store = StoreSpec::rectangular(10.0, 8.0).unwrap();
    let templates = default_templates();
    let products = default_products();
    let layout = generate_layout(
        &store,
        &templates,
        &LayoutParams {
            seed: 7,
            ..LayoutParams::default()
        },
    )
    .unwrap();
    c.bench_function("arrange_store 10x8", |b| {
        b.iter(|| {
            arrange_store(
                black_box(&layout),
                &templates,
                &products,
                &ArrangeParams::default(),
            )
            .unwrap()
        })
    });
}

fn bench_chamfer(c: &mut Criterion) {
    let mesh = box_mesh(Vec3::new(0.2, 0.15, 0.3), 29);
    let mut rng = substream(1, "bench");
    let a = sample_surface_points(&mesh, 8192, &mut rng).unwrap();
    let b2 = sample_surface_points(&mesh, 8192, &mut rng).unwrap();
    c.bench_function("chamfer 8192x8192", |b| {
        b.iter(|| chamfer_distance(black_box(&a), black_box(&b2)).unwrap())
    });
}

fn bench_screw_plan(c: &mut Criterion) {
    let model = default_model();
    let params = PlannerParams::default();
    let scene = SceneObstacles::empty(params.margin);
    let q = Config {
        base_x: 0.0,
        base_y: 0.0,
        base_yaw: 0.0,
        torso: 0.15,
        arm: [0.0, 0.8, 0.0, -1.6, 0.0, 0.8, 0.0],
    };
    let start = fk(&model, &q).unwrap().ee;
    let goal = Pose3 {
        position: start.position + Vec3::new(-0.1, 0.2, -0.15),
        rotation: start.rotation,
    };
    c.bench_function("plan_screw 0.27m", |b| {
        b.iter(|| plan_screw(&model, black_box(&q), &goal, &scene, &params).unwrap())
    });
}

criterion_group!(
    benches,
    bench_field,
    bench_layout,
    bench_arrange,
    bench_chamfer,
    bench_screw_plan
);
criterion_main!(benches);
