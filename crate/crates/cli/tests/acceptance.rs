//! Acceptance suite: one test per release criterion, each printing a
//! `[acceptance] criterion N (...): PASS` line (run with `--nocapture` to
//! see them). Tolerances and thresholds are pinned in code.
//!
//! Run: `cargo test -p darkstore-cli --test acceptance -- --nocapture`

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use darkstore_cli::ops;
use darkstore_core::arrangement::{
    arrange_store, deplete, item_footprint, ArrangeParams, Arrangement, Lane,
};
use darkstore_core::catalog::{default_products, default_templates};
use darkstore_core::config::GenConfig;
use darkstore_core::geometry::{
    line_angle_distance, obb_overlap, sphere_obb_clearance, Obb3, Polygon, Vec2, Vec3,
};
use darkstore_core::layout::{
    generate_layout, template_by_id, validate_layout, FixtureKind, LayoutParams, StoreSpec,
};
use darkstore_core::lod::synthetic::product_mesh;
use darkstore_core::lod::{
    optimize_mesh, pareto_front, scores, select_lod, LodCandidate, LodMethod, LodParams, TriMesh,
};
use darkstore_core::planner::model::{default_model, fk};
use darkstore_core::rng::substream;
use darkstore_core::tensor_field::{build_field, major_direction};

fn pass(n: u32, label: &str, detail: &str) {
    println!("[acceptance] criterion {n} ({label}): PASS {detail}");
}

// ===========================================================================
// 1. Determinism of gen / arrange / plan (byte-identical over 20 runs)
// ===========================================================================

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_darkstore"))
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("darkstore_acc_{name}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn criterion_1_determinism() {
    let t0 = Instant::now();
    let dir = tmp_dir("det");
    let cfg_path = dir.join("config.json");
    std::fs::write(&cfg_path, "{\"store\": {\"width\": 8.0, \"depth\": 6.0}}").unwrap();

    let run = |cmd: &mut Command| {
        let out = cmd.output().unwrap();
        assert!(
            out.status.success(),
            "command failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    };

    let mut reference: Option<(Vec<u8>, Vec<u8>, Vec<u8>)> = None;
    let mut target_item: Option<String> = None;
    for repeat in 0..20 {
        let scene = dir.join(format!("scene_{repeat}.json"));
        let arranged = dir.join(format!("arr_{repeat}.json"));
        let traj = dir.join(format!("traj_{repeat}.jsonl"));
        run(bin()
            .args(["gen", "--seed", "7", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(&scene));
        run(bin()
            .args(["arrange", "--seed", "7", "--config"])
            .arg(&cfg_path)
            .arg("--scene")
            .arg(&scene)
            .arg("--out")
            .arg(&arranged));
        if target_item.is_none() {
            // choose a product present in the arranged scene once, reuse it
            let parsed = darkstore_core::scene::SceneFile::from_json(
                &std::fs::read_to_string(&arranged).unwrap(),
            )
            .unwrap();
            let templates = default_templates();
            let arrangement = parsed.to_arrangement(&templates).unwrap();
            let product = default_products()
                .iter()
                .map(|p| p.id.clone())
                .find(|p| ops::select_target(&arrangement, &templates, p).is_ok())
                .expect("some plannable product");
            target_item = Some(product);
        }
        run(bin()
            .args(["plan", "--seed", "7", "--config"])
            .arg(&cfg_path)
            .arg("--scene")
            .arg(&arranged)
            .args(["--item", target_item.as_ref().unwrap()])
            .arg("--out")
            .arg(&traj));
        let bytes = (
            std::fs::read(&scene).unwrap(),
            std::fs::read(&arranged).unwrap(),
            std::fs::read(&traj).unwrap(),
        );
        match &reference {
            None => reference = Some(bytes),
            Some(r) => {
                assert_eq!(r.0, bytes.0, "gen output diverged on run {repeat}");
                assert_eq!(r.1, bytes.1, "arrange output diverged on run {repeat}");
                assert_eq!(r.2, bytes.2, "plan output diverged on run {repeat}");
            }
        }
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 1 took {elapsed:?}");
    pass(1, "determinism", &format!("20 runs byte-identical in {elapsed:.1?}"));
}

// ===========================================================================
// 2. Layout validity over 100 seeds
// ===========================================================================

#[test]
fn criterion_2_layout_validity() {
    let t0 = Instant::now();
    let store = StoreSpec::rectangular(20.0, 15.0).unwrap();
    let templates = default_templates();
    for seed in 0..100u64 {
        let params = LayoutParams {
            seed,
            ..LayoutParams::default()
        };
        let layout = generate_layout(&store, &templates, &params).unwrap();
        assert!(
            !layout.placements.is_empty(),
            "seed {seed} produced an empty layout"
        );
        let report = validate_layout(&layout, &templates, &params);
        assert!(report.ok, "seed {seed}: {:?}", report.violations);
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 120, "criterion 2 took {elapsed:?}");
    pass(2, "layout validity", &format!("100/100 valid in {elapsed:.1?}"));
}

// ===========================================================================
// 3. Tensor-field properties
// ===========================================================================

#[test]
fn criterion_3_tensor_field() {
    use rand::Rng;
    // traceless / symmetric: exact by the two-scalar representation
    let walls = Polygon::new(vec![
        Vec2::new(0.5, 0.5),
        Vec2::new(5.5, 0.7),
        Vec2::new(5.2, 4.4),
        Vec2::new(0.8, 4.0),
    ])
    .unwrap();
    let walls = darkstore_core::geometry::resample_polygon(&walls, 0.8).unwrap();
    let rect = darkstore_core::geometry::Rect::new(Vec2::ZERO, Vec2::new(6.0, 5.0));
    let field = build_field(&[walls.clone()], 0.5, 0.25, rect).unwrap();
    let mut rng = substream(1, "acc3");
    for _ in 0..200 {
        let p = Vec2::new(rng.random_range(0.0..6.0), rng.random_range(0.0..5.0));
        let m = field.eval_analytic(p).matrix();
        assert_eq!(m[0][0] + m[1][1], 0.0);
        assert_eq!(m[0][1], m[1][0]);
    }

    // grid vs analytic at every lattice point, 1e-12
    let (nx, ny) = field.lattice_dims();
    for j in 0..ny {
        for i in 0..nx {
            let p = field.lattice_point(i, j);
            let grid = field.lattice_tensor(i, j);
            let exact = field.eval_analytic(p);
            assert!((grid.a - exact.a).abs() <= 1e-12 && (grid.b - exact.b).abs() <= 1e-12);
        }
    }

    // rotation equivariance of the major direction: 1000 probes, 1e-9
    let center = Vec2::new(3.0, 2.5);
    let mut checked = 0usize;
    while checked < 1000 {
        let phi = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let rotated = Polygon::new(
            walls
                .vertices()
                .iter()
                .map(|v| center + (*v - center).rotated(phi))
                .collect(),
        )
        .unwrap();
        let rot_field = build_field(&[rotated], 0.5, 1.0, rect).unwrap();
        let p = Vec2::new(rng.random_range(1.0..5.0), rng.random_range(1.0..4.0));
        let p_rot = center + (p - center).rotated(phi);
        let t0 = field.eval_analytic(p);
        let t1 = rot_field.eval_analytic(p_rot);
        if t0.norm() < 1e-3 {
            continue;
        }
        let (Some(d0), Some(d1)) = (major_direction(&t0), major_direction(&t1)) else {
            continue;
        };
        assert!(
            line_angle_distance(d0 + phi, d1) < 1e-9,
            "equivariance violated at {p:?} phi {phi}"
        );
        checked += 1;
    }
    pass(3, "tensor field", "traceless exact, grid<=1e-12, equivariance 1000 probes<=1e-9");
}

// ===========================================================================
// 4. Arrangement: overlaps, containment, depletion statistics
// ===========================================================================

fn check_arrangement_geometry(arr: &Arrangement, seed: u64) {
    let templates = default_templates();
    let products = default_products();
    let mut by_surface: BTreeMap<(String, usize), Vec<usize>> = BTreeMap::new();
    for (idx, item) in arr.items.iter().enumerate() {
        let lane = &arr.lanes[item.lane];
        by_surface
            .entry((lane.placement_id.clone(), lane.board_index))
            .or_default()
            .push(idx);
    }
    for ((placement_id, board_index), indices) in &by_surface {
        let placement = arr
            .layout
            .placements
            .iter()
            .find(|p| &p.id == placement_id)
            .unwrap();
        let template = template_by_id(&templates, &placement.template_id).unwrap();
        let volume =
            darkstore_core::arrangement::board_world_volume(placement, template, *board_index)
                .unwrap();
        let board_fp = volume.footprint();
        for (pos, &i) in indices.iter().enumerate() {
            let fa = item_footprint(&arr.items[i], &products).unwrap();
            for corner in fa.corners() {
                assert!(
                    board_fp.signed_distance(corner) <= 1e-9,
                    "seed {seed}: item {} escapes its board",
                    arr.items[i].id
                );
            }
            // stack top under the board clearance
            let product = products
                .iter()
                .find(|p| p.id == arr.items[i].product_id)
                .unwrap();
            let top = arr.items[i].pose.position.z + product.dims.z / 2.0;
            assert!(
                top <= volume.center.z + volume.half_extents.z + 1e-9,
                "seed {seed}: stack pokes through the board above"
            );
            for &j in &indices[pos + 1..] {
                if (arr.items[i].pose.position.z - arr.items[j].pose.position.z).abs() > 1e-9 {
                    continue;
                }
                if (arr.items[i].lane, arr.items[i].slot) == (arr.items[j].lane, arr.items[j].slot)
                {
                    continue;
                }
                let fb = item_footprint(&arr.items[j], &products).unwrap();
                assert!(
                    !obb_overlap(&fa, &fb),
                    "seed {seed}: items {} and {} overlap",
                    arr.items[i].id,
                    arr.items[j].id
                );
            }
        }
    }
}

fn synthetic_lanes(n: usize, depth: usize) -> Arrangement {
    let store = StoreSpec::rectangular(4.0, 4.0).unwrap();
    let templates = default_templates();
    let lp = LayoutParams {
        seed: 0,
        n_seed_fixtures: 0,
        skip_prob: 1.0,
        ..LayoutParams::default()
    };
    let layout = generate_layout(&store, &templates, &lp).unwrap();
    let lanes = (0..n)
        .map(|_| Lane {
            placement_id: "fix_000".into(),
            board_index: 0,
            product_id: "p".into(),
            anchor_x: 0.0,
            slots: (0..depth).map(|s| s as f64 * 0.1).collect(),
            occupancy: vec![1; depth],
            levels: 1,
            z: 0.5,
        })
        .collect();
    Arrangement {
        layout,
        lanes,
        items: vec![],
    }
}

#[test]
fn criterion_4_arrangement() {
    let templates = default_templates();
    let products = default_products();
    // 10 seeded full-store arrangements, exhaustive pairwise oracle
    for seed in 0..10u64 {
        let store = StoreSpec::rectangular(10.0, 8.0).unwrap();
        let lp = LayoutParams {
            seed,
            ..LayoutParams::default()
        };
        let layout = generate_layout(&store, &templates, &lp).unwrap();
        let arr = arrange_store(
            &layout,
            &templates,
            &products,
            &ArrangeParams {
                seed,
                ..ArrangeParams::default()
            },
        )
        .unwrap();
        assert!(!arr.items.is_empty());
        check_arrangement_geometry(&arr, seed);
    }

    // depletion mean over 10^4 depth-40 lanes at rate*days = 4.0 +/- 0.1
    let arr = synthetic_lanes(10_000, 40);
    let mut rng = substream(17, "acc4");
    let out = deplete(&arr, 4.0, 1.0, &mut rng).unwrap();
    let removed: u32 = out.lanes.iter().map(|l| 40 - l.stock()).sum();
    let mean = removed as f64 / 10_000.0;
    assert!((mean - 4.0).abs() < 0.1, "depletion mean {mean}");

    // front-suffix invariant after every step of a day-by-day sequence
    let mut current = synthetic_lanes(2_000, 40);
    for day in 0..6 {
        let mut rng = substream(18 + day, "acc4/steps");
        current = deplete(&current, 1.0, 0.9, &mut rng).unwrap();
        for lane in &current.lanes {
            assert!(lane.suffix_invariant_holds(), "day {day}");
        }
    }
    pass(4, "arrangement", &format!("10 stores clean; depletion mean {mean:.3}"));
}

// ===========================================================================
// 5. LOD selection quality and oracle agreement
// ===========================================================================

#[test]
fn criterion_5_lod() {
    use rand::Rng;
    // bundled synthetic asset set: >=80% triangle reduction at rel chamfer <= 0.15
    for (id, mesh) in ops::synthetic_asset_set() {
        assert!(
            (9_000..12_000).contains(&mesh.tri_count()),
            "{id}: {} triangles",
            mesh.tri_count()
        );
        // 32768 samples: the box fit's chamfer is pure sampling noise, and
        // the 8192-sample floor sits right at the 0.15 relative bound
        let lod_params = LodParams {
            sample_count: 32768,
            ..LodParams::default()
        };
        let (chosen, record) = optimize_mesh(&id, &mesh, &[], &lod_params).unwrap();
        let reduction = 1.0 - record.tri_after as f64 / record.tri_before as f64;
        assert!(
            reduction >= 0.80,
            "{id}: reduction {reduction:.3} via {}",
            record.method
        );
        assert!(
            record.rel_dist <= 0.15,
            "{id}: rel chamfer {:.3} via {}",
            record.rel_dist,
            record.method
        );
        assert!(!chosen.mesh.is_empty());
    }

    // pareto_front and select_lod against exhaustive O(n^2) oracles on
    // random candidate sets of size <= 12
    let dummy_mesh = TriMesh {
        vertices: vec![Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)],
        triangles: vec![[0, 1, 2]],
    };
    let mut rng = substream(23, "acc5");
    for _ in 0..500 {
        let n_extra = rng.random_range(0..=11usize);
        let mut candidates = vec![LodCandidate {
            mesh: dummy_mesh.clone(),
            method: LodMethod::Original,
            tri_count: rng.random_range(100..1000),
            chamfer: 0.0,
        }];
        for k in 0..n_extra {
            candidates.push(LodCandidate {
                mesh: dummy_mesh.clone(),
                method: LodMethod::External {
                    label: format!("e{k}"),
                },
                tri_count: rng.random_range(1..900),
                chamfer: rng.random_range(0.0..4.0),
            });
        }
        let dominated = |a: &LodCandidate, b: &LodCandidate| {
            a.chamfer <= b.chamfer
                && a.tri_count <= b.tri_count
                && (a.chamfer < b.chamfer || a.tri_count < b.tri_count)
        };
        let oracle_front: Vec<usize> = (0..candidates.len())
            .filter(|&i| {
                !(0..candidates.len())
                    .any(|j| j != i && dominated(&candidates[j], &candidates[i]))
            })
            .collect();
        assert_eq!(pareto_front(&candidates), oracle_front);

        let s = scores(&candidates).unwrap();
        let oracle_best = oracle_front
            .iter()
            .copied()
            .min_by(|&i, &j| {
                s[i].l1()
                    .partial_cmp(&s[j].l1())
                    .unwrap()
                    .then(candidates[i].tri_count.cmp(&candidates[j].tri_count))
                    .then(candidates[i].method.tag().cmp(&candidates[j].method.tag()))
            })
            .unwrap();
        assert_eq!(select_lod(&candidates).unwrap(), oracle_best);
    }
    pass(5, "lod selection", ">=80% reduction at rel chamfer <=0.15; oracles agree on 500 sets");
}

// ===========================================================================
// 6. Scene triangle budget with LOD backgrounds
// ===========================================================================

#[test]
fn criterion_6_triangle_budget() {
    let templates = default_templates();
    let products = default_products();
    let store = StoreSpec::rectangular(36.0, 27.0).unwrap();
    let lp = LayoutParams {
        seed: 0,
        ..LayoutParams::default()
    };
    let layout = generate_layout(&store, &templates, &lp).unwrap();
    let shelves: Vec<&str> = layout
        .placements
        .iter()
        .filter(|p| {
            template_by_id(&templates, &p.template_id).unwrap().kind == FixtureKind::Shelf
        })
        .map(|p| p.id.as_str())
        .collect();
    assert!(
        shelves.len() >= 120,
        "store yields only {} shelves",
        shelves.len()
    );
    let arr = arrange_store(
        &layout,
        &templates,
        &products,
        &ArrangeParams {
            seed: 0,
            ..ArrangeParams::default()
        },
    )
    .unwrap();

    // per-product triangle counts, original and LOD-selected
    let mut original_tris: BTreeMap<&str, usize> = BTreeMap::new();
    let mut lod_tris: BTreeMap<&str, usize> = BTreeMap::new();
    for p in &products {
        let mesh = product_mesh(p.mesh_family, p.dims);
        let (chosen, _) = optimize_mesh(&p.id, &mesh, &[], &LodParams::default()).unwrap();
        original_tris.insert(&p.id, mesh.tri_count());
        lod_tris.insert(&p.id, chosen.tri_count);
    }

    // the shelf nearest the door keeps original meshes; every background
    // item uses its LOD-selected mesh
    let door = layout.store.doors[0];
    let door_mid = (door.a + door.b) * 0.5;
    let foreground = layout
        .placements
        .iter()
        .filter(|p| shelves.contains(&p.id.as_str()))
        .min_by(|a, b| {
            a.center
                .distance(door_mid)
                .partial_cmp(&b.center.distance(door_mid))
                .unwrap()
        })
        .unwrap()
        .id
        .clone();

    let mut all_original = 0usize;
    let mut optimized = 0usize;
    for item in &arr.items {
        let lane = &arr.lanes[item.lane];
        let orig = original_tris[item.product_id.as_str()];
        all_original += orig;
        optimized += if lane.placement_id == foreground {
            orig
        } else {
            lod_tris[item.product_id.as_str()]
        };
    }
    let ratio = optimized as f64 / all_original as f64;
    assert!(
        ratio <= 0.25,
        "optimized scene keeps {ratio:.3} of the original triangles"
    );
    pass(
        6,
        "triangle budget",
        &format!(
            "{} shelves, {} items: {:.1}M -> {:.1}M triangles ({:.1}%)",
            shelves.len(),
            arr.items.len(),
            all_original as f64 / 1e6,
            optimized as f64 / 1e6,
            ratio * 100.0
        ),
    );
}

// ===========================================================================
// 7. Planner: screw accuracy, dense recheck, pick suite success rate
// ===========================================================================

/// Independent dense collision/limit recheck at a tenth of the
/// densification resolution, sphere by sphere (no broadphase reuse).
fn dense_recheck(
    model: &darkstore_core::planner::RobotModel,
    traj: &darkstore_core::planner::Trajectory,
    scene: &darkstore_core::planner::SceneObstacles,
    params: &darkstore_core::planner::PlannerParams,
) {
    let res = {
        // mirror of the planner's per-component resolution contract
        let mut r = [params.dq_revolute; 11];
        r[0] = params.dq_prismatic;
        r[1] = params.dq_prismatic;
        r[3] = params.dq_prismatic;
        r
    };
    assert_eq!(traj.waypoints.len(), traj.gripper.len());
    // the oracle's own conservative AABB prefilter (computed from the box
    // fields directly, not via the planner's broadphase)
    let boxes: Vec<(Vec3, Vec3, &Obb3)> = scene
        .all_boxes()
        .map(|b| {
            let r = (b.half_extents.x * b.half_extents.x + b.half_extents.y * b.half_extents.y)
                .sqrt();
            (
                Vec3::new(b.center.x - r, b.center.y - r, b.center.z - b.half_extents.z),
                Vec3::new(b.center.x + r, b.center.y + r, b.center.z + b.half_extents.z),
                b,
            )
        })
        .collect();
    for pair in traj.waypoints.windows(2) {
        let a = pair[0].as_array();
        let b = pair[1].as_array();
        let mut steps = 1usize;
        for i in 0..11 {
            let mut d = b[i] - a[i];
            if i == 2 {
                d = darkstore_core::geometry::wrap_angle(d);
            }
            assert!(
                d.abs() <= res[i] * (1.0 + 1e-9),
                "waypoint delta {d} over resolution {} on component {i}",
                res[i]
            );
            steps = steps.max(((d.abs() / res[i]) * 10.0).ceil() as usize);
        }
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            let mut q = [0.0; 11];
            for i in 0..11 {
                let mut d = b[i] - a[i];
                if i == 2 {
                    d = darkstore_core::geometry::wrap_angle(d);
                }
                q[i] = a[i] + d * t;
            }
            let q = darkstore_core::planner::Config::from_array(q);
            model.check_limits(&q).expect("within limits");
            let state = fk(model, &q).unwrap();
            for (c, r) in state.world_spheres(model) {
                let reach = r + scene.margin;
                for (lo, hi, bx) in &boxes {
                    if c.x + reach < lo.x
                        || c.x - reach > hi.x
                        || c.y + reach < lo.y
                        || c.y - reach > hi.y
                        || c.z + reach < lo.z
                        || c.z - reach > hi.z
                    {
                        continue;
                    }
                    assert!(
                        sphere_obb_clearance(c, r, bx) >= scene.margin - 1e-9,
                        "dense recheck: collision at interpolation {t}"
                    );
                }
            }
            if let Some(walls) = &scene.bounds {
                let p = Vec2::new(q.base_x, q.base_y);
                assert!(walls.contains(p) && walls.boundary_distance(p) >= model.base_radius);
            }
        }
    }
}

#[test]
fn criterion_7_planner() {
    use rand::Rng;
    let t0 = Instant::now();
    let model = default_model();
    let params = darkstore_core::planner::PlannerParams::default();
    let empty = darkstore_core::planner::SceneObstacles::empty(params.margin);
    let home = darkstore_core::planner::Config {
        base_x: 0.0,
        base_y: 0.0,
        base_yaw: 0.0,
        torso: 0.15,
        arm: [0.0, 0.8, 0.0, -1.6, 0.0, 0.8, 0.0],
    };
    let start_ee = fk(&model, &home).unwrap().ee;

    // (a) screw endpoint error < 1e-4 m on 100 reachable empty-scene goals:
    // each goal is the forward kinematics of a perturbed configuration, so
    // reachability holds by construction
    let mut rng = substream(29, "acc7/screw");
    let _ = start_ee;
    for trial in 0..100 {
        let mut m = home.manip();
        m[0] = (m[0] + rng.random_range(-0.08..0.08)).clamp(0.0, 0.38);
        for v in m.iter_mut().skip(1) {
            *v += rng.random_range(-0.30..0.30);
        }
        let goal = fk(&model, &home.with_manip(m)).unwrap().ee;
        let traj = darkstore_core::planner::plan_screw(&model, &home, &goal, &empty, &params)
            .unwrap_or_else(|e| panic!("trial {trial}: screw failed: {e}"));
        let final_ee = fk(&model, traj.waypoints.last().unwrap()).unwrap().ee;
        let (dp, _) = final_ee.error_to(&goal);
        assert!(dp < 1e-4, "trial {trial}: endpoint error {dp}");
        // (b) every returned trajectory passes the independent recheck
        dense_recheck(&model, &traj, &empty, &params);
    }

    // (c) bundled 50-scene seeded pick-anchor suite, success >= 40%
    let graspable = [
        "cereal_box",
        "soda_bottle",
        "water_bottle",
        "detergent",
        "milk_carton",
        "pasta_box",
        "snack_bag",
        "shampoo",
    ];
    let config = GenConfig::default();
    let templates = default_templates();
    let products = default_products();
    let template = ops::load_template(None).unwrap();
    let mut successes = 0usize;
    let mut rechecked = 0usize;
    for seed in 0..50u64 {
        let store = StoreSpec::rectangular(10.0, 8.0).unwrap();
        let lp = LayoutParams {
            seed,
            n_seed_fixtures: 1,
            ..LayoutParams::default()
        };
        let layout = generate_layout(&store, &templates, &lp).unwrap();
        let arr = arrange_store(
            &layout,
            &templates,
            &products,
            &ArrangeParams {
                seed,
                ..ArrangeParams::default()
            },
        )
        .unwrap();
        let product = graspable[seed as usize % graspable.len()];
        let mut start_stream = substream(seed, "acc7/start");
        let mut anchor_stream = substream(seed, "acc7/anchors");
        let outcome = match ops::plan_pick(
            &config,
            &arr,
            &templates,
            &model,
            &template,
            product,
            &mut start_stream,
            &mut anchor_stream,
            true,
        ) {
            Ok(o) => o,
            Err(_) => continue, // product missing in this scene: a failure
        };
        if let Some(traj) = outcome.trajectory {
            successes += 1;
            // recheck against the same obstacle set the planner saw
            let obstacles = darkstore_core::planner::SceneObstacles::from_arrangement(
                &arr,
                &templates,
                &products,
                params.margin,
                &[outcome.target_item.as_str()],
            )
            .unwrap();
            dense_recheck(&model, &traj, &obstacles, &params);
            rechecked += 1;
        }
    }
    let fraction = successes as f64 / 50.0;
    assert!(
        fraction >= 0.40,
        "pick suite success {successes}/50 below the 40% bound"
    );
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 300, "criterion 7 took {elapsed:?}");
    pass(
        7,
        "planner",
        &format!(
            "screw 100/100 <1e-4; suite {successes}/50 ({:.0}%), {rechecked} rechecked, in {elapsed:.1?}",
            fraction * 100.0
        ),
    );
}

// ===========================================================================
// 8. Task evaluation corpus: 12 positive + 12 negative
// ===========================================================================

mod corpus;

#[test]
fn criterion_8_task_eval_corpus() {
    let (correct, total) = corpus::run_corpus();
    assert_eq!(correct, total, "task corpus misclassified {} cases", total - correct);
    assert_eq!(total, 24);
    pass(8, "task evaluation", "24/24 snapshot pairs classified correctly");
}

// ===========================================================================
// 9. Action export
// ===========================================================================

#[test]
fn criterion_9_action_export() {
    use darkstore_core::actions::{export_actions, integrate_base};
    // a real planned pick trajectory with base and manipulation segments
    let config = GenConfig::default();
    let templates = default_templates();
    let products = default_products();
    let model = default_model();
    let template = ops::load_template(None).unwrap();
    let store = StoreSpec::rectangular(9.0, 7.0).unwrap();
    let lp = LayoutParams {
        seed: 2,
        ..LayoutParams::default()
    };
    let layout = generate_layout(&store, &templates, &lp).unwrap();
    let arr = arrange_store(
        &layout,
        &templates,
        &products,
        &ArrangeParams {
            seed: 2,
            ..ArrangeParams::default()
        },
    )
    .unwrap();
    let mut traj = None;
    for product in ["cereal_box", "soda_bottle", "milk_carton", "pasta_box"] {
        let mut s1 = substream(5, "acc9/start");
        let mut s2 = substream(5, "acc9/anchors");
        if let Ok(o) = ops::plan_pick(
            &config, &arr, &templates, &model, &template, product, &mut s1, &mut s2, false,
        ) {
            if o.trajectory.is_some() {
                traj = o.trajectory;
                break;
            }
        }
    }
    let traj = traj.expect("some pick plan succeeds");
    let dt = 0.1;
    let records = export_actions(&traj, dt).unwrap();
    assert_eq!(records.len(), traj.waypoints.len() - 1);
    for r in &records {
        assert_eq!(r.values.len(), 11);
        assert!(r.values.iter().all(|v| v.is_finite()));
    }
    let start = (
        traj.waypoints[0].base_x,
        traj.waypoints[0].base_y,
        traj.waypoints[0].base_yaw,
    );
    let poses = integrate_base(start, &records, dt);
    for (k, (pose, wp)) in poses.iter().zip(&traj.waypoints).enumerate() {
        let err = (pose.0 - wp.base_x)
            .abs()
            .max((pose.1 - wp.base_y).abs())
            .max(darkstore_core::geometry::wrap_angle(pose.2 - wp.base_yaw).abs());
        assert!(err < 1e-6, "step {k}: reconstruction error {err}");
    }
    pass(
        9,
        "action export",
        &format!("{} records, dim 11, base path reconstructed <1e-6/step", records.len()),
    );
}
