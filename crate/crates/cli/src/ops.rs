//! Subcommand implementations.

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use std::path::{Path, PathBuf};

use darkstore_core::arrangement::{arrange_store, deplete as deplete_arrangement, Arrangement};
use darkstore_core::canonical::to_canonical_string;
use darkstore_core::catalog::MeshFamily;
use darkstore_core::config::GenConfig;
use darkstore_core::geometry::Vec3;
use darkstore_core::layout::{generate_layout, validate_layout, FixtureTemplate, TextureIds};
use darkstore_core::lod::{obj, optimize_mesh, synthetic, TriMesh};
use darkstore_core::planner::anchors::{grasp_target, resolve_template, GraspTarget};
use darkstore_core::planner::{
    config_in_collision, plan_anchors, AnchorTemplate, Config as RobotConfig, RobotModel,
    SceneObstacles, Trajectory,
};
use darkstore_core::rng::{substream, substream_seed};
use darkstore_core::scene::{AssetManifest, AssetRecord, GenParams, SceneFile};
use darkstore_core::task_eval::{eval_task, SceneState, TaskSpec, TrialRecord};
use darkstore_core::{actions, render as render_mod};

use rand::Rng;

pub const ROBOT_JSON: &str = include_str!("../data/robot.json");
pub const PICK_TEMPLATE_JSON: &str = include_str!("../data/anchors_pick.json");

// ---------------------------------------------------------------------------
// Config loading (exit code 2 on failure)
// ---------------------------------------------------------------------------

pub fn load_config(path: Option<&Path>, seed: u64) -> Result<GenConfig, String> {
    let path = path.map(PathBuf::from).or_else(|| {
        std::env::var_os("DARKSTORE_CONFIG").map(PathBuf::from)
    });
    let config = match path {
        None => GenConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| format!("config {}: {e}", path.display()))?;
            let mut de = serde_json::Deserializer::from_str(&text);
            serde_path_to_error::deserialize(&mut de).map_err(|e| {
                format!(
                    "config {}: invalid key `{}`: {}",
                    path.display(),
                    e.path(),
                    e.inner()
                )
            })?
        }
    };
    Ok(config.with_seed(seed))
}

fn write_out(out: Option<PathBuf>, default: &str, content: &str) -> Result<PathBuf> {
    let path = out.unwrap_or_else(|| PathBuf::from(default));
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn read_scene(path: &Path) -> Result<SceneFile> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(SceneFile::from_json(&text)?)
}

// ---------------------------------------------------------------------------
// gen / arrange / deplete
// ---------------------------------------------------------------------------

pub fn gen(config: &GenConfig, out: Option<PathBuf>) -> Result<()> {
    let templates = config.templates();
    let store = config.store_spec()?;
    let mut layout = generate_layout(&store, &templates, &config.layout)?;
    if !config.scenario.textures {
        layout.textures = TextureIds::default();
    }
    let report = validate_layout(&layout, &templates, &config.layout);
    if !report.ok {
        bail!("generated layout failed validation: {:?}", report.violations);
    }
    let scene = SceneFile::from_layout(
        &layout,
        config.root_seed(),
        config.scenario.clone(),
        GenParams {
            layout: config.layout.clone(),
            arrange: config.arrange.clone(),
        },
    );
    let path = write_out(out, "scene.json", &(scene.to_canonical_json()? + "\n"))?;
    println!(
        "gen: {} fixtures -> {}",
        scene.placements.len(),
        path.display()
    );
    Ok(())
}

pub fn arrange(config: &GenConfig, scene_path: &Path, out: Option<PathBuf>) -> Result<()> {
    let mut scene = read_scene(scene_path)?;
    let templates = config.templates();
    let products = config.products();
    let layout = scene.to_layout(&templates)?;
    let mut params = scene.params.arrange.clone();
    params.seed = scene.root_seed;
    let arrangement = arrange_store(&layout, &templates, &products, &params)?;
    scene.set_arrangement(&arrangement);
    scene.params.arrange = params;
    let path = write_out(out, "scene_arranged.json", &(scene.to_canonical_json()? + "\n"))?;
    println!(
        "arrange: {} lanes, {} items -> {}",
        scene.lanes.len(),
        scene.items.len(),
        path.display()
    );
    Ok(())
}

pub fn deplete(
    config: &GenConfig,
    scene_path: &Path,
    days: f64,
    rate: Option<f64>,
    out: Option<PathBuf>,
) -> Result<()> {
    let mut scene = read_scene(scene_path)?;
    let templates = config.templates();
    let arrangement = scene.to_arrangement(&templates)?;
    let rate = rate.unwrap_or(config.arrange.depletion_rate);
    let mut rng = substream(scene.root_seed, &format!("deplete/{days}"));
    let depleted = deplete_arrangement(&arrangement, days, rate, &mut rng)?;
    let removed = arrangement.items.len() - depleted.items.len();
    scene.set_arrangement(&depleted);
    let path = write_out(out, "scene_depleted.json", &(scene.to_canonical_json()? + "\n"))?;
    println!(
        "deplete: removed {removed} of {} items -> {}",
        arrangement.items.len(),
        path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// lod
// ---------------------------------------------------------------------------

/// The bundled synthetic asset set: a carton, a bottle, a detergent jug.
pub fn synthetic_asset_set() -> Vec<(String, TriMesh)> {
    vec![
        (
            "box_like".to_string(),
            synthetic::product_mesh(MeshFamily::BoxLike, Vec3::new(0.20, 0.15, 0.28)),
        ),
        (
            "bottle_like".to_string(),
            synthetic::product_mesh(MeshFamily::Cylindrical, Vec3::new(0.09, 0.09, 0.27)),
        ),
        (
            "l_shaped".to_string(),
            synthetic::product_mesh(MeshFamily::LShaped, Vec3::new(0.14, 0.09, 0.26)),
        ),
    ]
}

pub fn lod(
    config: &GenConfig,
    meshes: &[PathBuf],
    use_synthetic: bool,
    write_manifest: bool,
    out: Option<PathBuf>,
) -> Result<()> {
    let out_dir = out.unwrap_or_else(|| PathBuf::from("lod_out"));
    std::fs::create_dir_all(&out_dir)?;

    let mut inputs: Vec<(String, TriMesh)> = Vec::new();
    if use_synthetic {
        for (id, mesh) in synthetic_asset_set() {
            std::fs::write(out_dir.join(format!("{id}.obj")), obj::write_obj(&mesh)?)?;
            inputs.push((id, mesh));
        }
    }
    for path in meshes {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let mesh = obj::parse_obj(&text)?;
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("mesh")
            .to_string();
        inputs.push((id, mesh));
    }
    if inputs.is_empty() {
        bail!("no input meshes (pass --mesh or --synthetic)");
    }

    let mut report_lines = String::new();
    let mut manifest = AssetManifest { assets: Vec::new() };
    for (id, mesh) in &inputs {
        let (chosen, record) = optimize_mesh(id, mesh, &[], &config.lod)?;
        let lod_path = out_dir.join(format!("{id}_lod.obj"));
        std::fs::write(&lod_path, obj::write_obj(&chosen.mesh)?)?;
        println!(
            "lod: {id}: {} -> {} triangles via {} (chamfer {:.5})",
            record.tri_before, record.tri_after, record.method, record.chamfer
        );
        report_lines.push_str(&to_canonical_string(&record)?);
        report_lines.push('\n');
        let (lo, hi) = mesh.bounding_box();
        manifest.assets.push(AssetRecord {
            id: id.clone(),
            category: "uncategorized".into(),
            canonical_scale: 1.0,
            orientation_note: "z-up, origin at footprint center".into(),
            mesh_path: format!("{id}.obj"),
            lod_mesh_path: Some(format!("{id}_lod.obj")),
            dims: hi - lo,
        });
    }
    std::fs::write(out_dir.join("report.jsonl"), report_lines)?;
    if write_manifest {
        std::fs::write(
            out_dir.join("manifest.json"),
            manifest.to_canonical_json()? + "\n",
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// plan
// ---------------------------------------------------------------------------

pub fn load_robot(path: Option<&Path>) -> Result<RobotModel> {
    let model: RobotModel = match path {
        Some(p) => serde_json::from_str(
            &std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        )?,
        None => serde_json::from_str(ROBOT_JSON)?,
    };
    model.validate()?;
    Ok(model)
}

pub fn load_template(path: Option<&Path>) -> Result<AnchorTemplate> {
    Ok(match path {
        Some(p) => serde_json::from_str(
            &std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        )?,
        None => serde_json::from_str(PICK_TEMPLATE_JSON)?,
    })
}

/// Pick the grasp target: the top-of-stack item in the front-most occupied
/// slot of some lane of the product, on an open shelf board inside the
/// reachable band (fridge and showcase doors are closed in the pick task).
pub fn select_target(
    arrangement: &Arrangement,
    templates: &[FixtureTemplate],
    product_id: &str,
) -> Result<String> {
    use darkstore_core::layout::FixtureKind;
    const Z_BAND: (f64, f64) = (0.35, 1.25);
    let mut best: Option<(&str, f64)> = None;
    for (lane_idx, lane) in arrangement.lanes.iter().enumerate() {
        if lane.product_id != product_id {
            continue;
        }
        if !(Z_BAND.0..=Z_BAND.1).contains(&lane.z) {
            continue;
        }
        let on_open_shelf = arrangement
            .layout
            .placements
            .iter()
            .find(|p| p.id == lane.placement_id)
            .and_then(|p| darkstore_core::layout::template_by_id(templates, &p.template_id).ok())
            .map(|t| t.kind == FixtureKind::Shelf)
            .unwrap_or(false);
        if !on_open_shelf {
            continue;
        }
        let front_slot = match lane.occupancy.iter().position(|&o| o > 0) {
            Some(s) => s,
            None => continue,
        };
        let top_level = lane.occupancy[front_slot] - 1;
        if let Some(item) = arrangement.items.iter().find(|i| {
            i.lane == lane_idx && i.slot == front_slot && i.level == top_level
        }) {
            // prefer untouched front slots, unstacked lanes (the item below
            // a stacked grasp crowds the gripper), then lower boards
            let stack_penalty = if lane.levels > 1 { 100.0 } else { 0.0 };
            let score = front_slot as f64 * 10.0 + lane.z + stack_penalty;
            if best.is_none() || score < best.unwrap().1 {
                best = Some((&item.id, score));
            }
        }
    }
    best.map(|(id, _)| id.to_string())
        .ok_or_else(|| anyhow!("no reachable instance of product {product_id}"))
}

/// Collision-free stowed start pose near the target lane (the task-relevant
/// region of the robot-position randomization axis).
pub fn sample_start(
    model: &RobotModel,
    target: &GraspTarget,
    obstacles: &SceneObstacles,
    randomize: bool,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<RobotConfig> {
    let approach_yaw = target.approach.y.atan2(target.approach.x);
    for attempt in 0..60 {
        let (standoff, lateral, dyaw) = if randomize || attempt > 0 {
            (
                rng.random_range(0.85..1.35),
                rng.random_range(-0.35..0.35),
                rng.random_range(-0.25..0.25),
            )
        } else {
            (1.0, 0.0, 0.0)
        };
        let side = target.approach.perp();
        let pos = target.lane_front - target.approach * standoff + side * lateral;
        let q = model.stowed(pos.x, pos.y, approach_yaw + dyaw);
        if !config_in_collision(model, &q, obstacles)? {
            return Ok(q);
        }
    }
    bail!("no collision-free start pose near the target lane")
}

pub struct TrialOutcome {
    pub trajectory: Option<Trajectory>,
    pub target_item: String,
    pub failure: Option<String>,
}

/// One pick-planning attempt against an arranged scene.
pub fn plan_pick(
    config: &GenConfig,
    arrangement: &Arrangement,
    templates: &[FixtureTemplate],
    model: &RobotModel,
    template: &AnchorTemplate,
    product_id: &str,
    start_stream: &mut rand_chacha::ChaCha8Rng,
    anchor_stream: &mut rand_chacha::ChaCha8Rng,
    randomize_start: bool,
) -> Result<TrialOutcome> {
    let products = config.products();
    let target_item = select_target(arrangement, templates, product_id)?;
    let target = grasp_target(arrangement, templates, &target_item)?;
    let obstacles = SceneObstacles::from_arrangement(
        arrangement,
        templates,
        &products,
        config.planner.margin,
        &[target_item.as_str()],
    )?;
    let q_start = sample_start(model, &target, &obstacles, randomize_start, start_stream)?;
    let anchors = resolve_template(template, &target);
    match plan_anchors(model, &q_start, &anchors, &obstacles, &config.planner, anchor_stream) {
        Ok(trajectory) => Ok(TrialOutcome {
            trajectory: Some(trajectory),
            target_item,
            failure: None,
        }),
        Err(failure) => Ok(TrialOutcome {
            trajectory: None,
            target_item,
            failure: Some(failure.to_string()),
        }),
    }
}

pub fn plan(
    config: &GenConfig,
    scene_path: &Path,
    item: &str,
    template_path: Option<&Path>,
    robot_path: Option<&Path>,
    out: Option<PathBuf>,
) -> Result<()> {
    let scene = read_scene(scene_path)?;
    let templates = config.templates();
    let arrangement = scene.to_arrangement(&templates)?;
    if arrangement.items.is_empty() {
        bail!("scene has no items; run `arrange` first");
    }
    let model = load_robot(robot_path)?;
    let template = load_template(template_path)?;
    let mut start_stream = substream(scene.root_seed, "plan/start");
    let mut anchor_stream = substream(scene.root_seed, "plan/anchors");
    let outcome = plan_pick(
        config,
        &arrangement,
        &templates,
        &model,
        &template,
        item,
        &mut start_stream,
        &mut anchor_stream,
        scene.scenario.robot_position,
    )?;
    match outcome.trajectory {
        Some(traj) => {
            let path = write_out(out, "trajectory.jsonl", &actions::trajectory_log(&traj)?)?;
            println!(
                "plan: {} waypoints, {} segments, target {} -> {}",
                traj.waypoints.len(),
                traj.segments.len(),
                outcome.target_item,
                path.display()
            );
            Ok(())
        }
        None => bail!(
            "planning failed for {}: {}",
            outcome.target_item,
            outcome.failure.unwrap_or_default()
        ),
    }
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

pub fn eval(
    config: &GenConfig,
    scene_path: &Path,
    task_path: &Path,
    snapshot_paths: &[PathBuf],
    out: Option<PathBuf>,
) -> Result<()> {
    let scene = read_scene(scene_path)?;
    let templates = config.templates();
    let arrangement = scene.to_arrangement(&templates)?;
    let task: TaskSpec = serde_json::from_str(
        &std::fs::read_to_string(task_path)
            .with_context(|| format!("reading {}", task_path.display()))?,
    )?;
    let snapshots: Vec<SceneState> = snapshot_paths
        .iter()
        .map(|p| {
            Ok(serde_json::from_str(
                &std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
            )?)
        })
        .collect::<Result<_>>()?;
    let report = eval_task(&task, &snapshots, &arrangement, &templates)?;
    use darkstore_core::task_eval::TaskKind;
    let (task_name, item_id, fixture_id) = match &task.kind {
        TaskKind::PickToBasket { product_id } => ("pick_to_basket", product_id.clone(), String::new()),
        TaskKind::PickFromFloor { product_id, fixture_id, .. } => {
            ("pick_from_floor", product_id.clone(), fixture_id.clone())
        }
        TaskKind::BoardToBoard { product_id, fixture_id, .. } => {
            ("board_to_board", product_id.clone(), fixture_id.clone())
        }
        TaskKind::OpenDoor { door_id } => ("open_door", String::new(), door_id.clone()),
        TaskKind::CloseDoor { door_id } => ("close_door", String::new(), door_id.clone()),
        TaskKind::Composite { .. } => ("composite", String::new(), String::new()),
    };
    let record = TrialRecord {
        scenario: scene.scenario.name.clone(),
        task: task_name.to_string(),
        item: item_id,
        fixture: fixture_id,
        success: report.success,
        failed: report.failed.clone(),
    };
    let path = write_out(out, "records.jsonl", &(to_canonical_string(&record)? + "\n"))?;
    println!(
        "eval: success={} ({} failed criteria) -> {}",
        report.success,
        report.failed.len(),
        path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// render
// ---------------------------------------------------------------------------

pub fn render(
    config: &GenConfig,
    scene_path: &Path,
    glyphs: bool,
    items: bool,
    format: &str,
    out: Option<PathBuf>,
) -> Result<()> {
    let scene = read_scene(scene_path)?;
    let templates = config.templates();
    match format {
        "json" => {
            let path = write_out(out, "scene_canonical.json", &(scene.to_canonical_json()? + "\n"))?;
            println!("render: canonical json -> {}", path.display());
        }
        _ => {
            let field = if glyphs {
                Some(scene.to_layout(&templates)?.field)
            } else {
                None
            };
            let svg = render_mod::render_svg(
                &scene,
                &templates,
                field.as_ref(),
                &render_mod::RenderOptions { glyphs, items },
            )?;
            let path = write_out(out, "scene.svg", &svg)?;
            println!("render: svg -> {}", path.display());
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// batch
// ---------------------------------------------------------------------------

#[derive(serde::Serialize)]
struct BatchSummary<'a> {
    trial: usize,
    seed: u64,
    product: &'a str,
    target: String,
    success: bool,
    failure: Option<String>,
}

pub fn batch(
    config: &GenConfig,
    n: usize,
    item: Option<&str>,
    template_path: Option<&Path>,
    out: Option<PathBuf>,
) -> Result<()> {
    let out_dir = out.unwrap_or_else(|| PathBuf::from("batch_out"));
    std::fs::create_dir_all(&out_dir)?;
    let templates = config.templates();
    let products = config.products();
    let model = load_robot(None)?;
    let template = load_template(template_path)?;
    let root = config.root_seed();
    let scenario = &config.scenario;

    let results: Vec<Result<String>> = (0..n)
        .into_par_iter()
        .map(|trial| -> Result<String> {
            let trial_root = substream_seed(root, &format!("trial/{trial}"));
            let layout_seed = if scenario.store_layout { trial_root } else { root };
            let arrange_seed = if scenario.shelf_arrangement {
                substream_seed(trial_root, "arrange")
            } else {
                root
            };
            let mut cfg = config.clone();
            cfg.layout.seed = layout_seed;
            cfg.arrange.seed = arrange_seed;

            let store = cfg.store_spec()?;
            let mut layout = generate_layout(&store, &templates, &cfg.layout)?;
            if !scenario.textures {
                layout.textures = TextureIds::default();
            }
            let arrangement = arrange_store(&layout, &templates, &products, &cfg.arrange)?;
            let product = item
                .map(str::to_string)
                .unwrap_or_else(|| products[trial % products.len()].id.clone());

            let mut scene = SceneFile::from_layout(
                &layout,
                layout_seed,
                scenario.clone(),
                GenParams {
                    layout: cfg.layout.clone(),
                    arrange: cfg.arrange.clone(),
                },
            );
            scene.set_arrangement(&arrangement);
            std::fs::write(
                out_dir.join(format!("scene_{trial:04}.json")),
                scene.to_canonical_json()? + "\n",
            )?;

            let mut start_stream = substream(trial_root, "start");
            let mut anchor_stream = substream(trial_root, "anchors");
            let outcome = plan_pick(
                &cfg,
                &arrangement,
                &templates,
                &model,
                &template,
                &product,
                &mut start_stream,
                &mut anchor_stream,
                scenario.robot_position,
            );
            let summary = match outcome {
                Ok(o) => {
                    if let Some(traj) = &o.trajectory {
                        std::fs::write(
                            out_dir.join(format!("traj_{trial:04}.jsonl")),
                            actions::trajectory_log(traj)?,
                        )?;
                    }
                    BatchSummary {
                        trial,
                        seed: trial_root,
                        product: &product,
                        target: o.target_item,
                        success: o.trajectory.is_some(),
                        failure: o.failure,
                    }
                }
                Err(e) => BatchSummary {
                    trial,
                    seed: trial_root,
                    product: &product,
                    target: String::new(),
                    success: false,
                    failure: Some(e.to_string()),
                },
            };
            Ok(to_canonical_string(&summary)? + "\n")
        })
        .collect();

    let mut lines = String::new();
    let mut successes = 0usize;
    for r in results {
        let line = r?;
        if line.contains("\"success\": true") {
            successes += 1;
        }
        lines.push_str(&line);
    }
    std::fs::write(out_dir.join("summary.jsonl"), &lines)?;
    println!("batch: {successes}/{n} trajectories -> {}", out_dir.display());
    Ok(())
}
