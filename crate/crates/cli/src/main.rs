//! `darkstore` — procedural dark-store scenes and manipulation trajectories.
//!
//! Subcommands cover the whole pipeline: `gen` (fixture layout), `arrange`
//! (products on boards), `deplete` (front-of-lane emptying), `lod` (mesh
//! optimization), `plan` (pick trajectories), `eval` (task judging),
//! `render` (top-down SVG), and `batch` (seeded end-to-end trials).
//!
//! Exit codes: 0 success, 1 validation or planning failure, 2 usage or
//! config errors.

use darkstore_cli::ops;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "darkstore", version, about = "Dark-store scene and trajectory generation")]
struct Cli {
    /// Root seed for all randomized stages.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Config file (JSON); falls back to $DARKSTORE_CONFIG, then defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path (file or directory depending on the subcommand).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a fixture layout and write the scene file.
    Gen,
    /// Populate a generated scene with products.
    Arrange(SceneArg),
    /// Apply Poisson front-of-lane depletion to an arranged scene.
    Deplete(DepleteArgs),
    /// Optimize meshes and write LOD outputs plus a report.
    Lod(LodArgs),
    /// Plan a pick trajectory for a target product in a scene.
    Plan(PlanArgs),
    /// Judge a task over scene-state snapshots.
    Eval(EvalArgs),
    /// Render a scene to SVG (or echo canonical JSON).
    Render(RenderArgs),
    /// Run N seeded end-to-end trials in parallel.
    Batch(BatchArgs),
}

#[derive(Args)]
struct SceneArg {
    /// Input scene file.
    #[arg(long)]
    scene: PathBuf,
}

#[derive(Args)]
struct DepleteArgs {
    #[arg(long)]
    scene: PathBuf,
    /// Simulated days of depletion.
    #[arg(long)]
    days: f64,
    /// Poisson rate (items per lane per day); defaults to the config value.
    #[arg(long)]
    rate: Option<f64>,
}

#[derive(Args)]
struct LodArgs {
    /// Input OBJ meshes.
    #[arg(long = "mesh")]
    meshes: Vec<PathBuf>,
    /// Generate and optimize the bundled synthetic asset set instead.
    #[arg(long)]
    synthetic: bool,
    /// Also write an asset manifest next to the report.
    #[arg(long)]
    manifest: bool,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    scene: PathBuf,
    /// Target product id (nearest instance is picked).
    #[arg(long)]
    item: String,
    /// Anchor template JSON; defaults to the bundled pick template.
    #[arg(long)]
    template: Option<PathBuf>,
    /// Robot model JSON; defaults to the bundled model.
    #[arg(long)]
    robot: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    scene: PathBuf,
    /// Task spec JSON.
    #[arg(long)]
    task: PathBuf,
    /// Scene-state snapshots in order (2 for atomic, n+1 for composite).
    #[arg(long = "snapshot", required = true)]
    snapshots: Vec<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    scene: PathBuf,
    /// Overlay the tensor-field glyph layer.
    #[arg(long)]
    glyphs: bool,
    /// Draw item dots.
    #[arg(long)]
    items: bool,
    /// Output format.
    #[arg(long, default_value = "svg", value_parser = ["svg", "json"])]
    format: String,
}

#[derive(Args)]
struct BatchArgs {
    /// Number of trials.
    #[arg(long)]
    n: usize,
    /// Target product id; defaults to a catalog round-robin.
    #[arg(long)]
    item: Option<String>,
    /// Anchor template JSON; defaults to the bundled pick template.
    #[arg(long)]
    template: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match ops::load_config(cli.config.as_deref(), cli.seed) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    let out = cli.out;
    let result = match cli.command {
        Command::Gen => ops::gen(&config, out),
        Command::Arrange(a) => ops::arrange(&config, &a.scene, out),
        Command::Deplete(a) => ops::deplete(&config, &a.scene, a.days, a.rate, out),
        Command::Lod(a) => ops::lod(&config, &a.meshes, a.synthetic, a.manifest, out),
        Command::Plan(a) => ops::plan(
            &config,
            &a.scene,
            &a.item,
            a.template.as_deref(),
            a.robot.as_deref(),
            out,
        ),
        Command::Eval(a) => ops::eval(&config, &a.scene, &a.task, &a.snapshots, out),
        Command::Render(a) => ops::render(&config, &a.scene, a.glyphs, a.items, &a.format, out),
        Command::Batch(a) => ops::batch(&config, a.n, a.item.as_deref(), a.template.as_deref(), out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
