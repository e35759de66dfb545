//! Task success judging over scene-state snapshots.
//!
//! Atomic tasks succeed when the target condition holds in the final
//! snapshot, no other item moved beyond the disturbance tolerances, and the
//! robot is static. "Target" matches any instance of the product type, not
//! a specific instance. Composite tasks evaluate their subtasks in order
//! against consecutive intermediate snapshots.

use serde::{Deserialize, Serialize};

use std::collections::BTreeMap;

use crate::arrangement::{board_world_volume, Arrangement};
use crate::geometry::{Obb3, Pose3, Vec2};
use crate::layout::{template_by_id, FixtureTemplate};
use crate::planner::Config;
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Snapshot of the world the simulator (or trajectory replay) provides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneState {
    pub item_poses: BTreeMap<String, Pose3>,
    pub robot_config: Config,
    /// 11 joint-space velocities matching the config layout.
    pub joint_velocities: [f64; 11],
    pub door_angles: BTreeMap<String, f64>,
    pub basket: Obb3,
    pub timestamp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Max undisturbed position change (meters).
    pub disturb_pos: f64,
    /// Max undisturbed orientation change (radians).
    pub disturb_rot: f64,
    /// Max joint-velocity magnitude for "static" (inclusive).
    pub static_vel: f64,
    /// Door angle at or above which a door counts as open (radians).
    pub open_angle: f64,
    /// Door angle at or below which a door counts as closed (radians).
    pub closed_angle: f64,
    /// Placement proximity to a same-product lane (meters).
    pub proximity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            disturb_pos: 0.01,
            disturb_rot: 5f64.to_radians(),
            static_vel: 1e-2,
            open_angle: 60f64.to_radians(),
            closed_angle: 5f64.to_radians(),
            proximity: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TaskKind {
    /// Any instance of the target product ends up inside the basket.
    PickToBasket { product_id: String },
    /// An instance of the product is placed on the destination board near a
    /// same-product lane.
    PickFromFloor {
        product_id: String,
        fixture_id: String,
        board_index: usize,
    },
    /// Same placement condition, item starts on another board.
    BoardToBoard {
        product_id: String,
        fixture_id: String,
        board_index: usize,
    },
    OpenDoor { door_id: String },
    CloseDoor { door_id: String },
    Composite { subtasks: Vec<TaskSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub kind: TaskKind,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "criterion")]
pub enum FailedCriterion {
    TargetNotPlaced,
    ItemsDisturbed { ids: Vec<String> },
    RobotMoving,
    DoorAngle,
    Subtask { index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessReport {
    pub success: bool,
    pub failed: Vec<FailedCriterion>,
}

impl SuccessReport {
    fn from_failures(failed: Vec<FailedCriterion>) -> SuccessReport {
        SuccessReport {
            success: failed.is_empty(),
            failed,
        }
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Instances of the task's target product (excluded from disturbance).
fn target_instances(spec: &TaskSpec, arrangement: &Arrangement) -> Vec<String> {
    let product = match &spec.kind {
        TaskKind::PickToBasket { product_id }
        | TaskKind::PickFromFloor { product_id, .. }
        | TaskKind::BoardToBoard { product_id, .. } => product_id.as_str(),
        _ => return Vec::new(),
    };
    arrangement
        .items
        .iter()
        .filter(|i| i.product_id == product)
        .map(|i| i.id.clone())
        .collect()
}

/// Ids of items whose pose changed beyond the disturbance tolerances,
/// excluding the task's target instances.
pub fn disturbed_items(
    before: &SceneState,
    after: &SceneState,
    spec: &TaskSpec,
    arrangement: &Arrangement,
) -> Result<Vec<String>> {
    if before.item_poses.len() != after.item_poses.len()
        || before.item_poses.keys().ne(after.item_poses.keys())
    {
        return Err(Error::StateMismatch(
            "snapshots cover different item sets".into(),
        ));
    }
    let excluded = target_instances(spec, arrangement);
    let tol = &spec.tolerances;
    let mut out = Vec::new();
    for (id, pose_before) in &before.item_poses {
        if excluded.contains(id) {
            continue;
        }
        let pose_after = &after.item_poses[id];
        let (dp, dr) = pose_before.error_to(pose_after);
        if dp > tol.disturb_pos || dr > tol.disturb_rot {
            out.push(id.clone());
        }
    }
    Ok(out)
}

/// True when every joint-velocity magnitude is at or below the bound.
pub fn robot_static(state: &SceneState, static_vel: f64) -> bool {
    state
        .joint_velocities
        .iter()
        .all(|v| v.abs() <= static_vel)
}

fn fixture_board_volume(
    arrangement: &Arrangement,
    templates: &[FixtureTemplate],
    fixture_id: &str,
    board_index: usize,
) -> Result<Obb3> {
    let placement = arrangement
        .layout
        .placements
        .iter()
        .find(|p| p.id == fixture_id)
        .ok_or_else(|| Error::UnknownId(fixture_id.to_string()))?;
    let template = template_by_id(templates, &placement.template_id)?;
    board_world_volume(placement, template, board_index)
}

/// World xy of front-slot centers of the product's lanes on the fixture
/// (other boards: the destination board itself is empty in these tasks).
fn lane_front_positions(
    arrangement: &Arrangement,
    product_id: &str,
    fixture_id: &str,
    board_index: usize,
) -> Vec<Vec2> {
    arrangement
        .lanes
        .iter()
        .filter(|l| {
            l.product_id == product_id
                && l.placement_id == fixture_id
                && l.board_index != board_index
        })
        .filter_map(|l| {
            let placement = arrangement
                .layout
                .placements
                .iter()
                .find(|p| p.id == l.placement_id)?;
            let local = Vec2::new(l.anchor_x, *l.slots.first()?);
            Some(placement.center + local.rotated(placement.yaw))
        })
        .collect()
}

/// Placement condition shared by pick-from-floor and board-to-board: some
/// target-product instance stands inside the destination board volume and
/// within the proximity radius of a same-product lane.
fn placed_near_group(
    spec: &TaskSpec,
    after: &SceneState,
    arrangement: &Arrangement,
    templates: &[FixtureTemplate],
    product_id: &str,
    fixture_id: &str,
    board_index: usize,
) -> Result<bool> {
    let volume = fixture_board_volume(arrangement, templates, fixture_id, board_index)?;
    let lanes = lane_front_positions(arrangement, product_id, fixture_id, board_index);
    let target_ids = target_instances(spec, arrangement);
    for id in &target_ids {
        let pose = after
            .item_poses
            .get(id)
            .ok_or_else(|| Error::StateMismatch(format!("unknown item {id}")))?;
        if !volume.contains_point(pose.position) {
            continue;
        }
        if lanes.is_empty() {
            return Ok(true); // no reference group on the fixture: containment suffices
        }
        let xy = pose.position.xy();
        if lanes
            .iter()
            .any(|l| l.distance(xy) <= spec.tolerances.proximity)
        {
            return Ok(true);
        }
    }
    Ok(false)
}

fn eval_atomic(
    spec: &TaskSpec,
    before: &SceneState,
    after: &SceneState,
    arrangement: &Arrangement,
    templates: &[FixtureTemplate],
) -> Result<SuccessReport> {
    let tol = &spec.tolerances;
    let mut failed = Vec::new();

    match &spec.kind {
        TaskKind::PickToBasket { product_id } => {
            let placed = after
                .item_poses
                .iter()
                .filter(|(id, _)| {
                    arrangement
                        .items
                        .iter()
                        .any(|i| &i.id == *id && &i.product_id == product_id)
                })
                .any(|(_, pose)| after.basket.contains_point(pose.position));
            if !placed {
                failed.push(FailedCriterion::TargetNotPlaced);
            }
        }
        TaskKind::PickFromFloor {
            product_id,
            fixture_id,
            board_index,
        }
        | TaskKind::BoardToBoard {
            product_id,
            fixture_id,
            board_index,
        } => {
            if !placed_near_group(
                spec,
                after,
                arrangement,
                templates,
                product_id,
                fixture_id,
                *board_index,
            )? {
                failed.push(FailedCriterion::TargetNotPlaced);
            }
        }
        TaskKind::OpenDoor { door_id } => {
            let angle = after
                .door_angles
                .get(door_id)
                .ok_or_else(|| Error::StateMismatch(format!("unknown door {door_id}")))?;
            if *angle < tol.open_angle {
                failed.push(FailedCriterion::DoorAngle);
            }
        }
        TaskKind::CloseDoor { door_id } => {
            let angle = after
                .door_angles
                .get(door_id)
                .ok_or_else(|| Error::StateMismatch(format!("unknown door {door_id}")))?;
            if *angle > tol.closed_angle {
                failed.push(FailedCriterion::DoorAngle);
            }
        }
        TaskKind::Composite { .. } => unreachable!("handled by eval_task"),
    }

    let disturbed = disturbed_items(before, after, spec, arrangement)?;
    if !disturbed.is_empty() {
        failed.push(FailedCriterion::ItemsDisturbed { ids: disturbed });
    }
    if !robot_static(after, tol.static_vel) {
        failed.push(FailedCriterion::RobotMoving);
    }
    Ok(SuccessReport::from_failures(failed))
}

/// Judge a task over its snapshot sequence: two snapshots for an atomic
/// task, `n + 1` for a composite of `n` subtasks (evaluated pairwise in
/// order). Pure in all inputs.
pub fn eval_task(
    spec: &TaskSpec,
    snapshots: &[SceneState],
    arrangement: &Arrangement,
    templates: &[FixtureTemplate],
) -> Result<SuccessReport> {
    match &spec.kind {
        TaskKind::Composite { subtasks } => {
            if subtasks.is_empty() {
                return Err(Error::InvalidParameter("empty composite task".into()));
            }
            if snapshots.len() != subtasks.len() + 1 {
                return Err(Error::StateMismatch(format!(
                    "composite of {} subtasks needs {} snapshots, got {}",
                    subtasks.len(),
                    subtasks.len() + 1,
                    snapshots.len()
                )));
            }
            for (i, sub) in subtasks.iter().enumerate() {
                let report = eval_task(sub, &snapshots[i..=i + 1], arrangement, templates)?;
                if !report.success {
                    return Ok(SuccessReport::from_failures(vec![
                        FailedCriterion::Subtask { index: i },
                    ]));
                }
            }
            Ok(SuccessReport::from_failures(vec![]))
        }
        _ => {
            if snapshots.len() != 2 {
                return Err(Error::StateMismatch(format!(
                    "atomic task needs 2 snapshots, got {}",
                    snapshots.len()
                )));
            }
            eval_atomic(spec, &snapshots[0], &snapshots[1], arrangement, templates)
        }
    }
}

/// Per-trial record written by the evaluation pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub scenario: String,
    pub task: String,
    pub item: String,
    pub fixture: String,
    pub success: bool,
    pub failed: Vec<FailedCriterion>,
}
