//! Anchor-pose orchestration: segment planning with screw-then-RRT
//! fallback, heuristic base motion, and reset-on-failure semantics.
//!
//! Tasks are decomposed into anchor sequences (base standoff, pre-grasp,
//! grasp, gripper commands, lift, retreat). Each anchor is randomized by
//! its noise spec, then the segment from the current configuration is
//! planned; if neither planner succeeds the whole query fails with the
//! segment index and each attempt's reason — the caller resets.
//!
//! Grasping is geometric: the scene passed in must already exclude the
//! target item from the obstacle set.

use serde::{Deserialize, Serialize};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::arrangement::Arrangement;
use crate::geometry::{Pose3, Quat, Vec2, Vec3};
use crate::layout::{template_by_id, FixtureTemplate};
use crate::{Error, Result};

use super::base::{plan_base, straight_manip_edge, BaseGoal};
use super::collision::SceneObstacles;
use super::model::{solve_ik, RobotModel};
use super::rrt::plan_rrt_connect;
use super::screw::plan_screw;
use super::{Config, PlanFailure, PlannerParams, SegMethod, Segment, Trajectory};

/// Uniform randomization half-widths: `pos` meters, `yaw` radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseSpec {
    pub pos: f64,
    pub yaw: f64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if self.pos < 0.0 || self.yaw < 0.0 {
            return Err(Error::InvalidParameter("noise spec must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AnchorKind {
    BaseGoal { x: f64, y: f64, yaw: f64 },
    EeGoal { pose: Pose3 },
    ConfigGoal { config: Config },
    Gripper { open: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorPose {
    pub kind: AnchorKind,
    #[serde(default)]
    pub noise: NoiseSpec,
}

/// Both sub-planner reasons for the failing segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorFailure {
    pub segment: usize,
    pub attempts: Vec<(SegMethod, PlanFailure)>,
}

impl std::fmt::Display for AnchorFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "segment {} failed:", self.segment)?;
        for (m, r) in &self.attempts {
            write!(f, " {m:?}={r}")?;
        }
        Ok(())
    }
}

fn sample_noise(rng: &mut ChaCha8Rng, half_width: f64) -> f64 {
    if half_width > 0.0 {
        rng.random_range(-half_width..half_width)
    } else {
        0.0
    }
}

fn sample_anchor(anchor: &AnchorPose, rng: &mut ChaCha8Rng) -> AnchorKind {
    match &anchor.kind {
        AnchorKind::BaseGoal { x, y, yaw } => AnchorKind::BaseGoal {
            x: x + sample_noise(rng, anchor.noise.pos),
            y: y + sample_noise(rng, anchor.noise.pos),
            yaw: yaw + sample_noise(rng, anchor.noise.yaw),
        },
        AnchorKind::EeGoal { pose } => {
            let jitter = Vec3::new(
                sample_noise(rng, anchor.noise.pos),
                sample_noise(rng, anchor.noise.pos),
                sample_noise(rng, anchor.noise.pos),
            );
            let spin = Quat::from_rotation_z(sample_noise(rng, anchor.noise.yaw));
            AnchorKind::EeGoal {
                pose: Pose3 {
                    position: pose.position + jitter,
                    rotation: spin * pose.rotation,
                },
            }
        }
        other => other.clone(),
    }
}

/// Append `sub` to the trajectory under construction; drops the duplicated
/// first waypoint and tags the segment with the anchor index.
fn append(
    traj: &mut Trajectory,
    sub: Trajectory,
    anchor_index: usize,
    method: SegMethod,
    gripper_open: bool,
) {
    let start = traj.waypoints.len();
    for wp in sub.waypoints.into_iter().skip(1) {
        traj.waypoints.push(wp);
        traj.gripper.push(gripper_open);
    }
    let end = traj.waypoints.len().saturating_sub(1);
    traj.segments.push(Segment {
        anchor_index,
        method,
        start_waypoint: start.saturating_sub(1),
        end_waypoint: end,
    });
}

/// Plan through the anchor sequence. On success the concatenated
/// trajectory starts exactly at `q_start` and satisfies the densification
/// and collision contracts; on failure nothing is returned (the caller
/// resets the scene and may retry with another seed).
pub fn plan_anchors(
    model: &RobotModel,
    q_start: &Config,
    anchors: &[AnchorPose],
    scene: &SceneObstacles,
    params: &PlannerParams,
    rng: &mut ChaCha8Rng,
) -> std::result::Result<Trajectory, AnchorFailure> {
    let mut traj = Trajectory {
        waypoints: vec![*q_start],
        gripper: vec![true],
        dt: params.dt,
        segments: Vec::new(),
    };
    let mut q = *q_start;
    let mut gripper_open = true;

    for (i, anchor) in anchors.iter().enumerate() {
        match sample_anchor(anchor, rng) {
            AnchorKind::Gripper { open } => {
                gripper_open = open;
                if traj.waypoints.len() == 1 && traj.segments.is_empty() {
                    traj.gripper[0] = open;
                } else {
                    traj.waypoints.push(q);
                    traj.gripper.push(open);
                }
                let end = traj.waypoints.len() - 1;
                traj.segments.push(Segment {
                    anchor_index: i,
                    method: SegMethod::Gripper,
                    start_waypoint: end.saturating_sub(1),
                    end_waypoint: end,
                });
            }
            AnchorKind::BaseGoal { x, y, yaw } => {
                // tuck first so drive-time collision geometry is compact
                let stowed = q.with_manip(model.stow);
                if q.manip() != stowed.manip() {
                    let tuck = match straight_manip_edge(model, &q, &stowed, scene, params) {
                        Ok(path) => super::densify_path(&path, params),
                        Err(first) => {
                            match plan_rrt_connect(model, &q, &stowed, scene, params, rng) {
                                Ok(sub) => sub.waypoints,
                                Err(second) => {
                                    return Err(AnchorFailure {
                                        segment: i,
                                        attempts: vec![
                                            (SegMethod::BaseHeuristic, first),
                                            (SegMethod::RrtConnect, second),
                                        ],
                                    })
                                }
                            }
                        }
                    };
                    append(
                        &mut traj,
                        Trajectory {
                            gripper: vec![gripper_open; tuck.len()],
                            waypoints: tuck,
                            dt: params.dt,
                            segments: vec![],
                        },
                        i,
                        SegMethod::BaseHeuristic,
                        gripper_open,
                    );
                    q = stowed;
                }
                let goal = BaseGoal { x, y, yaw };
                match plan_base(model, &q, &goal, scene, params) {
                    Ok(sub) => {
                        q = *sub.waypoints.last().expect("base plan has waypoints");
                        append(&mut traj, sub, i, SegMethod::BaseHeuristic, gripper_open);
                    }
                    Err(reason) => {
                        return Err(AnchorFailure {
                            segment: i,
                            attempts: vec![(SegMethod::BaseHeuristic, reason)],
                        })
                    }
                }
            }
            AnchorKind::EeGoal { pose } => {
                match plan_screw(model, &q, &pose, scene, params) {
                    Ok(sub) => {
                        q = *sub.waypoints.last().expect("screw plan has waypoints");
                        append(&mut traj, sub, i, SegMethod::Screw, gripper_open);
                    }
                    Err(screw_reason) => {
                        // fall back: IK for a goal config, then RRT-Connect
                        let mut goal_config = solve_ik(model, &q, &pose, params, 200);
                        for _ in 0..5 {
                            if goal_config.is_some() {
                                break;
                            }
                            let mut m = q.manip();
                            for v in m.iter_mut().skip(1) {
                                *v += rng.random_range(-0.4..0.4);
                            }
                            model.clamp_manip(&mut m);
                            goal_config = solve_ik(model, &q.with_manip(m), &pose, params, 200);
                        }
                        let Some(q_goal) = goal_config else {
                            return Err(AnchorFailure {
                                segment: i,
                                attempts: vec![
                                    (SegMethod::Screw, screw_reason),
                                    (SegMethod::RrtConnect, PlanFailure::Unreachable),
                                ],
                            });
                        };
                        match plan_rrt_connect(model, &q, &q_goal, scene, params, rng) {
                            Ok(sub) => {
                                q = *sub.waypoints.last().expect("rrt plan has waypoints");
                                append(&mut traj, sub, i, SegMethod::RrtConnect, gripper_open);
                            }
                            Err(rrt_reason) => {
                                return Err(AnchorFailure {
                                    segment: i,
                                    attempts: vec![
                                        (SegMethod::Screw, screw_reason),
                                        (SegMethod::RrtConnect, rrt_reason),
                                    ],
                                })
                            }
                        }
                    }
                }
            }
            AnchorKind::ConfigGoal { config } => {
                let target = q.with_manip(config.manip());
                let sub = match straight_manip_edge(model, &q, &target, scene, params) {
                    Ok(path) => Trajectory {
                        gripper: vec![gripper_open; path.len()],
                        waypoints: super::densify_path(&path, params),
                        dt: params.dt,
                        segments: vec![],
                    },
                    Err(first) => match plan_rrt_connect(model, &q, &target, scene, params, rng) {
                        Ok(sub) => sub,
                        Err(second) => {
                            return Err(AnchorFailure {
                                segment: i,
                                attempts: vec![
                                    (SegMethod::Screw, first),
                                    (SegMethod::RrtConnect, second),
                                ],
                            })
                        }
                    },
                };
                q = *sub.waypoints.last().expect("config plan has waypoints");
                append(&mut traj, sub, i, SegMethod::RrtConnect, gripper_open);
            }
        }
    }
    Ok(traj)
}

// ---------------------------------------------------------------------------
// Anchor templates
// ---------------------------------------------------------------------------

/// Task-level anchor template, shipped as a data file and resolved against
/// a concrete grasp target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorTemplate {
    pub name: String,
    pub steps: Vec<TemplateStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TemplateStep {
    /// Base pose on the aisle side of the target lane, facing the shelf.
    BaseStandoff {
        distance: f64,
        #[serde(default)]
        noise: NoiseSpec,
    },
    /// End effector short of the item along the approach direction.
    EePregrasp {
        approach: f64,
        #[serde(default)]
        noise: NoiseSpec,
    },
    EeGrasp {
        #[serde(default)]
        noise: NoiseSpec,
    },
    /// Straight lift above the grasp pose.
    EeLift {
        height: f64,
        #[serde(default)]
        noise: NoiseSpec,
    },
    /// Back out of the shelf, keeping the lift height.
    EeRetreat {
        approach: f64,
        height: f64,
        #[serde(default)]
        noise: NoiseSpec,
    },
    BaseAbsolute {
        x: f64,
        y: f64,
        yaw: f64,
        #[serde(default)]
        noise: NoiseSpec,
    },
    EeAbsolute {
        pose: Pose3,
        #[serde(default)]
        noise: NoiseSpec,
    },
    Gripper { open: bool },
}

/// Geometry of one item pick resolved from the arrangement.
#[derive(Debug, Clone, PartialEq)]
pub struct GraspTarget {
    pub item_id: String,
    pub item_position: Vec3,
    /// Unit direction from the aisle into the shelf.
    pub approach: Vec2,
    /// Shelf front face point at the target lane, floor level.
    pub lane_front: Vec2,
}

/// Resolve the grasp geometry for an item instance.
pub fn grasp_target(
    arrangement: &Arrangement,
    templates: &[FixtureTemplate],
    item_id: &str,
) -> Result<GraspTarget> {
    let item = arrangement
        .items
        .iter()
        .find(|i| i.id == item_id)
        .ok_or_else(|| Error::UnknownId(item_id.to_string()))?;
    let lane = &arrangement.lanes[item.lane];
    let placement = arrangement
        .layout
        .placements
        .iter()
        .find(|p| p.id == lane.placement_id)
        .ok_or_else(|| Error::UnknownId(lane.placement_id.clone()))?;
    let template = template_by_id(templates, &placement.template_id)?;
    let front_normal = placement.front_normal();
    let local_front = Vec2::new(lane.anchor_x, -template.half_extents.y);
    let lane_front = placement.center + local_front.rotated(placement.yaw);
    Ok(GraspTarget {
        item_id: item_id.to_string(),
        item_position: item.pose.position,
        approach: -front_normal,
        lane_front,
    })
}

/// Expand a template into concrete anchors for a grasp target.
pub fn resolve_template(template: &AnchorTemplate, target: &GraspTarget) -> Vec<AnchorPose> {
    let approach3 = Vec3::new(target.approach.x, target.approach.y, 0.0);
    let grasp_yaw = target.approach.y.atan2(target.approach.x);
    let grasp_rot = Quat::from_rotation_z(grasp_yaw);
    template
        .steps
        .iter()
        .map(|step| match step {
            TemplateStep::BaseStandoff { distance, noise } => {
                let pos = target.lane_front - target.approach * *distance;
                AnchorPose {
                    kind: AnchorKind::BaseGoal {
                        x: pos.x,
                        y: pos.y,
                        yaw: grasp_yaw,
                    },
                    noise: *noise,
                }
            }
            TemplateStep::EePregrasp { approach, noise } => AnchorPose {
                kind: AnchorKind::EeGoal {
                    pose: Pose3 {
                        position: target.item_position - approach3 * *approach,
                        rotation: grasp_rot,
                    },
                },
                noise: *noise,
            },
            TemplateStep::EeGrasp { noise } => AnchorPose {
                kind: AnchorKind::EeGoal {
                    pose: Pose3 {
                        position: target.item_position,
                        rotation: grasp_rot,
                    },
                },
                noise: *noise,
            },
            TemplateStep::EeLift { height, noise } => AnchorPose {
                kind: AnchorKind::EeGoal {
                    pose: Pose3 {
                        position: target.item_position + Vec3::new(0.0, 0.0, *height),
                        rotation: grasp_rot,
                    },
                },
                noise: *noise,
            },
            TemplateStep::EeRetreat {
                approach,
                height,
                noise,
            } => AnchorPose {
                kind: AnchorKind::EeGoal {
                    pose: Pose3 {
                        position: target.item_position - approach3 * *approach
                            + Vec3::new(0.0, 0.0, *height),
                        rotation: grasp_rot,
                    },
                },
                noise: *noise,
            },
            TemplateStep::BaseAbsolute { x, y, yaw, noise } => AnchorPose {
                kind: AnchorKind::BaseGoal {
                    x: *x,
                    y: *y,
                    yaw: *yaw,
                },
                noise: *noise,
            },
            TemplateStep::EeAbsolute { pose, noise } => AnchorPose {
                kind: AnchorKind::EeGoal { pose: *pose },
                noise: *noise,
            },
            TemplateStep::Gripper { open } => AnchorPose {
                kind: AnchorKind::Gripper { open: *open },
                noise: NoiseSpec::default(),
            },
        })
        .collect()
}

/// Built-in pick sequence: stand off, open, approach, grasp, close, lift,
/// retreat.
pub fn default_pick_template() -> AnchorTemplate {
    AnchorTemplate {
        name: "pick".into(),
        steps: vec![
            TemplateStep::BaseStandoff {
                distance: 0.62,
                noise: NoiseSpec { pos: 0.03, yaw: 0.03 },
            },
            TemplateStep::Gripper { open: true },
            TemplateStep::EePregrasp {
                approach: 0.16,
                noise: NoiseSpec { pos: 0.005, yaw: 0.02 },
            },
            TemplateStep::EeGrasp {
                noise: NoiseSpec::default(),
            },
            TemplateStep::Gripper { open: false },
            TemplateStep::EeLift {
                height: 0.04,
                noise: NoiseSpec::default(),
            },
            TemplateStep::EeRetreat {
                approach: 0.20,
                height: 0.04,
                noise: NoiseSpec::default(),
            },
        ],
    }
}
