//! Trajectory generation for a simplified mobile manipulator.
//!
//! Manipulation segments first try a screw-motion Cartesian interpolation
//! tracked by damped-least-squares IK (fast, obstacle-blind, then collision
//! checked); on failure they fall back to RRT-Connect in the 8-D
//! torso-plus-arm space. Base segments use a rotate-translate-rotate
//! heuristic with the arm tucked. [`anchors::plan_anchors`] sequences
//! segments between anchor poses and fails whole (reset semantics) when any
//! segment cannot be planned.

pub mod anchors;
pub mod base;
pub mod collision;
pub mod model;
pub mod rrt;
pub mod screw;

pub use anchors::{plan_anchors, AnchorFailure, AnchorKind, AnchorPose, AnchorTemplate, NoiseSpec};
pub use base::plan_base;
pub use collision::{config_in_collision, SceneObstacles};
pub use model::{fk, ik_step, CollisionSphere, Fk, JointSpec, RobotModel};
pub use rrt::plan_rrt_connect;
pub use screw::{plan_screw, screw_interp};

use serde::{Deserialize, Serialize};

use crate::geometry::wrap_angle;
use crate::{Error, Result};

/// Number of manipulation joints (torso + 7 arm joints).
pub const MANIP_DOF: usize = 8;

/// Full 11-DOF robot configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub base_x: f64,
    pub base_y: f64,
    pub base_yaw: f64,
    pub torso: f64,
    pub arm: [f64; 7],
}

impl Config {
    pub fn as_array(&self) -> [f64; 11] {
        let mut out = [0.0; 11];
        out[0] = self.base_x;
        out[1] = self.base_y;
        out[2] = self.base_yaw;
        out[3] = self.torso;
        out[4..11].copy_from_slice(&self.arm);
        out
    }

    pub fn from_array(a: [f64; 11]) -> Config {
        let mut arm = [0.0; 7];
        arm.copy_from_slice(&a[4..11]);
        Config {
            base_x: a[0],
            base_y: a[1],
            base_yaw: wrap_angle(a[2]),
            torso: a[3],
            arm,
        }
    }

    /// Torso + arm components (the space the arm planners search).
    pub fn manip(&self) -> [f64; MANIP_DOF] {
        let mut out = [0.0; MANIP_DOF];
        out[0] = self.torso;
        out[1..].copy_from_slice(&self.arm);
        out
    }

    pub fn with_manip(&self, m: [f64; MANIP_DOF]) -> Config {
        let mut arm = [0.0; 7];
        arm.copy_from_slice(&m[1..]);
        Config {
            torso: m[0],
            arm,
            ..*self
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }
}

/// Planner tuning knobs; the defaults match a differential-drive base with
/// a prismatic torso and 7-DOF arm at desk scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerParams {
    /// Densification resolution for revolute joints and base yaw (radians).
    pub dq_revolute: f64,
    /// Densification resolution for prismatic joints and base x/y (meters).
    pub dq_prismatic: f64,
    /// RRT-Connect extension step in normalized joint units.
    pub rrt_eta: f64,
    pub rrt_max_iters: usize,
    pub shortcut_attempts: usize,
    /// Collision inflation margin (meters).
    pub margin: f64,
    pub dls_damping: f64,
    pub ik_pos_tol: f64,
    /// IK orientation tolerance (radians).
    pub ik_rot_tol: f64,
    pub ik_max_iters: usize,
    /// Max end-effector translation per screw waypoint (meters).
    pub screw_trans_step: f64,
    /// Max end-effector rotation per screw waypoint (radians).
    pub screw_rot_step: f64,
    /// Timestep metadata attached to trajectories (seconds).
    pub dt: f64,
    pub seed: u64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        PlannerParams {
            dq_revolute: 0.02,
            dq_prismatic: 0.01,
            rrt_eta: 0.15,
            rrt_max_iters: 5000,
            shortcut_attempts: 100,
            margin: 0.005,
            dls_damping: 0.05,
            ik_pos_tol: 1e-4,
            ik_rot_tol: 0.5f64.to_radians(),
            ik_max_iters: 50,
            screw_trans_step: 0.01,
            screw_rot_step: 2.0f64.to_radians(),
            dt: 0.1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegMethod {
    Screw,
    RrtConnect,
    BaseHeuristic,
    Gripper,
}

/// Per-segment provenance within a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub anchor_index: usize,
    pub method: SegMethod,
    /// Waypoint index range [start, end] covered by this segment.
    pub start_waypoint: usize,
    pub end_waypoint: usize,
}

/// Timed, densified, collision-free waypoint sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub waypoints: Vec<Config>,
    /// Gripper open flag per waypoint.
    pub gripper: Vec<bool>,
    pub dt: f64,
    pub segments: Vec<Segment>,
}

impl Trajectory {
    pub fn single(q: Config, gripper_open: bool, dt: f64, method: SegMethod) -> Trajectory {
        Trajectory {
            waypoints: vec![q],
            gripper: vec![gripper_open],
            dt,
            segments: vec![Segment {
                anchor_index: 0,
                method,
                start_waypoint: 0,
                end_waypoint: 0,
            }],
        }
    }
}

/// Why a planning attempt produced no trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PlanFailure {
    /// IK tracking failed to converge on a screw waypoint.
    IkDiverged { waypoint: usize },
    /// A densified waypoint collides (or the base leaves the store).
    InCollision,
    /// RRT-Connect exhausted its iteration budget.
    Timeout,
    /// No IK solution found for the goal pose.
    Unreachable,
    /// Endpoints violate the planner preconditions.
    InvalidQuery { reason: String },
}

impl std::fmt::Display for PlanFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PlanFailure::IkDiverged { waypoint } => write!(f, "ik_diverged@{waypoint}"),
            PlanFailure::InCollision => write!(f, "in_collision"),
            PlanFailure::Timeout => write!(f, "timeout"),
            PlanFailure::Unreachable => write!(f, "unreachable"),
            PlanFailure::InvalidQuery { reason } => write!(f, "invalid_query: {reason}"),
        }
    }
}

/// Per-component densification resolution: prismatic and planar components
/// use meters, revolute ones radians.
pub(crate) fn component_resolution(params: &PlannerParams) -> [f64; 11] {
    let mut res = [params.dq_revolute; 11];
    res[0] = params.dq_prismatic; // base x
    res[1] = params.dq_prismatic; // base y
    res[3] = params.dq_prismatic; // torso
    res
}

/// Componentwise difference with base-yaw wrapping.
pub(crate) fn config_delta(a: &Config, b: &Config) -> [f64; 11] {
    let av = a.as_array();
    let bv = b.as_array();
    let mut d = [0.0; 11];
    for i in 0..11 {
        d[i] = bv[i] - av[i];
    }
    d[2] = wrap_angle(d[2]);
    d
}

/// Linear interpolation between configs (shortest arc for base yaw).
pub(crate) fn config_lerp(a: &Config, b: &Config, t: f64) -> Config {
    let av = a.as_array();
    let d = config_delta(a, b);
    let mut out = [0.0; 11];
    for i in 0..11 {
        out[i] = av[i] + d[i] * t;
    }
    Config::from_array(out)
}

/// Number of steps needed so no component moves more than its resolution.
pub(crate) fn steps_between(a: &Config, b: &Config, res: &[f64; 11]) -> usize {
    let d = config_delta(a, b);
    let mut steps = 1usize;
    for i in 0..11 {
        steps = steps.max((d[i].abs() / res[i]).ceil() as usize);
    }
    steps
}

/// Densify a coarse joint path so consecutive waypoints differ by at most
/// the per-component resolution. Keeps the original waypoints.
pub(crate) fn densify_path(path: &[Config], params: &PlannerParams) -> Vec<Config> {
    let res = component_resolution(params);
    let mut out = Vec::with_capacity(path.len());
    if let Some(first) = path.first() {
        out.push(*first);
    }
    for pair in path.windows(2) {
        let steps = steps_between(&pair[0], &pair[1], &res);
        for k in 1..=steps {
            out.push(config_lerp(&pair[0], &pair[1], k as f64 / steps as f64));
        }
    }
    out
}

/// Check the full trajectory contract: limits, densification deltas,
/// collision-freedom at the given resolution.
pub fn audit_trajectory(
    model: &RobotModel,
    traj: &Trajectory,
    scene: &SceneObstacles,
    params: &PlannerParams,
) -> Result<()> {
    if traj.waypoints.is_empty() || traj.waypoints.len() != traj.gripper.len() {
        return Err(Error::InvalidParameter("malformed trajectory".into()));
    }
    let res = component_resolution(params);
    for pair in traj.waypoints.windows(2) {
        let d = config_delta(&pair[0], &pair[1]);
        for i in 0..11 {
            if d[i].abs() > res[i] * (1.0 + 1e-9) {
                return Err(Error::InvalidParameter(format!(
                    "waypoint delta {} exceeds resolution {} on component {i}",
                    d[i], res[i]
                )));
            }
        }
    }
    for (k, q) in traj.waypoints.iter().enumerate() {
        if config_in_collision(model, q, scene)? {
            return Err(Error::InvalidParameter(format!(
                "waypoint {k} in collision"
            )));
        }
    }
    Ok(())
}
