//! Heuristic base motion: rotate in place toward the goal, drive straight,
//! rotate to the goal yaw. The arm must already be tucked at the model's
//! stow configuration; every densified waypoint is collision checked.

use crate::geometry::{wrap_angle, Vec2};

use super::collision::{CollisionIndex, SceneObstacles};
use super::model::RobotModel;
use super::{
    config_lerp, densify_path, steps_between, component_resolution, Config, PlanFailure,
    PlannerParams, SegMethod, Segment, Trajectory,
};

/// Target base pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseGoal {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
}

pub fn plan_base(
    model: &RobotModel,
    q_start: &Config,
    goal: &BaseGoal,
    scene: &SceneObstacles,
    params: &PlannerParams,
) -> Result<Trajectory, PlanFailure> {
    let stow_err = q_start
        .manip()
        .iter()
        .zip(&model.stow)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    if stow_err > 1e-6 {
        return Err(PlanFailure::InvalidQuery {
            reason: "base motion requires the stow configuration".into(),
        });
    }

    let start_pos = Vec2::new(q_start.base_x, q_start.base_y);
    let goal_pos = Vec2::new(goal.x, goal.y);
    let dist = start_pos.distance(goal_pos);

    // coarse anchor configs for the three phases
    let mut coarse = vec![*q_start];
    let mut current = *q_start;
    if dist > 1e-9 {
        let heading = (goal_pos - start_pos).y.atan2((goal_pos - start_pos).x);
        if wrap_angle(heading - current.base_yaw).abs() > 1e-9 {
            current.base_yaw = heading;
            coarse.push(current);
        }
        current.base_x = goal.x;
        current.base_y = goal.y;
        coarse.push(current);
    }
    if wrap_angle(goal.yaw - current.base_yaw).abs() > 1e-9 {
        current.base_yaw = goal.yaw;
        coarse.push(current);
    }
    if coarse.len() == 1 {
        return Ok(Trajectory::single(*q_start, true, params.dt, SegMethod::BaseHeuristic));
    }

    // rotation interpolation must not cut across the goal heading: insert
    // the exact phase anchors, then densify (config_lerp wraps yaw along
    // the shortest arc, matching turn-in-place semantics)
    let waypoints = densify_path(&coarse, params);

    // localize around the swept corridor
    let mid = (start_pos + goal_pos) * 0.5;
    let radius = dist / 2.0 + 2.5;
    let local = scene.localized(mid, radius);
    let index = CollisionIndex::new(&local);
    for q in &waypoints {
        match index.config_collides(model, q) {
            Ok(false) => {}
            Ok(true) => return Err(PlanFailure::InCollision),
            Err(e) => {
                return Err(PlanFailure::InvalidQuery {
                    reason: e.to_string(),
                })
            }
        }
    }
    let n_wp = waypoints.len();
    Ok(Trajectory {
        gripper: vec![true; n_wp],
        waypoints,
        dt: params.dt,
        segments: vec![Segment {
            anchor_index: 0,
            method: SegMethod::BaseHeuristic,
            start_waypoint: 0,
            end_waypoint: n_wp - 1,
        }],
    })
}

/// Straight joint-space move used for tucking the arm before base motion:
/// a densified straight edge when it is collision-free.
pub(crate) fn straight_manip_edge(
    model: &RobotModel,
    q_start: &Config,
    q_goal: &Config,
    scene: &SceneObstacles,
    params: &PlannerParams,
) -> Result<Vec<Config>, PlanFailure> {
    let local = scene.localized(Vec2::new(q_start.base_x, q_start.base_y), 2.5);
    let index = CollisionIndex::new(&local);
    let res = component_resolution(params);
    let steps = steps_between(q_start, q_goal, &res);
    let mut out = vec![*q_start];
    for k in 1..=steps {
        let q = config_lerp(q_start, q_goal, k as f64 / steps as f64);
        match index.config_collides(model, &q) {
            Ok(false) => out.push(q),
            Ok(true) => return Err(PlanFailure::InCollision),
            Err(e) => {
                return Err(PlanFailure::InvalidQuery {
                    reason: e.to_string(),
                })
            }
        }
    }
    Ok(out)
}
