//! Screw-motion interpolation and the obstacle-blind first-attempt planner.

use crate::geometry::{se3_exp, se3_log, Pose3};

use super::collision::{CollisionIndex, SceneObstacles};
use super::model::{fk, ik_step, RobotModel};
use super::{
    densify_path, Config, PlanFailure, PlannerParams, SegMethod, Segment, Trajectory,
};

/// Constant-twist interpolation: `n` poses along
/// `a ∘ exp(t · log(a⁻¹ ∘ b))`, endpoints exact.
pub fn screw_interp(a: &Pose3, b: &Pose3, n: usize) -> Vec<Pose3> {
    assert!(n >= 2, "screw interpolation needs at least two samples");
    let xi = se3_log(&a.inverse().compose(b));
    let mut out = Vec::with_capacity(n);
    out.push(*a);
    for i in 1..n - 1 {
        let t = i as f64 / (n - 1) as f64;
        out.push(a.compose(&se3_exp(&xi.scaled(t))));
    }
    out.push(*b);
    out
}

/// Screw-motion manipulation plan: interpolate the end effector from the
/// current pose to `ee_goal`, track each waypoint with damped-least-squares
/// IK (base frozen), then densify and collision-check the joint path.
pub fn plan_screw(
    model: &RobotModel,
    q_start: &Config,
    ee_goal: &Pose3,
    scene: &SceneObstacles,
    params: &PlannerParams,
) -> Result<Trajectory, PlanFailure> {
    let start = fk(model, q_start).map_err(|e| PlanFailure::InvalidQuery {
        reason: e.to_string(),
    })?;
    let xi = se3_log(&start.ee.inverse().compose(ee_goal));
    let trans = xi.v.norm();
    let rot = xi.w.norm();
    if trans <= params.ik_pos_tol && rot <= params.ik_rot_tol {
        return Ok(Trajectory::single(*q_start, true, params.dt, SegMethod::Screw));
    }
    let n = 2 + ((trans / params.screw_trans_step).ceil() as usize)
        .max((rot / params.screw_rot_step).ceil() as usize);
    let ee_path = screw_interp(&start.ee, ee_goal, n);

    let mut path = vec![*q_start];
    let mut q = *q_start;
    for (k, target) in ee_path.iter().enumerate().skip(1) {
        let mut converged = false;
        for _ in 0..params.ik_max_iters {
            let ee = fk(model, &q)
                .map_err(|e| PlanFailure::InvalidQuery {
                    reason: e.to_string(),
                })?
                .ee;
            let (dp, dr) = ee.error_to(target);
            if dp <= params.ik_pos_tol && dr <= params.ik_rot_tol {
                converged = true;
                break;
            }
            q = ik_step(model, &q, target, params.dls_damping);
        }
        if !converged {
            let ee = fk(model, &q)
                .map_err(|e| PlanFailure::InvalidQuery {
                    reason: e.to_string(),
                })?
                .ee;
            let (dp, dr) = ee.error_to(target);
            if dp > params.ik_pos_tol || dr > params.ik_rot_tol {
                return Err(PlanFailure::IkDiverged { waypoint: k });
            }
        }
        path.push(q);
    }

    let waypoints = densify_path(&path, params);
    let index = CollisionIndex::new(scene);
    for wp in &waypoints {
        match index.config_collides(model, wp) {
            Ok(true) => return Err(PlanFailure::InCollision),
            Ok(false) => {}
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
            method: SegMethod::Screw,
            start_waypoint: 0,
            end_waypoint: n_wp - 1,
        }],
    })
}
