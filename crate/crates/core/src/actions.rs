//! Export trajectories as 11-dimensional action vectors.
//!
//! Record layout: seven arm joint position targets, one gripper command,
//! one torso position target, then the two base commands (forward linear
//! velocity, yaw rate). Joint targets come from the next waypoint; base
//! velocities come from finite-differencing consecutive base poses under
//! the exact-arc unicycle model, so integrating them with
//! [`integrate_base`] reconstructs the base path to floating-point
//! accuracy.

use serde::{Deserialize, Serialize};

use crate::geometry::wrap_angle;
use crate::planner::Trajectory;
use crate::{Error, Result};

/// One 11-dimensional action vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub values: [f64; 11],
}

impl ActionRecord {
    pub fn arm(&self) -> &[f64] {
        &self.values[0..7]
    }

    pub fn gripper(&self) -> f64 {
        self.values[7]
    }

    pub fn torso(&self) -> f64 {
        self.values[8]
    }

    pub fn base_linear(&self) -> f64 {
        self.values[9]
    }

    pub fn base_angular(&self) -> f64 {
        self.values[10]
    }
}

/// Base pose triple used by the arc model.
pub type BasePose = (f64, f64, f64);

/// Advance a unicycle pose by constant (v, w) over dt: an exact circular
/// arc, or a straight segment when the yaw rate vanishes.
pub fn step_base(pose: BasePose, v: f64, w: f64, dt: f64) -> BasePose {
    let (x, y, yaw) = pose;
    if w.abs() < 1e-12 {
        (x + v * dt * yaw.cos(), y + v * dt * yaw.sin(), yaw)
    } else {
        let r = v / w;
        (
            x + r * ((yaw + w * dt).sin() - yaw.sin()),
            y - r * ((yaw + w * dt).cos() - yaw.cos()),
            wrap_angle(yaw + w * dt),
        )
    }
}

/// Integrate a record sequence from a start pose.
pub fn integrate_base(start: BasePose, records: &[ActionRecord], dt: f64) -> Vec<BasePose> {
    let mut out = Vec::with_capacity(records.len() + 1);
    out.push(start);
    let mut pose = start;
    for r in records {
        pose = step_base(pose, r.base_linear(), r.base_angular(), dt);
        out.push(pose);
    }
    out
}

/// Inverse of [`step_base`]: recover (v, w) taking one pose to the next.
fn base_velocities(from: BasePose, to: BasePose, dt: f64) -> (f64, f64) {
    let (x0, y0, yaw0) = from;
    let (x1, y1, yaw1) = to;
    let dyaw = wrap_angle(yaw1 - yaw0);
    let w = dyaw / dt;
    let dx = x1 - x0;
    let dy = y1 - y0;
    let chord = (dx * dx + dy * dy).sqrt();
    if chord < 1e-15 {
        return (0.0, w);
    }
    // chord heading is the mid-arc heading; its sign gives drive direction
    let heading = yaw0 + dyaw / 2.0;
    let forward = dx * heading.cos() + dy * heading.sin();
    let v = if w.abs() < 1e-12 {
        forward / dt
    } else {
        // |chord| = |2 (v/w) sin(w dt / 2)|
        let half = (dyaw / 2.0).sin();
        forward.signum() * (chord * w / (2.0 * half)).abs()
    };
    (v, w)
}

/// Export a trajectory as action records, one per waypoint transition
/// (a single-waypoint trajectory yields one hold-position record).
pub fn export_actions(traj: &Trajectory, dt: f64) -> Result<Vec<ActionRecord>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter("dt must be positive".into()));
    }
    if traj.waypoints.is_empty() {
        return Err(Error::InvalidParameter("empty trajectory".into()));
    }
    let record = |k_target: usize, v: f64, w: f64| {
        let q = &traj.waypoints[k_target];
        let mut values = [0.0; 11];
        values[0..7].copy_from_slice(&q.arm);
        values[7] = if traj.gripper[k_target] { 1.0 } else { 0.0 };
        values[8] = q.torso;
        values[9] = v;
        values[10] = w;
        ActionRecord { values }
    };
    if traj.waypoints.len() == 1 {
        return Ok(vec![record(0, 0.0, 0.0)]);
    }
    let mut out = Vec::with_capacity(traj.waypoints.len() - 1);
    for k in 0..traj.waypoints.len() - 1 {
        let a = &traj.waypoints[k];
        let b = &traj.waypoints[k + 1];
        let (v, w) = base_velocities(
            (a.base_x, a.base_y, a.base_yaw),
            (b.base_x, b.base_y, b.base_yaw),
            dt,
        );
        out.push(record(k + 1, v, w));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Trajectory log
// ---------------------------------------------------------------------------

/// One line of the trajectory log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub t: f64,
    pub config: [f64; 11],
    pub gripper: bool,
    pub method: crate::planner::SegMethod,
}

/// Line-delimited canonical JSON, one record per waypoint.
pub fn trajectory_log(traj: &Trajectory) -> Result<String> {
    let mut out = String::new();
    for (k, wp) in traj.waypoints.iter().enumerate() {
        let method = traj
            .segments
            .iter()
            .find(|s| s.end_waypoint >= k)
            .or(traj.segments.last())
            .map(|s| s.method)
            .unwrap_or(crate::planner::SegMethod::Gripper);
        let record = LogRecord {
            t: k as f64 * traj.dt,
            config: wp.as_array(),
            gripper: traj.gripper[k],
            method,
        };
        out.push_str(&crate::canonical::to_canonical_string(&record)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_trajectory_log(text: &str) -> Result<Vec<LogRecord>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}
