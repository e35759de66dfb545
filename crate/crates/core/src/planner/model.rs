//! Robot model, forward kinematics, and damped-least-squares IK.
//!
//! The chain is base (planar) → prismatic torso → seven revolute arm joints
//! → end-effector offset. Collision geometry is a list of spheres attached
//! to the links. The default model approximates the proportions of a
//! mobile manipulator with a 0.38 m torso lift and a ~1 m arm; it is not a
//! calibrated model of any specific robot.

use serde::{Deserialize, Serialize};

use crate::geometry::{so3_log, Pose3, Quat, Vec3};
use crate::{Error, Result};

use super::{Config, PlannerParams, MANIP_DOF};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSpec {
    /// Fixed transform from the parent frame to this joint's frame.
    pub offset: Pose3,
    /// Motion axis in the joint frame (unit length).
    pub axis: Vec3,
    pub limits: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionSphere {
    /// Link index: 0 = base, 1 = torso, 2..=8 = arm links.
    pub link: usize,
    pub center: Vec3,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotModel {
    pub name: String,
    /// Base footprint disc radius, for wall containment.
    pub base_radius: f64,
    pub torso: JointSpec,
    pub arm: Vec<JointSpec>,
    pub ee_offset: Pose3,
    pub spheres: Vec<CollisionSphere>,
    /// Tucked manipulation configuration used during base motion.
    pub stow: [f64; MANIP_DOF],
}

/// Link frame count: base, torso, 7 arm links.
pub const NUM_FRAMES: usize = 9;

impl RobotModel {
    pub fn validate(&self) -> Result<()> {
        if self.arm.len() != 7 {
            return Err(Error::InvalidParameter(format!(
                "expected 7 arm joints, got {}",
                self.arm.len()
            )));
        }
        for (i, j) in std::iter::once(&self.torso).chain(&self.arm).enumerate() {
            if j.limits[0] >= j.limits[1] {
                return Err(Error::InvalidParameter(format!(
                    "joint {i}: limits not increasing"
                )));
            }
            if (j.axis.norm() - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidParameter(format!("joint {i}: axis not unit")));
            }
        }
        for s in &self.spheres {
            if s.link >= NUM_FRAMES {
                return Err(Error::InvalidParameter(format!(
                    "sphere on unknown link {}",
                    s.link
                )));
            }
            if !(s.radius > 0.0) {
                return Err(Error::InvalidParameter("sphere radius must be > 0".into()));
            }
        }
        if !(self.base_radius > 0.0) {
            return Err(Error::InvalidParameter("base radius must be > 0".into()));
        }
        self.check_limits_manip(&self.stow)?;
        Ok(())
    }

    /// Manipulation joint limits as (lo, hi) arrays.
    pub fn manip_limits(&self) -> ([f64; MANIP_DOF], [f64; MANIP_DOF]) {
        let mut lo = [0.0; MANIP_DOF];
        let mut hi = [0.0; MANIP_DOF];
        lo[0] = self.torso.limits[0];
        hi[0] = self.torso.limits[1];
        for (i, j) in self.arm.iter().enumerate() {
            lo[i + 1] = j.limits[0];
            hi[i + 1] = j.limits[1];
        }
        (lo, hi)
    }

    pub fn check_limits(&self, q: &Config) -> Result<()> {
        self.check_limits_manip(&q.manip())
    }

    fn check_limits_manip(&self, m: &[f64; MANIP_DOF]) -> Result<()> {
        let (lo, hi) = self.manip_limits();
        for i in 0..MANIP_DOF {
            if m[i] < lo[i] - 1e-9 || m[i] > hi[i] + 1e-9 {
                return Err(Error::LimitViolation {
                    joint: i,
                    value: m[i],
                    lo: lo[i],
                    hi: hi[i],
                });
            }
        }
        Ok(())
    }

    pub fn clamp_manip(&self, m: &mut [f64; MANIP_DOF]) {
        let (lo, hi) = self.manip_limits();
        for i in 0..MANIP_DOF {
            m[i] = m[i].clamp(lo[i], hi[i]);
        }
    }

    /// Stow configuration with the given base pose.
    pub fn stowed(&self, base_x: f64, base_y: f64, base_yaw: f64) -> Config {
        Config {
            base_x,
            base_y,
            base_yaw,
            torso: 0.0,
            arm: [0.0; 7],
        }
        .with_manip(self.stow)
    }
}

/// Forward kinematics result.
#[derive(Debug, Clone)]
pub struct Fk {
    pub frames: [Pose3; NUM_FRAMES],
    pub ee: Pose3,
}

impl Fk {
    pub fn world_spheres(&self, model: &RobotModel) -> Vec<(Vec3, f64)> {
        model
            .spheres
            .iter()
            .map(|s| (self.frames[s.link].transform_point(s.center), s.radius))
            .collect()
    }
}

fn fk_unchecked(model: &RobotModel, q: &Config) -> Fk {
    let mut frames = [Pose3::IDENTITY; NUM_FRAMES];
    frames[0] = Pose3::planar(q.base_x, q.base_y, q.base_yaw);
    frames[1] = frames[0].compose(&model.torso.offset).compose(&Pose3 {
        position: model.torso.axis * q.torso,
        rotation: Quat::IDENTITY,
    });
    for (i, joint) in model.arm.iter().enumerate() {
        frames[i + 2] = frames[i + 1].compose(&joint.offset).compose(&Pose3 {
            position: Vec3::ZERO,
            rotation: Quat::from_axis_angle(joint.axis, q.arm[i]),
        });
    }
    let ee = frames[NUM_FRAMES - 1].compose(&model.ee_offset);
    Fk { frames, ee }
}

/// Forward kinematics; rejects out-of-limit configurations.
pub fn fk(model: &RobotModel, q: &Config) -> Result<Fk> {
    model.check_limits(q)?;
    Ok(fk_unchecked(model, q))
}

/// 6×8 manipulator Jacobian (linear velocity rows then world angular
/// velocity rows) by central finite differences over torso + arm, base
/// frozen.
pub fn manip_jacobian(model: &RobotModel, q: &Config) -> [[f64; MANIP_DOF]; 6] {
    const H: f64 = 1e-6;
    let mut jac = [[0.0; MANIP_DOF]; 6];
    let m = q.manip();
    for j in 0..MANIP_DOF {
        let mut plus = m;
        let mut minus = m;
        plus[j] += H;
        minus[j] -= H;
        let ee_p = fk_unchecked(model, &q.with_manip(plus)).ee;
        let ee_m = fk_unchecked(model, &q.with_manip(minus)).ee;
        let dp = (ee_p.position - ee_m.position) * (1.0 / (2.0 * H));
        let dw = so3_log(ee_p.rotation * ee_m.rotation.conjugate()) * (1.0 / (2.0 * H));
        jac[0][j] = dp.x;
        jac[1][j] = dp.y;
        jac[2][j] = dp.z;
        jac[3][j] = dw.x;
        jac[4][j] = dw.y;
        jac[5][j] = dw.z;
    }
    jac
}

/// Pose error twist from `current` to `target` (world frame).
pub fn pose_error(current: &Pose3, target: &Pose3) -> [f64; 6] {
    let dp = target.position - current.position;
    let dw = so3_log(target.rotation * current.rotation.conjugate());
    [dp.x, dp.y, dp.z, dw.x, dw.y, dw.z]
}

/// Solve the 6×6 system (J Jᵀ + λ² I) y = e by Gaussian elimination with
/// partial pivoting.
fn solve_dls(jac: &[[f64; MANIP_DOF]; 6], e: &[f64; 6], damping: f64) -> [f64; 6] {
    let mut a = [[0.0; 7]; 6]; // augmented
    for r in 0..6 {
        for c in 0..6 {
            let mut dot = 0.0;
            for k in 0..MANIP_DOF {
                dot += jac[r][k] * jac[c][k];
            }
            a[r][c] = dot + if r == c { damping * damping } else { 0.0 };
        }
        a[r][6] = e[r];
    }
    for col in 0..6 {
        let pivot = (col..6)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        let p = a[col][col];
        for r in (col + 1)..6 {
            let f = a[r][col] / p;
            for c in col..7 {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    let mut y = [0.0; 6];
    for col in (0..6).rev() {
        let mut acc = a[col][6];
        for c in (col + 1)..6 {
            acc -= a[col][c] * y[c];
        }
        y[col] = acc / a[col][col];
    }
    y
}

/// Largest per-joint change an IK step may apply.
const IK_STEP_CAP: f64 = 0.2;
/// Commanded translation per step stays in the linear regime.
const IK_ERR_POS_CAP: f64 = 0.08;
const IK_ERR_ROT_CAP: f64 = 0.4;

/// One damped-least-squares update toward `target`, clipped to joint
/// limits. The base stays frozen. The commanded twist is clamped and the
/// joint step rescaled uniformly so the update direction is preserved.
pub fn ik_step(model: &RobotModel, q: &Config, target: &Pose3, damping: f64) -> Config {
    let current = fk_unchecked(model, q).ee;
    let mut e = pose_error(&current, target);
    let p_norm = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
    let w_norm = (e[3] * e[3] + e[4] * e[4] + e[5] * e[5]).sqrt();
    let mut scale: f64 = 1.0;
    if p_norm > IK_ERR_POS_CAP {
        scale = scale.min(IK_ERR_POS_CAP / p_norm);
    }
    if w_norm > IK_ERR_ROT_CAP {
        scale = scale.min(IK_ERR_ROT_CAP / w_norm);
    }
    for v in &mut e {
        *v *= scale;
    }
    let jac = manip_jacobian(model, q);
    let y = solve_dls(&jac, &e, damping);
    let mut dq = [0.0; MANIP_DOF];
    let mut dq_max: f64 = 0.0;
    for (j, d) in dq.iter_mut().enumerate() {
        for r in 0..6 {
            *d += jac[r][j] * y[r];
        }
        dq_max = dq_max.max(d.abs());
    }
    let step_scale = if dq_max > IK_STEP_CAP {
        IK_STEP_CAP / dq_max
    } else {
        1.0
    };
    let mut m = q.manip();
    for j in 0..MANIP_DOF {
        m[j] += dq[j] * step_scale;
    }
    model.clamp_manip(&mut m);
    q.with_manip(m)
}

/// Iterate [`ik_step`] until the pose tolerance is met; `None` when the
/// iteration budget runs out.
pub fn solve_ik(
    model: &RobotModel,
    q0: &Config,
    target: &Pose3,
    params: &PlannerParams,
    max_iters: usize,
) -> Option<Config> {
    let mut q = *q0;
    for _ in 0..max_iters {
        let ee = fk_unchecked(model, &q).ee;
        let (dp, dr) = ee.error_to(target);
        if dp <= params.ik_pos_tol && dr <= params.ik_rot_tol {
            return Some(q);
        }
        q = ik_step(model, &q, target, params.dls_damping);
    }
    let ee = fk_unchecked(model, &q).ee;
    let (dp, dr) = ee.error_to(target);
    if dp <= params.ik_pos_tol && dr <= params.ik_rot_tol {
        Some(q)
    } else {
        None
    }
}

/// Built-in mobile-manipulator model: differential-drive base footprint,
/// prismatic torso, 7-DOF arm, parallel gripper reduced to a point frame.
pub fn default_model() -> RobotModel {
    let t = |x: f64, y: f64, z: f64| Pose3::from_translation(Vec3::new(x, y, z));
    let axis_x = Vec3::new(1.0, 0.0, 0.0);
    let axis_y = Vec3::new(0.0, 1.0, 0.0);
    let axis_z = Vec3::new(0.0, 0.0, 1.0);
    RobotModel {
        name: "fetchlike".into(),
        base_radius: 0.28,
        torso: JointSpec {
            offset: t(-0.05, 0.0, 0.35),
            axis: axis_z,
            limits: [0.0, 0.38],
        },
        arm: vec![
            JointSpec {
                offset: t(0.12, 0.0, 0.35),
                axis: axis_z,
                limits: [-1.60, 1.60],
            },
            JointSpec {
                offset: t(0.12, 0.0, 0.06),
                axis: axis_y,
                limits: [-1.22, 1.52],
            },
            JointSpec {
                offset: t(0.22, 0.0, 0.0),
                axis: axis_x,
                limits: [-3.0, 3.0],
            },
            JointSpec {
                offset: t(0.13, 0.0, 0.0),
                axis: axis_y,
                limits: [-2.25, 2.25],
            },
            JointSpec {
                offset: t(0.20, 0.0, 0.0),
                axis: axis_x,
                limits: [-3.0, 3.0],
            },
            JointSpec {
                offset: t(0.125, 0.0, 0.0),
                axis: axis_y,
                limits: [-2.18, 2.18],
            },
            JointSpec {
                offset: t(0.14, 0.0, 0.0),
                axis: axis_x,
                limits: [-3.0, 3.0],
            },
        ],
        ee_offset: t(0.17, 0.0, 0.0),
        spheres: vec![
            CollisionSphere { link: 0, center: Vec3::new(0.0, 0.0, 0.15), radius: 0.26 },
            CollisionSphere { link: 0, center: Vec3::new(0.0, 0.0, 0.32), radius: 0.24 },
            CollisionSphere { link: 1, center: Vec3::new(0.0, 0.0, 0.12), radius: 0.20 },
            CollisionSphere { link: 1, center: Vec3::new(0.0, 0.0, 0.45), radius: 0.17 },
            CollisionSphere { link: 1, center: Vec3::new(0.03, 0.0, 0.72), radius: 0.11 },
            CollisionSphere { link: 2, center: Vec3::new(0.06, 0.0, 0.03), radius: 0.07 },
            CollisionSphere { link: 3, center: Vec3::new(0.11, 0.0, 0.0), radius: 0.07 },
            CollisionSphere { link: 3, center: Vec3::new(0.20, 0.0, 0.0), radius: 0.065 },
            CollisionSphere { link: 4, center: Vec3::new(0.06, 0.0, 0.0), radius: 0.06 },
            CollisionSphere { link: 5, center: Vec3::new(0.10, 0.0, 0.0), radius: 0.055 },
            CollisionSphere { link: 5, center: Vec3::new(0.18, 0.0, 0.0), radius: 0.05 },
            CollisionSphere { link: 6, center: Vec3::new(0.06, 0.0, 0.0), radius: 0.05 },
            CollisionSphere { link: 7, center: Vec3::new(0.07, 0.0, 0.0), radius: 0.045 },
            CollisionSphere { link: 8, center: Vec3::new(0.06, 0.0, 0.0), radius: 0.045 },
            CollisionSphere { link: 8, center: Vec3::new(0.13, 0.0, 0.0), radius: 0.035 },
        ],
        stow: [0.0, 1.32, 1.40, -0.20, 1.72, 0.0, 1.66, 0.0],
    }
}
