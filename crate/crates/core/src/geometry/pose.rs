//! Rigid-body poses: unit quaternions, SE(3) composition, and the matrix
//! exponential/logarithm used by screw interpolation.
//!
//! The rotation log uses the principal branch (angle in [0, π]); at exactly
//! π the axis comes from the quaternion vector part, which is well defined
//! there up to a global sign shared by both half-turns.

use serde::{Deserialize, Serialize};

use super::Vec3;

const SMALL_ANGLE: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Quaternion
// ---------------------------------------------------------------------------

/// Unit quaternion (w, x, y, z).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const IDENTITY: Quat = Quat {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Quat {
        Quat { w, x, y, z }.normalized()
    }

    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Quat {
        let axis = axis.normalized();
        let (s, c) = (angle / 2.0).sin_cos();
        Quat {
            w: c,
            x: s * axis.x,
            y: s * axis.y,
            z: s * axis.z,
        }
    }

    pub fn from_rotation_z(angle: f64) -> Quat {
        let (s, c) = (angle / 2.0).sin_cos();
        Quat {
            w: c,
            x: 0.0,
            y: 0.0,
            z: s,
        }
    }

    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalized(self) -> Quat {
        let n = self.norm();
        Quat {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        }
    }

    pub fn conjugate(self) -> Quat {
        Quat {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn vector(self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    /// Rotation angle in [0, π].
    pub fn angle(self) -> f64 {
        2.0 * self.vector().norm().atan2(self.w.abs())
    }

    /// Angular distance to another rotation, in [0, π].
    pub fn angle_to(self, other: Quat) -> f64 {
        (other * self.conjugate()).angle()
    }

    pub fn rotate(self, v: Vec3) -> Vec3 {
        // q v q* via the expanded cross-product form
        let u = self.vector();
        let t = u.cross(v) * 2.0;
        v + t * self.w + u.cross(t)
    }

    pub fn is_unit(self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }
}

impl std::ops::Mul for Quat {
    type Output = Quat;
    fn mul(self, o: Quat) -> Quat {
        Quat {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }
}

/// Rotation exponential: axis-angle vector to quaternion.
pub fn so3_exp(w: Vec3) -> Quat {
    let theta = w.norm();
    if theta < SMALL_ANGLE {
        // sin(t/2)/t -> 1/2, cos(t/2) -> 1
        Quat {
            w: 1.0 - theta * theta / 8.0,
            x: w.x / 2.0,
            y: w.y / 2.0,
            z: w.z / 2.0,
        }
        .normalized()
    } else {
        Quat::from_axis_angle(w, theta)
    }
}

/// Rotation logarithm: quaternion to axis-angle vector, principal branch.
pub fn so3_log(q: Quat) -> Vec3 {
    let q = if q.w < 0.0 {
        Quat {
            w: -q.w,
            x: -q.x,
            y: -q.y,
            z: -q.z,
        }
    } else {
        q
    };
    let vn = q.vector().norm();
    if vn < SMALL_ANGLE {
        q.vector() * (2.0 / q.w)
    } else {
        let angle = 2.0 * vn.atan2(q.w);
        q.vector() * (angle / vn)
    }
}

// ---------------------------------------------------------------------------
// Pose
// ---------------------------------------------------------------------------

/// Rigid transform: rotation then translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose3 {
    pub position: Vec3,
    pub rotation: Quat,
}

impl Pose3 {
    pub const IDENTITY: Pose3 = Pose3 {
        position: Vec3::ZERO,
        rotation: Quat::IDENTITY,
    };

    pub fn new(position: Vec3, rotation: Quat) -> Pose3 {
        Pose3 {
            position,
            rotation: rotation.normalized(),
        }
    }

    pub fn from_translation(position: Vec3) -> Pose3 {
        Pose3 {
            position,
            rotation: Quat::IDENTITY,
        }
    }

    /// Planar base pose: position (x, y, 0), rotation about z.
    pub fn planar(x: f64, y: f64, yaw: f64) -> Pose3 {
        Pose3 {
            position: Vec3::new(x, y, 0.0),
            rotation: Quat::from_rotation_z(yaw),
        }
    }

    /// this ∘ other (apply `other` in this frame).
    pub fn compose(&self, other: &Pose3) -> Pose3 {
        Pose3 {
            position: self.position + self.rotation.rotate(other.position),
            rotation: self.rotation * other.rotation,
        }
    }

    pub fn inverse(&self) -> Pose3 {
        let inv_rot = self.rotation.conjugate();
        Pose3 {
            position: -inv_rot.rotate(self.position),
            rotation: inv_rot,
        }
    }

    pub fn transform_point(&self, p: Vec3) -> Vec3 {
        self.position + self.rotation.rotate(p)
    }

    /// Positional and angular distance to another pose.
    pub fn error_to(&self, other: &Pose3) -> (f64, f64) {
        (
            self.position.distance(other.position),
            self.rotation.angle_to(other.rotation),
        )
    }
}

/// se(3) twist: linear part `v`, angular part `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist {
    pub v: Vec3,
    pub w: Vec3,
}

impl Twist {
    pub fn scaled(&self, t: f64) -> Twist {
        Twist {
            v: self.v * t,
            w: self.w * t,
        }
    }
}

type Mat3 = [[f64; 3]; 3];

fn mat3_identity() -> Mat3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

fn hat(w: Vec3) -> Mat3 {
    [[0.0, -w.z, w.y], [w.z, 0.0, -w.x], [-w.y, w.x, 0.0]]
}

fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    r
}

fn mat3_apply(a: &Mat3, v: Vec3) -> Vec3 {
    Vec3::new(
        a[0][0] * v.x + a[0][1] * v.y + a[0][2] * v.z,
        a[1][0] * v.x + a[1][1] * v.y + a[1][2] * v.z,
        a[2][0] * v.x + a[2][1] * v.y + a[2][2] * v.z,
    )
}

fn mat3_combine(c0: f64, c1: f64, m1: &Mat3, c2: f64, m2: &Mat3) -> Mat3 {
    let id = mat3_identity();
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = c0 * id[i][j] + c1 * m1[i][j] + c2 * m2[i][j];
        }
    }
    r
}

/// SE(3) exponential: twist to pose.
pub fn se3_exp(xi: &Twist) -> Pose3 {
    let theta = xi.w.norm();
    let omega = hat(xi.w);
    let omega2 = mat3_mul(&omega, &omega);
    let (c1, c2) = if theta < SMALL_ANGLE {
        (0.5 - theta * theta / 24.0, 1.0 / 6.0 - theta * theta / 120.0)
    } else {
        (
            (1.0 - theta.cos()) / (theta * theta),
            (theta - theta.sin()) / (theta * theta * theta),
        )
    };
    let v_mat = mat3_combine(1.0, c1, &omega, c2, &omega2);
    Pose3 {
        position: mat3_apply(&v_mat, xi.v),
        rotation: so3_exp(xi.w),
    }
}

/// SE(3) logarithm: pose to twist, principal branch.
pub fn se3_log(pose: &Pose3) -> Twist {
    let w = so3_log(pose.rotation);
    let theta = w.norm();
    let omega = hat(w);
    let omega2 = mat3_mul(&omega, &omega);
    let c2 = if theta < SMALL_ANGLE {
        1.0 / 12.0 + theta * theta / 720.0
    } else {
        (1.0 - theta * theta.sin() / (2.0 * (1.0 - theta.cos()))) / (theta * theta)
    };
    let v_inv = mat3_combine(1.0, -0.5, &omega, c2, &omega2);
    Twist {
        v: mat3_apply(&v_inv, pose.position),
        w,
    }
}
