//! Store tensor field guiding shelf orientation.
//!
//! Every polygon edge contributes a basis tensor whose magnitude is the edge
//! length and whose orientation is the doubled edge angle. The field at a
//! point is the sum of basis tensors weighted by `exp(-d * distance)` to
//! their anchor points. A regular grid caches the aggregate for bilinear
//! interpolation during placement; the basis list is retained so the exact
//! analytic value stays available.

use serde::{Deserialize, Serialize};

use crate::geometry::{Polygon, Rect, Vec2};
use crate::{Error, Result};

/// Tensors with norm at or below this are treated as directionless.
pub const DEGENERACY_EPS: f64 = 1e-6;

/// Field contribution of a single polygon edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisTensor {
    /// Anchor point (edge start vertex).
    pub anchor: Vec2,
    /// Edge length.
    pub magnitude: f64,
    /// Edge direction angle in (−π, π].
    pub angle: f64,
}

impl BasisTensor {
    pub fn tensor(&self) -> SymTensor2 {
        let two_theta = 2.0 * self.angle;
        SymTensor2 {
            a: self.magnitude * two_theta.cos(),
            b: self.magnitude * two_theta.sin(),
        }
    }
}

/// 2×2 symmetric traceless tensor [[a, b], [b, −a]], stored by its two free
/// components so the tracelessness is exact by construction.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymTensor2 {
    pub a: f64,
    pub b: f64,
}

impl SymTensor2 {
    pub const ZERO: SymTensor2 = SymTensor2 { a: 0.0, b: 0.0 };

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.b, -self.a]]
    }

    pub fn norm(&self) -> f64 {
        self.a.hypot(self.b)
    }

    pub fn scaled(&self, s: f64) -> SymTensor2 {
        SymTensor2 {
            a: self.a * s,
            b: self.b * s,
        }
    }
}

impl std::ops::Add for SymTensor2 {
    type Output = SymTensor2;
    fn add(self, o: SymTensor2) -> SymTensor2 {
        SymTensor2 {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }
}

/// Direction of the eigenvector for the positive eigenvalue `+sqrt(a²+b²)`,
/// normalized to [0, π). Returns `None` for numerically directionless
/// tensors, which placement passes skip.
pub fn major_direction(t: &SymTensor2) -> Option<f64> {
    if t.norm() <= DEGENERACY_EPS {
        return None;
    }
    let psi = 0.5 * t.b.atan2(t.a);
    Some(psi.rem_euclid(std::f64::consts::PI))
}

/// Basis tensor of the polygon edge from `p` to `p_next`.
///
/// The edge angle is the full-quadrant arctangent of the edge direction;
/// because only the doubled angle enters the tensor, the direction sign of
/// the edge is irrelevant.
pub fn basis_from_edge(p: Vec2, p_next: Vec2) -> Result<BasisTensor> {
    let u = p_next - p;
    let len = u.norm();
    if len <= f64::EPSILON {
        return Err(Error::DegenerateEdge(0));
    }
    Ok(BasisTensor {
        anchor: p,
        magnitude: len,
        angle: u.y.atan2(u.x),
    })
}

/// Aggregated tensor field with decay `d` and a cached lattice at
/// resolution `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorField {
    pub bases: Vec<BasisTensor>,
    pub decay: f64,
    pub resolution: f64,
    pub rect: Rect,
    grid_nx: usize,
    grid_ny: usize,
    grid: Vec<SymTensor2>,
}

impl TensorField {
    /// Aggregate a basis set over `rect` on a lattice of spacing `h`.
    pub fn from_bases(
        bases: Vec<BasisTensor>,
        decay: f64,
        h: f64,
        rect: Rect,
    ) -> Result<TensorField> {
        if bases.is_empty() {
            return Err(Error::EmptyField);
        }
        if !(decay > 0.0) || !(h > 0.0) {
            return Err(Error::InvalidParameter(
                "decay and grid resolution must be positive".into(),
            ));
        }
        let span = rect.max - rect.min;
        if !(span.x > 0.0 && span.y > 0.0) {
            return Err(Error::InvalidParameter("empty field rectangle".into()));
        }
        let grid_nx = (span.x / h).ceil() as usize + 1;
        let grid_ny = (span.y / h).ceil() as usize + 1;
        let mut field = TensorField {
            bases,
            decay,
            resolution: h,
            rect,
            grid_nx,
            grid_ny,
            grid: Vec::with_capacity(grid_nx * grid_ny),
        };
        for j in 0..grid_ny {
            for i in 0..grid_nx {
                field.grid.push(field.eval_analytic(field.lattice_point(i, j)));
            }
        }
        Ok(field)
    }

    pub fn lattice_point(&self, i: usize, j: usize) -> Vec2 {
        self.rect.min + Vec2::new(i as f64 * self.resolution, j as f64 * self.resolution)
    }

    pub fn lattice_dims(&self) -> (usize, usize) {
        (self.grid_nx, self.grid_ny)
    }

    pub fn lattice_tensor(&self, i: usize, j: usize) -> SymTensor2 {
        self.grid[j * self.grid_nx + i]
    }

    /// Exact weighted sum over the basis set.
    pub fn eval_analytic(&self, p: Vec2) -> SymTensor2 {
        let mut acc = SymTensor2::ZERO;
        for basis in &self.bases {
            let w = (-self.decay * p.distance(basis.anchor)).exp();
            acc = acc + basis.tensor().scaled(w);
        }
        acc
    }

    /// Bilinear interpolation of the cached lattice.
    pub fn eval(&self, p: Vec2) -> Result<SymTensor2> {
        let rel = p - self.rect.min;
        let fx = rel.x / self.resolution;
        let fy = rel.y / self.resolution;
        if fx < -1e-9
            || fy < -1e-9
            || fx > (self.grid_nx - 1) as f64 + 1e-9
            || fy > (self.grid_ny - 1) as f64 + 1e-9
        {
            return Err(Error::OutOfBounds(p.x, p.y));
        }
        let i = (fx.floor() as usize).min(self.grid_nx - 2);
        let j = (fy.floor() as usize).min(self.grid_ny - 2);
        let tx = (fx - i as f64).clamp(0.0, 1.0);
        let ty = (fy - j as f64).clamp(0.0, 1.0);
        let t00 = self.lattice_tensor(i, j);
        let t10 = self.lattice_tensor(i + 1, j);
        let t01 = self.lattice_tensor(i, j + 1);
        let t11 = self.lattice_tensor(i + 1, j + 1);
        let lerp = |lo: f64, hi: f64, t: f64| lo + (hi - lo) * t;
        Ok(SymTensor2 {
            a: lerp(
                lerp(t00.a, t10.a, tx),
                lerp(t01.a, t11.a, tx),
                ty,
            ),
            b: lerp(
                lerp(t00.b, t10.b, tx),
                lerp(t01.b, t11.b, tx),
                ty,
            ),
        })
    }
}

/// Build the field from resampled polygons (store walls plus fixture
/// footprints), aggregating one basis tensor per polygon edge.
pub fn build_field(
    polygons: &[Polygon],
    decay: f64,
    h: f64,
    rect: Rect,
) -> Result<TensorField> {
    let mut bases = Vec::new();
    for poly in polygons {
        for (a, b) in poly.edges() {
            bases.push(basis_from_edge(a, b)?);
        }
    }
    TensorField::from_bases(bases, decay, h, rect)
}
