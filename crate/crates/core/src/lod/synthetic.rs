//! Synthetic high-resolution test meshes.
//!
//! Deliberately over-tessellated (around 10k triangles) stand-ins for the
//! unoptimized retail assets: a subdivided carton, a capped bottle
//! cylinder, an L-shaped jug profile, and a UV sphere. Product meshes for
//! the scene triangle budget come from [`product_mesh`].

use crate::catalog::MeshFamily;
use crate::geometry::Vec3;

use super::TriMesh;

struct Builder {
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
}

impl Builder {
    fn new() -> Builder {
        Builder {
            vertices: Vec::new(),
            triangles: Vec::new(),
        }
    }

    /// Tessellate the parallelogram `origin + u*du + v*dv` into an
    /// `nu x nv` grid of triangle pairs.
    fn grid(&mut self, origin: Vec3, du: Vec3, dv: Vec3, nu: usize, nv: usize) {
        let base = self.vertices.len() as u32;
        for j in 0..=nv {
            for i in 0..=nu {
                let p = origin
                    + du * (i as f64 / nu as f64)
                    + dv * (j as f64 / nv as f64);
                self.vertices.push(p);
            }
        }
        let stride = (nu + 1) as u32;
        for j in 0..nv as u32 {
            for i in 0..nu as u32 {
                let v00 = base + j * stride + i;
                let v10 = v00 + 1;
                let v01 = v00 + stride;
                let v11 = v01 + 1;
                self.triangles.push([v00, v10, v11]);
                self.triangles.push([v00, v11, v01]);
            }
        }
    }

    fn finish(self) -> TriMesh {
        TriMesh {
            vertices: self.vertices,
            triangles: self.triangles,
        }
    }
}

/// Axis-aligned box tessellated with `n x n` grids per face
/// (12n² triangles; n = 29 gives 10092).
pub fn box_mesh(dims: Vec3, n: usize) -> TriMesh {
    let mut b = Builder::new();
    let (x, y, z) = (dims.x, dims.y, dims.z);
    let o = Vec3::new(-x / 2.0, -y / 2.0, 0.0);
    let dx = Vec3::new(x, 0.0, 0.0);
    let dy = Vec3::new(0.0, y, 0.0);
    let dz = Vec3::new(0.0, 0.0, z);
    b.grid(o, dy, dx, n, n); // bottom
    b.grid(o + dz, dx, dy, n, n); // top
    b.grid(o, dx, dz, n, n); // front
    b.grid(o + dy, dz, dx, n, n); // back
    b.grid(o, dz, dy, n, n); // left
    b.grid(o + dx, dy, dz, n, n); // right
    b.finish()
}

/// Capped cylinder: `segments` around, `rings` along the height
/// (2·segments·rings side triangles plus 2·segments cap triangles).
pub fn cylinder_mesh(radius: f64, height: f64, segments: usize, rings: usize) -> TriMesh {
    let mut vertices = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    for r in 0..=rings {
        let z = height * r as f64 / rings as f64;
        for s in 0..segments {
            let ang = std::f64::consts::TAU * s as f64 / segments as f64;
            vertices.push(Vec3::new(radius * ang.cos(), radius * ang.sin(), z));
        }
    }
    let k = segments as u32;
    for r in 0..rings as u32 {
        for s in 0..k {
            let next = (s + 1) % k;
            let v00 = r * k + s;
            let v10 = r * k + next;
            let v01 = (r + 1) * k + s;
            let v11 = (r + 1) * k + next;
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    let bottom_center = vertices.len() as u32;
    vertices.push(Vec3::new(0.0, 0.0, 0.0));
    let top_center = vertices.len() as u32;
    vertices.push(Vec3::new(0.0, 0.0, height));
    let top_ring = rings as u32 * k;
    for s in 0..k {
        let next = (s + 1) % k;
        triangles.push([bottom_center, next, s]);
        triangles.push([top_center, top_ring + s, top_ring + next]);
    }
    TriMesh {
        vertices,
        triangles,
    }
}

/// L-shaped prism (jug-with-handle silhouette): outer dims `dims`, with the
/// top-front quadrant above `notch_z` and in front of `notch_y` removed.
pub fn l_shaped_mesh(dims: Vec3, notch_y: f64, notch_z: f64, n: usize) -> TriMesh {
    let (x, y, z) = (dims.x, dims.y, dims.z);
    let mut b = Builder::new();
    let half = |v: f64| v / 2.0;
    let x0 = -half(x);
    let y0 = -half(y);

    // cross-section in (y, z): full column [y0, y0+notch_y] up to z, plus a
    // foot [y0+notch_y, y0+y] up to notch_z
    let dx = Vec3::new(x, 0.0, 0.0);

    // bottom (full depth)
    b.grid(Vec3::new(x0, y0, 0.0), Vec3::new(0.0, y, 0.0), dx, n, n);
    // top of the tall column
    b.grid(
        Vec3::new(x0, y0, z),
        dx,
        Vec3::new(0.0, notch_y, 0.0),
        n,
        n,
    );
    // top of the foot
    b.grid(
        Vec3::new(x0, y0 + notch_y, notch_z),
        dx,
        Vec3::new(0.0, y - notch_y, 0.0),
        n,
        n,
    );
    // back wall (y = y0), full height
    b.grid(
        Vec3::new(x0, y0, 0.0),
        Vec3::new(0.0, 0.0, z),
        dx,
        n,
        n,
    );
    // front wall of the foot (y = y0 + y), up to notch_z
    b.grid(
        Vec3::new(x0, y0 + y, 0.0),
        dx,
        Vec3::new(0.0, 0.0, notch_z),
        n,
        n,
    );
    // step wall (y = y0 + notch_y), from notch_z up to z
    b.grid(
        Vec3::new(x0, y0 + notch_y, notch_z),
        dx,
        Vec3::new(0.0, 0.0, z - notch_z),
        n,
        n,
    );
    // two side walls (x = ±x/2): column part and foot part
    for (sx, flip) in [(x0, false), (x0 + x, true)] {
        let dy_col = Vec3::new(0.0, notch_y, 0.0);
        let dz_col = Vec3::new(0.0, 0.0, z);
        let dy_foot = Vec3::new(0.0, y - notch_y, 0.0);
        let dz_foot = Vec3::new(0.0, 0.0, notch_z);
        if flip {
            b.grid(Vec3::new(sx, y0, 0.0), dy_col, dz_col, n, n);
            b.grid(Vec3::new(sx, y0 + notch_y, 0.0), dy_foot, dz_foot, n, n);
        } else {
            b.grid(Vec3::new(sx, y0, 0.0), dz_col, dy_col, n, n);
            b.grid(Vec3::new(sx, y0 + notch_y, 0.0), dz_foot, dy_foot, n, n);
        }
    }
    b.finish()
}

/// UV sphere centered at the origin.
pub fn sphere_mesh(radius: f64, stacks: usize, slices: usize) -> TriMesh {
    let mut vertices = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    for i in 0..=stacks {
        let phi = std::f64::consts::PI * i as f64 / stacks as f64;
        for j in 0..slices {
            let theta = std::f64::consts::TAU * j as f64 / slices as f64;
            vertices.push(Vec3::new(
                radius * phi.sin() * theta.cos(),
                radius * phi.sin() * theta.sin(),
                radius * phi.cos(),
            ));
        }
    }
    let k = slices as u32;
    for i in 0..stacks as u32 {
        for j in 0..k {
            let next = (j + 1) % k;
            let v00 = i * k + j;
            let v10 = i * k + next;
            let v01 = (i + 1) * k + j;
            let v11 = (i + 1) * k + next;
            if i > 0 {
                triangles.push([v00, v10, v11]);
            }
            if i + 1 < stacks as u32 {
                triangles.push([v00, v11, v01]);
            }
        }
    }
    TriMesh {
        vertices,
        triangles,
    }
}

/// High-resolution product mesh of the catalog family, scaled to the
/// product's bounding dimensions (sitting on z = 0, centered in x/y).
pub fn product_mesh(family: MeshFamily, dims: Vec3) -> TriMesh {
    match family {
        MeshFamily::BoxLike => box_mesh(dims, 29),
        MeshFamily::Cylindrical => {
            cylinder_mesh(dims.x.min(dims.y) / 2.0, dims.z, 64, 76)
        }
        MeshFamily::LShaped => l_shaped_mesh(dims, dims.y * 0.45, dims.z * 0.55, 22),
    }
}
