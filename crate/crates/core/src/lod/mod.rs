//! Mesh simplification candidates and level-of-detail selection.
//!
//! Decimation candidates (vertex clustering at several cell sizes, box and
//! cylinder fits) are scored by point-sampled Chamfer distance against the
//! original; the Pareto front over (Chamfer, triangle count) is extracted
//! and the winner minimizes the L1 sum of the two relative scores
//! (distance normalized by the worst candidate, triangles by the original).
//! Externally remeshed candidates can be injected and are scored the same
//! way.

mod kdtree;
pub mod obj;
pub mod synthetic;

pub use kdtree::KdTree;

use serde::{Deserialize, Serialize};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::Vec3;
use crate::rng::substream;
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Mesh
// ---------------------------------------------------------------------------

/// Indexed triangle mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
}

impl TriMesh {
    pub fn tri_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle_area(&self, tri: [u32; 3]) -> f64 {
        let a = self.vertices[tri[0] as usize];
        let b = self.vertices[tri[1] as usize];
        let c = self.vertices[tri[2] as usize];
        (b - a).cross(c - a).norm() / 2.0
    }

    pub fn surface_area(&self) -> f64 {
        self.triangles.iter().map(|t| self.triangle_area(*t)).sum()
    }

    pub fn bounding_box(&self) -> (Vec3, Vec3) {
        let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Vec3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            lo.z = lo.z.min(v.z);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
            hi.z = hi.z.max(v.z);
        }
        (lo, hi)
    }

    pub fn scaled(&self, s: f64) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|v| *v * s).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Index bounds, finiteness, and the degenerate-triangle budget (at most
    /// 1% of faces with near-zero area).
    pub fn validate(&self) -> Result<()> {
        if self.triangles.is_empty() || self.vertices.is_empty() {
            return Err(Error::EmptyMesh);
        }
        let n = self.vertices.len() as u32;
        for t in &self.triangles {
            if t.iter().any(|&i| i >= n) {
                return Err(Error::InvalidParameter(format!(
                    "triangle index out of range: {t:?}"
                )));
            }
        }
        if self.vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("mesh vertex".into()));
        }
        let degenerate = self
            .triangles
            .iter()
            .filter(|t| self.triangle_area(**t) < 1e-14)
            .count();
        if degenerate * 100 > self.triangles.len() {
            return Err(Error::InvalidParameter(format!(
                "{degenerate} of {} triangles are degenerate",
                self.triangles.len()
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Sampling and Chamfer distance
// ---------------------------------------------------------------------------

/// Draw `n` surface points, triangle-area-proportionally, uniform within
/// each triangle by the square-root barycentric trick.
pub fn sample_surface_points(mesh: &TriMesh, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec3>> {
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    let mut cumulative = Vec::with_capacity(mesh.triangles.len());
    let mut total = 0.0;
    for t in &mesh.triangles {
        total += mesh.triangle_area(*t);
        cumulative.push(total);
    }
    if total <= 0.0 {
        return Err(Error::EmptyMesh);
    }
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let u = rng.random::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c < u).min(cumulative.len() - 1);
        let [i, j, k] = mesh.triangles[idx];
        let (a, b, c) = (
            mesh.vertices[i as usize],
            mesh.vertices[j as usize],
            mesh.vertices[k as usize],
        );
        let r1: f64 = rng.random();
        let r2: f64 = rng.random();
        let s = r1.sqrt();
        let (wa, wb, wc) = (1.0 - s, s * (1.0 - r2), s * r2);
        points.push(a * wa + b * wb + c * wc);
    }
    Ok(points)
}

/// Symmetric Chamfer distance: mean nearest-neighbor distance from `a` to
/// `b` plus the mean from `b` to `a` (un-squared).
pub fn chamfer_distance(a: &[Vec3], b: &[Vec3]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter("empty point set".into()));
    }
    let tree_b = KdTree::build(b);
    let tree_a = KdTree::build(a);
    let ab: f64 = a.iter().map(|p| tree_b.nearest_distance(*p)).sum::<f64>() / a.len() as f64;
    let ba: f64 = b.iter().map(|p| tree_a.nearest_distance(*p)).sum::<f64>() / b.len() as f64;
    Ok(ab + ba)
}

// ---------------------------------------------------------------------------
// Decimation and primitive fits
// ---------------------------------------------------------------------------

/// Vertex clustering: snap vertices to a `cell`-sized grid, replace each
/// cluster by its mean position, drop collapsed and duplicate triangles.
pub fn decimate_cluster(mesh: &TriMesh, cell: f64) -> Result<TriMesh> {
    if !(cell > 0.0) {
        return Err(Error::InvalidParameter("cell size must be positive".into()));
    }
    let key = |v: Vec3| {
        (
            (v.x / cell).floor() as i64,
            (v.y / cell).floor() as i64,
            (v.z / cell).floor() as i64,
        )
    };
    // first-seen order keeps the output deterministic
    let mut cluster_of: std::collections::HashMap<(i64, i64, i64), u32> =
        std::collections::HashMap::new();
    let mut sums: Vec<(Vec3, usize)> = Vec::new();
    let mut remap = Vec::with_capacity(mesh.vertices.len());
    for &v in &mesh.vertices {
        let k = key(v);
        let idx = *cluster_of.entry(k).or_insert_with(|| {
            sums.push((Vec3::ZERO, 0));
            (sums.len() - 1) as u32
        });
        sums[idx as usize].0 = sums[idx as usize].0 + v;
        sums[idx as usize].1 += 1;
        remap.push(idx);
    }
    let vertices: Vec<Vec3> = sums
        .iter()
        .map(|(sum, count)| *sum * (1.0 / *count as f64))
        .collect();

    let mut seen = std::collections::HashSet::new();
    let mut triangles = Vec::new();
    for t in &mesh.triangles {
        let mapped = [
            remap[t[0] as usize],
            remap[t[1] as usize],
            remap[t[2] as usize],
        ];
        if mapped[0] == mapped[1] || mapped[1] == mapped[2] || mapped[0] == mapped[2] {
            continue;
        }
        let mut sorted = mapped;
        sorted.sort_unstable();
        if !seen.insert(sorted) {
            continue;
        }
        let a = vertices[mapped[0] as usize];
        let b = vertices[mapped[1] as usize];
        let c = vertices[mapped[2] as usize];
        if (b - a).cross(c - a).norm() / 2.0 < 1e-14 {
            continue;
        }
        triangles.push(mapped);
    }
    Ok(TriMesh {
        vertices,
        triangles,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimitiveKind {
    Box,
    Cylinder,
}

/// Shape-specific approximation: the axis-aligned bounding box (12
/// triangles) or a vertical 16-gon cylinder through the footprint centroid
/// covering the radial and z extents (64 triangles).
pub fn fit_primitive(mesh: &TriMesh, kind: PrimitiveKind) -> Result<TriMesh> {
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let (lo, hi) = mesh.bounding_box();
    match kind {
        PrimitiveKind::Box => {
            let corners = [
                Vec3::new(lo.x, lo.y, lo.z),
                Vec3::new(hi.x, lo.y, lo.z),
                Vec3::new(hi.x, hi.y, lo.z),
                Vec3::new(lo.x, hi.y, lo.z),
                Vec3::new(lo.x, lo.y, hi.z),
                Vec3::new(hi.x, lo.y, hi.z),
                Vec3::new(hi.x, hi.y, hi.z),
                Vec3::new(lo.x, hi.y, hi.z),
            ];
            let quads = [
                [0, 3, 2, 1], // bottom
                [4, 5, 6, 7], // top
                [0, 1, 5, 4],
                [1, 2, 6, 5],
                [2, 3, 7, 6],
                [3, 0, 4, 7],
            ];
            let mut triangles = Vec::with_capacity(12);
            for q in quads {
                triangles.push([q[0], q[1], q[2]]);
                triangles.push([q[0], q[2], q[3]]);
            }
            Ok(TriMesh {
                vertices: corners.to_vec(),
                triangles,
            })
        }
        PrimitiveKind::Cylinder => {
            const SEGMENTS: usize = 16;
            let centroid = {
                let mut c = Vec3::ZERO;
                for v in &mesh.vertices {
                    c = c + *v;
                }
                c * (1.0 / mesh.vertices.len() as f64)
            };
            let radius = mesh
                .vertices
                .iter()
                .map(|v| (v.xy() - centroid.xy()).norm())
                .fold(0.0, f64::max);
            let mut vertices = Vec::with_capacity(2 * SEGMENTS + 2);
            for &z in &[lo.z, hi.z] {
                for s in 0..SEGMENTS {
                    let ang = std::f64::consts::TAU * s as f64 / SEGMENTS as f64;
                    vertices.push(Vec3::new(
                        centroid.x + radius * ang.cos(),
                        centroid.y + radius * ang.sin(),
                        z,
                    ));
                }
            }
            let bottom_center = vertices.len() as u32;
            vertices.push(Vec3::new(centroid.x, centroid.y, lo.z));
            let top_center = vertices.len() as u32;
            vertices.push(Vec3::new(centroid.x, centroid.y, hi.z));

            let mut triangles = Vec::with_capacity(4 * SEGMENTS);
            let k = SEGMENTS as u32;
            for s in 0..k {
                let next = (s + 1) % k;
                // side
                triangles.push([s, next, k + s]);
                triangles.push([next, k + next, k + s]);
                // caps
                triangles.push([bottom_center, next, s]);
                triangles.push([top_center, k + s, k + next]);
            }
            Ok(TriMesh {
                vertices,
                triangles,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Candidates, Pareto front, selection
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LodMethod {
    Original,
    /// Vertex clustering; `cell` is the grid size as a fraction of the
    /// bounding-box diagonal, so the tag is scale-free.
    Cluster { cell: f64 },
    BoxFit,
    CylinderFit,
    /// Externally produced remesh (e.g. QuadriFlow output), scored like the
    /// built-in generators.
    External { label: String },
}

impl LodMethod {
    pub fn tag(&self) -> String {
        match self {
            LodMethod::Original => "original".into(),
            LodMethod::Cluster { cell } => format!("cluster:{cell:.4}"),
            LodMethod::BoxFit => "box_fit".into(),
            LodMethod::CylinderFit => "cylinder_fit".into(),
            LodMethod::External { label } => format!("external:{label}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LodCandidate {
    pub mesh: TriMesh,
    pub method: LodMethod,
    pub tri_count: usize,
    pub chamfer: f64,
}

/// Relative quality coordinates per candidate set: distance normalized by
/// the worst candidate, triangles by the original count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LodScore {
    pub rel_dist: f64,
    pub rel_tris: f64,
}

impl LodScore {
    pub fn l1(&self) -> f64 {
        self.rel_dist + self.rel_tris
    }
}

fn dominates(a: &LodCandidate, b: &LodCandidate) -> bool {
    a.chamfer <= b.chamfer
        && a.tri_count <= b.tri_count
        && (a.chamfer < b.chamfer || a.tri_count < b.tri_count)
}

/// Indices of candidates not dominated in (chamfer, tri_count), both
/// minimized; ties kept.
pub fn pareto_front(candidates: &[LodCandidate]) -> Vec<usize> {
    (0..candidates.len())
        .filter(|&i| {
            candidates
                .iter()
                .enumerate()
                .all(|(j, other)| j == i || !dominates(other, &candidates[i]))
        })
        .collect()
}

/// Relative scores for every candidate in the set.
pub fn scores(candidates: &[LodCandidate]) -> Result<Vec<LodScore>> {
    let original_tris = candidates
        .iter()
        .find(|c| c.method == LodMethod::Original)
        .map(|c| c.tri_count)
        .ok_or_else(|| Error::InvalidParameter("candidate set lacks the original".into()))?;
    if original_tris == 0 {
        return Err(Error::EmptyMesh);
    }
    let max_chamfer = candidates.iter().map(|c| c.chamfer).fold(0.0, f64::max);
    Ok(candidates
        .iter()
        .map(|c| LodScore {
            rel_dist: if max_chamfer > 0.0 {
                c.chamfer / max_chamfer
            } else {
                0.0
            },
            rel_tris: c.tri_count as f64 / original_tris as f64,
        })
        .collect())
}

/// Pick the Pareto-front candidate minimizing `rel_dist + rel_tris`.
/// Deterministic tie-break: smaller triangle count, then method tag.
pub fn select_lod(candidates: &[LodCandidate]) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no candidates".into()));
    }
    let all_scores = scores(candidates)?;
    let front = pareto_front(candidates);
    let best = front
        .into_iter()
        .min_by(|&i, &j| {
            all_scores[i]
                .l1()
                .partial_cmp(&all_scores[j].l1())
                .expect("finite scores")
                .then(candidates[i].tri_count.cmp(&candidates[j].tri_count))
                .then(candidates[i].method.tag().cmp(&candidates[j].method.tag()))
        })
        .expect("front is non-empty");
    Ok(best)
}

// ---------------------------------------------------------------------------
// Candidate generation pipeline
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LodParams {
    /// Surface samples per mesh for Chamfer estimation.
    pub sample_count: usize,
    /// Clustering cell sizes as fractions of the bounding-box diagonal.
    pub cluster_cells: Vec<f64>,
    pub seed: u64,
}

impl Default for LodParams {
    fn default() -> Self {
        LodParams {
            sample_count: 8192,
            cluster_cells: vec![0.02, 0.05, 0.10, 0.20],
            seed: 0,
        }
    }
}

/// Build and score the candidate set for one mesh: the original, vertex
/// clusterings at the configured cell sizes, and the two primitive fits.
/// Degenerate candidates (empty after decimation) are excluded. Extra
/// externally produced meshes are scored alongside.
pub fn generate_candidates(
    mesh: &TriMesh,
    external: &[(String, TriMesh)],
    params: &LodParams,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<LodCandidate>> {
    mesh.validate()?;
    let reference = sample_surface_points(mesh, params.sample_count, rng)?;
    let (lo, hi) = mesh.bounding_box();
    let diag = (hi - lo).norm();

    let mut candidates = vec![LodCandidate {
        mesh: mesh.clone(),
        method: LodMethod::Original,
        tri_count: mesh.tri_count(),
        chamfer: 0.0,
    }];

    let mut push_scored = |m: TriMesh, method: LodMethod, rng: &mut ChaCha8Rng| -> Result<()> {
        if m.is_empty() {
            return Ok(()); // degenerate candidate: excluded before scoring
        }
        let samples = sample_surface_points(&m, params.sample_count, rng)?;
        let chamfer = chamfer_distance(&samples, &reference)?;
        candidates.push(LodCandidate {
            tri_count: m.tri_count(),
            mesh: m,
            method,
            chamfer,
        });
        Ok(())
    };

    for &rel in &params.cluster_cells {
        let m = decimate_cluster(mesh, rel * diag)?;
        push_scored(m, LodMethod::Cluster { cell: rel }, rng)?;
    }
    push_scored(fit_primitive(mesh, PrimitiveKind::Box)?, LodMethod::BoxFit, rng)?;
    push_scored(
        fit_primitive(mesh, PrimitiveKind::Cylinder)?,
        LodMethod::CylinderFit,
        rng,
    )?;
    for (label, m) in external {
        push_scored(
            m.clone(),
            LodMethod::External {
                label: label.clone(),
            },
            rng,
        )?;
    }
    Ok(candidates)
}

/// Per-asset record of the optimization outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LodRecord {
    pub asset_id: String,
    pub method: String,
    pub tri_before: usize,
    pub tri_after: usize,
    pub chamfer: f64,
    pub rel_dist: f64,
    pub rel_tris: f64,
}

/// Full per-asset pipeline: candidates, selection, report record.
pub fn optimize_mesh(
    asset_id: &str,
    mesh: &TriMesh,
    external: &[(String, TriMesh)],
    params: &LodParams,
) -> Result<(LodCandidate, LodRecord)> {
    let mut rng = substream(params.seed, &format!("lod/{asset_id}"));
    let candidates = generate_candidates(mesh, external, params, &mut rng)?;
    let idx = select_lod(&candidates)?;
    let all_scores = scores(&candidates)?;
    let chosen = candidates[idx].clone();
    let record = LodRecord {
        asset_id: asset_id.to_string(),
        method: chosen.method.tag(),
        tri_before: mesh.tri_count(),
        tri_after: chosen.tri_count,
        chamfer: chosen.chamfer,
        rel_dist: all_scores[idx].rel_dist,
        rel_tris: all_scores[idx].rel_tris,
    };
    Ok((chosen, record))
}
