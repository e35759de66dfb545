//! Exact nearest-neighbor queries over 3D point sets.
//!
//! Median-split k-d tree, cycling the axis by depth. Queries prune subtrees
//! by the splitting-plane distance, so results are exact.

use crate::geometry::Vec3;

pub struct KdTree {
    /// Points reordered so each subtree occupies a contiguous range.
    pts: Vec<Vec3>,
}

impl KdTree {
    pub fn build(points: &[Vec3]) -> KdTree {
        let mut pts = points.to_vec();
        if !pts.is_empty() {
            build_range(&mut pts, 0);
        }
        KdTree { pts }
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    /// Distance from `query` to its nearest point in the set.
    pub fn nearest_distance(&self, query: Vec3) -> f64 {
        debug_assert!(!self.pts.is_empty());
        let mut best = f64::INFINITY;
        nearest_range(&self.pts, 0, query, &mut best);
        best.sqrt()
    }
}

fn axis_value(p: Vec3, axis: usize) -> f64 {
    match axis {
        0 => p.x,
        1 => p.y,
        _ => p.z,
    }
}

fn build_range(pts: &mut [Vec3], depth: usize) {
    let n = pts.len();
    if n <= 1 {
        return;
    }
    let axis = depth % 3;
    let mid = n / 2;
    pts.select_nth_unstable_by(mid, |a, b| {
        axis_value(*a, axis)
            .partial_cmp(&axis_value(*b, axis))
            .expect("finite coordinates")
    });
    let (lo, rest) = pts.split_at_mut(mid);
    build_range(lo, depth + 1);
    build_range(&mut rest[1..], depth + 1);
}

fn nearest_range(pts: &[Vec3], depth: usize, query: Vec3, best_sq: &mut f64) {
    let n = pts.len();
    if n == 0 {
        return;
    }
    let axis = depth % 3;
    let mid = n / 2;
    let pivot = pts[mid];
    let d_sq = (pivot - query).norm_squared();
    if d_sq < *best_sq {
        *best_sq = d_sq;
    }
    let delta = axis_value(query, axis) - axis_value(pivot, axis);
    let (near, far) = if delta < 0.0 {
        (&pts[..mid], &pts[mid + 1..])
    } else {
        (&pts[mid + 1..], &pts[..mid])
    };
    nearest_range(near, depth + 1, query, best_sq);
    if delta * delta < *best_sq {
        nearest_range(far, depth + 1, query, best_sq);
    }
}
