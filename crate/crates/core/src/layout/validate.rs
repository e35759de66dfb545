//! Layout validity: overlaps, containment, and passage connectivity.
//!
//! "Navigable" is made testable as a flood fill: on a 0.25 m lattice, a cell
//! is free when a disc of radius `passage_width / 2` centered there clears
//! all fixtures and walls. The free component reachable from the door must
//! touch every fixture's front face.

use serde::{Deserialize, Serialize};

use crate::geometry::{obb_inside_polygon, obb_overlap, point_segment_distance, Obb2, Vec2};

use super::{template_by_id, FixturePlacement, FixtureTemplate, Layout, LayoutParams, StoreSpec};

/// Flood-fill lattice spacing (meters).
pub const PASSAGE_CELL: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Violation {
    /// Two fixture footprints intersect.
    Overlap { a: String, b: String },
    /// Footprint leaves the wall polygon.
    OutOfBounds { id: String },
    /// Front faces (or the door) cut off from the door's passage component.
    Disconnected { unreachable: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Check pairwise overlap, wall containment, and passage connectivity.
/// Violations are reported, never thrown.
pub fn validate_layout(
    layout: &Layout,
    templates: &[FixtureTemplate],
    params: &LayoutParams,
) -> LayoutReport {
    let mut violations = Vec::new();
    let n = layout.placements.len();

    let footprints: Vec<Obb2> = layout
        .placements
        .iter()
        .map(|p| {
            p.footprint(template_by_id(templates, &p.template_id).expect("template resolves"))
        })
        .collect();

    for i in 0..n {
        for j in (i + 1)..n {
            if obb_overlap(&footprints[i], &footprints[j]) {
                violations.push(Violation::Overlap {
                    a: layout.placements[i].id.clone(),
                    b: layout.placements[j].id.clone(),
                });
            }
        }
    }

    for (p, fp) in layout.placements.iter().zip(&footprints) {
        if !obb_inside_polygon(fp, &layout.store.walls, 0.0) {
            violations.push(Violation::OutOfBounds { id: p.id.clone() });
        }
    }

    if !layout.placements.is_empty() {
        let mut grid = PassageGrid::new(&layout.store, params.passage_width);
        for fp in &footprints {
            grid.add_footprint(fp);
        }
        let unreachable = grid.unreachable_targets(&layout.store, templates, &layout.placements);
        if !unreachable.is_empty() {
            violations.push(Violation::Disconnected { unreachable });
        }
    }

    LayoutReport {
        ok: violations.is_empty(),
        violations,
    }
}

// ---------------------------------------------------------------------------
// Passage grid
// ---------------------------------------------------------------------------

/// Incrementally maintained clearance lattice for connectivity checks.
///
/// `wall_clear` is fixed; `fixture_clear` holds the minimum signed distance
/// to any added footprint and supports rollback so placement passes can test
/// candidates cheaply.
#[derive(Debug, Clone)]
pub struct PassageGrid {
    origin: Vec2,
    nx: usize,
    ny: usize,
    radius: f64,
    wall_clear: Vec<f64>,
    fixture_clear: Vec<f64>,
}

/// Saved cell values for undoing a tentative footprint.
pub struct GridUndo(Vec<(usize, f64)>);

impl PassageGrid {
    pub fn new(store: &StoreSpec, passage_width: f64) -> PassageGrid {
        let bounds = store.bounds();
        let nx = (bounds.width() / PASSAGE_CELL).ceil() as usize;
        let ny = (bounds.height() / PASSAGE_CELL).ceil() as usize;
        let origin = bounds.min + Vec2::new(PASSAGE_CELL / 2.0, PASSAGE_CELL / 2.0);
        let mut wall_clear = vec![f64::NEG_INFINITY; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let p = origin + Vec2::new(i as f64, j as f64) * PASSAGE_CELL;
                if store.walls.contains(p) {
                    wall_clear[j * nx + i] = store.walls.boundary_distance(p);
                }
            }
        }
        PassageGrid {
            origin,
            nx,
            ny,
            radius: passage_width / 2.0,
            wall_clear,
            fixture_clear: vec![f64::INFINITY; nx * ny],
        }
    }

    fn cell_point(&self, i: usize, j: usize) -> Vec2 {
        self.origin + Vec2::new(i as f64, j as f64) * PASSAGE_CELL
    }

    fn index_range(&self, lo: Vec2, hi: Vec2) -> (usize, usize, usize, usize) {
        let to_i = |x: f64| ((x - self.origin.x) / PASSAGE_CELL).floor();
        let to_j = |y: f64| ((y - self.origin.y) / PASSAGE_CELL).floor();
        let i0 = to_i(lo.x).max(0.0) as usize;
        let j0 = to_j(lo.y).max(0.0) as usize;
        let i1 = (to_i(hi.x).max(0.0) as usize + 1).min(self.nx.saturating_sub(1));
        let j1 = (to_j(hi.y).max(0.0) as usize + 1).min(self.ny.saturating_sub(1));
        (i0, j0, i1, j1)
    }

    /// Lower `fixture_clear` around a footprint; returns undo state.
    pub fn add_footprint(&mut self, fp: &Obb2) -> GridUndo {
        let reach = fp.half_extents.norm() + self.radius + 2.0 * PASSAGE_CELL;
        let lo = fp.center - Vec2::new(reach, reach);
        let hi = fp.center + Vec2::new(reach, reach);
        let (i0, j0, i1, j1) = self.index_range(lo, hi);
        let mut undo = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                let idx = j * self.nx + i;
                let d = fp.signed_distance(self.cell_point(i, j));
                if d < self.fixture_clear[idx] {
                    undo.push((idx, self.fixture_clear[idx]));
                    self.fixture_clear[idx] = d;
                }
            }
        }
        GridUndo(undo)
    }

    pub fn rollback(&mut self, undo: GridUndo) {
        for (idx, v) in undo.0.into_iter().rev() {
            self.fixture_clear[idx] = v;
        }
    }

    fn is_free(&self, idx: usize) -> bool {
        self.wall_clear[idx] >= self.radius && self.fixture_clear[idx] >= self.radius
    }

    /// Flood fill from the door cells; returns the reached-cell mask.
    fn flood_from_door(&self, store: &StoreSpec) -> Vec<bool> {
        let mut reached = vec![false; self.nx * self.ny];
        let mut queue = std::collections::VecDeque::new();
        let touch = self.radius + PASSAGE_CELL;

        let mut seed_cells = Vec::new();
        for j in 0..self.ny {
            for i in 0..self.nx {
                let idx = j * self.nx + i;
                if !self.is_free(idx) {
                    continue;
                }
                let p = self.cell_point(i, j);
                if store
                    .doors
                    .iter()
                    .any(|d| point_segment_distance(p, d.a, d.b) <= touch)
                {
                    seed_cells.push(idx);
                }
            }
        }
        if store.doors.is_empty() {
            // no door declared: start from every free cell of the largest
            // component by seeding the first free cell of each component
            // and keeping the biggest flood
            return self.largest_component();
        }
        for idx in seed_cells {
            if !reached[idx] {
                reached[idx] = true;
                queue.push_back(idx);
            }
        }
        self.flood(&mut reached, &mut queue);
        reached
    }

    fn flood(&self, reached: &mut [bool], queue: &mut std::collections::VecDeque<usize>) {
        while let Some(idx) = queue.pop_front() {
            let (i, j) = (idx % self.nx, idx / self.nx);
            let push = |ni: usize, nj: usize, reached: &mut [bool], queue: &mut std::collections::VecDeque<usize>| {
                let nidx = nj * self.nx + ni;
                if !reached[nidx] && self.is_free(nidx) {
                    reached[nidx] = true;
                    queue.push_back(nidx);
                }
            };
            if i > 0 {
                push(i - 1, j, reached, queue);
            }
            if i + 1 < self.nx {
                push(i + 1, j, reached, queue);
            }
            if j > 0 {
                push(i, j - 1, reached, queue);
            }
            if j + 1 < self.ny {
                push(i, j + 1, reached, queue);
            }
        }
    }

    fn largest_component(&self) -> Vec<bool> {
        let mut best: Vec<bool> = vec![false; self.nx * self.ny];
        let mut best_count = 0usize;
        let mut seen = vec![false; self.nx * self.ny];
        for start in 0..self.nx * self.ny {
            if seen[start] || !self.is_free(start) {
                continue;
            }
            let mut mask = vec![false; self.nx * self.ny];
            let mut queue = std::collections::VecDeque::new();
            mask[start] = true;
            queue.push_back(start);
            self.flood(&mut mask, &mut queue);
            let count = mask.iter().filter(|&&m| m).count();
            for (s, m) in seen.iter_mut().zip(&mask) {
                *s |= *m;
            }
            if count > best_count {
                best_count = count;
                best = mask;
            }
        }
        best
    }

    /// Ids of placements whose front faces the door component cannot touch
    /// (plus `"door"` when no free cell touches the door at all).
    pub fn unreachable_targets(
        &self,
        store: &StoreSpec,
        templates: &[FixtureTemplate],
        placements: &[FixturePlacement],
    ) -> Vec<String> {
        let reached = self.flood_from_door(store);
        let touch = self.radius + PASSAGE_CELL;
        let mut unreachable = Vec::new();

        if !store.doors.is_empty() && !reached.iter().any(|&r| r) {
            unreachable.push("door".to_string());
        }

        for p in placements {
            let template = template_by_id(templates, &p.template_id).expect("template resolves");
            let segments = p.front_segments(template);
            let mut ok = false;
            'seg: for (a, b) in &segments {
                let lo = Vec2::new(a.x.min(b.x) - touch, a.y.min(b.y) - touch);
                let hi = Vec2::new(a.x.max(b.x) + touch, a.y.max(b.y) + touch);
                let (i0, j0, i1, j1) = self.index_range(lo, hi);
                for j in j0..=j1 {
                    for i in i0..=i1 {
                        let idx = j * self.nx + i;
                        if reached[idx]
                            && point_segment_distance(self.cell_point(i, j), *a, *b) <= touch
                        {
                            ok = true;
                            break 'seg;
                        }
                    }
                }
            }
            if !ok {
                unreachable.push(p.id.clone());
            }
        }
        unreachable
    }

    /// True when the door component touches every placement front.
    pub fn targets_reachable(
        &self,
        store: &StoreSpec,
        templates: &[FixtureTemplate],
        placements: &[FixturePlacement],
    ) -> bool {
        self.unreachable_targets(store, templates, placements)
            .is_empty()
    }
}
